// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "aford/chain.hpp"
#include "aford/ford.hpp"
#include "aford/moments.hpp"
#include "aford/stats.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace aford;

namespace {

const std::vector<std::string> kFullGrid{"0", "1/8", "1/4", "1/2", "3/4", "1"};
const std::vector<std::string> kChainGrid{"0", "1/4", "1/2", "1"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = secs < budget_s;
  const bool pass = o.pass && in_budget;
  if (!pass) ++failures;
  std::printf("%s [%2d] %s: %s; %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs, budget_s, in_budget ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Falling factorial (N)_m / N^m: the chance that m draws with replacement are distinct.
double distinct_fraction(int n, int m) {
  double p = 1.0;
  for (int i = 0; i < m; ++i) p *= static_cast<double>(n - i) / n;
  return p;
}

}  // namespace

int main() {
  criterion(1, "universal low moments", 1, [] {
    Outcome o;
    int checked = 0;
    for (const auto& a : kFullGrid) {
      const auto alpha = AlphaParam::parse(a);
      o.pass = o.pass && moment(alpha, {1, 0, 0}) == Rational(1, 3) && moment(alpha, {2, 0, 0}) == Rational(1, 5) &&
               moment(alpha, {1, 1, 0}) == Rational(1, 15);
      checked += 3;
    }
    o.detail = std::to_string(checked) + " exact equalities over alpha in {0,1/8,1/4,1/2,3/4,1}";
    return o;
  });

  criterion(2, "degree 3-5 moment formulas", 1, [] {
    Outcome o;
    for (const auto& s : kFullGrid) {
      const auto alpha = AlphaParam::parse(s);
      const Rational a = alpha.value();
      o.pass = o.pass && moment(alpha, {3, 0, 0}) == (11 - 7 * a) / (15 * (5 - 3 * a)) &&
               moment(alpha, {4, 0, 0}) == (37 - 25 * a) / (63 * (5 - 3 * a)) &&
               moment(alpha, {5, 0, 0}) == (145 - 165 * a + 44 * a * a) / (42 * (5 - 3 * a) * (7 - 3 * a));
    }
    o.detail = "(3,0,0), (4,0,0), (5,0,0) exact over 6 alphas";
    return o;
  });

  criterion(3, "alpha = 0 closed forms", 5, [] {
    Outcome o;
    MomentTable table(AlphaParam::parse("0"));
    int checked = 0;
    for (int s = 0; s <= 10; ++s) {
      for (const auto& k : multi_indices_of_degree(s)) {
        const Rational& v = table(k);
        o.pass = o.pass && v == kingman_closed_form(k) && v == kingman_beta_moment(k);
        ++checked;
      }
    }
    for (int k = 0; k <= 12; ++k) o.pass = o.pass && table({k, 0, 0}) == kingman_univariate(k);
    o.detail = std::to_string(checked) + " indices with S <= 10, univariate k <= 12, exact";
    return o;
  });

  criterion(4, "alpha = 1/2 Dirichlet and alpha = 1 comb laws", 5, [] {
    Outcome o;
    MomentTable half(AlphaParam::parse("1/2"));
    MomentTable one(AlphaParam::parse("1"));
    int checked = 0;
    for (int s = 0; s <= 10; ++s) {
      for (const auto& k : multi_indices_of_degree(s)) {
        o.pass = o.pass && half(k) == crt_dirichlet_moment(k) && one(k) == comb_moment(k);
        ++checked;
      }
    }
    o.detail = std::to_string(checked) + " indices with S <= 10 per alpha, exact";
    return o;
  });

  criterion(5, "stationarity pi Q = 0", 30, [] {
    Outcome o;
    for (const auto& a : kChainGrid) {
      for (int m = 4; m <= 6; ++m) o.pass = o.pass && verify_invariance(AlphaParam::parse(a), m) == 0;
    }
    o.detail = "m in {4,5,6}, alpha in {0,1/4,1/2,1}, exact residual 0";
    return o;
  });

  criterion(6, "deletion stability", 60, [] {
    Outcome o;
    for (const auto& a : kChainGrid) {
      for (int m = 4; m <= 7; ++m) {
        const auto r = deletion_stability_check(AlphaParam::parse(a), m);
        o.pass = o.pass && r.pass && r.max_residual == 0;
      }
    }
    o.detail = "m in {4..7}, alpha in {0,1/4,1/2,1}, exact residual 0";
    return o;
  });

  criterion(7, "Feynman-Kac matrix identity", 120, [] {
    Outcome o;
    double worst = 0.0;
    for (const auto& a : kChainGrid) {
      for (int m = 4; m <= 6; ++m) {
        for (double t : {0.1, 0.5, 1.0}) worst = std::max(worst, verify_feynman_kac(AlphaParam::parse(a), m, t));
      }
    }
    o.pass = worst < 1e-8;
    o.detail = "max residual " + fmt(worst) + " (tolerance 1e-8), m in {4,5,6}, t in {0.1,0.5,1}";
    return o;
  });

  criterion(8, "beta equals backward minus forward total rate", 60, [] {
    Outcome o;
    for (const auto& a : kFullGrid) {
      for (int m = 4; m <= 7; ++m) o.pass = o.pass && verify_beta_is_rate_discrepancy(AlphaParam::parse(a), m).pass;
    }
    o.detail = "every state, m in {4..7}, 6 alphas, exact";
    return o;
  });

  criterion(9, "Kingman coalescent law is the alpha = 0 law", 10, [] {
    const std::uint64_t seed = 20240901;
    const auto order = enumerate_cladograms(5);
    const auto exact = exact_distribution(AlphaParam::parse("0"), 5);
    std::map<CanonicalKey, std::size_t> index;
    std::vector<double> probs;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto key = canonical_key(order[i]);
      index[key] = i;
      probs.push_back(to_double(exact.probability(key)));
    }
    std::vector<std::uint64_t> counts(order.size(), 0);
    Rng rng(seed);
    for (int i = 0; i < 100'000; ++i) ++counts[index.at(canonical_key(sample_kingman_cladogram(5, rng)))];
    const auto r = chi_square_test(counts, probs);
    return Outcome{r.p_value > 1e-3, "1e5 samples, chi2 " + fmt(r.statistic) + " on " +
                                         std::to_string(r.degrees_of_freedom) + " df, p = " + fmt(r.p_value) +
                                         " (threshold 1e-3), seed " + std::to_string(seed)};
  });

  criterion(10, "sampling consistency of 4-leaf shapes", 30, [] {
    const std::uint64_t seed = 777;
    const int n = 2000;
    const StateSpace space(4);
    // Tuples are drawn with replacement and repeats score 0, so the target
    // is the exact 4-leaf law scaled by the chance of four distinct draws.
    const double distinct = distinct_fraction(n, 4);
    Outcome o;
    double worst_z = 0.0;
    for (const auto& a : {"0", "1/2", "1"}) {
      const auto alpha = AlphaParam::parse(a);
      Rng rng(seed, static_cast<std::uint64_t>(alpha.as_double() * 1000));
      const auto tree = sample_ford_tree(alpha, n, rng);
      const auto exact = exact_distribution(alpha, 4);
      const auto est = estimate_shape_polynomials(tree, space, 100'000, rng);
      for (std::size_t i = 0; i < space.size(); ++i) {
        const double target = to_double(exact.probability(space.key(i))) * distinct;
        const double z = std::abs(est[i].mean - target) / est[i].standard_error;
        worst_z = std::max(worst_z, z);
      }
    }
    o.pass = worst_z < 3.0;
    o.detail = "N = 2000, 1e5 tuples, alpha in {0,1/2,1}, max |z| " + fmt(worst_z) + " (limit 3), seed " +
               std::to_string(seed);
    return o;
  });

  criterion(11, "subtree-mass Monte Carlo", 60, [] {
    const std::uint64_t seed = 4242;
    const int n = 2000;
    const std::vector<MultiIndex> ks{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    double worst_z = 0.0;

    // The sample subtree-mass law averages over the random tree as well, so
    // the triples are spread over independent trees and the error is taken
    // from the per-tree means.
    const std::size_t trees = 2000;
    const std::size_t per_tree = 50;
    const auto alpha = AlphaParam::parse("0");
    std::vector<RunningStats> annealed(ks.size());
    for (std::size_t r = 0; r < trees; ++r) {
      Rng rng(seed, r);
      const auto tree = sample_ford_tree(alpha, n, rng);
      const auto est = estimate_mass_moments(tree, ks, per_tree, rng);
      for (std::size_t q = 0; q < ks.size(); ++q) annealed[q].add(est[q].mean);
    }
    for (std::size_t q = 0; q < ks.size(); ++q) {
      const double z = std::abs(annealed[q].mean() - to_double(moment(alpha, ks[q]))) / annealed[q].standard_error();
      worst_z = std::max(worst_z, z);
    }

    Rng comb_rng(seed, trees);
    const auto comb = build_comb_tree(n);
    double comb_z = 0.0;
    for (const auto& e : estimate_mass_moments(comb, ks, 100'000, comb_rng)) {
      comb_z = std::max(comb_z, std::abs(e.mean - to_double(comb_moment(e.k))) / e.standard_error);
    }
    return Outcome{std::max(worst_z, comb_z) < 4.0, "N = 2000, 1e5 triples each; alpha = 0 (2000 trees x 50) max |z| " +
                                                        fmt(worst_z) + ", comb max |z| " + fmt(comb_z) +
                                                        " (limit 4), seed " + std::to_string(seed)};
  });

  criterion(12, "chain-to-diffusion duality", 300, [] {
    const std::uint64_t seed = 99;
    const int n = 128;
    double worst_z = 0.0;
    for (const auto& a : {"0", "1/2"}) {
      const auto alpha = AlphaParam::parse(a);
      DualityOptions opts;
      opts.replicates = 10'000;
      opts.seed = seed;
      Rng rng(seed);
      const auto start = sample_ford_tree(alpha, n, rng);
      const auto r = verify_chain_diffusion_duality(alpha, 4, start, 0.05, opts);
      worst_z = std::max(worst_z, r.max_abs_z);
    }
    return Outcome{worst_z < 4.0, "N = 128, m = 4, t = 0.05, 1e4 replicates, alpha in {0,1/2}, max |z| " +
                                      fmt(worst_z) + " (limit 4), seed " + std::to_string(seed)};
  });

  std::printf("summary: %d of 12 criteria failed\n", failures);
  return failures ? 1 : 0;
}
