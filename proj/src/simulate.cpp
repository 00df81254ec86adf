#include "aford/chain.hpp"

#include "aford/matrix_exp.hpp"
#include "aford/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aford {

ChainState::ChainState(const Cladogram& initial, AlphaParam alpha, Rng rng)
    : tree_(MutableTree::from_cladogram(initial)), alpha_(std::move(alpha)), rng_(std::move(rng)) {
  const int n = initial.leaf_count();
  if (n < 4) throw std::invalid_argument("ChainState: the chain needs at least 4 leaves");
  if (n < 5 && alpha_.value() > 0) {
    throw std::invalid_argument("ChainState: alpha > 0 needs at least 5 leaves, got " +
                                std::to_string(n));
  }
  const double a = alpha_.as_double();
  const double ext = (1.0 - a) * (n - 1);
  const double in = a * (n - 4);
  external_probability_ = ext / (ext + in);
  total_rate_ = n * (ext + in);
}

void ChainState::move() {
  const int n = tree_.leaf_count();
  const int k = static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(n)));
  const auto& around = tree_.adjacency(tree_.leaf_anchor(k));
  int cut[2];
  int c = 0;
  for (int w : around) {
    if (w != k) cut[c++] = w;
  }
  const Edge undo{cut[0], cut[1]};
  const int hub = tree_.detach(k);

  Edge e;
  if (rng_.uniform01() < external_probability_) {
    int j = static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(n - 1)));
    if (j >= k) ++j;
    e = tree_.external_edge(j);
  } else {
    e = tree_.internal_edge(rng_.uniform_index(tree_.internal_edge_count()));
  }
  if (e == undo) ++self_moves_;
  tree_.reattach(k, hub, e);
  ++jumps_;
}

void ChainState::advance_to(double t) {
  if (t < time_) throw std::invalid_argument("ChainState: time cannot run backwards");
  time_ = t;
}

bool ChainState::step(double horizon) {
  const double next = time_ + rng_.exponential(total_rate_);
  if (next > horizon) {
    time_ = horizon;
    return false;
  }
  time_ = next;
  move();
  return true;
}

SimulationSummary simulate_chain(ChainState& state, double horizon,
                                 std::span<const double> observation_times,
                                 const ChainObserver& observer, std::uint64_t audit_every) {
  if (!std::is_sorted(observation_times.begin(), observation_times.end())) {
    throw std::invalid_argument("simulate_chain: observation times must be sorted");
  }
  if (!observation_times.empty() && observation_times.back() > horizon) {
    throw std::invalid_argument("simulate_chain: observation time beyond the horizon");
  }
  const std::uint64_t jumps0 = state.jumps();
  const std::uint64_t self0 = state.self_moves();
  std::size_t next_obs = 0;
  // The state is constant between events, so an observation at time s sees
  // the state left by the last event before s.
  auto flush = [&](double upto) {
    while (next_obs < observation_times.size() && observation_times[next_obs] <= upto) {
      if (observer) observer(observation_times[next_obs], state);
      ++next_obs;
    }
  };
  flush(state.time());
  for (;;) {
    const double next = state.time() + state.rng().exponential(state.total_rate());
    if (next > horizon) {
      flush(horizon);
      break;
    }
    // Observations strictly before the event see the pre-jump state.
    while (next_obs < observation_times.size() && observation_times[next_obs] < next) {
      if (observer) observer(observation_times[next_obs], state);
      ++next_obs;
    }
    state.advance_to(next);
    state.move();
    if (audit_every > 0 && (state.jumps() - jumps0) % audit_every == 0) state.tree().audit();
  }
  state.advance_to(horizon);
  return {state.jumps() - jumps0, state.self_moves() - self0, state.time()};
}

namespace {

void draw_tuple(const FiniteMeasureTree& tree, std::vector<int>& u, Rng& rng) {
  const auto n = static_cast<std::size_t>(tree.leaf_count());
  for (auto& x : u) x = static_cast<int>(rng.uniform_index(n));
}

bool distinct(std::vector<int> u) {
  std::sort(u.begin(), u.end());
  return std::adjacent_find(u.begin(), u.end()) == u.end();
}

}  // namespace

ShapeEstimate estimate_shape_polynomial(const FiniteMeasureTree& tree, const Cladogram& target,
                                        std::size_t samples, Rng& rng) {
  const int m = target.leaf_count();
  if (m < 2) throw std::invalid_argument("estimate_shape_polynomial: m must be at least 2");
  if (samples == 0) throw std::invalid_argument("estimate_shape_polynomial: need samples > 0");
  const CanonicalKey want = canonical_key(target);
  std::vector<int> u(static_cast<std::size_t>(m));
  RunningStats stats;
  for (std::size_t s = 0; s < samples; ++s) {
    draw_tuple(tree, u, rng);
    const bool hit = distinct(u) && canonical_key(shape(tree, u)) == want;
    stats.add(hit ? 1.0 : 0.0);
  }
  return {stats.mean(), stats.standard_error(), stats.count()};
}

std::vector<ShapeEstimate> estimate_shape_polynomials(const FiniteMeasureTree& tree,
                                                      const StateSpace& space,
                                                      std::size_t samples, Rng& rng) {
  const int m = space.leaves();
  if (samples == 0) throw std::invalid_argument("estimate_shape_polynomials: need samples > 0");
  std::vector<std::uint64_t> hits(space.size(), 0);
  std::vector<int> u(static_cast<std::size_t>(m));
  for (std::size_t s = 0; s < samples; ++s) {
    draw_tuple(tree, u, rng);
    if (!distinct(u)) continue;
    ++hits[space.index_of(canonical_key(shape(tree, u)))];
  }
  // Bernoulli indicators: the sample variance has a closed form.
  std::vector<ShapeEstimate> out;
  out.reserve(space.size());
  const auto n = static_cast<double>(samples);
  for (std::uint64_t h : hits) {
    const double p = static_cast<double>(h) / n;
    const double var = samples > 1 ? p * (1.0 - p) * n / (n - 1.0) : 0.0;
    out.push_back({p, std::sqrt(var / n), samples});
  }
  return out;
}

std::vector<Rational> exact_shape_polynomials(const FiniteMeasureTree& tree, const StateSpace& space,
                                              std::uint64_t max_tuples) {
  const int m = space.leaves();
  const int n = tree.leaf_count();
  std::vector<Rational> out(space.size(), Rational(0));
  if (m > n) return out;
  if (m <= 4) {
    Rational falling = 1;
    for (int i = 0; i < m; ++i) falling *= n - i;
    Rational power = 1;
    for (int i = 0; i < m; ++i) power *= n;
    const Rational each = falling / (power * static_cast<long>(space.size()));
    std::fill(out.begin(), out.end(), each);
    return out;
  }
  long double total = 1;
  for (int i = 0; i < m; ++i) total *= n;
  if (total > static_cast<long double>(max_tuples)) {
    throw ResourceGuardError("exact_shape_polynomials: N^m = " + std::to_string(static_cast<double>(total)) +
                             " tuples exceeds the limit of " + std::to_string(max_tuples));
  }
  // Enumerate ordered tuples of distinct leaves; every shape of a distinct
  // tuple is counted once.
  std::vector<std::uint64_t> counts(space.size(), 0);
  std::vector<int> u(static_cast<std::size_t>(m), 0);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == m) {
      ++counts[space.index_of(canonical_key(shape(tree, u)))];
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (used[static_cast<std::size_t>(x)]) continue;
      used[static_cast<std::size_t>(x)] = 1;
      u[static_cast<std::size_t>(depth)] = x;
      self(self, depth + 1);
      used[static_cast<std::size_t>(x)] = 0;
    }
  };
  rec(rec, 0);
  Rational power = 1;
  for (int i = 0; i < m; ++i) power *= n;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = Rational(counts[i]) / power;
  return out;
}

DualityResult verify_chain_diffusion_duality(const AlphaParam& alpha, int m,
                                             const FiniteMeasureTree& initial, double time,
                                             const DualityOptions& options) {
  if (m < 4 || m > 5) throw std::invalid_argument("duality check supports m = 4 or 5");
  if (!(time >= 0.0) || !std::isfinite(time)) throw std::invalid_argument("duality check needs t >= 0");
  if (options.replicates < 2 || options.tuples_per_replicate == 0) {
    throw std::invalid_argument("duality check needs at least 2 replicates and 1 tuple each");
  }
  const StateSpace space(m);
  const std::size_t states = space.size();

  Eigen::MatrixXd tilted = backward_rate_matrix(alpha, m).to_dense();
  const auto beta = beta_potential(alpha, m);
  for (std::size_t i = 0; i < states; ++i) {
    tilted(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += to_double(beta.values[i]);
  }
  const Eigen::MatrixXd semigroup = matrix_exponential(tilted, time);

  DualityResult result;
  std::vector<double> rhs(states, 0.0);
  std::vector<double> rhs_se(states, 0.0);
  std::vector<Rational> phi;
  bool have_exact = false;
  try {
    phi = exact_shape_polynomials(initial, space);
    have_exact = true;
  } catch (const ResourceGuardError&) {
  }
  if (have_exact) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(states));
    for (std::size_t i = 0; i < states; ++i) v(static_cast<Eigen::Index>(i)) = to_double(phi[i]);
    const Eigen::VectorXd w = semigroup * v;
    for (std::size_t i = 0; i < states; ++i) rhs[i] = w(static_cast<Eigen::Index>(i));
    result.rhs_exact = true;
  } else {
    // Each tuple spanning shape s contributes semigroup(target, s).
    Rng rng(options.seed, 0xd1f0ULL);
    std::vector<RunningStats> acc(states);
    std::vector<int> u(static_cast<std::size_t>(m));
    for (std::size_t r = 0; r < options.rhs_tuples; ++r) {
      draw_tuple(initial, u, rng);
      if (!distinct(u)) {
        for (auto& a : acc) a.add(0.0);
        continue;
      }
      const auto s = static_cast<Eigen::Index>(space.index_of(canonical_key(shape(initial, u))));
      for (std::size_t i = 0; i < states; ++i) acc[i].add(semigroup(static_cast<Eigen::Index>(i), s));
    }
    for (std::size_t i = 0; i < states; ++i) {
      rhs[i] = acc[i].mean();
      rhs_se[i] = acc[i].standard_error();
    }
  }

  // Left-hand side: one chain per replicate on its own stream, scored by the
  // mean over a few tuples of the final tree.
  std::vector<std::vector<double>> per_replicate(options.replicates);
  const Cladogram start = initial.cladogram();
  parallel_for(options.replicates, options.threads, [&](std::size_t r) {
    ChainState state(start, alpha, Rng(options.seed, r + 1));
    simulate_chain(state, time);
    const FiniteMeasureTree tree = state.measure_tree();
    Rng sampler = state.rng().split(r + 1);
    const auto est = estimate_shape_polynomials(tree, space, options.tuples_per_replicate, sampler);
    std::vector<double> v(states);
    for (std::size_t i = 0; i < states; ++i) v[i] = est[i].mean;
    per_replicate[r] = std::move(v);
  });
  std::vector<RunningStats> lhs(states);
  for (const auto& v : per_replicate) {
    for (std::size_t i = 0; i < states; ++i) lhs[i].add(v[i]);
  }

  for (std::size_t i = 0; i < states; ++i) {
    DualityTarget t;
    t.target = space.key(i);
    t.lhs = lhs[i].mean();
    t.lhs_se = lhs[i].standard_error();
    t.rhs = rhs[i];
    t.rhs_se = rhs_se[i];
    const double diff = t.lhs - t.rhs;
    const double se = std::sqrt(t.lhs_se * t.lhs_se + t.rhs_se * t.rhs_se);
    t.z = se > 0 ? diff / se : (std::abs(diff) < 1e-12 ? 0.0 : std::copysign(INFINITY, diff));
    result.max_abs_z = std::max(result.max_abs_z, std::abs(t.z));
    result.targets.push_back(std::move(t));
  }
  return result;
}

}  // namespace aford
