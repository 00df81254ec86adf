#include "cli.hpp"

#include "aford/chain.hpp"
#include "aford/cladogram.hpp"
#include "aford/ford.hpp"
#include "aford/moments.hpp"
#include "aford/newick.hpp"
#include "aford/stats.hpp"
#include "aford/tree.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace aford::cli {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool within_threshold(const VerificationReport& r) {
  if (!std::isfinite(r.residual)) return false;
  return r.metric == "p_value" ? r.residual > r.threshold : r.residual <= r.threshold;
}

json to_json(const VerificationReport& r, bool with_timing) {
  json j;
  j["check"] = r.check;
  j["parameters"] = r.parameters;
  j["metric"] = r.metric;
  j["residual"] = std::isfinite(r.residual) ? json(r.residual) : json(nullptr);
  if (!r.residual_exact.empty()) j["residual_exact"] = r.residual_exact;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  if (with_timing) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format;
  bool timing = false;
};

/// Effective parameters of one command; they feed both the config hash and
/// the report header.
struct Invocation {
  std::string command;
  std::map<std::string, std::string> params;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const Invocation& inv, std::uint64_t seed) {
  std::string text = "command=" + inv.command + ";seed=" + std::to_string(seed);
  for (const auto& [k, v] : inv.params) text += ";" + k + "=" + v;
  return hex64(fnv1a(text));
}

bool is_format_name(const std::string& s) { return s == "csv" || s == "json" || s == "newick"; }

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  std::string format(const std::string& fallback) const {
    if (!g_.format.empty()) return g_.format;
    if (is_format_name(g_.out)) return g_.out;
    return fallback;
  }

  void table(const Invocation& inv, const Table& t, const std::string& default_format) {
    const std::string fmt = format(default_format);
    std::ostringstream os;
    if (fmt == "csv") {
      header_comments(os, inv);
      for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
      os << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
      }
    } else if (fmt == "json") {
      json doc = header_json(inv);
      json rows = json::array();
      for (const auto& row : t.rows) {
        json obj;
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = row[i];
        rows.push_back(std::move(obj));
      }
      doc["rows"] = std::move(rows);
      os << doc.dump(2) << '\n';
    } else {
      throw UsageError("format '" + fmt + "' is not available for " + inv.command);
    }
    write(os.str());
  }

  void trees(const Invocation& inv, const std::vector<std::string>& newicks,
             const std::string& default_format) {
    if (format(default_format) != "newick") {
      Table t{{"index", "newick"}, {}};
      for (std::size_t i = 0; i < newicks.size(); ++i) t.rows.push_back({json(i), json(newicks[i])});
      table(inv, t, default_format);
      return;
    }
    std::string text;
    for (const auto& s : newicks) text += s + "\n";
    write(text);
  }

  void reports(const Invocation& inv, const std::vector<VerificationReport>& reports) {
    const std::string fmt = format("json");
    if (fmt == "json") {
      json doc = header_json(inv);
      json arr = json::array();
      bool all = true;
      for (const auto& r : reports) {
        arr.push_back(to_json(r, g_.timing));
        all = all && r.pass;
      }
      doc["pass"] = all;
      doc["reports"] = std::move(arr);
      write(doc.dump(2) + "\n");
      return;
    }
    Table t{{"check", "parameters", "metric", "residual", "residual_exact", "threshold", "pass"}, {}};
    if (g_.timing) t.columns.push_back("wall_time_ms");
    for (const auto& r : reports) {
      std::string params;
      for (const auto& [k, v] : r.parameters) params += (params.empty() ? "" : " ") + k + "=" + v;
      std::vector<json> row{json(r.check), json(params), json(r.metric),
                            std::isfinite(r.residual) ? json(r.residual) : json(nullptr),
                            json(r.residual_exact), json(r.threshold), json(r.pass)};
      if (g_.timing) row.push_back(json(r.wall_time_ms));
      t.rows.push_back(std::move(row));
    }
    table(inv, t, "json");
  }

 private:
  void header_comments(std::ostream& os, const Invocation& inv) const {
    os << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
    os << "# command: " << inv.command << '\n';
    os << "# config_hash: " << config_hash(inv, g_.seed) << '\n';
    os << "# seed: " << g_.seed << '\n';
    for (const auto& [k, v] : inv.params) os << "# " << k << ": " << v << '\n';
  }

  json header_json(const Invocation& inv) const {
    json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = inv.command;
    j["config_hash"] = config_hash(inv, g_.seed);
    j["seed"] = g_.seed;
    j["parameters"] = inv.params;
    return j;
  }

  void write(const std::string& text) {
    if (g_.out.empty() || is_format_name(g_.out)) {
      out_ << text;
      out_.flush();
      return;
    }
    std::filesystem::path path(g_.out);
    if (path.is_relative()) {
      if (const char* dir = std::getenv("AFORD_OUTPUT_DIR"); dir && *dir) path = std::filesystem::path(dir) / path;
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    f << text;
    f.close();
    if (!f) throw std::ios_base::failure("failed writing " + path.string());
  }

  const Globals& g_;
  std::ostream& out_;
};

json big(const BigInt& v) {
  // Numerators can outgrow 64 bits, so they travel as decimal text.
  return json(v.str());
}

template <typename F>
VerificationReport timed(std::string check, std::map<std::string, std::string> params, F&& body) {
  VerificationReport r;
  r.check = std::move(check);
  r.parameters = std::move(params);
  const auto start = std::chrono::steady_clock::now();
  body(r);
  r.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  r.pass = within_threshold(r);
  return r;
}

Rational abs_value(const Rational& r) { return r < 0 ? Rational(-r) : r; }

void set_exact(VerificationReport& r, const Rational& residual) {
  r.residual = to_double(residual);
  r.residual_exact = to_string(residual);
}

std::map<std::string, std::string> am_params(const AlphaParam& alpha, int m) {
  return {{"alpha", alpha.to_string()}, {"m", std::to_string(m)}};
}

VerificationReport check_invariance(const AlphaParam& alpha, int m) {
  return timed("invariance", am_params(alpha, m),
               [&](VerificationReport& r) { set_exact(r, verify_invariance(alpha, m)); });
}

VerificationReport check_beta(const AlphaParam& alpha, int m) {
  return timed("beta_rate_discrepancy", am_params(alpha, m), [&](VerificationReport& r) {
    set_exact(r, verify_beta_is_rate_discrepancy(alpha, m).max_residual);
  });
}

VerificationReport check_reversal(const AlphaParam& alpha, int m) {
  return timed("reversal", am_params(alpha, m), [&](VerificationReport& r) {
    set_exact(r, verify_reversal(alpha, m).max_residual);
  });
}

VerificationReport check_feynman_kac(const AlphaParam& alpha, int m, double t, bool allow_large) {
  auto params = am_params(alpha, m);
  std::ostringstream ts;
  ts << t;
  params["t"] = ts.str();
  return timed("feynman_kac", params, [&](VerificationReport& r) {
    r.threshold = 1e-8;
    r.residual = verify_feynman_kac(alpha, m, t, allow_large);
  });
}

VerificationReport check_deletion(const AlphaParam& alpha, int m) {
  return timed("deletion_stability", am_params(alpha, m), [&](VerificationReport& r) {
    set_exact(r, deletion_stability_check(alpha, m).max_residual);
  });
}

VerificationReport check_exact_law(const AlphaParam& alpha, int m) {
  return timed("exact_law_normalised", am_params(alpha, m), [&](VerificationReport& r) {
    const auto dist = exact_distribution(alpha, m);
    Rational residual = abs_value(dist.total() - 1);
    if (dist.table.size() != cladogram_count(m)) residual += 1;
    for (const auto& [key, p] : dist.table) {
      if (p < 0) residual += abs_value(p);
    }
    set_exact(r, residual);
  });
}

struct MomentCase {
  MultiIndex k;
  std::function<Rational(const Rational&)> formula;
};

VerificationReport check_universal_moments(const AlphaParam& alpha) {
  return timed("moments_universal", {{"alpha", alpha.to_string()}}, [&](VerificationReport& r) {
    const std::vector<MomentCase> cases{
        {{1, 0, 0}, [](const Rational&) { return Rational(1, 3); }},
        {{2, 0, 0}, [](const Rational&) { return Rational(1, 5); }},
        {{1, 1, 0}, [](const Rational&) { return Rational(1, 15); }},
        {{3, 0, 0}, [](const Rational& a) { return (11 - 7 * a) / (15 * (5 - 3 * a)); }},
        {{4, 0, 0}, [](const Rational& a) { return (37 - 25 * a) / (63 * (5 - 3 * a)); }},
        {{5, 0, 0},
         [](const Rational& a) {
           return (145 - 165 * a + 44 * a * a) / (42 * (5 - 3 * a) * (7 - 3 * a));
         }},
    };
    MomentTable table(alpha);
    Rational worst = 0;
    for (const auto& c : cases) worst = std::max(worst, abs_value(table(c.k) - c.formula(alpha.value())));
    set_exact(r, worst);
  });
}

VerificationReport check_generator_moments(const AlphaParam& alpha, int max_degree) {
  return timed("moments_generator_consistency",
                {{"alpha", alpha.to_string()}, {"max_degree", std::to_string(max_degree)}},
               [&](VerificationReport& r) {
                 MomentTable table(alpha);
                 Rational worst = 0;
                 for (int s = 0; s <= max_degree; ++s) {
                   for (const auto& k : multi_indices_of_degree(s)) {
                     worst = std::max(worst, abs_value(table(k) - moment_from_generator(alpha, k)));
                   }
                 }
                 set_exact(r, worst);
               });
}

VerificationReport check_kingman(int max_degree) {
  return timed("moments_kingman", {{"max_degree", std::to_string(max_degree)}},
               [&](VerificationReport& r) {
                 MomentTable table(AlphaParam(Rational(0)));
                 Rational worst = 0;
                 for (int s = 0; s <= max_degree; ++s) {
                   for (const auto& k : multi_indices_of_degree(s)) {
                     const Rational& v = table(k);
                     worst = std::max(worst, abs_value(v - kingman_closed_form(k)));
                     worst = std::max(worst, abs_value(v - kingman_beta_moment(k)));
                   }
                 }
                 for (int k = 0; k <= std::max(12, max_degree); ++k) {
                   worst = std::max(worst, abs_value(table({k, 0, 0}) - kingman_univariate(k)));
                 }
                 set_exact(r, worst);
               });
}

VerificationReport check_against(const std::string& name, const Rational& alpha, int max_degree,
                                 Rational (*law)(const MultiIndex&)) {
  return timed(name, {{"alpha", to_string(alpha)}, {"max_degree", std::to_string(max_degree)}},
               [&](VerificationReport& r) {
                 MomentTable table{AlphaParam(alpha)};
                 Rational worst = 0;
                 for (int s = 0; s <= max_degree; ++s) {
                   for (const auto& k : multi_indices_of_degree(s)) {
                     worst = std::max(worst, abs_value(table(k) - law(k)));
                   }
                 }
                 set_exact(r, worst);
               });
}

int exit_for(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) return kExitCheckFailed;
  }
  return kExitOk;
}

AlphaParam alpha_from(const std::string& text) {
  try {
    return AlphaParam::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--alpha: ") + e.what());
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int parse_observe(const std::string& spec) {
  const std::string prefix = "shape:m=";
  if (spec.rfind(prefix, 0) != 0) throw UsageError("--observe expects shape:m=<order>, got '" + spec + "'");
  int m = 0;
  try {
    m = std::stoi(spec.substr(prefix.size()));
  } catch (const std::exception&) {
    throw UsageError("--observe: bad order in '" + spec + "'");
  }
  if (m < 2 || m > 7) throw UsageError("--observe: shape order must be in [2, 7]");
  return m;
}

Cladogram read_tree(const std::string& newick, const std::string& input) {
  if (!newick.empty() && !input.empty()) throw UsageError("give either --newick or --input, not both");
  if (!newick.empty()) return parse_newick(newick);
  if (input.empty()) throw UsageError("a tree is required: --newick TEXT or --input FILE");
  std::ifstream f(input);
  if (!f) throw std::ios_base::failure("cannot read " + input);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_newick(ss.str());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alpha-Ford cladograms, chains and subtree-mass moments", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Base seed for every random stream");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--out", g.out, "Output file, or csv|json|newick to print that format");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "newick"}));
  app.add_flag("--timing", g.timing, "Include wall times in reports");

  Emitter emit(g, out);
  std::function<int()> action;
  auto bind = [&](CLI::App* sub, std::function<int()> f) {
    sub->callback([&action, f] { action = f; });
  };

  // ford
  auto* ford = app.add_subcommand("ford", "Sample or tabulate alpha-Ford cladograms");
  ford->require_subcommand(1);
  std::string alpha_text = "0";
  int leaves = 5;
  std::size_t count = 1;
  int m = 5;

  auto* ford_sample = ford->add_subcommand("sample", "Draw alpha-Ford cladograms");
  ford_sample->add_option("--alpha", alpha_text)->required();
  ford_sample->add_option("--leaves", leaves)->required()->check(CLI::Range(2, 1 << 24));
  ford_sample->add_option("--count", count)->check(CLI::Range(std::size_t{1}, std::size_t{10'000'000}));
  bind(ford_sample, [&] {
    const auto alpha = alpha_from(alpha_text);
    Invocation inv{"ford sample", {{"alpha", alpha.to_string()}, {"leaves", std::to_string(leaves)},
                                   {"count", std::to_string(count)}}};
    std::vector<std::string> trees(count);
    parallel_for(count, g.threads, [&](std::size_t r) {
      Rng rng(g.seed, r);
      trees[r] = to_newick(sample_ford_cladogram(alpha, leaves, rng));
    });
    emit.trees(inv, trees, "newick");
    return kExitOk;
  });

  auto* ford_coal = ford->add_subcommand("coalescent", "Build cladograms from Kingman coalescents");
  ford_coal->add_option("--leaves,--m", leaves)->required()->check(CLI::Range(2, 1 << 24));
  ford_coal->add_option("--count", count)->check(CLI::Range(std::size_t{1}, std::size_t{10'000'000}));
  bind(ford_coal, [&] {
    Invocation inv{"ford coalescent", {{"leaves", std::to_string(leaves)}, {"count", std::to_string(count)}}};
    std::vector<std::string> trees(count);
    parallel_for(count, g.threads, [&](std::size_t r) {
      Rng rng(g.seed, r);
      trees[r] = to_newick(sample_kingman_cladogram(leaves, rng));
    });
    emit.trees(inv, trees, "newick");
    return kExitOk;
  });

  auto* ford_exact = ford->add_subcommand("exact", "Exact alpha-Ford law on m-cladograms");
  ford_exact->add_option("--alpha", alpha_text)->required();
  ford_exact->add_option("--m", m)->required();
  bind(ford_exact, [&] {
    const auto alpha = alpha_from(alpha_text);
    Invocation inv{"ford exact", am_params(alpha, m)};
    const auto dist = exact_distribution(alpha, m);
    Table t{{"key", "newick", "numerator", "denominator"}, {}};
    for (const auto& tree : enumerate_cladograms(m)) {
      const auto key = canonical_key(tree);
      const Rational p = dist.probability(key);
      t.rows.push_back({json(key.to_string()), json(to_newick(tree)), big(numerator_of(p)),
                        big(denominator_of(p))});
    }
    emit.table(inv, t, "csv");
    return kExitOk;
  });

  // chain
  auto* chain = app.add_subcommand("chain", "Alpha-Ford chains");
  chain->require_subcommand(1);
  double horizon = 0.1;
  std::string observe = "shape:m=4";
  std::size_t replicates = 100;
  std::size_t samples = 1000;
  std::string times_text;
  std::string initial_kind = "ford";
  std::uint64_t audit_every = 0;

  auto* chain_run = chain->add_subcommand("run", "Simulate the chain on N leaves and observe shapes");
  chain_run->add_option("--alpha", alpha_text)->required();
  chain_run->add_option("--leaves", leaves)->required()->check(CLI::Range(4, 1 << 20));
  chain_run->add_option("--t", horizon)->required()->check(CLI::NonNegativeNumber);
  chain_run->add_option("--observe", observe);
  chain_run->add_option("--replicates", replicates)->check(CLI::Range(std::size_t{1}, std::size_t{100'000'000}));
  chain_run->add_option("--samples", samples, "Leaf tuples per observation")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100'000'000}));
  chain_run->add_option("--times", times_text, "Comma-separated observation times (default: t)");
  chain_run->add_option("--initial", initial_kind)->check(CLI::IsMember({"ford", "comb"}));
  chain_run->add_option("--audit-every", audit_every);
  bind(chain_run, [&] {
    const auto alpha = alpha_from(alpha_text);
    const int order = parse_observe(observe);
    std::vector<double> times;
    for (const auto& s : split_list(times_text)) {
      try {
        times.push_back(std::stod(s));
      } catch (const std::exception&) {
        throw UsageError("--times: bad number '" + s + "'");
      }
    }
    if (times.empty()) times.push_back(horizon);
    std::sort(times.begin(), times.end());
    if (times.front() < 0 || times.back() > horizon) throw UsageError("--times must lie in [0, t]");
    if (leaves < 5 && alpha.value() > 0) throw UsageError("--leaves must be at least 5 when alpha > 0");
    if (order > leaves) throw UsageError("shape order exceeds the number of leaves");

    Invocation inv{"chain run",
                   {{"alpha", alpha.to_string()}, {"leaves", std::to_string(leaves)},
                    {"t", format_double(horizon)}, {"observe", observe},
                    {"replicates", std::to_string(replicates)}, {"samples", std::to_string(samples)},
                    {"times", [&] {
                       std::string s;
                       for (double x : times) s += (s.empty() ? "" : ",") + format_double(x);
                       return s;
                     }()},
                    {"initial", initial_kind}}};

    Rng init_rng(g.seed, 0);
    const Cladogram start = initial_kind == "comb" ? build_comb_tree(leaves).cladogram()
                                                   : sample_ford_tree(alpha, leaves, init_rng).cladogram();
    const StateSpace space(order);
    // per_rep[r][time][target], plus the jump count at each time
    std::vector<std::vector<std::vector<double>>> per_rep(replicates);
    std::vector<std::vector<double>> jumps(replicates);
    parallel_for(replicates, g.threads, [&](std::size_t r) {
      ChainState state(start, alpha, Rng(g.seed, 2 * r + 1));
      Rng sampler(g.seed, 2 * r + 2);
      auto& mine = per_rep[r];
      simulate_chain(state, horizon, times,
                     [&](double, const ChainState& s) {
                       const auto est = estimate_shape_polynomials(s.measure_tree(), space, samples, sampler);
                       std::vector<double> v;
                       for (const auto& e : est) v.push_back(e.mean);
                       mine.push_back(std::move(v));
                       jumps[r].push_back(static_cast<double>(s.jumps()));
                     },
                     audit_every);
    });
    Table t{{"time", "target", "newick", "mean", "standard_error", "replicates", "mean_jumps"}, {}};
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      RunningStats jump_stats;
      for (std::size_t r = 0; r < replicates; ++r) jump_stats.add(jumps[r][ti]);
      for (std::size_t s = 0; s < space.size(); ++s) {
        RunningStats st;
        for (std::size_t r = 0; r < replicates; ++r) st.add(per_rep[r][ti][s]);
        t.rows.push_back({json(times[ti]), json(space.key(s).to_string()), json(to_newick(space.state(s))),
                          json(st.mean()), json(st.standard_error()), json(replicates),
                          json(jump_stats.mean())});
      }
    }
    emit.table(inv, t, "csv");
    return kExitOk;
  });

  auto* chain_verify = chain->add_subcommand("verify", "Exact and statistical chain checks");
  std::string chain_check;
  std::string t_text;
  bool allow_large = false;
  chain_verify->add_option("check", chain_check, "invariance | beta | reversal | duality | diffusion")
      ->required()
      ->check(CLI::IsMember({"invariance", "beta", "reversal", "duality", "diffusion"}));
  chain_verify->add_option("--alpha", alpha_text)->required();
  chain_verify->add_option("--m", m)->required();
  chain_verify->add_option("--t", t_text, "Time (duality: 0.5; diffusion: 0.05)");
  chain_verify->add_option("--leaves", leaves, "Tree size for the diffusion check");
  chain_verify->add_option("--replicates", replicates, "Replicates for the diffusion check");
  chain_verify->add_flag("--allow-large", allow_large, "Permit m = 7 in the duality check");
  bind(chain_verify, [&] {
    const auto alpha = alpha_from(alpha_text);
    const bool have_t = !t_text.empty();
    double t = 0.0;
    if (have_t) {
      try {
        t = std::stod(t_text);
      } catch (const std::exception&) {
        throw UsageError("--t: bad number '" + t_text + "'");
      }
    }
    std::vector<VerificationReport> reports;
    Invocation inv{"chain verify " + chain_check, am_params(alpha, m)};
    if (chain_check == "invariance") {
      reports.push_back(check_invariance(alpha, m));
    } else if (chain_check == "beta") {
      reports.push_back(check_beta(alpha, m));
    } else if (chain_check == "reversal") {
      reports.push_back(check_reversal(alpha, m));
    } else if (chain_check == "duality") {
      if (!have_t) t = 0.5;
      inv.params["t"] = format_double(t);
      reports.push_back(check_feynman_kac(alpha, m, t, allow_large));
    } else {
      if (!have_t) t = 0.05;
      if (!chain_verify->count("--leaves")) leaves = 128;
      if (!chain_verify->count("--replicates")) replicates = 10'000;
      if (leaves < 5 && alpha.value() > 0) throw UsageError("--leaves must be at least 5 when alpha > 0");
      inv.params["t"] = format_double(t);
      inv.params["leaves"] = std::to_string(leaves);
      inv.params["replicates"] = std::to_string(replicates);
      Rng init_rng(g.seed, 0);
      const auto initial = sample_ford_tree(alpha, leaves, init_rng);
      DualityOptions opt;
      opt.replicates = replicates;
      opt.seed = g.seed;
      opt.threads = g.threads;
      reports.push_back(timed("chain_diffusion_duality", inv.params, [&](VerificationReport& r) {
        r.metric = "max_abs_z";
        r.threshold = 4.0;
        r.residual = verify_chain_diffusion_duality(alpha, m, initial, t, opt).max_abs_z;
      }));
    }
    emit.reports(inv, reports);
    return exit_for(reports);
  });

  // moments
  auto* moments = app.add_subcommand("moments", "Subtree-mass moments");
  moments->require_subcommand(1);
  int max_degree = 3;
  std::size_t triples = 100'000;
  std::string tree_kind = "ford";

  auto* mom_exact = moments->add_subcommand("exact", "Exact moments up to a total degree");
  mom_exact->add_option("--alpha", alpha_text)->required();
  mom_exact->add_option("--max-degree", max_degree)->required()->check(CLI::Range(0, 60));
  bind(mom_exact, [&] {
    const auto alpha = alpha_from(alpha_text);
    Invocation inv{"moments exact", {{"alpha", alpha.to_string()}, {"max_degree", std::to_string(max_degree)}}};
    MomentTable table(alpha);
    Table t{{"k1", "k2", "k3", "numerator", "denominator"}, {}};
    for (int s = 0; s <= max_degree; ++s) {
      for (const auto& k : multi_indices_of_degree(s)) {
        const Rational& v = table(k);
        t.rows.push_back({json(k[0]), json(k[1]), json(k[2]), big(numerator_of(v)), big(denominator_of(v))});
      }
    }
    emit.table(inv, t, "csv");
    return kExitOk;
  });

  auto* mom_est = moments->add_subcommand("estimate", "Monte Carlo moments on a sampled tree");
  mom_est->add_option("--alpha", alpha_text)->required();
  mom_est->add_option("--leaves", leaves)->required()->check(CLI::Range(3, 1 << 24));
  mom_est->add_option("--triples", triples)->check(CLI::Range(std::size_t{1}, std::size_t{1'000'000'000}));
  mom_est->add_option("--max-degree", max_degree)->check(CLI::Range(1, 20));
  mom_est->add_option("--tree", tree_kind)->check(CLI::IsMember({"ford", "comb"}));
  bind(mom_est, [&] {
    const auto alpha = alpha_from(alpha_text);
    Invocation inv{"moments estimate",
                   {{"alpha", alpha.to_string()}, {"leaves", std::to_string(leaves)},
                    {"triples", std::to_string(triples)}, {"max_degree", std::to_string(max_degree)},
                    {"tree", tree_kind}}};
    Rng rng(g.seed, 0);
    const auto tree = tree_kind == "comb" ? build_comb_tree(leaves) : sample_ford_tree(alpha, leaves, rng);
    std::vector<MultiIndex> ks;
    for (int s = 1; s <= max_degree; ++s) {
      for (const auto& k : multi_indices_of_degree(s)) ks.push_back(k);
    }
    Rng sampler(g.seed, 1);
    const auto est = estimate_mass_moments(tree, ks, triples, sampler);
    MomentTable table(tree_kind == "comb" ? AlphaParam(Rational(1)) : alpha);
    Table t{{"k1", "k2", "k3", "mean", "standard_error", "exact_numerator", "exact_denominator"}, {}};
    for (const auto& e : est) {
      const Rational& v = table(e.k);
      t.rows.push_back({json(e.k[0]), json(e.k[1]), json(e.k[2]), json(e.mean), json(e.standard_error),
                        big(numerator_of(v)), big(denominator_of(v))});
    }
    emit.table(inv, t, "csv");
    return kExitOk;
  });

  auto* mom_verify = moments->add_subcommand("verify", "Compare exact moments with closed forms");
  std::string mom_suite;
  mom_verify->add_option("--suite", mom_suite)
      ->required()
      ->check(CLI::IsMember({"kingman", "crt", "comb", "universal", "generator"}));
  mom_verify->add_option("--alpha", alpha_text, "Used by universal and generator");
  mom_verify->add_option("--max-degree", max_degree)->check(CLI::Range(0, 40));
  bind(mom_verify, [&] {
    if (!mom_verify->count("--max-degree")) max_degree = 10;
    Invocation inv{"moments verify", {{"suite", mom_suite}, {"max_degree", std::to_string(max_degree)}}};
    std::vector<VerificationReport> reports;
    if (mom_suite == "kingman") {
      reports.push_back(check_kingman(max_degree));
    } else if (mom_suite == "crt") {
      reports.push_back(check_against("moments_crt_dirichlet", Rational(1, 2), max_degree, crt_dirichlet_moment));
    } else if (mom_suite == "comb") {
      reports.push_back(check_against("moments_comb", Rational(1), max_degree, comb_moment));
    } else {
      std::vector<AlphaParam> grid;
      if (mom_verify->count("--alpha")) {
        grid.push_back(alpha_from(alpha_text));
        inv.params["alpha"] = grid.back().to_string();
      } else {
        for (const char* a : {"0", "1/8", "1/4", "1/2", "3/4", "1"}) grid.push_back(AlphaParam::parse(a));
      }
      for (const auto& a : grid) {
        reports.push_back(mom_suite == "universal" ? check_universal_moments(a)
                                                   : check_generator_moments(a, std::min(max_degree, 8)));
      }
    }
    emit.reports(inv, reports);
    return exit_for(reports);
  });

  // tree
  auto* tree_cmd = app.add_subcommand("tree", "Branch-point quantities of a Newick tree");
  tree_cmd->require_subcommand(1);
  std::string newick_text;
  std::string input_path;
  auto* tree_nu = tree_cmd->add_subcommand("nu", "Branch point distribution");
  auto* tree_rmu = tree_cmd->add_subcommand("rmu", "Branch point metric between all vertex pairs");
  for (auto* sub : {tree_nu, tree_rmu}) {
    sub->add_option("--newick", newick_text);
    sub->add_option("--input", input_path);
  }
  bind(tree_nu, [&] {
    const FiniteMeasureTree tree(read_tree(newick_text, input_path));
    Invocation inv{"tree nu", {{"newick", to_newick(tree.cladogram())}}};
    const auto nu = branch_point_distribution(tree);
    Table t{{"vertex", "label", "numerator", "denominator"}, {}};
    for (int v = 0; v < tree.vertex_count(); ++v) {
      const auto& p = nu[static_cast<std::size_t>(v)];
      t.rows.push_back({json(v), json(tree.cladogram().label_of(v)), big(numerator_of(p)), big(denominator_of(p))});
    }
    emit.table(inv, t, "csv");
    return kExitOk;
  });
  bind(tree_rmu, [&] {
    const FiniteMeasureTree tree(read_tree(newick_text, input_path));
    Invocation inv{"tree rmu", {{"newick", to_newick(tree.cladogram())}}};
    const auto nu = branch_point_distribution(tree);
    Table t{{"x", "y", "numerator", "denominator"}, {}};
    for (int x = 0; x < tree.vertex_count(); ++x) {
      for (int y = x; y < tree.vertex_count(); ++y) {
        const Rational r = r_mu(tree, nu, x, y);
        t.rows.push_back({json(x), json(y), big(numerator_of(r)), big(denominator_of(r))});
      }
    }
    emit.table(inv, t, "csv");
    return kExitOk;
  });

  // verify
  auto* verify = app.add_subcommand("verify", "Run a suite of exact and numeric checks");
  std::string suite = "all";
  verify->add_option("--suite", suite)->check(CLI::IsMember({"all", "chain", "ford", "moments"}));
  verify->add_option("--m", m)->required()->check(CLI::Range(kMinChainLeaves, 6));
  verify->add_option("--alpha", alpha_text)->required();
  bind(verify, [&] {
    const auto alpha = alpha_from(alpha_text);
    Invocation inv{"verify", am_params(alpha, m)};
    inv.params["suite"] = suite;
    std::vector<VerificationReport> reports;
    const bool all = suite == "all";
    if (all || suite == "ford") {
      reports.push_back(check_exact_law(alpha, m));
      reports.push_back(check_deletion(alpha, m));
    }
    if (all || suite == "chain") {
      reports.push_back(check_invariance(alpha, m));
      reports.push_back(check_beta(alpha, m));
      reports.push_back(check_reversal(alpha, m));
      for (double t : {0.1, 0.5, 1.0}) reports.push_back(check_feynman_kac(alpha, m, t, false));
    }
    if (all || suite == "moments") {
      reports.push_back(check_universal_moments(alpha));
      reports.push_back(check_generator_moments(alpha, 6));
    }
    emit.reports(inv, reports);
    return exit_for(reports);
  });

  auto error_json = [&](const std::string& kind, const std::string& message) {
    json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    err << j.dump() << '\n';
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_json("usage", e.what());
    return kExitUsage;
  }
  if (!action) {
    error_json("usage", "no command given");
    return kExitUsage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    error_json("usage", e.what());
  } catch (const ResourceGuardError& e) {
    error_json("resource_guard", e.what());
  } catch (const StructuralError& e) {
    error_json("structural", e.what());
  } catch (const std::ios_base::failure& e) {
    error_json("io", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    error_json("io", e.what());
  } catch (const std::invalid_argument& e) {
    error_json("invalid_argument", e.what());
  } catch (const std::exception& e) {
    error_json("internal", e.what());
  }
  return kExitUsage;
}

}  // namespace aford::cli
