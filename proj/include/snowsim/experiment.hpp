#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "snowsim/engine.hpp"
#include "snowsim/stats.hpp"

namespace snowsim {

// Shortest decimal form that round-trips to the same double.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

enum class ExperimentKind { SingleRun, Ensemble, Sweep2D, SizeSweep, SnapshotRun };

inline std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SingleRun: return "single-run";
    case ExperimentKind::Ensemble: return "ensemble";
    case ExperimentKind::Sweep2D: return "sweep2d";
    case ExperimentKind::SizeSweep: return "size-sweep";
    case ExperimentKind::SnapshotRun: return "snapshot-run";
  }
  throw std::invalid_argument("kind_name: bad kind");
}

inline ExperimentKind kind_from_name(const std::string& s) {
  if (s == "single-run") return ExperimentKind::SingleRun;
  if (s == "ensemble") return ExperimentKind::Ensemble;
  if (s == "sweep2d") return ExperimentKind::Sweep2D;
  if (s == "size-sweep") return ExperimentKind::SizeSweep;
  if (s == "snapshot-run") return ExperimentKind::SnapshotRun;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

// The parameters a sweep axis or a case override may address.
inline const std::vector<std::string>& sweepable_params() {
  static const std::vector<std::string> names = {"p",     "q",     "M",       "beta",
                                                 "alpha", "gamma", "epsilon", "r"};
  return names;
}

inline void apply_param(Params& params, const std::string& name, double value) {
  if (name == "p") {
    params.transition.p = value;
  } else if (name == "q") {
    params.transition.q = value;
  } else if (name == "M") {
    const auto m = std::llround(value);
    if (m < 1) throw std::invalid_argument("M: must round to a positive integer");
    params.memory.m = static_cast<std::uint32_t>(m);
  } else if (name == "beta") {
    params.memory.beta = value;
  } else if (name == "alpha") {
    params.qlearn.alpha = value;
  } else if (name == "gamma") {
    params.qlearn.gamma = value;
  } else if (name == "epsilon") {
    params.qlearn.epsilon = value;
  } else if (name == "r") {
    params.payoff.r = value;
  } else {
    throw std::invalid_argument("unknown parameter name: " + name);
  }
}

struct SweepAxis {
  std::string param;
  double min = 0.0;
  double max = 1.0;
  std::uint32_t points = 2;
};

inline std::vector<double> axis_values(const SweepAxis& ax) {
  std::vector<double> vs(ax.points);
  for (std::uint32_t i = 0; i < ax.points; ++i) {
    vs[i] = ax.min + (ax.max - ax.min) * static_cast<double>(i) /
                         static_cast<double>(ax.points - 1);
  }
  return vs;
}

// One named parameter assignment set, e.g. {{"p",0.8},{"q",0.5}}.
using ParamCase = std::vector<std::pair<std::string, double>>;

inline std::string case_label(const ParamCase& c) {
  std::string s;
  for (const auto& [name, value] : c) {
    if (!s.empty()) s += '_';
    s += name + fmt_double(value);
  }
  return s;
}

struct ExperimentConfig {
  NetworkSpec net;
  Params params;
  std::uint32_t steps = 5000;
  std::uint32_t tail = 500;
  std::uint32_t seed_count = 20;
  std::uint64_t master_seed = 42;
  ExperimentKind kind = ExperimentKind::Ensemble;
  std::vector<SweepAxis> axes;          // Sweep2D: exactly two
  std::vector<std::uint32_t> sizes;     // SizeSweep: node counts
  std::set<std::uint32_t> snapshot_times;  // SnapshotRun
  std::vector<ParamCase> cases;         // empty means one default case
  std::string out_dir = "out";
  std::string preset;                   // provenance label, may be empty

  void validate() const {
    net.validate();
    params.validate();
    if (steps < 1) throw std::invalid_argument("steps: must be >= 1");
    if (tail < 1 || tail > steps) throw std::invalid_argument("tail: must be in [1, steps]");
    if (seed_count < 1) throw std::invalid_argument("seeds: must be >= 1");

    const auto& allowed = sweepable_params();
    auto check_name = [&](const std::string& name, const char* where) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        throw std::invalid_argument(std::string(where) + ": unknown parameter name: " + name);
      }
    };
    for (const auto& ax : axes) {
      check_name(ax.param, "axes");
      if (ax.points < 2) throw std::invalid_argument("axes: grid points must be >= 2");
      if (!(ax.min <= ax.max)) throw std::invalid_argument("axes: min must be <= max");
    }
    for (const auto& c : cases) {
      for (const auto& [name, value] : c) {
        (void)value;
        check_name(name, "cases");
      }
    }

    switch (kind) {
      case ExperimentKind::Sweep2D:
        if (axes.size() != 2) throw std::invalid_argument("axes: sweep2d needs exactly 2 axes");
        if (cases.size() > 1) {
          throw std::invalid_argument("cases: sweep2d supports at most one case");
        }
        break;
      case ExperimentKind::SizeSweep:
        if (sizes.empty()) throw std::invalid_argument("sizes: size-sweep needs a size list");
        for (std::uint32_t n : sizes) {
          if (net.kind == Network::Kind::SquareLattice) {
            const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(n))));
            if (side < 2 || side * side != n) {
              throw std::invalid_argument("sizes: lattice size " + std::to_string(n) +
                                          " is not a square of side >= 2");
            }
          } else if (n <= net.ring_degree) {
            throw std::invalid_argument("sizes: size must exceed ring_degree");
          }
        }
        break;
      case ExperimentKind::SnapshotRun:
        if (net.kind != Network::Kind::SquareLattice) {
          throw std::invalid_argument("network: snapshots need a square lattice");
        }
        if (snapshot_times.empty()) {
          throw std::invalid_argument("snapshot_times: snapshot-run needs at least one time");
        }
        if (*snapshot_times.rbegin() > steps) {
          throw std::invalid_argument("snapshot_times: larger than steps");
        }
        break;
      default:
        break;
    }
  }

  // Params with one case's overrides applied.
  Params case_params(const ParamCase& c) const {
    Params p = params;
    for (const auto& [name, value] : c) apply_param(p, name, value);
    p.validate();
    return p;
  }
};

// ---- presets ------------------------------------------------------------

namespace detail {

inline ExperimentConfig preset_base() {
  ExperimentConfig cfg;  // defaults: 50x50 lattice, 5000 steps, tail 500, 20 seeds
  return cfg;
}

inline std::vector<ParamCase> transition_pairs() {
  return {{{"p", 0.8}, {"q", 0.5}}, {{"p", 0.5}, {"q", 0.5}}, {{"p", 0.5}, {"q", 0.8}}};
}

inline void desk_scale(ExperimentConfig& cfg, std::uint32_t side, std::uint32_t steps,
                       std::uint32_t tail, std::uint32_t seeds) {
  cfg.net.side = side;
  cfg.steps = steps;
  cfg.tail = tail;
  cfg.seed_count = seeds;
}

}  // namespace detail

// Named parameter bundles for the standard experiments; "<name>-desk"
// variants shrink the lattice, the horizon and the seed count so the
// whole pipeline can run in seconds.
inline ExperimentConfig make_preset(const std::string& name) {
  using detail::desk_scale;
  using detail::preset_base;
  using detail::transition_pairs;

  ExperimentConfig cfg = preset_base();
  cfg.preset = name;

  // Trajectories of f_c and the learner count for three (p, q) pairs.
  if (name == "fig2" || name == "fig2-desk") {
    cfg.kind = ExperimentKind::SingleRun;
    cfg.seed_count = 1;
    cfg.cases = transition_pairs();
    if (name == "fig2-desk") desk_scale(cfg, 20, 1200, 400, 1);
    return cfg;
  }
  // Stationary learner counts vs the closed-form expectation.
  if (name == "table1" || name == "table1-desk") {
    cfg.kind = ExperimentKind::Ensemble;
    cfg.tail = 1000;
    cfg.cases = transition_pairs();
    if (name == "table1-desk") desk_scale(cfg, 20, 1500, 500, 3);
    return cfg;
  }
  // Moments of the learner-count distribution over a long tail.
  if (name == "table2" || name == "table2-desk") {
    cfg.kind = ExperimentKind::SingleRun;
    cfg.seed_count = 1;
    cfg.tail = 4000;
    cfg.cases = transition_pairs();
    if (name == "table2-desk") desk_scale(cfg, 20, 2000, 1500, 1);
    return cfg;
  }
  // Cooperation level over the (q, p) plane.
  if (name == "fig3" || name == "fig3-desk") {
    cfg.kind = ExperimentKind::Sweep2D;
    cfg.axes = {{"q", 0.1, 0.9, 9}, {"p", 0.1, 0.9, 9}};
    if (name == "fig3-desk") {
      desk_scale(cfg, 15, 1000, 300, 2);
      cfg.axes = {{"q", 0.1, 0.9, 5}, {"p", 0.1, 0.9, 5}};
    }
    return cfg;
  }
  // Cooperation level over the (M, beta) plane, mixed population.
  if (name == "fig4" || name == "fig4-desk") {
    cfg.kind = ExperimentKind::Sweep2D;
    apply_param(cfg.params, "r", 0.3);
    cfg.axes = {{"M", 1, 15, 15}, {"beta", 0.0, 0.9, 10}};
    if (name == "fig4-desk") {
      desk_scale(cfg, 15, 1000, 300, 2);
      cfg.axes = {{"M", 1, 15, 4}, {"beta", 0.0, 0.9, 4}};
    }
    return cfg;
  }
  // Same plane with profiteers only (p=1, q=0).
  if (name == "fig5" || name == "fig5-desk") {
    cfg.kind = ExperimentKind::Sweep2D;
    apply_param(cfg.params, "r", 0.3);
    apply_param(cfg.params, "p", 1.0);
    apply_param(cfg.params, "q", 0.0);
    cfg.axes = {{"M", 1, 15, 15}, {"beta", 0.0, 0.9, 10}};
    if (name == "fig5-desk") {
      desk_scale(cfg, 15, 1000, 300, 2);
      cfg.axes = {{"M", 1, 15, 4}, {"beta", 0.0, 0.9, 4}};
    }
    return cfg;
  }
  // Cooperation level over the (gamma, alpha) plane.
  if (name == "fig6" || name == "fig6-desk") {
    cfg.kind = ExperimentKind::Sweep2D;
    apply_param(cfg.params, "r", 0.5);
    cfg.axes = {{"gamma", 0.1, 0.9, 9}, {"alpha", 0.1, 0.9, 9}};
    if (name == "fig6-desk") {
      desk_scale(cfg, 15, 1000, 300, 2);
      cfg.axes = {{"gamma", 0.1, 0.9, 4}, {"alpha", 0.1, 0.9, 4}};
    }
    return cfg;
  }
  // Strategy maps at fixed times with profiteers only.
  if (name == "fig8" || name == "fig8-desk") {
    cfg.kind = ExperimentKind::SnapshotRun;
    cfg.seed_count = 1;
    cfg.steps = 1000;
    cfg.tail = 500;
    apply_param(cfg.params, "p", 1.0);
    apply_param(cfg.params, "q", 0.0);
    apply_param(cfg.params, "M", 10);
    cfg.snapshot_times = {1, 10, 100, 1000};
    cfg.cases = {{{"beta", 0.9}, {"r", 0.3}},
                 {{"beta", 0.9}, {"r", 0.5}},
                 {{"beta", 0.1}, {"r", 0.5}}};
    if (name == "fig8-desk") desk_scale(cfg, 20, 1000, 500, 1);
    return cfg;
  }
  // Mean cooperation across network sizes for six parameter sets.
  if (name == "fig9" || name == "fig9-desk") {
    cfg.kind = ExperimentKind::SizeSweep;
    cfg.sizes = {400, 900, 1600, 2500};
    cfg.cases = {{{"M", 5}, {"beta", 0.3}, {"p", 1.0}, {"q", 0.0}, {"r", 0.5}},
                 {{"M", 10}, {"beta", 0.6}, {"p", 1.0}, {"q", 0.0}, {"r", 0.5}},
                 {{"M", 15}, {"beta", 0.9}, {"p", 1.0}, {"q", 0.0}, {"r", 0.5}},
                 {{"r", 0.2}, {"p", 0.3}, {"q", 0.5}, {"beta", 0.6}, {"M", 10}},
                 {{"r", 0.5}, {"p", 0.6}, {"q", 0.5}, {"beta", 0.6}, {"M", 10}},
                 {{"r", 0.8}, {"p", 0.9}, {"q", 0.5}, {"beta", 0.6}, {"M", 10}}};
    if (name == "fig9-desk") {
      desk_scale(cfg, 20, 1000, 300, 2);
      cfg.sizes = {100, 225, 400};
    }
    return cfg;
  }
  throw std::invalid_argument(
      "unknown preset: " + name +
      " (expected fig2|table1|table2|fig3|fig4|fig5|fig6|fig8|fig9 or a -desk variant)");
}

// ---- JSON config --------------------------------------------------------

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument("unknown config key: " + where + key);
    }
  }
}

}  // namespace detail

// Strict JSON config applied on top of an existing config. Top-level
// keys: preset, kind, network, params, steps, tail, seeds, master_seed,
// axes, sizes, snapshot_times, cases, out_dir. Unknown keys anywhere are
// errors. A "preset" key resolves first; the remaining keys override it.
inline void apply_config_json(ExperimentConfig& cfg, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");

  detail::reject_unknown(j,
                         {"preset", "kind", "network", "params", "steps", "tail", "seeds",
                          "master_seed", "axes", "sizes", "snapshot_times", "cases", "out_dir"},
                         "");

  if (j.contains("preset")) cfg = make_preset(j.at("preset").get<std::string>());
  if (j.contains("kind")) cfg.kind = kind_from_name(j.at("kind").get<std::string>());

  if (j.contains("network")) {
    const auto& net = j.at("network");
    detail::reject_unknown(net, {"kind", "side", "n", "ring_degree", "rewire_prob"}, "network.");
    if (net.contains("kind")) {
      const auto k = net.at("kind").get<std::string>();
      if (k == "lattice") {
        cfg.net.kind = Network::Kind::SquareLattice;
      } else if (k == "ws") {
        cfg.net.kind = Network::Kind::SmallWorld;
      } else {
        throw std::invalid_argument("network.kind: expected lattice or ws, got " + k);
      }
    }
    if (net.contains("side")) cfg.net.side = net.at("side").get<std::uint32_t>();
    if (net.contains("n")) cfg.net.n = net.at("n").get<std::uint32_t>();
    if (net.contains("ring_degree")) cfg.net.ring_degree = net.at("ring_degree").get<std::uint32_t>();
    if (net.contains("rewire_prob")) cfg.net.rewire_prob = net.at("rewire_prob").get<double>();
  }

  if (j.contains("params")) {
    const auto& pj = j.at("params");
    detail::reject_unknown(
        pj, {"r", "beta", "M", "kappa", "alpha", "gamma", "epsilon", "p", "q"}, "params.");
    for (const auto& [key, value] : pj.items()) {
      if (key == "kappa") {
        cfg.params.fermi.kappa = value.get<double>();
      } else {
        apply_param(cfg.params, key, value.get<double>());
      }
    }
  }

  if (j.contains("steps")) cfg.steps = j.at("steps").get<std::uint32_t>();
  if (j.contains("tail")) cfg.tail = j.at("tail").get<std::uint32_t>();
  if (j.contains("seeds")) cfg.seed_count = j.at("seeds").get<std::uint32_t>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();

  if (j.contains("axes")) {
    cfg.axes.clear();
    for (const auto& aj : j.at("axes")) {
      detail::reject_unknown(aj, {"param", "min", "max", "points"}, "axes.");
      SweepAxis ax;
      ax.param = aj.at("param").get<std::string>();
      ax.min = aj.at("min").get<double>();
      ax.max = aj.at("max").get<double>();
      ax.points = aj.at("points").get<std::uint32_t>();
      cfg.axes.push_back(ax);
    }
  }
  if (j.contains("sizes")) {
    cfg.sizes = j.at("sizes").get<std::vector<std::uint32_t>>();
  }
  if (j.contains("snapshot_times")) {
    cfg.snapshot_times.clear();
    for (const auto& tj : j.at("snapshot_times")) cfg.snapshot_times.insert(tj.get<std::uint32_t>());
  }
  if (j.contains("cases")) {
    cfg.cases.clear();
    for (const auto& cj : j.at("cases")) {
      if (!cj.is_object()) throw std::invalid_argument("cases: each case must be an object");
      ParamCase c;
      for (const auto& [key, value] : cj.items()) c.emplace_back(key, value.get<double>());
      cfg.cases.push_back(std::move(c));
    }
  }
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

  cfg.validate();
}

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  apply_config_json(cfg, text);
  return cfg;
}

// ---- experiment execution ----------------------------------------------

struct TheoryRow {
  std::string label;
  double p, q;
  double expected_learners;
  double simulated_learners;
  double rel_error;
};

struct SweepRow {
  double a1, a2;
  double mean_fc;
};

struct SizeRow {
  std::string label;
  std::uint32_t n;
  double mean_fc;
  double seed_range;  // max - min of per-seed tail means
  double seed_std;    // population std of per-seed tail means
};

struct SizeSummaryRow {
  std::string label;
  double range;  // spread of per-size means
  double std;
};

struct MomentsRow {
  std::string label;
  std::string population;  // "learner" or "profiteer"
  MomentReport report;
};

struct CaseEnsemble {
  std::string label;
  EnsembleSummary summary;
};

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  std::vector<CaseEnsemble> ensembles;
  std::vector<TheoryRow> theory;
  std::vector<SweepRow> sweep;
  std::vector<SizeRow> size_rows;
  std::vector<SizeSummaryRow> size_summary;
  std::vector<MomentsRow> moments_rows;
};

namespace detail {

inline std::string config_comment(const ExperimentConfig& cfg, const Params& resolved,
                                  const std::string& label) {
  std::string s = "# ";
  s += "preset=" + (cfg.preset.empty() ? std::string("custom") : cfg.preset);
  s += " kind=" + kind_name(cfg.kind);
  if (!label.empty()) s += " case=" + label;
  if (cfg.net.kind == Network::Kind::SquareLattice) {
    s += " net=lattice side=" + std::to_string(cfg.net.side);
  } else {
    s += " net=ws n=" + std::to_string(cfg.net.n) +
         " ring_degree=" + std::to_string(cfg.net.ring_degree) +
         " rewire_prob=" + fmt_double(cfg.net.rewire_prob);
  }
  s += " steps=" + std::to_string(cfg.steps) + " tail=" + std::to_string(cfg.tail);
  s += " seeds=" + std::to_string(cfg.seed_count) +
       " master_seed=" + std::to_string(cfg.master_seed);
  s += " r=" + fmt_double(resolved.payoff.r) + " M=" + std::to_string(resolved.memory.m) +
       " beta=" + fmt_double(resolved.memory.beta) + " kappa=" + fmt_double(resolved.fermi.kappa) +
       " alpha=" + fmt_double(resolved.qlearn.alpha) +
       " gamma=" + fmt_double(resolved.qlearn.gamma) +
       " epsilon=" + fmt_double(resolved.qlearn.epsilon) +
       " p=" + fmt_double(resolved.transition.p) + " q=" + fmt_double(resolved.transition.q);
  return s;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& comment,
          const std::string& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
    out_ << comment << '\n' << header << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// Fail on an unwritable output directory before burning CPU on runs.
inline void preflight_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream f(probe, std::ios::binary);
    if (!f) throw std::runtime_error("output directory not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

inline std::string suffixed(const std::string& stem, const std::string& label,
                            const std::string& ext) {
  return label.empty() ? stem + ext : stem + "_" + label + ext;
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double range_of(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo;
}

inline double pop_std_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace detail

// Execute a validated config and emit its data files into out_dir.
// Independent simulation units (one per case / sweep cell / size) take
// seeds derived from the master seed with a disjoint index block, so
// adding seeds to one unit never perturbs another.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path dir = cfg.out_dir;
  detail::preflight_out_dir(dir);

  ExperimentResult result;
  const std::vector<ParamCase> cases = cfg.cases.empty() ? std::vector<ParamCase>{{}} : cfg.cases;
  const bool lone_case = cases.size() == 1 && cases[0].empty();

  std::uint64_t unit = 0;  // disjoint seed-block index
  auto unit_seeds = [&](std::uint64_t u) {
    std::vector<std::uint64_t> seeds(cfg.seed_count);
    for (std::uint32_t k = 0; k < cfg.seed_count; ++k) {
      seeds[k] = derive_run_seed(cfg.master_seed, u * cfg.seed_count + k);
    }
    return seeds;
  };
  auto add_file = [&](const std::filesystem::path& p) { result.files.push_back(p); };

  auto maybe_theory = [&](const std::string& label, const Params& params, double sim_learners) {
    const auto& tp = params.transition;
    if (tp.p > 0.0 && tp.q > 0.0) {
      const auto [exp_l, exp_p] = expected_counts(tp, cfg.net.node_count());
      (void)exp_p;
      result.theory.push_back(
          {label, tp.p, tp.q, exp_l, sim_learners, relative_error(sim_learners, exp_l)});
    }
  };

  switch (cfg.kind) {
    case ExperimentKind::SingleRun:
    case ExperimentKind::SnapshotRun: {
      for (const auto& pc : cases) {
        const std::string label = lone_case ? "" : case_label(pc);
        const Params params = cfg.case_params(pc);
        const std::uint64_t seed = unit_seeds(unit)[0];
        ++unit;

        const Network net = build_network(
            cfg.net, cfg.net.kind == Network::Kind::SquareLattice ? 0 : derive_network_seed(seed));
        const std::set<std::uint32_t> times =
            cfg.kind == ExperimentKind::SnapshotRun ? cfg.snapshot_times : std::set<std::uint32_t>{};
        const RunResult rr = run(net, params, seed, cfg.steps, times);

        const auto series_path = dir / detail::suffixed("series", label, ".csv");
        {
          detail::CsvFile csv(series_path, detail::config_comment(cfg, params, label),
                              "t,f_c,learner_count");
          for (const auto& m : rr.metrics) {
            csv.row({std::to_string(m.t), fmt_double(m.f_c), std::to_string(m.learner_count)});
          }
        }
        add_file(series_path);

        for (const auto& snap : rr.snapshots) {
          const auto snap_path =
              dir / detail::suffixed("snapshot", label, "_t" + std::to_string(snap.t) + ".txt");
          std::ofstream f(snap_path, std::ios::binary);
          if (!f) throw std::runtime_error("cannot open output file: " + snap_path.string());
          f << snap.to_text();
          add_file(snap_path);
        }

        // Tail statistics of this one run.
        std::vector<double> fc_tail, learner_tail;
        fc_tail.reserve(cfg.tail);
        learner_tail.reserve(cfg.tail);
        for (std::size_t k = rr.metrics.size() - cfg.tail; k < rr.metrics.size(); ++k) {
          fc_tail.push_back(rr.metrics[k].f_c);
          learner_tail.push_back(static_cast<double>(rr.metrics[k].learner_count));
        }
        EnsembleSummary summary;
        summary.runs.push_back({seed, detail::mean_of(fc_tail), detail::mean_of(learner_tail)});
        summary.mean_f_c = summary.runs[0].mean_f_c;
        summary.mean_learners = summary.runs[0].mean_learners;
        result.ensembles.push_back({label, summary});
        maybe_theory(label, params, summary.mean_learners);

        if (cfg.kind == ExperimentKind::SingleRun && cfg.tail >= 4 &&
            params.transition.p > 0.0 && params.transition.q > 0.0) {
          const double n = static_cast<double>(cfg.net.node_count());
          std::vector<double> profiteer_tail(learner_tail.size());
          for (std::size_t k = 0; k < learner_tail.size(); ++k) {
            profiteer_tail[k] = n - learner_tail[k];
          }
          try {
            const MomentReport lm = moments(learner_tail);
            const MomentReport pm = moments(profiteer_tail);
            result.moments_rows.push_back({label, "learner", lm});
            result.moments_rows.push_back({label, "profiteer", pm});
            const auto mom_path = dir / detail::suffixed("moments", label, ".csv");
            detail::CsvFile csv(mom_path, detail::config_comment(cfg, params, label),
                                "population,mean,std,skewness,kurtosis");
            csv.row({"learner", fmt_double(lm.mean), fmt_double(lm.std), fmt_double(lm.skewness),
                     fmt_double(lm.kurtosis)});
            csv.row({"profiteer", fmt_double(pm.mean), fmt_double(pm.std), fmt_double(pm.skewness),
                     fmt_double(pm.kurtosis)});
            add_file(mom_path);
          } catch (const std::domain_error&) {
            // constant tail: moments undefined, skip the report
          }
        }
      }
      break;
    }

    case ExperimentKind::Ensemble: {
      const auto ens_path = dir / "ensemble.csv";
      detail::CsvFile csv(ens_path, detail::config_comment(cfg, cfg.params, ""),
                          "case,seed,tail_mean_fc,tail_mean_learner_count");
      for (const auto& pc : cases) {
        const std::string label = lone_case ? "" : case_label(pc);
        const Params params = cfg.case_params(pc);
        const auto seeds = unit_seeds(unit);
        ++unit;
        const EnsembleSummary summary =
            run_ensemble(cfg.net, params, seeds, cfg.steps, cfg.tail);
        for (const auto& rt : summary.runs) {
          csv.row({label, std::to_string(rt.seed), fmt_double(rt.mean_f_c),
                   fmt_double(rt.mean_learners)});
        }
        csv.row({label, "all", fmt_double(summary.mean_f_c), fmt_double(summary.mean_learners)});
        result.ensembles.push_back({label, summary});
        maybe_theory(label, params, summary.mean_learners);
      }
      add_file(ens_path);
      break;
    }

    case ExperimentKind::Sweep2D: {
      const ParamCase base_case = cases[0];
      const Params base = cfg.case_params(base_case);
      const auto v1 = axis_values(cfg.axes[0]);
      const auto v2 = axis_values(cfg.axes[1]);
      const auto sweep_path = dir / "sweep.csv";
      detail::CsvFile csv(sweep_path, detail::config_comment(cfg, base, case_label(base_case)),
                          cfg.axes[0].param + "," + cfg.axes[1].param + ",mean_fc");
      for (double a1 : v1) {
        for (double a2 : v2) {
          Params params = base;
          apply_param(params, cfg.axes[0].param, a1);
          apply_param(params, cfg.axes[1].param, a2);
          params.validate();
          const auto seeds = unit_seeds(unit);
          ++unit;
          const EnsembleSummary summary =
              run_ensemble(cfg.net, params, seeds, cfg.steps, cfg.tail);
          result.sweep.push_back({a1, a2, summary.mean_f_c});
          csv.row({fmt_double(a1), fmt_double(a2), fmt_double(summary.mean_f_c)});
        }
      }
      add_file(sweep_path);
      break;
    }

    case ExperimentKind::SizeSweep: {
      const auto size_path = dir / "size_sweep.csv";
      const auto sum_path = dir / "size_sweep_summary.csv";
      detail::CsvFile csv(size_path, detail::config_comment(cfg, cfg.params, ""),
                          "case,n,mean_fc,seed_range,seed_std");
      detail::CsvFile sum_csv(sum_path, detail::config_comment(cfg, cfg.params, ""),
                              "case,range,std");
      for (const auto& pc : cases) {
        const std::string label = lone_case ? "" : case_label(pc);
        const Params params = cfg.case_params(pc);
        std::vector<double> size_means;
        for (std::uint32_t n : cfg.sizes) {
          NetworkSpec spec = cfg.net;
          if (spec.kind == Network::Kind::SquareLattice) {
            spec.side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(n))));
          } else {
            spec.n = n;
          }
          const auto seeds = unit_seeds(unit);
          ++unit;
          const EnsembleSummary summary = run_ensemble(spec, params, seeds, cfg.steps, cfg.tail);
          std::vector<double> per_seed;
          per_seed.reserve(summary.runs.size());
          for (const auto& rt : summary.runs) per_seed.push_back(rt.mean_f_c);
          const SizeRow row{label, n, summary.mean_f_c, detail::range_of(per_seed),
                            detail::pop_std_of(per_seed)};
          result.size_rows.push_back(row);
          size_means.push_back(row.mean_fc);
          csv.row({label, std::to_string(n), fmt_double(row.mean_fc),
                   fmt_double(row.seed_range), fmt_double(row.seed_std)});
        }
        const SizeSummaryRow srow{label, detail::range_of(size_means),
                                  detail::pop_std_of(size_means)};
        result.size_summary.push_back(srow);
        sum_csv.row({label, fmt_double(srow.range), fmt_double(srow.std)});
      }
      add_file(size_path);
      add_file(sum_path);
      break;
    }
  }

  if (!result.theory.empty()) {
    const auto theory_path = dir / "theory.csv";
    detail::CsvFile csv(theory_path, detail::config_comment(cfg, cfg.params, ""),
                        "case,p,q,expected_learners,simulated_learners,relative_error");
    for (const auto& tr : result.theory) {
      csv.row({tr.label, fmt_double(tr.p), fmt_double(tr.q), fmt_double(tr.expected_learners),
               fmt_double(tr.simulated_learners), fmt_double(tr.rel_error)});
    }
    add_file(theory_path);
  }

  return result;
}

}  // namespace snowsim
