#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snowsim/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

snowsim::SweepAxis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4) {
    throw std::invalid_argument("axis format is name:min:max:points, got " + text);
  }
  snowsim::SweepAxis ax;
  ax.param = parts[0];
  try {
    ax.min = std::stod(parts[1]);
    ax.max = std::stod(parts[2]);
    ax.points = static_cast<std::uint32_t>(std::stoul(parts[3]));
  } catch (const std::exception&) {
    throw std::invalid_argument("axis format is name:min:max:points, got " + text);
  }
  return ax;
}

struct Flags {
  std::string config_path, preset, out_dir, net_kind;
  std::uint64_t master_seed = 0;
  std::uint32_t seed_count = 0, steps = 0, tail = 0;
  double r = 0, beta = 0, kappa = 0, alpha = 0, gamma = 0, epsilon = 0, p = 0, q = 0;
  std::uint32_t m = 0, side = 0, n = 0, ring_degree = 0;
  double rewire_prob = 0;
  std::string axis1, axis2;
  std::vector<std::uint32_t> sizes, snapshot_times;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--preset", f.preset, "named experiment preset (fig2, table1, ..., or -desk)");
  sub->add_option("--seed", f.master_seed, "master seed");
  sub->add_option("--seeds", f.seed_count, "number of independent runs");
  sub->add_option("--steps", f.steps, "rounds per run");
  sub->add_option("--tail", f.tail, "steps averaged at the end of a run");
  sub->add_option("--out", f.out_dir, "output directory");
  sub->add_option("--r", f.r, "cost-to-benefit ratio");
  sub->add_option("--beta", f.beta, "memory decay factor");
  sub->add_option("--m", f.m, "memory length");
  sub->add_option("--kappa", f.kappa, "imitation noise");
  sub->add_option("--alpha", f.alpha, "learning rate");
  sub->add_option("--gamma", f.gamma, "discount factor");
  sub->add_option("--epsilon", f.epsilon, "exploration rate");
  sub->add_option("--p", f.p, "learner-to-profiteer probability");
  sub->add_option("--q", f.q, "profiteer-to-learner probability");
  sub->add_option("--net", f.net_kind, "network kind")
      ->check(CLI::IsMember({"lattice", "ws"}));
  sub->add_option("--side", f.side, "lattice side");
  sub->add_option("--n", f.n, "small-world node count");
  sub->add_option("--ring-degree", f.ring_degree, "small-world ring degree");
  sub->add_option("--rewire-prob", f.rewire_prob, "small-world rewiring probability");
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo simulator of the spatial snowdrift game with memory-weighted payoffs\n"
      "and agents that switch between imitation and Q-learning roles"};
  app.require_subcommand(1);

  Flags f;
  CLI::App* sub_run = app.add_subcommand("run", "single trajectory or seed ensemble");
  CLI::App* sub_sweep = app.add_subcommand("sweep", "mean cooperation over a 2-parameter grid");
  CLI::App* sub_snap = app.add_subcommand("snapshot", "trajectory plus strategy maps at fixed times");
  CLI::App* sub_size = app.add_subcommand("size-sweep", "mean cooperation across network sizes");
  for (CLI::App* sub : {sub_run, sub_sweep, sub_snap, sub_size}) add_common_options(sub, f);
  sub_sweep->add_option("--axis1", f.axis1, "first sweep axis as name:min:max:points");
  sub_sweep->add_option("--axis2", f.axis2, "second sweep axis as name:min:max:points");
  sub_size->add_option("--sizes", f.sizes, "network sizes to compare");
  sub_snap->add_option("--snapshot-times", f.snapshot_times, "rounds at which to dump strategy maps");

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  auto passed = [&](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };

  snowsim::ExperimentConfig cfg;
  const bool kind_fixed = passed("--preset") || passed("--config");
  if (passed("--preset")) cfg = snowsim::make_preset(f.preset);
  if (passed("--config")) snowsim::apply_config_json(cfg, slurp(f.config_path));

  if (passed("--seed")) cfg.master_seed = f.master_seed;
  if (passed("--seeds")) cfg.seed_count = f.seed_count;
  if (passed("--steps")) cfg.steps = f.steps;
  if (passed("--tail")) cfg.tail = f.tail;
  if (passed("--out")) cfg.out_dir = f.out_dir;
  if (passed("--r")) snowsim::apply_param(cfg.params, "r", f.r);
  if (passed("--beta")) snowsim::apply_param(cfg.params, "beta", f.beta);
  if (passed("--m")) snowsim::apply_param(cfg.params, "M", f.m);
  if (passed("--kappa")) cfg.params.fermi.kappa = f.kappa;
  if (passed("--alpha")) snowsim::apply_param(cfg.params, "alpha", f.alpha);
  if (passed("--gamma")) snowsim::apply_param(cfg.params, "gamma", f.gamma);
  if (passed("--epsilon")) snowsim::apply_param(cfg.params, "epsilon", f.epsilon);
  if (passed("--p")) snowsim::apply_param(cfg.params, "p", f.p);
  if (passed("--q")) snowsim::apply_param(cfg.params, "q", f.q);
  if (passed("--net")) {
    cfg.net.kind = f.net_kind == "ws" ? snowsim::Network::Kind::SmallWorld
                                      : snowsim::Network::Kind::SquareLattice;
  }
  if (passed("--side")) cfg.net.side = f.side;
  if (passed("--n")) cfg.net.n = f.n;
  if (passed("--ring-degree")) cfg.net.ring_degree = f.ring_degree;
  if (passed("--rewire-prob")) cfg.net.rewire_prob = f.rewire_prob;
  if (passed("--axis1") != passed("--axis2")) {
    throw std::invalid_argument("--axis1 and --axis2 must be given together");
  }
  if (passed("--axis1")) cfg.axes = {parse_axis(f.axis1), parse_axis(f.axis2)};
  if (passed("--sizes")) cfg.sizes = f.sizes;
  if (passed("--snapshot-times")) {
    cfg.snapshot_times.clear();
    for (auto t : f.snapshot_times) cfg.snapshot_times.insert(t);
  }

  using snowsim::ExperimentKind;
  auto demand_kind = [&](ExperimentKind want) {
    if (!kind_fixed) {
      cfg.kind = want;
    } else if (cfg.kind != want) {
      throw std::invalid_argument("the selected preset/config is a '" +
                                  snowsim::kind_name(cfg.kind) +
                                  "' experiment; invoke the matching subcommand");
    }
  };
  if (sub == sub_run) {
    const ExperimentKind by_seeds =
        cfg.seed_count == 1 ? ExperimentKind::SingleRun : ExperimentKind::Ensemble;
    if (!kind_fixed) {
      cfg.kind = by_seeds;
    } else if (cfg.kind != ExperimentKind::SingleRun && cfg.kind != ExperimentKind::Ensemble) {
      throw std::invalid_argument("the selected preset/config is a '" +
                                  snowsim::kind_name(cfg.kind) +
                                  "' experiment; invoke the matching subcommand");
    }
  } else if (sub == sub_sweep) {
    demand_kind(ExperimentKind::Sweep2D);
  } else if (sub == sub_snap) {
    demand_kind(ExperimentKind::SnapshotRun);
  } else {
    demand_kind(ExperimentKind::SizeSweep);
  }

  const snowsim::ExperimentResult result = snowsim::run_experiment(cfg);
  for (const auto& file : result.files) std::cout << "wrote " << file.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
