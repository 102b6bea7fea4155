#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "casvm/cli.hpp"

namespace casvm::cli {

namespace {

// output is buffered and written once at the end of the command
int write_out(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << payload;
  return kExitOk;
}

std::uint64_t effective_seed(const Config& cfg, bool seed_set, std::uint64_t flag_seed) {
  if (seed_set) return flag_seed;
  if (cfg.has("", "seed")) return static_cast<std::uint64_t>(parse_double(cfg.get("", "seed")));
  return 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"rate-distortion-cost regions for cascade source coding with a controllable side-information channel"};
  app.require_subcommand(1);

  std::string config_path, out_path, system_arg, target_arg;
  std::uint64_t seed = 1;
  int trials = 1000;
  double tol = 1e-9;
  bool seed_set = false, out_set = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "structured-text run configuration");
    if (needs_config) c->required();
    sub->add_option("--out", out_path, "output path (default stdout)")->each([&](const std::string&) {
      out_set = true;
    });
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--trials", trials, "sample count for randomized checks");
  };

  auto* eval = app.add_subcommand("eval", "evaluate region points for the configured topology");
  add_common(eval, true);
  auto* optimize = app.add_subcommand("optimize", "trace the region boundary under the configured budgets");
  add_common(optimize, true);
  auto* fig6 = app.add_subcommand("fig6", "greedy-vs-optimal weighted sum-rate sweep (CSV)");
  add_common(fig6, false);
  auto* fme = app.add_subcommand("fme-check", "verify a rate-splitting projection against its region");
  fme->add_option("system", system_arg, "prop2 | prop3 | prop2-mutated | system file")->required();
  fme->add_option("target", target_arg, "target system file (custom systems only)");
  add_common(fme, false);
  auto* ocheck = app.add_subcommand("oracle-check", "randomized cross-validation battery");
  add_common(ocheck, false);
  ocheck->add_option("--tol", tol, "agreement tolerance for the battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    const std::uint64_t run_seed = effective_seed(cfg, seed_set, seed);
    if (!out_set && cfg.has("", "out")) out_path = cfg.get("", "out");

    CommonOptions opt;
    opt.seed = run_seed;
    opt.trials = trials;

    std::ostringstream payload;
    int rc = kExitOk;
    if (app.got_subcommand(eval)) {
      rc = cmd_eval(cfg, opt, payload);
    } else if (app.got_subcommand(optimize)) {
      rc = cmd_optimize(cfg, opt, payload);
    } else if (app.got_subcommand(fig6)) {
      Fig6Options f;
      if (cfg.has("sweep", "rb")) f.rb = parse_double(cfg.get("sweep", "rb"));
      if (cfg.has("sweep", "delta")) f.delta = parse_double(cfg.get("sweep", "delta"));
      if (cfg.has("sweep", "gamma")) f.gammas = parse_double_list(cfg.get("sweep", "gamma"));
      if (cfg.has("sweep", "eta")) f.etas = parse_double_list(cfg.get("sweep", "eta"));
      if (cfg.has("grid", "coarse")) f.coarse = static_cast<int>(parse_double(cfg.get("grid", "coarse")));
      if (cfg.has("grid", "fine")) f.fine = static_cast<int>(parse_double(cfg.get("grid", "fine")));
      rc = cmd_fig6(f, config_hash(cfg, run_seed), payload);
    } else if (app.got_subcommand(fme)) {
      rc = cmd_fme_check(system_arg, target_arg, opt, payload);
    } else if (app.got_subcommand(ocheck)) {
      OracleCheckOptions o;
      o.trials = trials > 0 ? std::min(trials, 200) : 25;
      o.seed = run_seed;
      o.tol = tol;
      rc = cmd_oracle_check(o, payload);
    }
    write_out(out_path, payload.str());
    return rc;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace casvm::cli
