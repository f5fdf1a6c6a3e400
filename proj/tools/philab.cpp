// philab: run one experiment from a config file, or the full acceptance suite.
//
// Exit status: 0 when every verdict passes, 1 when any fails, 2 for config or
// usage errors, 3 when a solver or numeric error aborts the run.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "philab/acceptance.hpp"
#include "philab/config.hpp"
#include "philab/errors.hpp"
#include "philab/expression.hpp"
#include "philab/experiments.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int run_command(const std::string& path, const philab::ConfigOverrides& overrides) {
  philab::ExperimentConfig config = philab::load_config(path);
  philab::apply_overrides(config, overrides);
  const philab::ExperimentResult result = philab::run_experiment(config);
  philab::write_result(result, config.out_dir);
  for (const philab::Verdict& v : result.verdicts) {
    std::cout << philab::format_verdict(v);
    if (!v.detail.empty()) std::cout << "  " << v.detail;
    std::cout << '\n';
  }
  std::cout << "wrote " << config.out_dir.string() << '\n';
  return result.all_pass() ? 0 : kExitFail;
}

int verify_command(const philab::AcceptanceOptions& base) {
  philab::AcceptanceOptions opts = base;
  opts.on_result = [](const philab::CriterionResult& r) {
    std::cout << philab::format_criterion(r) << std::endl;
  };
  const auto results = philab::run_acceptance(opts);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.pass();
  std::cout << "wrote " << opts.out_dir.string() << '\n';
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments for Phi-Laplacian energies and their p -> infinity limits"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out, p_sweep;
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
  // --h is the grid spacing, so help is long-form only here.
  run->set_help_flag("--help", "Print this help message and exit");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Seed (overrides the config)");
  run->add_option("--p-sweep", p_sweep, "Comma separated exponents, e.g. 4,8,16");
  run->add_option("--h", h, "Grid spacing; must divide the box");

  philab::AcceptanceOptions verify_opts;
  std::string verify_out = verify_opts.out_dir.string();
  bool no_rerun = false;
  CLI::App* verify = app.add_subcommand("verify", "Run acceptance criteria 1-13");
  verify->add_option("--out", verify_out, "Output directory")->capture_default_str();
  verify->add_option("--seed", verify_opts.seed, "Seed")->capture_default_str();
  verify->add_flag("--no-rerun", no_rerun, "Skip the determinism rerun (criterion 13)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      philab::ConfigOverrides o;
      if (out) o.out_dir = *out;
      o.seed = seed;
      o.h = h;
      if (p_sweep) o.p_sweep = philab::parse_real_list(*p_sweep);
      return run_command(config_path, o);
    }
    verify_opts.out_dir = verify_out;
    verify_opts.determinism_rerun = !no_rerun;
    return verify_command(verify_opts);
  } catch (const philab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const philab::ExpressionError& e) {
    std::cerr << "config error: --p-sweep: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
