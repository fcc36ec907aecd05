// zanova: decompositions, submodel reports, Sobol replications and self-checks.

#include "zanova/error.hpp"
#include "zanova/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <string>
#include <thread>

namespace ex = zanova::experiment;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  int replicates = 0;
  int nodes = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool replicated) {
  cmd->add_option("--config", args.config, "JSON config; omitted keys take the defaults")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
  cmd->add_option("--nodes", args.nodes, "quadrature nodes per measure (overrides the config)");
  if (replicated) {
    cmd->add_option("--replicates", args.replicates, "number of replicates (overrides the config)");
    cmd->add_option("--threads", args.threads, "worker threads (default: hardware concurrency)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-mean ANOVA kernels, submodels and analytic Sobol indices"};
  app.require_subcommand(1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "print the selected command's default config and exit");

  CommonArgs args;
  auto* decompose = app.add_subcommand("decompose", "tabulate k, k0 and k1 on slices");
  auto* fit_report = app.add_subcommand("fit-report", "fit a model and report its submodels");
  auto* replicate_g = app.add_subcommand("replicate-g", "Sobol indices of the g-function over replicates");
  auto* replicate_noise =
      app.add_subcommand("replicate-noise", "Sobol indices of a noisy quadratic across nuggets");
  auto* verify = app.add_subcommand("verify", "numerical self-checks against a brute-force oracle");
  add_common(decompose, args, false);
  add_common(fit_report, args, false);
  add_common(replicate_g, args, true);
  add_common(replicate_noise, args, true);
  add_common(verify, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    ex::Overrides ov;
    for (auto* cmd : {decompose, fit_report, replicate_g, replicate_noise, verify}) {
      if (!cmd->parsed()) continue;
      if (cmd->count("--seed")) ov.seed = args.seed;
      if (cmd->count("--nodes")) ov.nodes = args.nodes;
      if (cmd->get_option_no_throw("--replicates") && cmd->count("--replicates"))
        ov.replicates = args.replicates;
    }
    if (print_defaults) {
      nlohmann::json d;
      if (decompose->parsed()) d = ex::default_decompose();
      if (fit_report->parsed()) d = ex::default_fit_report();
      if (replicate_g->parsed()) d = ex::default_replicate_g();
      if (replicate_noise->parsed()) d = ex::default_replicate_noise();
      if (verify->parsed()) d = ex::default_verify();
      fmt::print("{}\n", d.dump(2));
      return 0;
    }
    const nlohmann::json user = args.config.empty() ? nlohmann::json() : ex::load_config_file(args.config);
    const int threads =
        args.threads > 0 ? args.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    ex::CommandOutput out;
    if (decompose->parsed()) out = ex::cmd_decompose(user, ov, args.out);
    if (fit_report->parsed()) out = ex::cmd_fit_report(user, ov, args.out);
    if (replicate_g->parsed()) out = ex::cmd_replicate_g(user, ov, args.out, threads);
    if (replicate_noise->parsed()) out = ex::cmd_replicate_noise(user, ov, args.out, threads);
    if (verify->parsed()) out = ex::cmd_verify(user, ov, args.out);

    fmt::print("{}", out.summary);
    if (!out.summary.empty() && out.summary.back() != '\n') fmt::print("\n");
    for (const auto& f : out.files) fmt::print("wrote {}\n", f.string());
    return out.exit_code;
  } catch (const zanova::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const zanova::NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
