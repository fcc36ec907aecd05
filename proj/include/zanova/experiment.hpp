#ifndef ZANOVA_EXPERIMENT_HPP
#define ZANOVA_EXPERIMENT_HPP

// Experiment configurations and the command implementations behind the
// `zanova` CLI. Every command has a built-in default configuration; a
// user config replaces top-level keys and unknown keys are rejected.

#include "zanova/anova_kernel.hpp"
#include "zanova/kernels.hpp"
#include "zanova/quadrature.hpp"
#include "zanova/subset.hpp"
#include "zanova/testbed.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace zanova::experiment {

inline constexpr const char* kSchema = "zanova/1";

struct MeasureSpec {
  MeasureKind kind = MeasureKind::uniform;
  double a = 0.0;
  double b = 1.0;
  int nodes = kDefaultNodes;

  QuadratureRule rule() const;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::matern32;
  double theta = 1.0;

  UnivariateKernel kernel() const;
  std::string name() const;
};

struct TestSpec {
  TestFunction::Kind kind = TestFunction::Kind::g_function;
  std::vector<double> a;

  TestFunction function() const;
  int dimension() const;
};

struct ComponentSpec {
  KernelSpec kernel;
  MeasureSpec measure;
};

struct ModelSpec {
  AnovaMode mode = AnovaMode::star;
  double scale = 1.0;
  std::vector<ComponentSpec> components;  // length 1 (shared) or d

  AnovaKernel build(int d) const;
  std::vector<QuadratureRule> rules(int d) const;
};

struct DoeConfig {
  int n = 20;
  int restarts = 100;
  std::vector<double> lower;  // empty: taken from the measure supports
  std::vector<double> upper;

  DoeSpec spec(int d, const std::vector<MeasureSpec>& measures, std::uint64_t seed) const;
};

struct DecomposeConfig {
  std::vector<KernelSpec> kernels;
  MeasureSpec measure;
  std::vector<double> slices;
  int grid = 101;
};

struct FitReportConfig {
  TestSpec test;
  ModelSpec model;
  DoeConfig doe;
  double lambda = 0.0;
  bool noise = false;
  std::uint64_t seed = 1;
  int grid = 60;
  int max_order = 3;
};

struct ReplicateGConfig {
  TestSpec test;
  std::vector<KernelSpec> kernels;
  MeasureSpec measure;
  DoeConfig doe;
  double scale = 1.0;
  int replicates = 50;
  std::uint64_t seed = 1;
  std::vector<Subset> subsets;
};

struct ReplicateNoiseConfig {
  TestSpec test;
  KernelSpec kernel;
  MeasureSpec measure;
  DoeConfig doe;
  double scale = 200.0;
  std::vector<double> lambdas;
  int replicates = 50;
  std::uint64_t seed = 1;
  std::vector<Subset> subsets;
};

struct VerifyTolerances {
  double equivalence = 1e-8;
  double zero_mean = 1e-10;
  double orthogonality = 1e-8;
  double normalization = 1e-8;
  double sobol_grid = 1e-6;
  double interpolation = 1e-6;
};

struct VerifyConfig {
  TestSpec test;
  KernelSpec kernel;
  MeasureSpec measure;
  DoeConfig doe;
  std::uint64_t seed = 1;
  VerifyTolerances tolerances;
  /// "none" or "gamma_sign" (negates Gamma_1; a negative control).
  std::string fault = "none";
};

/// Command-line overrides applied on top of a config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> nodes;
};

// Default configurations as JSON.
nlohmann::json default_decompose();
nlohmann::json default_fit_report();
nlohmann::json default_replicate_g();
nlohmann::json default_replicate_noise();
nlohmann::json default_verify();

/// Parses a JSON document; syntax errors become ConfigError carrying the
/// line and column.
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Replaces the defaults' top-level keys with the user's, rejecting keys
/// the defaults do not have, then writes the overrides in.
nlohmann::json merge_config(const nlohmann::json& defaults, const nlohmann::json& user,
                            const Overrides& overrides = {});

DecomposeConfig parse_decompose(const nlohmann::json& j);
FitReportConfig parse_fit_report(const nlohmann::json& j);
ReplicateGConfig parse_replicate_g(const nlohmann::json& j);
ReplicateNoiseConfig parse_replicate_noise(const nlohmann::json& j);
VerifyConfig parse_verify(const nlohmann::json& j);

/// FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// Seed of stream `stream`, replicate `replicate`, sub-index `k`, derived
/// from `master` through std::seed_seq.
std::uint64_t derive_seed(std::uint64_t master, std::uint32_t stream, std::uint32_t replicate,
                          std::uint32_t k = 0);

struct IndexStats {
  Subset subset;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

struct ReplicateGroup {
  std::string label;                         // kernel name or lambda
  std::vector<IndexStats> stats;             // one per configured subset
  IndexStats sum;                            // of the configured subsets' indices
  std::vector<std::vector<double>> samples;  // [replicate][subset]
  std::vector<double> jitter;                // per replicate
};

struct ReplicateResult {
  std::vector<ReplicateGroup> groups;
};

ReplicateResult run_replicate_g(const ReplicateGConfig& config, int threads = 1);
ReplicateResult run_replicate_noise(const ReplicateNoiseConfig& config, int threads = 1);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyResult {
  std::vector<CheckResult> checks;
  bool pass() const;
};

VerifyResult run_verify(const VerifyConfig& config);

struct CommandOutput {
  std::vector<std::filesystem::path> files;
  int exit_code = 0;
  std::string summary;  // human-readable, printed by the CLI
};

// Each command merges `user` into its defaults, runs, and writes into `out_dir`.
CommandOutput cmd_decompose(const nlohmann::json& user, const Overrides& ov,
                            const std::filesystem::path& out_dir);
CommandOutput cmd_fit_report(const nlohmann::json& user, const Overrides& ov,
                             const std::filesystem::path& out_dir);
CommandOutput cmd_replicate_g(const nlohmann::json& user, const Overrides& ov,
                              const std::filesystem::path& out_dir, int threads = 1);
CommandOutput cmd_replicate_noise(const nlohmann::json& user, const Overrides& ov,
                                  const std::filesystem::path& out_dir, int threads = 1);
CommandOutput cmd_verify(const nlohmann::json& user, const Overrides& ov,
                         const std::filesystem::path& out_dir);

}  // namespace zanova::experiment

#endif
