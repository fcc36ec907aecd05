#include "zanova/experiment.hpp"

#include "zanova/error.hpp"
#include "zanova/gp_model.hpp"
#include "zanova/oracle.hpp"
#include "zanova/sobol.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace zanova::experiment {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- json access

std::string child(const std::string& path, std::string_view key) {
  return fmt::format("{}.{}", path, key);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", path));
}

void expect_keys(const json& j, std::initializer_list<std::string_view> allowed,
                 const std::string& path) {
  expect_object(j, path);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(fmt::format("{}: unknown key '{}'", path, key));
  }
}

double read_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(fmt::format("{}: expected a number", path));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(fmt::format("{}: must be finite", path));
  return v;
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", path));
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(fmt::format("{}: integer out of range", path));
  return static_cast<int>(v);
}

std::uint64_t read_u64(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0))
    throw ConfigError(fmt::format("{}: expected a non-negative integer", path));
  return j.get<std::uint64_t>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(fmt::format("{}: expected a string", path));
  return j.get<std::string>();
}

std::vector<double> read_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(fmt::format("{}: expected an array of numbers", path));
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(read_double(j[k], fmt::format("{}[{}]", path, k)));
  return out;
}

// Scalar or array of numbers.
std::vector<double> read_bounds(const json& j, const std::string& path) {
  if (j.is_number()) return {read_double(j, path)};
  return read_doubles(j, path);
}

std::vector<Subset> read_subsets(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(fmt::format("{}: expected a nonempty array of subsets", path));
  std::vector<Subset> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto p = fmt::format("{}[{}]", path, k);
    if (!j[k].is_array() || j[k].empty())
      throw ConfigError(fmt::format("{}: expected a nonempty array of 1-based dimensions", p));
    std::vector<int> labels;
    for (std::size_t m = 0; m < j[k].size(); ++m)
      labels.push_back(read_int(j[k][m], fmt::format("{}[{}]", p, m)));
    try {
      out.push_back(Subset::from_labels(labels));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}: {}", p, e.what()));
    }
  }
  return out;
}

// Wraps library precondition errors raised while building from a config.
template <class Fn>
auto checked(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

// ------------------------------------------------------------- spec parsing

MeasureSpec parse_measure(const json& j, const std::string& path) {
  expect_keys(j, {"kind", "a", "b", "nodes"}, path);
  MeasureSpec m;
  const std::string kind = j.contains("kind") ? read_string(j["kind"], child(path, "kind")) : "uniform";
  if (kind == "uniform") {
    m.kind = MeasureKind::uniform;
    m.a = 0.0;
    m.b = 1.0;
  } else if (kind == "normal") {
    m.kind = MeasureKind::standard_normal;
    m.a = -8.0;
    m.b = 8.0;
  } else {
    throw ConfigError(fmt::format("{}: kind must be \"uniform\" or \"normal\", got \"{}\"",
                                  child(path, "kind"), kind));
  }
  if (j.contains("a")) m.a = read_double(j["a"], child(path, "a"));
  if (j.contains("b")) m.b = read_double(j["b"], child(path, "b"));
  if (j.contains("nodes")) m.nodes = read_int(j["nodes"], child(path, "nodes"));
  checked(path, [&] { return m.rule(); });
  return m;
}

KernelSpec parse_kernel(const json& j, const std::string& path) {
  expect_keys(j, {"family", "theta"}, path);
  if (!j.contains("family")) throw ConfigError(fmt::format("{}: missing 'family'", path));
  KernelSpec k;
  const std::string fam = read_string(j["family"], child(path, "family"));
  k.family = checked(child(path, "family"), [&] { return parse_family(fam); });
  if (j.contains("theta")) {
    if (k.family != KernelFamily::gaussian && k.family != KernelFamily::matern32)
      throw ConfigError(fmt::format("{}: family '{}' takes no lengthscale", child(path, "theta"), fam));
    k.theta = read_double(j["theta"], child(path, "theta"));
  }
  checked(path, [&] { return k.kernel(); });
  return k;
}

std::vector<KernelSpec> parse_kernels(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(fmt::format("{}: expected a nonempty array of kernels", path));
  std::vector<KernelSpec> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(parse_kernel(j[k], fmt::format("{}[{}]", path, k)));
  return out;
}

TestSpec parse_test(const json& j, const std::string& path) {
  expect_keys(j, {"test", "a"}, path);
  if (!j.contains("test")) throw ConfigError(fmt::format("{}: missing 'test'", path));
  TestSpec t;
  const std::string kind = read_string(j["test"], child(path, "test"));
  if (kind == "g") {
    t.kind = TestFunction::Kind::g_function;
    if (!j.contains("a")) throw ConfigError(fmt::format("{}: g-function needs 'a'", path));
    t.a = read_doubles(j["a"], child(path, "a"));
  } else if (kind == "quadratic") {
    t.kind = TestFunction::Kind::quadratic;
    if (j.contains("a")) throw ConfigError(fmt::format("{}: quadratic takes no 'a'", path));
  } else {
    throw ConfigError(fmt::format("{}: test must be \"g\" or \"quadratic\", got \"{}\"",
                                  child(path, "test"), kind));
  }
  checked(path, [&] { return t.function(); });
  return t;
}

ComponentSpec parse_component(const json& j, const std::string& path) {
  expect_keys(j, {"kernel", "measure"}, path);
  if (!j.contains("kernel")) throw ConfigError(fmt::format("{}: missing 'kernel'", path));
  ComponentSpec c;
  c.kernel = parse_kernel(j["kernel"], child(path, "kernel"));
  c.measure = j.contains("measure") ? parse_measure(j["measure"], child(path, "measure"))
                                    : MeasureSpec{};
  return c;
}

ModelSpec parse_model(const json& j, const std::string& path) {
  expect_keys(j, {"mode", "scale", "components"}, path);
  ModelSpec m;
  if (j.contains("mode")) {
    const std::string mode = read_string(j["mode"], child(path, "mode"));
    if (mode == "star") m.mode = AnovaMode::star;
    else if (mode == "standard") m.mode = AnovaMode::standard;
    else throw ConfigError(fmt::format("{}: mode must be \"star\" or \"standard\"", child(path, "mode")));
  }
  if (j.contains("scale")) m.scale = read_double(j["scale"], child(path, "scale"));
  if (!(m.scale > 0.0)) throw ConfigError(fmt::format("{}: must be positive", child(path, "scale")));
  if (!j.contains("components") || !j["components"].is_array() || j["components"].empty())
    throw ConfigError(fmt::format("{}: expected a nonempty array", child(path, "components")));
  for (std::size_t k = 0; k < j["components"].size(); ++k)
    m.components.push_back(
        parse_component(j["components"][k], fmt::format("{}.components[{}]", path, k)));
  return m;
}

DoeConfig parse_doe(const json& j, const std::string& path) {
  expect_keys(j, {"n", "restarts", "lower", "upper"}, path);
  DoeConfig d;
  if (j.contains("n")) d.n = read_int(j["n"], child(path, "n"));
  if (j.contains("restarts")) d.restarts = read_int(j["restarts"], child(path, "restarts"));
  if (j.contains("lower")) d.lower = read_bounds(j["lower"], child(path, "lower"));
  if (j.contains("upper")) d.upper = read_bounds(j["upper"], child(path, "upper"));
  if (d.n < 2) throw ConfigError(fmt::format("{}: need at least 2 points", child(path, "n")));
  if (d.restarts < 1) throw ConfigError(fmt::format("{}: must be >= 1", child(path, "restarts")));
  if (d.lower.empty() != d.upper.empty())
    throw ConfigError(fmt::format("{}: give both 'lower' and 'upper' or neither", path));
  return d;
}

// ---------------------------------------------------------------- utilities

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
}

std::string csv_header(const char* command, const json& merged, std::uint64_t seed) {
  return fmt::format("# schema={} command={} config_hash={} seed={}\n", kSchema, command,
                     config_hash(merged), seed);
}

json meta(const char* command, const json& merged, std::uint64_t seed) {
  json m;
  m["schema"] = kSchema;
  m["command"] = command;
  m["config_hash"] = config_hash(merged);
  m["seed"] = seed;
  m["config"] = merged;
  return m;
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int extra = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(count, 1))) - 1;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < extra; ++t) pool.emplace_back(worker);
    worker();
  }
  // Report the failure of the lowest-index task, independent of scheduling.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

IndexStats summarize(Subset s, const std::vector<double>& values) {
  IndexStats st{s, 0.0, 0.0};
  if (values.empty()) return st;
  for (double v : values) st.mean += v;
  st.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return st;
}

ReplicateGroup summarize_group(std::string label, const std::vector<Subset>& subsets,
                               std::vector<std::vector<double>> samples,
                               std::vector<double> jitter) {
  ReplicateGroup g;
  g.label = std::move(label);
  std::vector<double> sums;
  for (const auto& row : samples) {
    double s = 0.0;
    for (double v : row) s += v;
    sums.push_back(s);
  }
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    std::vector<double> col;
    for (const auto& row : samples) col.push_back(row[k]);
    g.stats.push_back(summarize(subsets[k], col));
  }
  g.sum = summarize(Subset(), sums);
  g.samples = std::move(samples);
  g.jitter = std::move(jitter);
  return g;
}

std::vector<double> indices_for(const FittedModel& model, const std::vector<Subset>& subsets) {
  SobolOptions opts;
  opts.max_order = 1;
  opts.extra = subsets;
  const auto report = sobol_indices(model, opts);
  std::vector<double> out;
  for (Subset s : subsets) out.push_back(report.index(s));
  return out;
}

std::string replicate_table(const char* command, const char* group_column,
                            const ReplicateResult& result, const json& merged,
                            std::uint64_t seed, int replicates) {
  std::string out = csv_header(command, merged, seed);
  out += fmt::format("# replicates={}\n", replicates);
  out += fmt::format("{},subset,mean,std\n", group_column);
  for (const auto& g : result.groups) {
    for (const auto& st : g.stats)
      out += fmt::format("{},\"{}\",{:.6f},{:.6f}\n", g.label, st.subset.label(), st.mean, st.std);
    out += fmt::format("{},sum,{:.6f},{:.6f}\n", g.label, g.sum.mean, g.sum.std);
  }
  return out;
}

std::string replicate_raw(const char* command, const char* group_column,
                          const ReplicateResult& result, const json& merged, std::uint64_t seed) {
  std::string out = csv_header(command, merged, seed);
  out += fmt::format("{},replicate,subset,index,jitter\n", group_column);
  for (const auto& g : result.groups) {
    for (std::size_t r = 0; r < g.samples.size(); ++r)
      for (std::size_t k = 0; k < g.stats.size(); ++k)
        out += fmt::format("{},{},\"{}\",{:.17g},{:.3g}\n", g.label, r, g.stats[k].subset.label(),
                           g.samples[r][k], g.jitter[r]);
  }
  return out;
}

std::string format_lambda(double v) { return fmt::format("{:g}", v); }

}  // namespace

// ------------------------------------------------------------ spec builders

QuadratureRule MeasureSpec::rule() const {
  const Measure m = kind == MeasureKind::uniform ? Measure::uniform(a, b)
                                                 : Measure::standard_normal(a, b);
  return build_rule(m, nodes);
}

UnivariateKernel KernelSpec::kernel() const {
  switch (family) {
    case KernelFamily::brownian: return UnivariateKernel::brownian();
    case KernelFamily::shifted_brownian: return UnivariateKernel::shifted_brownian();
    case KernelFamily::gaussian: return UnivariateKernel::gaussian(theta);
    case KernelFamily::matern32: return UnivariateKernel::matern32(theta);
    case KernelFamily::custom: break;
  }
  throw ConfigError("custom kernels cannot be configured from JSON");
}

std::string KernelSpec::name() const {
  if (family == KernelFamily::gaussian || family == KernelFamily::matern32)
    return fmt::format("{}(theta={:g})", family_name(family), theta);
  return std::string(family_name(family));
}

TestFunction TestSpec::function() const {
  return kind == TestFunction::Kind::g_function ? TestFunction::g_function(a)
                                                : TestFunction::quadratic();
}

int TestSpec::dimension() const {
  return kind == TestFunction::Kind::g_function ? static_cast<int>(a.size()) : 2;
}

namespace {
const ComponentSpec& component_for(const ModelSpec& m, int d, int i) {
  if (m.components.size() != 1 && static_cast<int>(m.components.size()) != d)
    throw ConfigError(fmt::format("config.model.components: need 1 or {} entries, got {}", d,
                                  m.components.size()));
  return m.components.size() == 1 ? m.components[0] : m.components[i];
}
}  // namespace

AnovaKernel ModelSpec::build(int d) const {
  if (mode == AnovaMode::star) {
    std::vector<ZeroMeanKernel> zks;
    for (int i = 0; i < d; ++i) {
      const auto& c = component_for(*this, d, i);
      zks.emplace_back(c.kernel.kernel(), c.measure.rule());
    }
    return AnovaKernel::star(std::move(zks), scale);
  }
  std::vector<UnivariateKernel> ks;
  for (int i = 0; i < d; ++i) ks.push_back(component_for(*this, d, i).kernel.kernel());
  return AnovaKernel::standard(std::move(ks), scale);
}

std::vector<QuadratureRule> ModelSpec::rules(int d) const {
  std::vector<QuadratureRule> out;
  for (int i = 0; i < d; ++i) out.push_back(component_for(*this, d, i).measure.rule());
  return out;
}

DoeSpec DoeConfig::spec(int d, const std::vector<MeasureSpec>& measures,
                        std::uint64_t seed) const {
  DoeSpec s;
  s.n = n;
  s.restarts = restarts;
  s.seed = seed;
  auto widen = [&](const std::vector<double>& v, const char* name) {
    if (v.size() == 1) return std::vector<double>(d, v[0]);
    if (static_cast<int>(v.size()) != d)
      throw ConfigError(fmt::format("config.doe.{}: need 1 or {} values, got {}", name, d, v.size()));
    return v;
  };
  if (!lower.empty()) {
    s.lower = widen(lower, "lower");
    s.upper = widen(upper, "upper");
  } else {
    for (int i = 0; i < d; ++i) {
      const auto& m = measures.size() == 1 ? measures[0] : measures.at(i);
      s.lower.push_back(m.a);
      s.upper.push_back(m.b);
    }
  }
  for (int i = 0; i < d; ++i) {
    const auto& m = measures.size() == 1 ? measures[0] : measures.at(i);
    if (s.lower[i] < m.a || s.upper[i] > m.b)
      throw ConfigError(fmt::format("config.doe: bounds of dimension {} leave the measure support [{}, {}]",
                                    i + 1, m.a, m.b));
  }
  return s;
}

// ----------------------------------------------------------------- defaults

json default_decompose() {
  return json::parse(R"({
    "kernels": [{"family": "brownian"}, {"family": "gaussian", "theta": 1.0}],
    "measure": {"kind": "uniform", "a": 0.0, "b": 5.0, "nodes": 100},
    "slices": [0.0, 2.0, 4.0],
    "grid": 101,
    "seed": 1
  })");
}

json default_fit_report() {
  return json::parse(R"({
    "test": {"test": "g", "a": [1.0, 2.0]},
    "model": {"mode": "star", "scale": 1.0, "components": [
      {"kernel": {"family": "matern32", "theta": 1.0},
       "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 100}}]},
    "doe": {"n": 20, "restarts": 100},
    "lambda": 0.0,
    "noise": false,
    "seed": 1,
    "grid": 60,
    "max_order": 3
  })");
}

json default_replicate_g() {
  return json::parse(R"({
    "test": {"test": "g", "a": [0.2, 0.6, 0.8, 100.0, 100.0]},
    "kernels": [{"family": "shifted-brownian"},
                {"family": "matern32", "theta": 1.0},
                {"family": "gaussian", "theta": 1.0}],
    "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 100},
    "doe": {"n": 50, "restarts": 100},
    "scale": 1.0,
    "replicates": 50,
    "seed": 1,
    "subsets": [[1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]]
  })");
}

json default_replicate_noise() {
  return json::parse(R"({
    "test": {"test": "quadratic"},
    "kernel": {"family": "gaussian", "theta": 10.0},
    "measure": {"kind": "normal", "a": -8.0, "b": 8.0, "nodes": 100},
    "doe": {"n": 20, "restarts": 100, "lower": -5.0, "upper": 5.0},
    "scale": 200.0,
    "lambdas": [0.0, 1.0, 2.0, 4.0, 8.0, 16.0],
    "replicates": 50,
    "seed": 1,
    "subsets": [[1], [2], [1, 2]]
  })");
}

json default_verify() {
  return json::parse(R"({
    "test": {"test": "g", "a": [1.0, 2.0]},
    "kernel": {"family": "matern32", "theta": 1.0},
    "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 60},
    "doe": {"n": 20, "restarts": 100},
    "seed": 1,
    "tolerances": {"equivalence": 1e-8, "zero_mean": 1e-10, "orthogonality": 1e-8,
                   "normalization": 1e-8, "sobol_grid": 1e-6, "interpolation": 1e-6},
    "fault": "none"
  })");
}

// ------------------------------------------------------------ config plumbing

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.what()));
  }
}

json load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {
void override_nodes(json& j, int nodes) {
  if (j.is_object()) {
    if (j.contains("kind")) j["nodes"] = nodes;
    for (auto& [k, v] : j.items()) override_nodes(v, nodes);
  } else if (j.is_array()) {
    for (auto& v : j) override_nodes(v, nodes);
  }
}
}  // namespace

json merge_config(const json& defaults, const json& user, const Overrides& overrides) {
  json merged = defaults;
  if (!user.is_null()) {
    expect_object(user, "config");
    for (const auto& [key, value] : user.items()) {
      if (!defaults.contains(key)) throw ConfigError(fmt::format("config: unknown key '{}'", key));
      merged[key] = value;
    }
  }
  if (overrides.seed) merged["seed"] = *overrides.seed;
  if (overrides.replicates) {
    if (!defaults.contains("replicates"))
      throw ConfigError("--replicates does not apply to this command");
    if (*overrides.replicates < 1) throw ConfigError("--replicates must be >= 1");
    merged["replicates"] = *overrides.replicates;
  }
  if (overrides.nodes) {
    if (*overrides.nodes < 2) throw ConfigError("--nodes must be >= 2");
    override_nodes(merged, *overrides.nodes);
  }
  return merged;
}

DecomposeConfig parse_decompose(const json& j) {
  expect_keys(j, {"kernels", "measure", "slices", "grid", "seed"}, "config");
  DecomposeConfig c;
  c.kernels = parse_kernels(j.at("kernels"), "config.kernels");
  c.measure = parse_measure(j.at("measure"), "config.measure");
  c.slices = read_doubles(j.at("slices"), "config.slices");
  c.grid = read_int(j.at("grid"), "config.grid");
  if (c.grid < 2) throw ConfigError("config.grid: need at least 2 points");
  for (double y : c.slices)
    if (y < c.measure.a || y > c.measure.b)
      throw ConfigError(fmt::format("config.slices: {} lies outside [{}, {}]", y, c.measure.a, c.measure.b));
  return c;
}

FitReportConfig parse_fit_report(const json& j) {
  expect_keys(j, {"test", "model", "doe", "lambda", "noise", "seed", "grid", "max_order"}, "config");
  FitReportConfig c;
  c.test = parse_test(j.at("test"), "config.test");
  c.model = parse_model(j.at("model"), "config.model");
  c.doe = parse_doe(j.at("doe"), "config.doe");
  c.lambda = read_double(j.at("lambda"), "config.lambda");
  if (c.lambda < 0.0) throw ConfigError("config.lambda: must be >= 0");
  if (!j.at("noise").is_boolean()) throw ConfigError("config.noise: expected true or false");
  c.noise = j.at("noise").get<bool>();
  c.seed = read_u64(j.at("seed"), "config.seed");
  c.grid = read_int(j.at("grid"), "config.grid");
  if (c.grid < 2) throw ConfigError("config.grid: need at least 2 points");
  c.max_order = read_int(j.at("max_order"), "config.max_order");
  if (c.max_order < 1) throw ConfigError("config.max_order: must be >= 1");
  return c;
}

ReplicateGConfig parse_replicate_g(const json& j) {
  expect_keys(j, {"test", "kernels", "measure", "doe", "scale", "replicates", "seed", "subsets"},
              "config");
  ReplicateGConfig c;
  c.test = parse_test(j.at("test"), "config.test");
  c.kernels = parse_kernels(j.at("kernels"), "config.kernels");
  c.measure = parse_measure(j.at("measure"), "config.measure");
  c.doe = parse_doe(j.at("doe"), "config.doe");
  c.scale = read_double(j.at("scale"), "config.scale");
  if (!(c.scale > 0.0)) throw ConfigError("config.scale: must be positive");
  c.replicates = read_int(j.at("replicates"), "config.replicates");
  if (c.replicates < 1) throw ConfigError("config.replicates: must be >= 1");
  c.seed = read_u64(j.at("seed"), "config.seed");
  c.subsets = read_subsets(j.at("subsets"), "config.subsets");
  for (Subset s : c.subsets)
    if (s.span_dimension() > c.test.dimension())
      throw ConfigError(fmt::format("config.subsets: {{{}}} exceeds dimension {}", s.label(),
                                    c.test.dimension()));
  return c;
}

ReplicateNoiseConfig parse_replicate_noise(const json& j) {
  expect_keys(j, {"test", "kernel", "measure", "doe", "scale", "lambdas", "replicates", "seed",
                  "subsets"},
              "config");
  ReplicateNoiseConfig c;
  c.test = parse_test(j.at("test"), "config.test");
  c.kernel = parse_kernel(j.at("kernel"), "config.kernel");
  c.measure = parse_measure(j.at("measure"), "config.measure");
  c.doe = parse_doe(j.at("doe"), "config.doe");
  c.scale = read_double(j.at("scale"), "config.scale");
  if (!(c.scale > 0.0)) throw ConfigError("config.scale: must be positive");
  c.lambdas = read_doubles(j.at("lambdas"), "config.lambdas");
  if (c.lambdas.empty()) throw ConfigError("config.lambdas: need at least one value");
  for (double l : c.lambdas)
    if (l < 0.0) throw ConfigError("config.lambdas: values must be >= 0");
  c.replicates = read_int(j.at("replicates"), "config.replicates");
  if (c.replicates < 1) throw ConfigError("config.replicates: must be >= 1");
  c.seed = read_u64(j.at("seed"), "config.seed");
  c.subsets = read_subsets(j.at("subsets"), "config.subsets");
  for (Subset s : c.subsets)
    if (s.span_dimension() > c.test.dimension())
      throw ConfigError(fmt::format("config.subsets: {{{}}} exceeds dimension {}", s.label(),
                                    c.test.dimension()));
  return c;
}

VerifyConfig parse_verify(const json& j) {
  expect_keys(j, {"test", "kernel", "measure", "doe", "seed", "tolerances", "fault"}, "config");
  VerifyConfig c;
  c.test = parse_test(j.at("test"), "config.test");
  if (c.test.dimension() > 2)
    throw ConfigError("config.test: verify runs full tensor grids and supports d <= 2");
  c.kernel = parse_kernel(j.at("kernel"), "config.kernel");
  c.measure = parse_measure(j.at("measure"), "config.measure");
  c.doe = parse_doe(j.at("doe"), "config.doe");
  c.seed = read_u64(j.at("seed"), "config.seed");
  const auto& t = j.at("tolerances");
  expect_keys(t, {"equivalence", "zero_mean", "orthogonality", "normalization", "sobol_grid",
                  "interpolation"},
              "config.tolerances");
  auto tol = [&](const char* key, double& field) {
    if (t.contains(key)) field = read_double(t[key], child("config.tolerances", key));
    if (!(field > 0.0)) throw ConfigError(fmt::format("config.tolerances.{}: must be positive", key));
  };
  tol("equivalence", c.tolerances.equivalence);
  tol("zero_mean", c.tolerances.zero_mean);
  tol("orthogonality", c.tolerances.orthogonality);
  tol("normalization", c.tolerances.normalization);
  tol("sobol_grid", c.tolerances.sobol_grid);
  tol("interpolation", c.tolerances.interpolation);
  c.fault = read_string(j.at("fault"), "config.fault");
  if (c.fault != "none" && c.fault != "gamma_sign")
    throw ConfigError("config.fault: must be \"none\" or \"gamma_sign\"");
  return c;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t stream, std::uint32_t replicate,
                          std::uint32_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    stream, replicate, k};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// --------------------------------------------------------------- replicates

ReplicateResult run_replicate_g(const ReplicateGConfig& config, int threads) {
  const TestFunction f = config.test.function();
  const int d = f.dimension();
  const auto rule = config.measure.rule();
  const std::size_t nk = config.kernels.size();
  const auto reps = static_cast<std::size_t>(config.replicates);

  std::vector<AnovaKernel> kernels;
  for (const auto& ks : config.kernels) {
    std::vector<ZeroMeanKernel> zks(d, ZeroMeanKernel(ks.kernel(), rule));
    kernels.push_back(AnovaKernel::star(std::move(zks), config.scale));
  }

  std::vector<std::vector<std::vector<double>>> samples(nk, std::vector<std::vector<double>>(reps));
  std::vector<std::vector<double>> jitter(nk, std::vector<double>(reps));
  parallel_for(nk * reps, threads, [&](std::size_t task) {
    const std::size_t k = task / reps;
    const std::size_t r = task % reps;
    // Every kernel sees the same designs.
    const Design design = lhs_maximin(
        config.doe.spec(d, {config.measure}, derive_seed(config.seed, 0, static_cast<std::uint32_t>(r))));
    const auto model = fit(kernels[k], design, f.evaluate(design), 0.0);
    samples[k][r] = indices_for(model, config.subsets);
    jitter[k][r] = model.jitter_used();
  });

  ReplicateResult result;
  for (std::size_t k = 0; k < nk; ++k)
    result.groups.push_back(summarize_group(config.kernels[k].name(), config.subsets,
                                            std::move(samples[k]), std::move(jitter[k])));
  return result;
}

ReplicateResult run_replicate_noise(const ReplicateNoiseConfig& config, int threads) {
  const TestFunction f = config.test.function();
  const int d = f.dimension();
  const auto rule = config.measure.rule();
  std::vector<ZeroMeanKernel> zks(d, ZeroMeanKernel(config.kernel.kernel(), rule));
  const AnovaKernel kernel = AnovaKernel::star(std::move(zks), config.scale);
  const std::size_t nl = config.lambdas.size();
  const auto reps = static_cast<std::size_t>(config.replicates);

  std::vector<std::vector<std::vector<double>>> samples(nl, std::vector<std::vector<double>>(reps));
  std::vector<std::vector<double>> jitter(nl, std::vector<double>(reps));
  parallel_for(nl * reps, threads, [&](std::size_t task) {
    const std::size_t k = task / reps;
    const auto r = static_cast<std::uint32_t>(task % reps);
    const Design design =
        lhs_maximin(config.doe.spec(d, {config.measure}, derive_seed(config.seed, 0, r)));
    const double lambda = config.lambdas[k];
    const Eigen::VectorXd obs =
        add_noise(f.evaluate(design), lambda, derive_seed(config.seed, 1, r, static_cast<std::uint32_t>(k)));
    const auto model = fit(kernel, design, obs, lambda);
    samples[k][r] = indices_for(model, config.subsets);
    jitter[k][r] = model.jitter_used();
  });

  ReplicateResult result;
  for (std::size_t k = 0; k < nl; ++k)
    result.groups.push_back(summarize_group(format_lambda(config.lambdas[k]), config.subsets,
                                            std::move(samples[k]), std::move(jitter[k])));
  return result;
}

// ------------------------------------------------------------------- verify

bool VerifyResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

VerifyResult run_verify(const VerifyConfig& config) {
  const TestFunction f = config.test.function();
  const int d = f.dimension();
  const auto rule = config.measure.rule();
  std::vector<ZeroMeanKernel> zks(d, ZeroMeanKernel(config.kernel.kernel(), rule));
  const Design design =
      lhs_maximin(config.doe.spec(d, {config.measure}, derive_seed(config.seed, 0, 0)));
  const Eigen::VectorXd obs = f.evaluate(design);
  const auto model = fit(AnovaKernel::star(std::move(zks)), design, obs, 0.0);
  const std::vector<QuadratureRule> rules(d, rule);
  const auto& tol = config.tolerances;

  VerifyResult result;
  auto add = [&](std::string name, double value, double tolerance, std::string detail = {}) {
    result.checks.push_back({std::move(name), value, tolerance, value <= tolerance, std::move(detail)});
  };

  double interp = 0.0;
  for (Eigen::Index j = 0; j < design.n(); ++j)
    interp = std::max(interp, std::abs(model.predict(design.row(j)) - obs[j]));
  add("interpolation", interp / obs.cwiseAbs().maxCoeff(), tol.interpolation,
      "max |m(X_j) - F_j| / max |F|");

  const auto full = oracle::tabulate(rules, [&](const Eigen::VectorXd& x) { return model.predict(x); });
  const auto subsets = all_nonempty_subsets(d);
  std::vector<Subset> terms{Subset()};
  terms.insert(terms.end(), subsets.begin(), subsets.end());

  std::vector<oracle::GridFunction> m_grid;
  double equiv = 0.0;
  double mean = 0.0;
  for (Subset s : terms) {
    auto g = oracle::tabulate(rules, [&](const Eigen::VectorXd& x) { return model.predict_submodel(s, x); });
    const auto reference = oracle::expand(oracle::project(full, s), s, rules);
    for (std::size_t k = 0; k < g.values.size(); ++k)
      equiv = std::max(equiv, std::abs(g.values[k] - reference.values[k]));
    if (!s.empty()) mean = std::max(mean, std::abs(oracle::project_constant(g)));
    m_grid.push_back(std::move(g));
  }
  add("equivalence", equiv, tol.equivalence, "max |m_I - oracle projection| on the grid");
  add("zero_mean", mean, tol.zero_mean, "max |mean of m_I|, I nonempty");

  double ortho = 0.0;
  for (std::size_t a = 0; a < m_grid.size(); ++a)
    for (std::size_t b = a + 1; b < m_grid.size(); ++b)
      ortho = std::max(ortho, std::abs(oracle::grid_inner(m_grid[a], m_grid[b])));
  add("orthogonality", ortho, tol.orthogonality, "max |<m_I, m_J>|, I != J");

  GammaSet gammas = compute_gammas(model);
  if (config.fault == "gamma_sign") gammas.gammas[0] = -gammas.gammas[0];
  const double total = total_model_variance(model, gammas);
  const double grid_total = oracle::grid_variance(full);
  double index_sum = 0.0;
  double variance_sum = 0.0;
  double worst = 0.0;
  double min_index = 0.0;
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    const double v = submodel_variance(model, gammas, subsets[k]);
    const double s = v / total;
    index_sum += s;
    variance_sum += v;
    min_index = std::min(min_index, s);
    worst = std::max(worst, std::abs(s - oracle::grid_variance(m_grid[k + 1]) / grid_total));
  }
  add("index_sum", std::abs(index_sum - 1.0), tol.normalization, "|sum_I S_I - 1|");
  add("normalization", std::abs(variance_sum / grid_total - 1.0), tol.normalization,
      "|sum_I Var(m_I) / grid Var(m) - 1|");
  add("sobol_grid", worst, tol.sobol_grid, "max |S_I - grid variance ratio|");
  add("non_negative", -min_index, 1e-10, "-min_I S_I");
  return result;
}

// ----------------------------------------------------------------- commands

CommandOutput cmd_decompose(const json& user, const Overrides& ov, const fs::path& out_dir) {
  const json merged = merge_config(default_decompose(), user, ov);
  const auto cfg = parse_decompose(merged);
  const auto seed = read_u64(merged.at("seed"), "config.seed");
  const auto rule = cfg.measure.rule();
  CommandOutput out;
  for (std::size_t k = 0; k < cfg.kernels.size(); ++k) {
    const ZeroMeanKernel zk(cfg.kernels[k].kernel(), rule);
    for (std::size_t s = 0; s < cfg.slices.size(); ++s) {
      const double y = cfg.slices[s];
      const double ry = zk.representer(y);
      std::string csv = csv_header("decompose", merged, seed);
      csv += fmt::format("# kernel={} y={:g} denominator={:.17g} degenerate={}\n", cfg.kernels[k].name(),
                         y, zk.denominator(), zk.degenerate() ? 1 : 0);
      csv += "x,k,k0,k1\n";
      for (int g = 0; g < cfg.grid; ++g) {
        const double x = cfg.measure.a + (cfg.measure.b - cfg.measure.a) * g / (cfg.grid - 1);
        const double rx = zk.representer(x);
        const double kv = zk.base()(x, y);
        const double k1 = zk.eval_k1_from(rx, ry);
        csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", x, kv, kv - k1, k1);
      }
      const auto path = out_dir / fmt::format("decompose_k{}_{}_y{}.csv", k,
                                              family_name(cfg.kernels[k].family), s);
      write_file(path, csv);
      out.files.push_back(path);
    }
  }
  out.summary = fmt::format("wrote {} slice files", out.files.size());
  return out;
}

CommandOutput cmd_fit_report(const json& user, const Overrides& ov, const fs::path& out_dir) {
  const json merged = merge_config(default_fit_report(), user, ov);
  const auto cfg = parse_fit_report(merged);
  const TestFunction f = cfg.test.function();
  const int d = f.dimension();
  const AnovaKernel kernel = checked("config.model", [&] { return cfg.model.build(d); });
  const auto rules = cfg.model.rules(d);
  std::vector<MeasureSpec> measures;
  for (const auto& c : cfg.model.components) measures.push_back(c.measure);
  const Design design = lhs_maximin(cfg.doe.spec(d, measures, derive_seed(cfg.seed, 0, 0)));
  Eigen::VectorXd obs = f.evaluate(design);
  if (cfg.noise) obs = add_noise(obs, cfg.lambda, derive_seed(cfg.seed, 1, 0));
  const auto model = fit(kernel, design, obs, cfg.lambda);
  const bool star = kernel.mode() == AnovaMode::star;

  nlohmann::ordered_json report;
  report["meta"] = meta("fit-report", merged, cfg.seed);
  report["mode"] = star ? "star" : "standard";
  report["n"] = design.n();
  report["d"] = d;
  report["m0"] = model.constant_term();
  report["jitter_used"] = model.jitter_used();
  report["residual"] = model.relative_residual();

  std::vector<Subset> terms{Subset()};
  if (d <= kMaxExpansionDimension) {
    const auto all = all_nonempty_subsets(d);
    terms.insert(terms.end(), all.begin(), all.end());
  }
  auto term_value = [&](Subset s, const Eigen::VectorXd& x) {
    return star ? model.predict_submodel(s, x) : model.predict_candidate_term(s, x);
  };

  if (d <= 2) {
    // Quadrature diagnostics on the tensor grid of the measures' rules.
    std::vector<oracle::GridFunction> grids;
    nlohmann::ordered_json means = nlohmann::ordered_json::object();
    bool flagged = false;
    for (Subset s : terms) {
      grids.push_back(oracle::tabulate(rules, [&](const Eigen::VectorXd& x) { return term_value(s, x); }));
      if (s.empty()) continue;
      const double mean = oracle::project_constant(grids.back());
      means[s.label()] = mean;
      flagged = flagged || std::abs(mean) > 1e-3;
    }
    nlohmann::ordered_json inner = nlohmann::ordered_json::object();
    for (std::size_t a = 0; a < terms.size(); ++a)
      for (std::size_t b = a + 1; b < terms.size(); ++b)
        inner[terms[a].label() + "|" + terms[b].label()] = oracle::grid_inner(grids[a], grids[b]);
    report["submodel_means"] = means;
    report["inner_products"] = inner;
    report["nonzero_mean_flag"] = flagged;
  }

  if (star) {
    SobolOptions opts;
    opts.max_order = cfg.max_order;
    const auto sobol = sobol_indices(model, opts);
    report["sobol"] = nlohmann::ordered_json::parse(report_json(sobol));
  }

  CommandOutput out;
  const auto json_path = out_dir / "fit_report.json";
  write_file(json_path, report.dump(2) + "\n");
  out.files.push_back(json_path);

  if (d <= 2) {
    const auto spec = cfg.doe.spec(d, measures, 0);
    std::string csv = csv_header("fit-report", merged, cfg.seed);
    for (int i = 0; i < d; ++i) csv += fmt::format("x{},", i + 1);
    csv += "f,m";
    for (Subset s : terms) csv += fmt::format(",m_{}", s.empty() ? "0" : s.label());
    csv += "\n";
    const int g = cfg.grid;
    const int count = d == 1 ? g : g * g;
    Eigen::VectorXd x(d);
    for (int p = 0; p < count; ++p) {
      const int idx[2] = {d == 1 ? p : p / g, p % g};
      for (int i = 0; i < d; ++i) {
        x[i] = spec.lower[i] + (spec.upper[i] - spec.lower[i]) * idx[i] / (g - 1);
        csv += fmt::format("{:.17g},", x[i]);
      }
      csv += fmt::format("{:.17g},{:.17g}", f(x), model.predict(x));
      for (Subset s : terms) csv += fmt::format(",{:.17g}", term_value(s, x));
      csv += "\n";
    }
    const auto csv_path = out_dir / "fit_grid.csv";
    write_file(csv_path, csv);
    out.files.push_back(csv_path);
  }

  out.summary = fmt::format("m0 = {:.6g}, jitter = {:.3g}, residual = {:.3g}", model.constant_term(),
                            model.jitter_used(), model.relative_residual());
  return out;
}

CommandOutput cmd_replicate_g(const json& user, const Overrides& ov, const fs::path& out_dir,
                              int threads) {
  const json merged = merge_config(default_replicate_g(), user, ov);
  const auto cfg = parse_replicate_g(merged);
  const auto result = run_replicate_g(cfg, threads);
  CommandOutput out;
  const auto table = out_dir / "replicate_g.csv";
  const auto raw = out_dir / "replicate_g_raw.csv";
  write_file(table, replicate_table("replicate-g", "kernel", result, merged, cfg.seed, cfg.replicates));
  write_file(raw, replicate_raw("replicate-g", "kernel", result, merged, cfg.seed));
  out.files = {table, raw};
  for (const auto& g : result.groups) {
    out.summary += g.label;
    for (const auto& st : g.stats) out.summary += fmt::format("  S{{{}}}={:.2f}({:.2f})", st.subset.label(), st.mean, st.std);
    out.summary += fmt::format("  sum={:.2f}\n", g.sum.mean);
  }
  return out;
}

CommandOutput cmd_replicate_noise(const json& user, const Overrides& ov, const fs::path& out_dir,
                                  int threads) {
  const json merged = merge_config(default_replicate_noise(), user, ov);
  const auto cfg = parse_replicate_noise(merged);
  const auto result = run_replicate_noise(cfg, threads);
  CommandOutput out;
  const auto table = out_dir / "replicate_noise.csv";
  const auto raw = out_dir / "replicate_noise_raw.csv";
  std::string body = replicate_table("replicate-noise", "lambda", result, merged, cfg.seed, cfg.replicates);
  body.insert(body.find('\n') + 1, "# design and noise resampled per replicate\n");
  write_file(table, body);
  write_file(raw, replicate_raw("replicate-noise", "lambda", result, merged, cfg.seed));
  out.files = {table, raw};
  for (const auto& g : result.groups) {
    out.summary += "lambda=" + g.label;
    for (const auto& st : g.stats) out.summary += fmt::format("  S{{{}}}={:.2f}({:.2f})", st.subset.label(), st.mean, st.std);
    out.summary += "\n";
  }
  return out;
}

CommandOutput cmd_verify(const json& user, const Overrides& ov, const fs::path& out_dir) {
  const json merged = merge_config(default_verify(), user, ov);
  const auto cfg = parse_verify(merged);
  const auto result = run_verify(cfg);
  nlohmann::ordered_json report;
  report["meta"] = meta("verify", merged, cfg.seed);
  report["pass"] = result.pass();
  report["checks"] = nlohmann::ordered_json::array();
  CommandOutput out;
  for (const auto& c : result.checks) {
    report["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
                                {"pass", c.pass}, {"detail", c.detail}});
    out.summary += fmt::format("{} {:<14} {:.3e} (tolerance {:.1e})  {}\n", c.pass ? "PASS" : "FAIL",
                               c.name, c.value, c.tolerance, c.detail);
  }
  const auto path = out_dir / "verify.json";
  write_file(path, report.dump(2) + "\n");
  out.files.push_back(path);
  out.exit_code = result.pass() ? 0 : 3;
  return out;
}

}  // namespace zanova::experiment
