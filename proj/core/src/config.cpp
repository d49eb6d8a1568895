#include "dynreg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

namespace dynreg {
namespace {

template <typename T>
std::vector<T> read_list(const toml::node_view<const toml::node>& node, const std::string& key) {
  std::vector<T> out;
  if (!node) return out;
  const toml::array* arr = node.as_array();
  if (arr == nullptr) throw ConfigError(key + " must be an array");
  for (const toml::node& item : *arr) {
    if constexpr (std::is_floating_point_v<T>) {
      const auto v = item.value<double>();
      if (!v) throw ConfigError(key + " must hold numbers");
      out.push_back(*v);
    } else {
      const auto v = item.value<std::int64_t>();
      if (!v) throw ConfigError(key + " must hold integers");
      out.push_back(static_cast<T>(*v));
    }
  }
  return out;
}

template <typename T>
T read_value(const toml::node_view<const toml::node>& node, const std::string& key, T fallback) {
  if (!node) return fallback;
  if constexpr (std::is_same_v<T, bool>) {
    const auto v = node.value<bool>();
    if (!v) throw ConfigError(key + " must be a boolean");
    return *v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    const auto v = node.value<std::string>();
    if (!v) throw ConfigError(key + " must be a string");
    return *v;
  } else if constexpr (std::is_floating_point_v<T>) {
    const auto v = node.value<double>();
    if (!v) throw ConfigError(key + " must be a number");
    return *v;
  } else {
    const auto v = node.value<std::int64_t>();
    if (!v) throw ConfigError(key + " must be an integer");
    return static_cast<T>(*v);
  }
}

AlgorithmKind parse_kind(const std::string& name) {
  if (name == "flh_sions") return AlgorithmKind::kFlhSions;
  if (name == "flh_constant") return AlgorithmKind::kFlhConstant;
  if (name == "ogd") return AlgorithmKind::kOgd;
  throw ConfigError("unknown algorithm '" + name + "' (expected flh_sions, flh_constant or ogd)");
}

}  // namespace

std::string_view algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kFlhSions:
      return "flh_sions";
    case AlgorithmKind::kFlhConstant:
      return "flh_constant";
    case AlgorithmKind::kOgd:
      return "ogd";
  }
  return "unknown";
}

std::vector<double> AlgorithmSpec::ogd_steps(long n) const {
  std::vector<double> steps;
  for (double c : step_scales) {
    for (double a : step_exponents) {
      const double step = c * std::pow(static_cast<double>(n), -a);
      if (step > 0.0 && step < 1.0) steps.push_back(step);
    }
  }
  return steps;
}

double ExperimentConfig::budget_at(long n) const {
  return budget * std::pow(static_cast<double>(n), budget_exponent);
}

void ExperimentConfig::validate() const {
  for (long n : n_values) {
    if (n < 8) throw ConfigError("experiment.n: every horizon must be at least 8, got " + std::to_string(n));
  }
  if (d < 1) throw ConfigError("experiment.d must be positive");
  if (!(budget >= 0.0)) throw ConfigError("environment.budget must be nonnegative");
  if (kinks < 0) throw ConfigError("environment.kinks must be nonnegative");
  if (kinks == 0 && budget > 0.0) throw ConfigError("environment.kinks must be positive when budget > 0");
  if (!(noise >= 0.0 && noise < 1.0)) throw ConfigError("environment.noise must lie in [0, 1)");
  if (!(oracle_tol > 0.0)) throw ConfigError("oracle.tol must be positive");
  if (!n_values.empty() && algorithms.empty()) throw ConfigError("no [[algorithm]] entries");
  if (seeds.empty() && !n_values.empty()) throw ConfigError("experiment.seeds is empty");
  for (const AlgorithmSpec& a : algorithms) {
    if (a.sigma < 0.0) throw ConfigError(a.label + ".sigma must be nonnegative");
    if (!(a.epsilon > 0.0)) throw ConfigError(a.label + ".epsilon must be positive");
    if (!(a.clip > 0.0)) throw ConfigError(a.label + ".clip must be positive");
    if (a.kind == AlgorithmKind::kOgd) {
      for (long n : n_values) {
        if (a.ogd_steps(n).empty()) {
          throw ConfigError(a.label + ": step grid has no value inside (0, 1) at n=" + std::to_string(n));
        }
      }
    }
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ':' << e.source().begin.line << ':' << e.source().begin.column << ": "
        << e.description();
    throw ConfigError(msg.str());
  }
  const toml::node_view<const toml::node> view{static_cast<const toml::node*>(&root)};

  ExperimentConfig cfg;
  const auto exp = view["experiment"];
  cfg.name = read_value<std::string>(exp["name"], "experiment.name", cfg.name);
  cfg.n_values = read_list<long>(exp["n"], "experiment.n");
  cfg.d = read_value<int>(exp["d"], "experiment.d", cfg.d);
  if (exp["seeds"]) {
    if (exp["seeds"].is_array()) {
      cfg.seeds = read_list<std::uint64_t>(exp["seeds"], "experiment.seeds");
    } else {
      const int count = read_value<int>(exp["seeds"], "experiment.seeds", 5);
      if (count < 1) throw ConfigError("experiment.seeds must be positive");
      cfg.seeds.clear();
      for (int s = 1; s <= count; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  cfg.traces = read_value<bool>(exp["traces"], "experiment.traces", cfg.traces);
  cfg.output_dir = read_value<std::string>(exp["out"], "experiment.out", cfg.output_dir.string());

  const auto env = view["environment"];
  cfg.budget = read_value<double>(env["budget"], "environment.budget", cfg.budget);
  cfg.budget_exponent =
      read_value<double>(env["budget_exponent"], "environment.budget_exponent", cfg.budget_exponent);
  cfg.kinks = read_value<int>(env["kinks"], "environment.kinks", cfg.kinks);
  cfg.noise = read_value<double>(env["noise"], "environment.noise", cfg.noise);

  const auto oracle = view["oracle"];
  cfg.oracle_enabled = read_value<bool>(oracle["enabled"], "oracle.enabled", cfg.oracle_enabled);
  cfg.oracle_tol = read_value<double>(oracle["tol"], "oracle.tol", cfg.oracle_tol);

  if (const auto algs = view["algorithm"]) {
    const toml::array* arr = algs.as_array();
    if (arr == nullptr) throw ConfigError("algorithm must be an array of tables ([[algorithm]])");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::node_view<const toml::node> a{&(*arr)[i]};
      const std::string where = "algorithm[" + std::to_string(i) + "]";
      if (!a.is_table()) throw ConfigError(where + " must be a table");
      AlgorithmSpec spec;
      const auto name = a["name"].value<std::string>();
      if (!name) throw ConfigError(where + ".name is required");
      spec.kind = parse_kind(*name);
      spec.label = read_value<std::string>(a["label"], where + ".label", *name);
      spec.sigma = read_value<double>(a["sigma"], where + ".sigma", spec.sigma);
      spec.epsilon = read_value<double>(a["epsilon"], where + ".epsilon", spec.epsilon);
      spec.clip = read_value<double>(a["clip"], where + ".clip", spec.clip);
      spec.pruning = read_value<bool>(a["pruning"], where + ".pruning", spec.pruning);
      if (a["step_scales"]) spec.step_scales = read_list<double>(a["step_scales"], where + ".step_scales");
      if (a["step_exponents"]) {
        spec.step_exponents = read_list<double>(a["step_exponents"], where + ".step_exponents");
      }
      cfg.algorithms.push_back(std::move(spec));
    }
  }
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cfg.algorithms[i].label == cfg.algorithms[j].label) {
        throw ConfigError("duplicate algorithm label '" + cfg.algorithms[i].label + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace dynreg
