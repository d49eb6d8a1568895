#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dynreg/types.hpp"

namespace dynreg {

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class AlgorithmKind { kFlhSions, kFlhConstant, kOgd };

std::string_view algorithm_name(AlgorithmKind kind);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::kFlhSions;
  std::string label;      // column value in records; defaults to the algorithm name
  double sigma = 0.0;     // 0: take the losses' certified constant
  double epsilon = 2.0;
  double clip = 20.0;
  bool pruning = false;
  // OGD steps c * n^{-a} for every (c, a) pair, kept when inside (0, 1).
  std::vector<double> step_scales{0.05, 0.1, 0.2, 0.4, 0.8};
  std::vector<double> step_exponents{0.0, 0.2, 0.4};

  std::vector<double> ogd_steps(long n) const;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<long> n_values;
  int d = 1;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  // C_n = budget * n^budget_exponent.
  double budget = 8.0;
  double budget_exponent = 0.0;
  int kinks = 4;
  double noise = 0.05;
  bool oracle_enabled = true;
  double oracle_tol = 1e-8;
  std::vector<AlgorithmSpec> algorithms;
  bool traces = false;
  std::filesystem::path output_dir = "results";

  double budget_at(long n) const;
  // Throws ConfigError naming the offending key.
  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<string>");

}  // namespace dynreg
