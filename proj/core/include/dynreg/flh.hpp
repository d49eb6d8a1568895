#pragma once

#include <map>
#include <span>
#include <vector>

#include "dynreg/losses.hpp"
#include "dynreg/sions.hpp"

namespace dynreg {

// Which covariate an expert started at tau receives at round t.
enum class CovariateMode {
  kMonomial,  // [1, t - tau + 1]
  kConstant,  // [1, 0]: the expert is a constant predictor
};

struct FlhConfig {
  int d = 1;
  double sigma = 1.0;  // exp-concavity factor; experts use eta = sigma
  double epsilon = 2.0;
  double clip_c = 20.0;
  CovariateMode covariates = CovariateMode::kMonomial;
  // Geometric-lifetime pruning. Off by default; the interval guarantees are
  // stated for the full pool.
  bool pruning = false;
  ProjectionOptions projection{};

  void validate() const;
};

Vector2 expert_covariate(CovariateMode mode, long start_time, long round);

// One multiplicative-weights step followed by the addition step. Takes the
// probability vector over the t incumbent experts and their losses this
// round; returns t + 1 weights, the last being 1 / (t + 1). Computed in log
// space with max subtraction.
std::vector<double> flh_reweight(std::span<const double> weights, std::span<const double> losses,
                                 double sigma);

// Follow-the-leading-history over SIONS experts. At round t (1-based) the pool
// holds experts started at 1..t; expert tau sees covariates [1,1], [1,2], ...
class FlhEnsemble {
 public:
  struct Expert {
    long start_time;
    SionsExpert learner;
    double last_loss = 0.0;  // loss of this expert's point in the last update
  };

  explicit FlhEnsemble(const FlhConfig& config);

  // Round-t prediction: the weight average of every active expert's point.
  const Vector& predict();

  // Requires predict() this round. Reweights, updates every expert with its
  // next covariate and appends a fresh expert started at t + 1. Projection
  // failures are rethrown as ConvergenceError naming the expert's start time.
  void update(const LossOracle& loss);

  long round() const { return round_; }
  const FlhConfig& config() const { return config_; }
  const std::vector<Expert>& experts() const { return experts_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  bool expires(long start_time) const;

  FlhConfig config_;
  std::vector<Expert> experts_;
  std::vector<double> weights_;
  std::vector<double> losses_;
  Vector prediction_;
  long round_ = 1;
  bool predicted_ = false;
};

struct Trajectory {
  Matrix predictions;          // n x d
  std::vector<double> losses;  // f_t(p_t)
  // Optional per-round losses of selected experts, keyed by start time; entry
  // i is the loss at round start_time + i.
  std::map<long, std::vector<double>> tracked_expert_losses;
  std::vector<Vector> tracked_lifted_gradients;  // unused by FLH, filled by solo SIONS runs
};

struct FlhRunOptions {
  std::vector<long> track_experts;
};

Trajectory flh_run(const FlhConfig& config, std::span<const LossOracle> losses,
                   const FlhRunOptions& options = {});

// 4 log(n) / sigma.
double adaptive_overhead_bound(double sigma, long n);

// Runs one SIONS expert with covariates [1, t - start + 1] over the given
// losses (used by tests and acceptance checks against a fixed comparator).
Trajectory sions_run(const SionsConfig& config, std::span<const LossOracle> losses,
                     CovariateMode mode = CovariateMode::kMonomial);

}  // namespace dynreg
