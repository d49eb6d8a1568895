#pragma once

#include "dynreg/losses.hpp"
#include "dynreg/psd_state.hpp"

namespace dynreg {

struct SionsConfig {
  int d = 1;
  double eta = 1.0;      // exp-concavity factor of the losses
  double epsilon = 2.0;  // initial diagonal of the correction matrix
  double clip_c = 20.0;  // half-width of every prediction slab

  void validate() const;
};

// Scale-invariant online Newton step over lifted linear predictors.
//
// The expert holds a coefficient vector v in R^{2d}; given a covariate x in
// R^2 it plays w[k] = x^T v[2k : 2k + 2]. Each update lifts the loss gradient
// through the covariate, takes a Newton-style step with the correction matrix
// and projects onto the slabs induced by the next covariate.
class SionsExpert {
 public:
  explicit SionsExpert(const SionsConfig& config);

  // Records the covariate and returns the played point, clamped to [-C, C]
  // (the clamp only absorbs projection round-off).
  const Vector& predict(const Vector2& covariate);

  // Requires predict() earlier in the round. Propagates ConvergenceError from
  // the projection.
  void update(const LossOracle& loss, const Vector2& next_covariate,
              const ProjectionOptions& projection = {});

  const SionsConfig& config() const { return config_; }
  const Vector& coefficients() const { return v_; }
  const CorrectionMatrix& correction() const { return correction_; }
  const Vector& prediction() const { return prediction_; }
  const Vector2& covariate() const { return covariate_; }
  // Lifted gradient used in the most recent update.
  const Vector& lifted_gradient() const { return lifted_; }
  long round() const { return round_; }

 private:
  SionsConfig config_;
  Vector v_;
  CorrectionMatrix correction_;
  Vector2 covariate_ = Vector2::Zero();
  Vector prediction_;
  Vector loss_grad_;
  Vector lifted_;
  Vector step_;
  long round_ = 0;
  bool predicted_ = false;
};

// [x^T v[0:2], x^T v[2:4], ...]: the point a coefficient vector plays.
Vector lifted_prediction(const Vector& coefficients, const Vector2& covariate);

// [g_1 x, g_2 x, ...]: gradient of v -> f(lifted_prediction(v, x)).
Vector lift_gradient(const Vector& loss_gradient, const Vector2& covariate);

// eps ||w||^2 / 2 + (2d / sigma) log(1 + sigma T G^2 / (d eps)), with sigma
// taken from config.eta.
double sions_static_regret_bound(const SionsConfig& config, long horizon,
                                 double comparator_norm_sq, double g);

}  // namespace dynreg
