#pragma once

#include <cstdint>
#include <span>

#include "dynreg/flh.hpp"
#include "dynreg/losses.hpp"

namespace dynreg {

// Projected online gradient descent on a coordinate box.
//
// The step is taken along grad f / L with L the loss's gradient-Lipschitz
// constant, so `step` is dimensionless and must lie in (0, 1); on the
// quadratic losses of this library one step is w <- w - step (w - y).
struct OgdState {
  Vector w;
  double step = 0.5;
  double box = 1.0;
};

OgdState make_ogd(int d, double step, double box);

// Gradient step at the current iterate followed by a coordinate clip.
void ogd_step(OgdState& state, const LossOracle& loss);

struct OgdTrace {
  Trajectory trajectory;
  int clipped_rounds = 0;  // rounds where the clip changed the iterate
  double max_abs_iterate = 0.0;
};

// Plays w_t, suffers f_t(w_t), steps. Starts from w_1 = 0.
OgdTrace ogd_run(std::span<const LossOracle> losses, double step, double box);

// FLH over constant predictors: SIONS experts whose covariate is [1, 0]
// forever.
Trajectory flh_constant_experts_run(double sigma, std::span<const LossOracle> losses,
                                    double epsilon = 2.0, double clip_c = 20.0);

// Stochastic construction on which OGD with step < 1 never projects:
// y_t = theta_t + noise_t with theta in TV^(1)(1), |theta_t| <= 1/(8 sqrt 2.2),
// noise uniform on the same interval, f_t(x) = (2 sqrt 2.2 / 3)(y_t - x)^2
// and decision box [-1/(2 sqrt 2.2), 1/(2 sqrt 2.2)].
struct LinsmoothEnvironment {
  Vector theta;
  Vector y;
  std::vector<LossOracle> losses;
  double decision_box = 0.0;
  double theta_bound = 0.0;
};

LinsmoothEnvironment linsmooth_environment(int n, std::uint64_t seed);

}  // namespace dynreg
