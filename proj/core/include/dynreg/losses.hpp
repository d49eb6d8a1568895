#pragma once

#include <cstdint>

#include "dynreg/types.hpp"

namespace dynreg {

// Curvature certificate of a loss over the working box [-box_radius, box_radius]^d.
struct CurvatureConstants {
  double sigma = 0.0;             // exp-concavity factor
  double lipschitz_g = 0.0;       // bound on ||grad f||_2 over the box
  double grad_lipschitz_l = 0.0;  // bound on the Hessian spectral norm
  double box_radius = 20.0;
};

// Slack tolerated on the working-box membership test. Projected iterates can
// land a few ulps outside the box; anything beyond this is rejected.
inline constexpr double kBoxSlack = 1e-8;

// One round's convex loss f(w) = (curvature / 2) * ||w - target||^2.
//
// Every built-in loss of the library has this form; the two constructors below
// differ only in how curvature and the certified constants are chosen.
// Immutable after construction.
class LossOracle {
 public:
  LossOracle(Vector target, double curvature, CurvatureConstants constants);

  int dimension() const { return static_cast<int>(target_.size()); }
  const Vector& target() const { return target_; }
  double curvature() const { return curvature_; }
  const CurvatureConstants& constants() const { return constants_; }

  // Throws DomainError when w leaves the working box.
  double value(const Eigen::Ref<const Vector>& w) const;
  Vector gradient(const Eigen::Ref<const Vector>& w) const;
  void gradient_into(const Eigen::Ref<const Vector>& w, Eigen::Ref<Vector> out) const;

  // Same formulas without the box check, for analysis code evaluating
  // comparators that are known to be feasible.
  double value_unchecked(const Eigen::Ref<const Vector>& w) const;

 private:
  void check_domain(const Eigen::Ref<const Vector>& w) const;

  Vector target_;
  double curvature_;
  CurvatureConstants constants_;
};

// Constants of f(w) = (h/2)||w - y||^2 over [-box_radius, box_radius]^d when
// every target satisfies ||y||_inf <= target_bound. With D the largest
// distance sqrt(d) (box_radius + target_bound) between a box point and a
// target: G = h D, L = h, sigma = 1 / (h D^2).
CurvatureConstants quadratic_constants(int dimension, double curvature, double box_radius,
                                       double target_bound);

// f(w) = ||w - target||^2 / (2c) with c = sqrt(d) (box_radius + 1), which makes
// the loss exactly 1-Lipschitz over the box and gives sigma = 1/c, L = 1/c.
// Requires ||target||_inf <= 1.
LossOracle make_scaled_squared_loss(const Vector& target, double box_radius = 20.0);

// Scaling constant c used by make_scaled_squared_loss.
double scaled_squared_scale(int dimension, double box_radius = 20.0);

double loss_value(const LossOracle& oracle, const Eigen::Ref<const Vector>& w);
Vector loss_gradient(const LossOracle& oracle, const Eigen::Ref<const Vector>& w);

struct ConstantsReport {
  int probes = 0;
  int smoothness_violations = 0;      // upper quadratic model with L
  int exp_concavity_violations = 0;   // lower quadratic model with sigma
  int lipschitz_violations = 0;       // ||grad|| <= G
  double worst_smoothness_slack = 0.0;
  double worst_exp_concavity_slack = 0.0;
  double worst_lipschitz_slack = 0.0;

  bool valid() const {
    return smoothness_violations == 0 && exp_concavity_violations == 0 &&
           lipschitz_violations == 0;
  }
};

// Probes random pairs in the working box against the reported constants.
// A probe counts as a violation when its slack is below -1e-9.
ConstantsReport verify_constants(const LossOracle& oracle, int probes, std::uint64_t seed = 7);

// Single-pair version of the same inequality checks.
ConstantsReport verify_constants_at(const LossOracle& oracle, const Vector& x, const Vector& y);

}  // namespace dynreg
