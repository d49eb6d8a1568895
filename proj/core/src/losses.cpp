#include "dynreg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dynreg {

namespace {

constexpr double kViolationTolerance = 1e-9;

void accumulate_pair(const LossOracle& oracle, const Vector& x, const Vector& y,
                     ConstantsReport& report) {
  const CurvatureConstants& c = oracle.constants();
  const double fx = oracle.value_unchecked(x);
  const double fy = oracle.value_unchecked(y);
  Vector grad(oracle.dimension());
  oracle.gradient_into(x, grad);
  const Vector step = y - x;
  const double linear = grad.dot(step);

  const double smooth_slack =
      fx + linear + 0.5 * c.grad_lipschitz_l * step.squaredNorm() - fy;
  const double exp_slack = fy - (fx + linear + 0.5 * c.sigma * linear * linear);
  const double lip_slack = c.lipschitz_g - grad.norm();

  if (report.probes == 0) {
    report.worst_smoothness_slack = smooth_slack;
    report.worst_exp_concavity_slack = exp_slack;
    report.worst_lipschitz_slack = lip_slack;
  } else {
    report.worst_smoothness_slack = std::min(report.worst_smoothness_slack, smooth_slack);
    report.worst_exp_concavity_slack = std::min(report.worst_exp_concavity_slack, exp_slack);
    report.worst_lipschitz_slack = std::min(report.worst_lipschitz_slack, lip_slack);
  }
  ++report.probes;
  if (smooth_slack < -kViolationTolerance) ++report.smoothness_violations;
  if (exp_slack < -kViolationTolerance) ++report.exp_concavity_violations;
  if (lip_slack < -kViolationTolerance) ++report.lipschitz_violations;
}

}  // namespace

LossOracle::LossOracle(Vector target, double curvature, CurvatureConstants constants)
    : target_(std::move(target)), curvature_(curvature), constants_(constants) {
  if (target_.size() == 0) throw DomainError("loss dimension must be positive");
  if (!(curvature_ > 0.0) || !std::isfinite(curvature_)) {
    throw DomainError("loss curvature must be positive and finite");
  }
  if (!target_.allFinite()) throw DomainError("loss target must be finite");
  if (!(constants_.sigma > 0.0) || !(constants_.box_radius > 0.0)) {
    throw DomainError("curvature constants need sigma > 0 and box_radius > 0");
  }
}

void LossOracle::check_domain(const Eigen::Ref<const Vector>& w) const {
  if (w.size() != target_.size()) {
    throw DomainError("loss evaluated at a point of the wrong dimension");
  }
  const double limit = constants_.box_radius + kBoxSlack;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (!(std::abs(w[k]) <= limit)) {
      std::ostringstream msg;
      msg << "loss evaluated outside the working box: |w[" << k << "]| = " << std::abs(w[k])
          << " > " << constants_.box_radius;
      throw DomainError(msg.str());
    }
  }
}

double LossOracle::value(const Eigen::Ref<const Vector>& w) const {
  check_domain(w);
  return value_unchecked(w);
}

double LossOracle::value_unchecked(const Eigen::Ref<const Vector>& w) const {
  return 0.5 * curvature_ * (w - target_).squaredNorm();
}

Vector LossOracle::gradient(const Eigen::Ref<const Vector>& w) const {
  Vector out(target_.size());
  gradient_into(w, out);
  return out;
}

void LossOracle::gradient_into(const Eigen::Ref<const Vector>& w, Eigen::Ref<Vector> out) const {
  check_domain(w);
  out = curvature_ * (w - target_);
}

CurvatureConstants quadratic_constants(int dimension, double curvature, double box_radius,
                                       double target_bound) {
  if (dimension <= 0 || !(curvature > 0.0) || !(box_radius > 0.0) || target_bound < 0.0) {
    throw DomainError("quadratic_constants: invalid arguments");
  }
  const double diameter = std::sqrt(static_cast<double>(dimension)) * (box_radius + target_bound);
  CurvatureConstants c;
  c.lipschitz_g = curvature * diameter;
  c.grad_lipschitz_l = curvature;
  c.sigma = 1.0 / (curvature * diameter * diameter);
  c.box_radius = box_radius;
  return c;
}

double scaled_squared_scale(int dimension, double box_radius) {
  if (dimension <= 0 || box_radius < 1.0) {
    throw DomainError("scaled squared loss needs d >= 1 and box_radius >= 1");
  }
  return std::sqrt(static_cast<double>(dimension)) * (box_radius + 1.0);
}

LossOracle make_scaled_squared_loss(const Vector& target, double box_radius) {
  if (target.size() == 0) throw DomainError("target must be non-empty");
  if (!target.allFinite() || target.cwiseAbs().maxCoeff() > 1.0) {
    throw DomainError("scaled squared loss target must lie in [-1, 1]^d");
  }
  const int d = static_cast<int>(target.size());
  const double scale = scaled_squared_scale(d, box_radius);
  CurvatureConstants c = quadratic_constants(d, 1.0 / scale, box_radius, 1.0);
  // G = 1 by the choice of scale; pin it to avoid a rounding excursion above 1.
  c.lipschitz_g = 1.0;
  return LossOracle(target, 1.0 / scale, c);
}

double loss_value(const LossOracle& oracle, const Eigen::Ref<const Vector>& w) {
  return oracle.value(w);
}

Vector loss_gradient(const LossOracle& oracle, const Eigen::Ref<const Vector>& w) {
  return oracle.gradient(w);
}

ConstantsReport verify_constants(const LossOracle& oracle, int probes, std::uint64_t seed) {
  if (probes < 1) throw DomainError("verify_constants needs at least one probe");
  const double r = oracle.constants().box_radius;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-r, r);
  ConstantsReport report;
  Vector x(oracle.dimension());
  Vector y(oracle.dimension());
  for (int i = 0; i < probes; ++i) {
    for (int k = 0; k < oracle.dimension(); ++k) {
      x[k] = coord(rng);
      y[k] = coord(rng);
    }
    accumulate_pair(oracle, x, y, report);
  }
  return report;
}

ConstantsReport verify_constants_at(const LossOracle& oracle, const Vector& x, const Vector& y) {
  ConstantsReport report;
  accumulate_pair(oracle, x, y, report);
  return report;
}

}  // namespace dynreg
