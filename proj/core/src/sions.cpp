#include "dynreg/sions.hpp"

#include <algorithm>
#include <cmath>

namespace dynreg {

void SionsConfig::validate() const {
  if (d <= 0) throw DomainError("SIONS dimension must be positive");
  if (!(eta > 0.0)) throw DomainError("SIONS eta must be positive");
  if (!(epsilon > 0.0)) throw DomainError("SIONS epsilon must be positive");
  if (!(clip_c >= 1.0)) throw DomainError("SIONS clip radius must be at least 1");
}

SionsExpert::SionsExpert(const SionsConfig& config)
    : config_((config.validate(), config)),
      v_(Vector::Zero(2 * config.d)),
      correction_(2 * config.d, config.epsilon),
      prediction_(Vector::Zero(config.d)),
      loss_grad_(Vector::Zero(config.d)),
      lifted_(Vector::Zero(2 * config.d)),
      step_(Vector::Zero(2 * config.d)) {}

const Vector& SionsExpert::predict(const Vector2& covariate) {
  covariate_ = covariate;
  const double c = config_.clip_c;
  for (int k = 0; k < config_.d; ++k) {
    prediction_[k] = std::clamp(covariate.dot(v_.segment<2>(2 * k)), -c, c);
  }
  predicted_ = true;
  return prediction_;
}

void SionsExpert::update(const LossOracle& loss, const Vector2& next_covariate,
                         const ProjectionOptions& projection) {
  if (!predicted_) throw DomainError("SIONS update called before predict");
  if (loss.dimension() != config_.d) throw DomainError("loss dimension does not match expert");
  loss.gradient_into(prediction_, loss_grad_);
  for (int k = 0; k < config_.d; ++k) lifted_.segment<2>(2 * k) = loss_grad_[k] * covariate_;

  correction_.rank_one_update(lifted_, config_.eta);
  step_.noalias() = correction_.inverse() * lifted_;
  step_ = v_ - step_;

  if (config_.d == 1) {
    // Closed form: no need to build a slab set.
    project_onto_slab(step_, correction_.inverse(), Slab{0, next_covariate, config_.clip_c});
    v_.swap(step_);
  } else {
    v_ = mahalanobis_project(step_, correction_,
                             block_slabs(config_.d, next_covariate, config_.clip_c), projection);
  }
  ++round_;
  predicted_ = false;
}

Vector lifted_prediction(const Vector& coefficients, const Vector2& covariate) {
  const Eigen::Index d = coefficients.size() / 2;
  Vector out(d);
  for (Eigen::Index k = 0; k < d; ++k) out[k] = covariate.dot(coefficients.segment<2>(2 * k));
  return out;
}

Vector lift_gradient(const Vector& loss_gradient, const Vector2& covariate) {
  Vector out(2 * loss_gradient.size());
  for (Eigen::Index k = 0; k < loss_gradient.size(); ++k) {
    out.segment<2>(2 * k) = loss_gradient[k] * covariate;
  }
  return out;
}

double sions_static_regret_bound(const SionsConfig& config, long horizon,
                                 double comparator_norm_sq, double g) {
  config.validate();
  if (horizon < 1) throw DomainError("regret bound horizon must be at least 1");
  const double d = config.d;
  const double sigma = config.eta;
  const double eps = config.epsilon;
  return eps * comparator_norm_sq / 2.0 +
         (2.0 * d / sigma) * std::log1p(sigma * static_cast<double>(horizon) * g * g / (d * eps));
}

}  // namespace dynreg
