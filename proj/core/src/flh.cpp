#include "dynreg/flh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dynreg {

void FlhConfig::validate() const {
  if (d <= 0) throw DomainError("FLH dimension must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("FLH sigma must be positive");
  SionsConfig{d, sigma, epsilon, clip_c}.validate();
}

Vector2 expert_covariate(CovariateMode mode, long start_time, long round) {
  if (mode == CovariateMode::kConstant) return Vector2(1.0, 0.0);
  return Vector2(1.0, static_cast<double>(round - start_time + 1));
}

std::vector<double> flh_reweight(std::span<const double> weights, std::span<const double> losses,
                                 double sigma) {
  if (weights.size() != losses.size() || weights.empty()) {
    throw DomainError("flh_reweight needs one loss per incumbent weight");
  }
  const std::size_t t = weights.size();
  std::vector<double> logits(t);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t; ++i) {
    logits[i] = weights[i] > 0.0 ? std::log(weights[i]) - sigma * losses[i]
                                 : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, logits[i]);
  }
  if (!std::isfinite(peak)) throw NumericError("flh_reweight: every weight vanished");

  std::vector<double> out(t + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  const double fresh = 1.0 / static_cast<double>(t + 1);
  const double keep = (1.0 - fresh) / total;
  for (std::size_t i = 0; i < t; ++i) out[i] *= keep;
  out[t] = fresh;
  return out;
}

FlhEnsemble::FlhEnsemble(const FlhConfig& config)
    : config_((config.validate(), config)), prediction_(Vector::Zero(config.d)) {
  experts_.push_back(
      Expert{1, SionsExpert(SionsConfig{config_.d, config_.sigma, config_.epsilon, config_.clip_c})});
  weights_.push_back(1.0);
}

const Vector& FlhEnsemble::predict() {
  prediction_.setZero();
  for (std::size_t j = 0; j < experts_.size(); ++j) {
    Expert& e = experts_[j];
    const Vector& y = e.learner.predict(expert_covariate(config_.covariates, e.start_time, round_));
    prediction_.noalias() += weights_[j] * y;
  }
  predicted_ = true;
  return prediction_;
}

bool FlhEnsemble::expires(long start_time) const {
  // Expert started at tau = r 2^k (r odd) lives for 2^(k+2) rounds.
  if (!config_.pruning) return false;
  long k = 0;
  long tau = start_time;
  while (tau % 2 == 0) {
    tau /= 2;
    ++k;
  }
  const long lifetime = 4L << k;
  return round_ + 1 >= start_time + lifetime;
}

void FlhEnsemble::update(const LossOracle& loss) {
  if (!predicted_) throw DomainError("FLH update called before predict");
  losses_.resize(experts_.size());
  for (std::size_t j = 0; j < experts_.size(); ++j) {
    losses_[j] = loss.value(experts_[j].learner.prediction());
    experts_[j].last_loss = losses_[j];
  }
  std::vector<double> next = flh_reweight(weights_, losses_, config_.sigma);

  for (Expert& e : experts_) {
    try {
      e.learner.update(loss, expert_covariate(config_.covariates, e.start_time, round_ + 1),
                       config_.projection);
    } catch (const ConvergenceError& err) {
      std::ostringstream msg;
      msg << "expert started at t=" << e.start_time << ": " << err.what();
      throw ConvergenceError(msg.str(), err.best_iterate(), err.residual());
    }
  }
  experts_.push_back(Expert{
      round_ + 1, SionsExpert(SionsConfig{config_.d, config_.sigma, config_.epsilon, config_.clip_c})});
  weights_ = std::move(next);

  if (config_.pruning) {
    std::size_t kept = 0;
    double total = 0.0;
    for (std::size_t j = 0; j < experts_.size(); ++j) {
      if (j + 1 < experts_.size() && expires(experts_[j].start_time)) continue;
      if (kept != j) {
        experts_[kept] = std::move(experts_[j]);
        weights_[kept] = weights_[j];
      }
      total += weights_[kept];
      ++kept;
    }
    experts_.erase(experts_.begin() + static_cast<std::ptrdiff_t>(kept), experts_.end());
    weights_.resize(kept);
    for (double& w : weights_) w /= total;
  }
  ++round_;
  predicted_ = false;
}

Trajectory flh_run(const FlhConfig& config, std::span<const LossOracle> losses,
                   const FlhRunOptions& options) {
  if (losses.empty()) throw DomainError("flh_run needs at least one loss");
  for (const LossOracle& f : losses) {
    if (f.dimension() != config.d) throw DomainError("flh_run: loss dimension mismatch");
  }
  const long n = static_cast<long>(losses.size());
  Trajectory out;
  out.predictions.resize(n, config.d);
  out.losses.resize(n);
  for (long tau : options.track_experts) {
    if (tau < 1 || tau > n) throw DomainError("tracked expert start time out of range");
    out.tracked_expert_losses[tau].reserve(static_cast<std::size_t>(n - tau + 1));
  }

  FlhEnsemble ensemble(config);
  for (long t = 1; t <= n; ++t) {
    const LossOracle& f = losses[static_cast<std::size_t>(t - 1)];
    const Vector& p = ensemble.predict();
    out.predictions.row(t - 1) = p.transpose();
    out.losses[t - 1] = f.value(p);
    ensemble.update(f);
    if (!out.tracked_expert_losses.empty()) {
      const auto& experts = ensemble.experts();
      for (auto& [tau, series] : out.tracked_expert_losses) {
        if (tau > t) continue;
        // Experts are kept sorted by start time.
        auto it = std::lower_bound(experts.begin(), experts.end(), tau,
                                   [](const FlhEnsemble::Expert& e, long s) { return e.start_time < s; });
        if (it == experts.end() || it->start_time != tau) continue;
        series.push_back(it->last_loss);
      }
    }
  }
  return out;
}

double adaptive_overhead_bound(double sigma, long n) {
  if (n < 2) throw DomainError("adaptive overhead bound needs n >= 2");
  if (!(sigma > 0.0)) throw DomainError("adaptive overhead bound needs sigma > 0");
  return 4.0 * std::log(static_cast<double>(n)) / sigma;
}

Trajectory sions_run(const SionsConfig& config, std::span<const LossOracle> losses,
                     CovariateMode mode) {
  if (losses.empty()) throw DomainError("sions_run needs at least one loss");
  const long n = static_cast<long>(losses.size());
  Trajectory out;
  out.predictions.resize(n, config.d);
  out.losses.resize(n);
  out.tracked_lifted_gradients.reserve(n);
  SionsExpert expert(config);
  for (long t = 1; t <= n; ++t) {
    const LossOracle& f = losses[static_cast<std::size_t>(t - 1)];
    const Vector& p = expert.predict(expert_covariate(mode, 1, t));
    out.predictions.row(t - 1) = p.transpose();
    out.losses[t - 1] = f.value(p);
    expert.update(f, expert_covariate(mode, 1, t + 1));
    out.tracked_lifted_gradients.push_back(expert.lifted_gradient());
  }
  return out;
}

}  // namespace dynreg
