#include "dynreg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dynreg {

OgdState make_ogd(int d, double step, double box) {
  if (d <= 0) throw DomainError("OGD dimension must be positive");
  // A step of 1 or more lets an alternating adversary force linear regret.
  if (!(step > 0.0 && step < 1.0)) throw DomainError("OGD step must lie in (0, 1)");
  if (!(box > 0.0)) throw DomainError("OGD box must be positive");
  return OgdState{Vector::Zero(d), step, box};
}

void ogd_step(OgdState& state, const LossOracle& loss) {
  if (!(state.step > 0.0 && state.step < 1.0)) throw DomainError("OGD step must lie in (0, 1)");
  const double scale = state.step / loss.constants().grad_lipschitz_l;
  state.w -= scale * loss.gradient(state.w);
  state.w = state.w.cwiseMax(-state.box).cwiseMin(state.box);
}

OgdTrace ogd_run(std::span<const LossOracle> losses, double step, double box) {
  if (losses.empty()) throw DomainError("ogd_run needs at least one loss");
  const int d = losses.front().dimension();
  OgdState state = make_ogd(d, step, box);
  OgdTrace out;
  out.trajectory.predictions.resize(static_cast<Eigen::Index>(losses.size()), d);
  out.trajectory.losses.resize(losses.size());
  Vector grad(d);
  for (std::size_t t = 0; t < losses.size(); ++t) {
    const LossOracle& f = losses[t];
    out.trajectory.predictions.row(static_cast<Eigen::Index>(t)) = state.w.transpose();
    out.trajectory.losses[t] = f.value(state.w);
    out.max_abs_iterate = std::max(out.max_abs_iterate, state.w.cwiseAbs().maxCoeff());
    f.gradient_into(state.w, grad);
    const Vector raw = state.w - (step / f.constants().grad_lipschitz_l) * grad;
    state.w = raw.cwiseMax(-box).cwiseMin(box);
    if (state.w != raw) ++out.clipped_rounds;
  }
  return out;
}

Trajectory flh_constant_experts_run(double sigma, std::span<const LossOracle> losses,
                                    double epsilon, double clip_c) {
  if (losses.empty()) throw DomainError("flh_constant_experts_run needs at least one loss");
  FlhConfig config;
  config.d = losses.front().dimension();
  config.sigma = sigma;
  config.epsilon = epsilon;
  config.clip_c = clip_c;
  config.covariates = CovariateMode::kConstant;
  return flh_run(config, losses);
}

LinsmoothEnvironment linsmooth_environment(int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("linsmooth environment needs n >= 1");
  const double root = std::sqrt(2.2);
  LinsmoothEnvironment env;
  env.theta_bound = 1.0 / (8.0 * root);
  env.decision_box = 1.0 / (2.0 * root);
  env.theta = Vector::Zero(n);
  env.y = Vector::Zero(n);

  std::mt19937_64 rng(seed);
  // theta: zigzag with four kinks of alternating sign and equal magnitude
  // 1 / (4n), so n ||D^2 theta||_1 = 1 exactly; kink spacing is jittered.
  constexpr int kKinks = 4;
  if (n >= 3 * (kKinks + 1)) {
    std::vector<int> kinks;
    const double spacing = static_cast<double>(n) / (kKinks + 1);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    for (int i = 1; i <= kKinks; ++i) {
      kinks.push_back(static_cast<int>(std::lround(spacing * (i + jitter(rng)))));
    }
    const double delta = 1.0 / (static_cast<double>(kKinks) * n);
    double slope = (rng() & 1U) ? delta / 2.0 : -delta / 2.0;
    std::size_t next = 0;
    for (int t = 1; t < n; ++t) {
      if (next < kinks.size() && t == kinks[next]) {
        slope += slope > 0.0 ? -delta : delta;
        ++next;
      }
      env.theta[t] = env.theta[t - 1] + slope;
    }
    const double mid = 0.5 * (env.theta.maxCoeff() + env.theta.minCoeff());
    env.theta.array() -= mid;
  }

  std::uniform_real_distribution<double> noise(-env.theta_bound, env.theta_bound);
  const double curvature = 4.0 * root / 3.0;
  const CurvatureConstants constants =
      quadratic_constants(1, curvature, env.decision_box, 2.0 * env.theta_bound);
  env.losses.reserve(n);
  for (int t = 0; t < n; ++t) {
    env.y[t] = env.theta[t] + noise(rng);
    env.losses.emplace_back(Vector::Constant(1, env.y[t]), curvature, constants);
  }
  return env;
}

}  // namespace dynreg
