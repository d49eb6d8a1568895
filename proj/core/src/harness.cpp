#include "dynreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "dynreg/baselines.hpp"
#include "dynreg/flh.hpp"
#include "dynreg/oracle.hpp"

namespace dynreg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Group {
  long n;
  std::uint64_t seed;
};

double comparator_loss(const Environment& env, std::vector<double>* per_round) {
  double total = 0.0;
  for (std::size_t t = 0; t < env.losses.size(); ++t) {
    const double v = env.losses[t].value(env.comparator.row(static_cast<Eigen::Index>(t)).transpose());
    if (per_round != nullptr) per_round->push_back(v);
    total += v;
  }
  return total;
}

Trajectory run_algorithm(const AlgorithmSpec& spec, const Environment& env, double* step_out) {
  const std::span<const LossOracle> losses(env.losses);
  const double sigma = spec.sigma > 0.0 ? spec.sigma : losses.front().constants().sigma;
  switch (spec.kind) {
    case AlgorithmKind::kFlhSions: {
      FlhConfig cfg;
      cfg.d = losses.front().dimension();
      cfg.sigma = sigma;
      cfg.epsilon = spec.epsilon;
      cfg.clip_c = spec.clip;
      cfg.pruning = spec.pruning;
      return flh_run(cfg, losses);
    }
    case AlgorithmKind::kFlhConstant:
      return flh_constant_experts_run(sigma, losses, spec.epsilon, spec.clip);
    case AlgorithmKind::kOgd: {
      Trajectory best;
      double best_loss = std::numeric_limits<double>::infinity();
      for (double step : spec.ogd_steps(static_cast<long>(losses.size()))) {
        OgdTrace trace = ogd_run(losses, step, 1.0);
        double total = 0.0;
        for (double v : trace.trajectory.losses) total += v;
        if (total < best_loss) {
          best_loss = total;
          best = std::move(trace.trajectory);
          *step_out = step;
        }
      }
      return best;
    }
  }
  throw DomainError("unhandled algorithm kind");
}

std::vector<RegretRecord> run_group(const ExperimentConfig& config, const Group& group) {
  std::vector<RegretRecord> out;
  const double budget = config.budget_at(group.n);
  auto base_record = [&](const AlgorithmSpec& spec) {
    RegretRecord r;
    r.algorithm = spec.label.empty() ? std::string(algorithm_name(spec.kind)) : spec.label;
    r.cell = r.algorithm + "/n=" + std::to_string(group.n) + "/seed=" + std::to_string(group.seed);
    r.n = group.n;
    r.d = config.d;
    r.seed = group.seed;
    r.budget = budget;
    return r;
  };

  Environment env;
  OfflineSolution offline;
  std::vector<double> offline_rounds;
  std::vector<double> comparator_rounds;
  double comp_loss = 0.0;
  try {
    PiecewiseLinearSpec spec;
    spec.n = group.n;
    spec.d = config.d;
    spec.kinks = config.kinks;
    spec.budget = budget;
    spec.noise = config.noise;
    spec.seed = group.seed;
    env = gen_piecewise_linear(spec);
    comp_loss = comparator_loss(env, config.traces ? &comparator_rounds : nullptr);
    if (config.oracle_enabled) {
      OfflineOptions options;
      options.tol = config.oracle_tol;
      offline = solve_offline(env.losses, VariationBudget{budget, group.n}, options);
      if (config.traces) {
        for (long t = 0; t < group.n; ++t) {
          offline_rounds.push_back(env.losses[t].value_unchecked(offline.u.row(t).transpose()));
        }
      }
    }
  } catch (const std::exception& e) {
    for (const AlgorithmSpec& spec : config.algorithms) {
      RegretRecord r = base_record(spec);
      r.status = std::string("environment: ") + e.what();
      out.push_back(std::move(r));
    }
    return out;
  }

  for (const AlgorithmSpec& spec : config.algorithms) {
    RegretRecord r = base_record(spec);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Trajectory traj = run_algorithm(spec, env, &r.step);
      for (double v : traj.losses) r.learner_loss += v;
      r.comparator_loss = comp_loss;
      r.regret_comparator = r.learner_loss - comp_loss;
      if (config.oracle_enabled) {
        r.offline_loss = offline.objective;
        r.regret_offline = r.learner_loss - offline.objective;
        r.dominance_slack = r.regret_offline - r.regret_comparator;
      } else {
        r.offline_loss = kNaN;
        r.regret_offline = kNaN;
        r.dominance_slack = kNaN;
      }
      if (config.traces) {
        double cum_c = 0.0;
        double cum_o = 0.0;
        for (std::size_t t = 0; t < traj.losses.size(); ++t) {
          cum_c += traj.losses[t] - comparator_rounds[t];
          r.trace_comparator.push_back(cum_c);
          if (config.oracle_enabled) {
            cum_o += traj.losses[t] - offline_rounds[t];
            r.trace_offline.push_back(cum_o);
          }
        }
      }
    } catch (const std::exception& e) {
      r.status = e.what();
    }
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

void write_number(std::ostream& out, double v) {
  if (std::isfinite(v)) out << v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

}  // namespace

int default_worker_count() {
  if (const char* env = std::getenv("DYNREG_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<RegretRecord> run_cells(const ExperimentConfig& config, int workers) {
  config.validate();
  std::vector<Group> groups;
  for (long n : config.n_values) {
    for (std::uint64_t seed : config.seeds) groups.push_back({n, seed});
  }
  std::vector<std::vector<RegretRecord>> results(groups.size());
  if (groups.empty()) return {};

  const int count = std::min<int>(workers > 0 ? workers : default_worker_count(),
                                  static_cast<int>(groups.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < groups.size(); i = next++) {
      results[i] = run_group(config, groups[i]);
    }
  };
  if (count <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < count; ++w) pool.emplace_back(work);
  }

  std::vector<RegretRecord> records;
  for (auto& group : results) {
    for (auto& r : group) records.push_back(std::move(r));
  }
  return records;
}

void write_records_csv(std::ostream& out, const std::vector<RegretRecord>& records) {
  const auto old_precision = out.precision(17);
  out << "cell,algorithm,n,d,seed,budget,step,learner_loss,comparator_loss,offline_loss,"
         "regret_comparator,regret_offline,dominance_slack,status\n";
  for (const RegretRecord& r : records) {
    out << csv_escape(r.cell) << ',' << csv_escape(r.algorithm) << ',' << r.n << ',' << r.d << ','
        << r.seed << ',' << r.budget << ',' << r.step << ',';
    const bool ok = r.ok();
    for (double v : {r.learner_loss, r.comparator_loss, r.offline_loss, r.regret_comparator,
                     r.regret_offline, r.dominance_slack}) {
      if (ok) write_number(out, v);
      out << ',';
    }
    out << csv_escape(r.status) << '\n';
  }
  out.precision(old_precision);
}

void write_timings_csv(std::ostream& out, const std::vector<RegretRecord>& records) {
  const auto old_precision = out.precision(6);
  out << "cell,wall_seconds\n";
  for (const RegretRecord& r : records) out << csv_escape(r.cell) << ',' << r.wall_seconds << '\n';
  out.precision(old_precision);
}

void write_trace_csv(std::ostream& out, const RegretRecord& record) {
  const auto old_precision = out.precision(17);
  out << "t,regret_comparator,regret_offline\n";
  for (std::size_t t = 0; t < record.trace_comparator.size(); ++t) {
    out << t + 1 << ',' << record.trace_comparator[t] << ',';
    if (t < record.trace_offline.size()) out << record.trace_offline[t];
    out << '\n';
  }
  out.precision(old_precision);
}

ScalingFit fit_scaling_slope(const std::vector<ScalingPoint>& points) {
  ScalingFit fit;
  std::map<long, std::vector<double>> by_n;
  for (const ScalingPoint& p : points) {
    if (!(p.regret > 0.0)) {
      fit.warnings.push_back("excluded nonpositive regret " + std::to_string(p.regret) +
                             " at n=" + std::to_string(p.n));
      continue;
    }
    by_n[p.n].push_back(p.regret);
  }
  if (by_n.size() < 4) {
    throw DomainError("slope fit needs at least 4 distinct n with positive regret, have " +
                      std::to_string(by_n.size()));
  }
  for (auto& [n, values] : by_n) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    const double median = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
    fit.n_values.push_back(n);
    fit.medians.push_back(median);
  }
  const auto k = static_cast<Eigen::Index>(fit.n_values.size());
  Eigen::Matrix<double, Eigen::Dynamic, 2> X(k, 2);
  Vector y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(static_cast<double>(fit.n_values[i]));
    y[i] = std::log(fit.medians[i]);
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  fit.intercept = beta[0];
  fit.slope = beta[1];
  const double ss_res = (y - X * beta).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

ScalingFit fit_scaling_slope(const std::vector<RegretRecord>& records, const std::string& algorithm) {
  std::vector<ScalingPoint> points;
  for (const RegretRecord& r : records) {
    if (r.algorithm == algorithm && r.ok()) points.push_back({r.n, r.regret_offline});
  }
  ScalingFit fit = fit_scaling_slope(points);
  fit.algorithm = algorithm;
  return fit;
}

void write_fits_csv(std::ostream& out, const std::vector<ScalingFit>& fits) {
  const auto old_precision = out.precision(17);
  out << "algorithm,slope,intercept,r2\n";
  for (const ScalingFit& f : fits) {
    out << csv_escape(f.algorithm) << ',' << f.slope << ',' << f.intercept << ',' << f.r2 << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dynreg
