#include "dynreg/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Sparse>

namespace dynreg {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Row j of D^2 is e_j - 2 e_{j+1} + e_{j+2}.
constexpr std::array<double, 3> kStencil{1.0, -2.0, 1.0};

Vector d2(const Eigen::Ref<const Vector>& u) {
  const Eigen::Index m = u.size() - 2;
  return u.head(m) - 2.0 * u.segment(1, m) + u.tail(m);
}

Vector d2t(const Eigen::Ref<const Vector>& mu, Eigen::Index n) {
  Vector out = Vector::Zero(n);
  const Eigen::Index m = mu.size();
  out.head(m) += mu;
  out.segment(1, m) -= 2.0 * mu;
  out.tail(m) += mu;
  return out;
}

// Solves the first n - 2 rows of D^T nu = r by forward substitution. The
// remaining two rows hold exactly when r is orthogonal to linear sequences.
Vector integrate_dual(const Vector& r) {
  const Eigen::Index m = r.size() - 2;
  Vector nu(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double v = r[j];
    if (j >= 1) v += 2.0 * nu[j - 1];
    if (j >= 2) v -= nu[j - 2];
    nu[j] = v;
  }
  return nu;
}

struct Problem {
  int n = 0;
  int d = 0;
  Vector h;
  Matrix y;
};

Problem make_problem(std::span<const LossOracle> losses) {
  Problem p;
  p.n = static_cast<int>(losses.size());
  if (p.n < 3) throw DomainError("offline program needs n >= 3");
  p.d = losses.front().dimension();
  p.h.resize(p.n);
  p.y.resize(p.n, p.d);
  for (int t = 0; t < p.n; ++t) {
    if (losses[t].dimension() != p.d) throw DomainError("losses disagree on dimension");
    p.h[t] = losses[t].curvature();
    p.y.row(t) = losses[t].target().transpose();
  }
  return p;
}

// Weighted least-squares line through y, optionally confined to [-1, 1].
// A line stays in the box iff both endpoints do, so it is parametrised by
// its endpoint values and the QP has simple bounds.
struct LineFit {
  Vector u;
  Vector gamma_minus;
  Vector gamma_plus;
};

LineFit line_fit(const Vector& h, const Vector& y, bool has_box) {
  const Eigen::Index n = y.size();
  const double span = static_cast<double>(n - 1);
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Vector2d phi((span - t) / span, t / span);
    Q += h[t] * phi * phi.transpose();
    c += h[t] * y[t] * phi;
  }
  auto objective = [&](const Eigen::Vector2d& v) { return 0.5 * v.dot(Q * v) - c.dot(v); };

  Eigen::Vector2d best = Q.ldlt().solve(c);
  if (has_box && best.cwiseAbs().maxCoeff() > 1.0) {
    double best_value = std::numeric_limits<double>::infinity();
    constexpr std::array<double, 3> kStates{0.0, -1.0, 1.0};  // 0 marks a free endpoint
    for (double sp : kStates) {
      for (double sq : kStates) {
        Eigen::Vector2d v;
        if (sp == 0.0 && sq == 0.0) continue;
        if (sp != 0.0 && sq != 0.0) {
          v = {sp, sq};
        } else if (sp != 0.0) {
          v = {sp, (c[1] - Q(1, 0) * sp) / Q(1, 1)};
        } else {
          v = {(c[0] - Q(0, 1) * sq) / Q(0, 0), sq};
        }
        if (v.cwiseAbs().maxCoeff() > 1.0) continue;
        const double value = objective(v);
        if (value < best_value) {
          best_value = value;
          best = v;
        }
      }
    }
  }

  LineFit fit;
  fit.u.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) fit.u[t] = best[0] * (span - t) / span + best[1] * t / span;
  fit.gamma_minus = Vector::Zero(n);
  fit.gamma_plus = Vector::Zero(n);
  if (has_box) {
    const Eigen::Vector2d g = Q * best - c;
    const std::array<Eigen::Index, 2> ends{0, n - 1};
    for (int e = 0; e < 2; ++e) {
      if (best[e] >= 1.0) fit.gamma_plus[ends[e]] = std::max(-g[e], 0.0);
      if (best[e] <= -1.0) fit.gamma_minus[ends[e]] = std::max(g[e], 0.0);
    }
  }
  return fit;
}

// Dual of the zero-curvature constraint D^2 u = 0 at a line fit.
Vector line_dual(const Vector& h, const Vector& y, const LineFit& fit) {
  const Vector grad = h.cwiseProduct(fit.u - y);
  return integrate_dual(-(grad + fit.gamma_plus - fit.gamma_minus));
}

// Dual of the penalised problem for one coordinate:
//   min_mu  sum_t phi_t^*(-(D^2^T mu)_t)   subject to |mu_j| <= lambda,
// with phi_t = (h_t / 2)(u - y_t)^2 plus the box indicator. The primal point
// is u(mu) = clip(y - D^2^T mu / h) and the gradient is -D^2 u(mu). Solved by
// projected Newton with an epsilon-active set and an Armijo search along the
// projection arc. The Hessian D^2 diag(interior / h) D^2^T is pentadiagonal;
// active rows are decoupled in place so the sparsity pattern never changes.
class DualSolver {
 public:
  DualSolver(const Vector& h, const Vector& y, bool has_box)
      : h_(h), y_(y), has_box_(has_box), n_(y.size()), m_(y.size() - 2) {
    std::vector<Triplet> trips;
    for (Eigen::Index j = 0; j < m_; ++j) {
      for (Eigen::Index k = j; k < std::min(j + 3, m_); ++k) trips.emplace_back(k, j, 1.0);
    }
    H_.resize(m_, m_);
    H_.setFromTriplets(trips.begin(), trips.end());
    H_.makeCompressed();
    ldlt_.analyzePattern(H_);
  }

  Vector primal(const Vector& mu) const {
    Vector u = y_ - d2t(mu, n_).cwiseQuotient(h_);
    if (has_box_) u = u.cwiseMax(-1.0).cwiseMin(1.0);
    return u;
  }

  // Clipped excess; makes stationarity exact at primal(mu).
  void box_multipliers(const Vector& mu, Eigen::Ref<Vector> gm, Eigen::Ref<Vector> gp) const {
    const Vector free = y_ - d2t(mu, n_).cwiseQuotient(h_);
    gp = h_.cwiseProduct((free.array() - 1.0).max(0.0).matrix());
    gm = h_.cwiseProduct((-free.array() - 1.0).max(0.0).matrix());
  }

  struct Result {
    double pg = 0.0;  // projected gradient at exit
    bool converged = false;
  };

  Result solve(double lambda, Vector& mu, double tol, int max_iter, long* iterations) {
    constexpr double kArmijo = 1e-4;
    constexpr double kEpsFrac = 0.1;
    mu = mu.cwiseMax(-lambda).cwiseMin(lambda);
    Vector u = primal(mu);
    Vector g = -d2(u);
    double value = dual_value(mu, u);
    double pg = projected_gradient(mu, g, lambda);
    // Near the optimum pg sits on a roundoff floor set by the size of the
    // cancellation in y - D^2^T mu / h.
    const double floor =
        64.0 * std::numeric_limits<double>::epsilon() *
        (y_.cwiseAbs().maxCoeff() + 4.0 * lambda * h_.cwiseInverse().maxCoeff());
    const double target = std::max(tol, floor);
    double best_pg = pg;
    int stalled = 0;
    double delta = 1e-15;
    for (int it = 0; it < max_iter && pg > target; ++it) {
      if (stalled >= 4) return {pg, true};
      if (iterations != nullptr) ++*iterations;
      delta = std::max(1e-15, 0.1 * delta);
      const Vector diag = diagonal(u);
      const double scaled_pg = (mu - (mu - g.cwiseQuotient(diag)).cwiseMax(-lambda).cwiseMin(lambda))
                                   .cwiseAbs()
                                   .maxCoeff();
      const double eps = std::min(kEpsFrac * lambda, scaled_pg);
      std::vector<char> active(static_cast<std::size_t>(m_), 0);
      for (Eigen::Index j = 0; j < m_; ++j) {
        active[j] = (mu[j] >= lambda - eps && g[j] < 0.0) || (mu[j] <= -lambda + eps && g[j] > 0.0);
      }
      Vector dir;
      // Tiny pivots can flip the sign of the step; raise the shift until the
      // free part of the step descends.
      for (;;) {
        assemble(u, active, delta);
        ldlt_.factorize(H_);
        if (ldlt_.info() == Eigen::Success) {
          dir = -ldlt_.solve(g);
          double slope = 0.0;
          for (Eigen::Index j = 0; j < m_; ++j) {
            if (!active[j]) slope += g[j] * dir[j];
          }
          if (dir.allFinite() && slope <= 0.0) break;
        }
        if (delta > 1.0) throw NumericError("dual Hessian stayed indefinite");
        delta *= 1e3;
      }

      double alpha = 1.0;
      bool accepted = false;
      Vector trial, trial_u;
      double trial_value = 0.0;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        trial = (mu + alpha * dir).cwiseMax(-lambda).cwiseMin(lambda);
        trial_u = primal(trial);
        trial_value = dual_value(trial, trial_u);
        const double predicted = g.dot(trial - mu);
        if (trial_value <= value + kArmijo * predicted) {
          accepted = true;
          break;
        }
        // Below roundoff the dual values stop being informative; fall back
        // to the projected gradient.
        const double noise = 1e-13 * (std::abs(value) + 1.0);
        if (std::abs(predicted) < noise &&
            projected_gradient(trial, -d2(trial_u), lambda) < pg) {
          accepted = true;
          break;
        }
      }
      if (!accepted) return {pg, pg < 1e3 * target};
      mu = trial;
      u = trial_u;
      value = trial_value;
      g = -d2(u);
      pg = projected_gradient(mu, g, lambda);
      if (pg < 0.5 * best_pg) {
        best_pg = pg;
        stalled = 0;
      } else if (pg < 1e3 * target) {
        ++stalled;
      }
    }
    return {pg, pg <= target || stalled >= 4};
  }

 private:
  double dual_value(const Vector& mu, const Vector& u) const {
    const Vector v = -d2t(mu, n_);
    return (v.cwiseProduct(u) - 0.5 * h_.cwiseProduct((u - y_).cwiseAbs2())).sum();
  }

  static double projected_gradient(const Vector& mu, const Vector& g, double lambda) {
    return (mu - (mu - g).cwiseMax(-lambda).cwiseMin(lambda)).cwiseAbs().maxCoeff();
  }

  Vector weights(const Vector& u) const {
    Vector w(n_);
    for (Eigen::Index t = 0; t < n_; ++t) {
      w[t] = (!has_box_ || std::abs(u[t]) < 1.0) ? 1.0 / h_[t] : 0.0;
    }
    return w;
  }

  Vector diagonal(const Vector& u) const {
    const Vector w = weights(u);
    Vector diag = w.head(m_) + 4.0 * w.segment(1, m_) + w.tail(m_);
    const double floor = 1e-10 * std::max(diag.maxCoeff(), 1e-300);
    return diag.cwiseMax(floor);
  }

  void assemble(const Vector& u, const std::vector<char>& active, double shift) {
    const Vector w = weights(u);
    double* values = H_.valuePtr();
    const int* outer = H_.outerIndexPtr();
    double max_diag = 0.0;
    for (Eigen::Index j = 0; j < m_; ++j) {
      int pos = outer[j];
      for (Eigen::Index k = j; k < std::min(j + 3, m_); ++k, ++pos) {
        double entry = 0.0;
        for (Eigen::Index t = k; t <= j + 2; ++t) entry += kStencil[t - j] * kStencil[t - k] * w[t];
        if (k != j && (active[j] || active[k])) entry = 0.0;
        values[pos] = entry;
      }
      max_diag = std::max(max_diag, values[outer[j]]);
    }
    const double delta = shift * std::max(max_diag, 1e-300);
    for (Eigen::Index j = 0; j < m_; ++j) {
      double& diag = values[outer[j]];
      diag += delta;
    }
  }

  Vector h_;
  Vector y_;
  bool has_box_;
  Eigen::Index n_;
  Eigen::Index m_;
  SpMat H_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

double objective_of(std::span<const LossOracle> losses, const Matrix& u) {
  double total = 0.0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    total += losses[t].value_unchecked(u.row(static_cast<Eigen::Index>(t)).transpose());
  }
  return total;
}

Matrix signs_from(const Matrix& mu, double lambda) {
  if (lambda <= 0.0) return Matrix::Zero(mu.rows(), mu.cols());
  return (mu / lambda).cwiseMax(-1.0).cwiseMin(1.0);
}

// Signs for a point with lambda = 0: sign of each second difference.
Matrix plain_signs(const Matrix& u) {
  Matrix s(u.rows() - 2, u.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const Vector z = d2(u.col(k));
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      s(j, k) = std::abs(z[j]) > 1e-8 ? (z[j] > 0.0 ? 1.0 : -1.0) : 0.0;
    }
  }
  return s;
}

}  // namespace

double second_difference_norm(const Matrix& u) {
  if (u.rows() < 3) throw DomainError("second differences need at least 3 points");
  double total = 0.0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) total += d2(u.col(k)).cwiseAbs().sum();
  return total;
}

double tv_variation(const Matrix& u, int order) {
  if (order < 0) throw DomainError("variation order must be nonnegative");
  const Eigen::Index n = u.rows();
  if (n < order + 2) throw DomainError("sequence too short for the requested variation order");
  Matrix diff = u;
  for (int i = 0; i <= order; ++i) {
    diff = (diff.bottomRows(diff.rows() - 1) - diff.topRows(diff.rows() - 1)).eval();
  }
  return std::pow(static_cast<double>(n), order) * diff.cwiseAbs().sum();
}

OfflineSolution solve_offline(std::span<const LossOracle> losses, const VariationBudget& budget,
                              const OfflineOptions& options) {
  if (!(budget.c_n >= 0.0) || !std::isfinite(budget.c_n)) {
    throw DomainError("variation budget must be finite and nonnegative");
  }
  const Problem p = make_problem(losses);
  if (budget.n != p.n) throw DomainError("budget horizon differs from the number of losses");
  const double radius = budget.radius();
  const int n = p.n;

  OfflineSolution sol;
  sol.gamma_minus = Matrix::Zero(n, p.d);
  sol.gamma_plus = Matrix::Zero(n, p.d);

  // Constraint slack: the clipped targets are optimal.
  const Matrix clipped = p.y.cwiseMax(-1.0).cwiseMin(1.0);
  if (second_difference_norm(clipped) <= radius) {
    sol.u = clipped;
    for (int k = 0; k < p.d; ++k) {
      const Vector grad = p.h.cwiseProduct(clipped.col(k) - p.y.col(k));
      sol.gamma_plus.col(k) = (-grad).cwiseMax(0.0);
      sol.gamma_minus.col(k) = grad.cwiseMax(0.0);
    }
    sol.signs = plain_signs(sol.u);
    sol.objective = objective_of(losses, sol.u);
    sol.report.regime = "slack";
    sol.report.tv = second_difference_norm(sol.u);
    sol.report.polished = true;
    return sol;
  }

  // Zero-curvature solution; its dual fixes the top of the lambda bracket.
  Matrix line_u(n, p.d);
  Matrix line_mu(n - 2, p.d);
  double lambda_max = 0.0;
  for (int k = 0; k < p.d; ++k) {
    const LineFit fit = line_fit(p.h, p.y.col(k), true);
    line_u.col(k) = fit.u;
    line_mu.col(k) = line_dual(p.h, p.y.col(k), fit);
    sol.gamma_minus.col(k) = fit.gamma_minus;
    sol.gamma_plus.col(k) = fit.gamma_plus;
    lambda_max = std::max(lambda_max, line_mu.col(k).cwiseAbs().maxCoeff());
  }
  if (radius == 0.0) {
    sol.u = line_u;
    sol.lambda = lambda_max;
    sol.signs = signs_from(line_mu, lambda_max);
    sol.objective = objective_of(losses, sol.u);
    sol.report.regime = "zero-tv";
    sol.report.tv = second_difference_norm(sol.u);
    sol.report.polished = true;
    return sol;
  }

  // Active budget: match ||D^2 u(lambda)||_1 to the radius. Walk lambda down
  // from lambda_max by halving until the budget binds, then run Illinois on
  // log(lambda). Every dual solve is warm-started from the nearest converged
  // point; a solve that fails is retried through a geometric midpoint.
  std::deque<DualSolver> solvers;
  for (int k = 0; k < p.d; ++k) solvers.emplace_back(p.h, p.y.col(k), true);

  struct Point {
    double lambda = 0.0;
    Matrix mu;
    double gap = 0.0;  // ||D^2 u||_1 - radius
    double pg = 0.0;
  };
  auto attempt = [&](const Point& from, double lambda, Point& out) {
    out.lambda = lambda;
    out.mu = from.mu * (lambda / from.lambda);
    out.pg = 0.0;
    double tv = 0.0;
    for (int k = 0; k < p.d; ++k) {
      Vector col = out.mu.col(k);
      const DualSolver::Result r = solvers[k].solve(lambda, col, options.inner_tol,
                                                    options.max_inner_iterations,
                                                    &sol.report.newton_iterations);
      if (!r.converged) return false;
      out.mu.col(k) = col;
      out.pg = std::max(out.pg, r.pg);
      tv += d2(solvers[k].primal(col)).cwiseAbs().sum();
    }
    out.gap = tv - radius;
    return true;
  };
  auto reach = [&](auto&& self, const Point& from, double lambda, int depth) -> Point {
    ++sol.report.outer_iterations;
    Point out;
    if (attempt(from, lambda, out)) return out;
    if (depth >= 40) {
      Vector flat = Eigen::Map<const Vector>(from.mu.data(), from.mu.size());
      throw ConvergenceError("dual solve failed at lambda " + std::to_string(lambda), flat,
                             out.pg);
    }
    const Point mid = self(self, from, std::sqrt(from.lambda * lambda), depth + 1);
    return self(self, mid, lambda, depth + 1);
  };
  // Free rows carry second differences up to the projected gradient, which
  // limits how finely the budget can be resolved.
  auto budget_met = [&](const Point& pt) {
    const double noise = static_cast<double>(n - 2) * p.d * pt.pg;
    return std::abs(pt.gap) <= std::max(options.tol * radius, std::min(noise, 1e-3 * radius));
  };

  Point hi{lambda_max, line_mu, -radius, 0.0};
  Point lo;
  Point last;
  bool done = false;
  for (;;) {
    last = reach(reach, hi, 0.5 * hi.lambda, 0);
    if (budget_met(last)) {
      done = true;
      break;
    }
    if (last.gap > 0.0) {
      lo = last;
      break;
    }
    hi = last;
    if (sol.report.outer_iterations > options.max_bisection) break;
  }
  if (!done && lo.mu.size() > 0) {
    double w_lo = lo.gap;
    double w_hi = hi.gap;
    int side = 0;
    while (sol.report.outer_iterations < options.max_bisection) {
      const double x_lo = std::log(lo.lambda);
      const double x_hi = std::log(hi.lambda);
      if (x_hi - x_lo <= 1e-15 * std::max(std::abs(x_lo), 1.0)) break;
      double x = (x_lo * w_hi - x_hi * w_lo) / (w_hi - w_lo);
      if (!(x > x_lo && x < x_hi)) x = 0.5 * (x_lo + x_hi);
      const Point& near = (x - x_lo < x_hi - x) ? lo : hi;
      last = reach(reach, near, std::exp(x), 0);
      if (budget_met(last)) break;
      if (last.gap > 0.0) {
        lo = last;
        w_lo = last.gap;
        if (side == 1) w_hi *= 0.5;
        side = 1;
      } else {
        hi = last;
        w_hi = last.gap;
        if (side == -1) w_lo *= 0.5;
        side = -1;
      }
    }
  }

  sol.lambda = last.lambda;
  sol.u.resize(n, p.d);
  for (int k = 0; k < p.d; ++k) {
    sol.u.col(k) = solvers[k].primal(last.mu.col(k));
    solvers[k].box_multipliers(last.mu.col(k), sol.gamma_minus.col(k), sol.gamma_plus.col(k));
  }
  sol.signs = signs_from(last.mu, last.lambda);
  sol.report.regime = "active";
  sol.report.inner_residual = last.pg;
  sol.report.polished = budget_met(last) && last.pg <= options.accept_residual;
  sol.objective = objective_of(losses, sol.u);
  sol.report.tv = second_difference_norm(sol.u);
  if (!sol.report.polished) {
    const KktReport kkt = kkt_check(sol, losses, budget);
    const double residual = std::max(kkt.stationarity, kkt.primal_violation);
    if (residual > 1e-6 || kkt.sign_mismatches > 0) {
      Vector flat = Eigen::Map<const Vector>(sol.u.data(), sol.u.size());
      throw ConvergenceError("offline solver stopped with KKT residual " + std::to_string(residual),
                             flat, residual);
    }
  }
  return sol;
}

double KktReport::worst() const {
  return std::max({stationarity, tv_slackness, box_slackness, std::max(-min_dual, 0.0),
                   primal_violation});
}

KktReport kkt_check(const OfflineSolution& solution, std::span<const LossOracle> losses,
                    const VariationBudget& budget) {
  const Problem p = make_problem(losses);
  const int n = p.n;
  if (solution.u.rows() != n || solution.u.cols() != p.d || solution.signs.rows() != n - 2 ||
      solution.gamma_minus.rows() != n || solution.gamma_plus.rows() != n) {
    throw DomainError("solution dimensions do not match the losses");
  }
  KktReport r;
  r.min_dual = std::min({solution.lambda, solution.gamma_minus.minCoeff(),
                         solution.gamma_plus.minCoeff()});
  const double tv = second_difference_norm(solution.u);
  r.tv_slackness = std::abs(solution.lambda * (tv - budget.radius()));
  r.primal_violation = std::max({0.0, tv - budget.radius(), solution.u.cwiseAbs().maxCoeff() - 1.0});
  for (int k = 0; k < p.d; ++k) {
    const Vector u = solution.u.col(k);
    const Vector stat = p.h.cwiseProduct(u - p.y.col(k)) +
                        solution.lambda * d2t(solution.signs.col(k), n) +
                        solution.gamma_plus.col(k) - solution.gamma_minus.col(k);
    r.stationarity = std::max(r.stationarity, stat.cwiseAbs().maxCoeff());
    r.box_slackness = std::max(
        {r.box_slackness,
         solution.gamma_minus.col(k).cwiseProduct((u.array() + 1.0).matrix()).cwiseAbs().maxCoeff(),
         solution.gamma_plus.col(k).cwiseProduct((u.array() - 1.0).matrix()).cwiseAbs().maxCoeff()});
    const Vector z = d2(u);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double s = solution.signs(j, k);
      if (std::abs(s) > 1.0 + 1e-12) {
        ++r.sign_mismatches;
      } else if (std::abs(z[j]) > 1e-8 && solution.lambda > 0.0 &&
                 std::abs(s - (z[j] > 0.0 ? 1.0 : -1.0)) > 1e-9) {
        ++r.sign_mismatches;
      }
    }
  }
  return r;
}

double trend_filter_lambda_max(const Vector& y) {
  if (y.size() < 3) throw DomainError("trend filter needs at least 3 points");
  const Vector ones = Vector::Ones(y.size());
  const LineFit fit = line_fit(ones, y, false);
  return line_dual(ones, y, fit).cwiseAbs().maxCoeff();
}

Vector l1_trend_filter(const Vector& y, double lam, double tol) {
  const Eigen::Index n = y.size();
  if (n < 3) throw DomainError("trend filter needs at least 3 points");
  if (!(lam >= 0.0)) throw DomainError("trend filter penalty must be nonnegative");
  if (lam == 0.0) return y;
  const Vector ones = Vector::Ones(n);
  const LineFit line = line_fit(ones, y, false);
  const Vector line_mu = line_dual(ones, y, line);
  const double lambda_max = line_mu.cwiseAbs().maxCoeff();
  if (lam >= lambda_max) return line.u;

  DualSolver solver(ones, y, false);
  Vector mu = line_mu * (lam / lambda_max);
  const DualSolver::Result r = solver.solve(lam, mu, tol, 2000, nullptr);
  Vector u = solver.primal(mu);
  if (!r.converged) throw ConvergenceError("trend filter did not converge", u, r.pg);
  const double pg = r.pg;
  if (pg > std::sqrt(tol)) throw ConvergenceError("trend filter did not converge", u, pg);
  return u;
}

void write_offline_csv(std::ostream& out, const OfflineSolution& solution, const KktReport& kkt) {
  const Eigen::Index n = solution.u.rows();
  const Eigen::Index d = solution.u.cols();
  const auto old_precision = out.precision(17);
  out << "# lambda=" << solution.lambda << " objective=" << solution.objective
      << " stationarity=" << kkt.stationarity
      << " slackness=" << std::max(kkt.tv_slackness, kkt.box_slackness) << '\n';
  out << 't';
  for (const char* name : {"u", "s", "gamma_minus", "gamma_plus"}) {
    for (Eigen::Index k = 1; k <= d; ++k) out << ',' << name << '_' << k;
  }
  out << '\n';
  for (Eigen::Index t = 0; t < n; ++t) {
    out << t + 1;
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << solution.u(t, k);
    for (Eigen::Index k = 0; k < d; ++k) {
      out << ',';
      if (t < n - 2) out << solution.signs(t, k);
    }
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << solution.gamma_minus(t, k);
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << solution.gamma_plus(t, k);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dynreg
