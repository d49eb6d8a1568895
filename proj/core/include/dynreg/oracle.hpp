#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "dynreg/losses.hpp"

namespace dynreg {

// Constraint ||D^2 u||_1 <= c_n / n, summed over coordinates.
struct VariationBudget {
  double c_n = 0.0;
  long n = 0;

  double radius() const { return c_n / static_cast<double>(n); }
};

struct SolverReport {
  int outer_iterations = 0;        // regula falsi steps on lambda
  long newton_iterations = 0;      // projected Newton steps summed over coordinates
  bool polished = false;           // budget and dual optimality both met their tolerances
  double tv = 0.0;                 // ||D^2 u||_1 of the returned point
  double inner_residual = 0.0;     // projected dual gradient at the last solve
  std::string regime;              // "slack", "zero-tv" or "active"
};

// Offline minimizer of sum_t f_t(u_t) over the budget and the box [-1, 1]^d.
//
// Rows index time, columns coordinates. signs has n - 2 rows: row j (0-based)
// belongs to the second difference u_{j+2} - 2 u_{j+1} + u_j.
struct OfflineSolution {
  Matrix u;
  double lambda = 0.0;
  Matrix gamma_minus;
  Matrix gamma_plus;
  Matrix signs;
  double objective = 0.0;
  SolverReport report;
};

struct OfflineOptions {
  double tol = 1e-8;           // relative gap on the budget for the active case
  double inner_tol = 1e-12;    // projected dual gradient target
  double accept_residual = 1e-9;  // largest projected gradient counted as converged
  int max_inner_iterations = 500;
  int max_bisection = 200;
};

// n^order * ||D^{order+1} u||_1 with the l1 norm summed over coordinates.
double tv_variation(const Matrix& u, int order);

// ||D^2 u||_1 without the horizon factor.
double second_difference_norm(const Matrix& u);

// Throws DomainError for n < 3 or c_n < 0. ConvergenceError when a dual solve
// fails outright, or when the returned point misses stationarity or
// feasibility by more than 1e-6 or has inconsistent signs.
OfflineSolution solve_offline(std::span<const LossOracle> losses, const VariationBudget& budget,
                              const OfflineOptions& options = {});

struct KktReport {
  double stationarity = 0.0;      // max over t, k of the stationarity residual
  double tv_slackness = 0.0;      // |lambda (||D^2 u||_1 - c_n / n)|
  double box_slackness = 0.0;     // max of |gamma^- (u + 1)| and |gamma^+ (u - 1)|
  double min_dual = 0.0;          // smallest of lambda, gamma^-, gamma^+
  double primal_violation = 0.0;  // budget excess and box excess
  int sign_mismatches = 0;        // |D^2 u| > 1e-8 with s != sign(D^2 u), or |s| > 1

  double worst() const;
};

KktReport kkt_check(const OfflineSolution& solution, std::span<const LossOracle> losses,
                    const VariationBudget& budget);

// argmin_u 0.5 ||y - u||^2 + lam ||D^2 u||_1 with no box.
Vector l1_trend_filter(const Vector& y, double lam, double tol = 1e-10);

// Smallest lam at which l1_trend_filter returns the least-squares line.
double trend_filter_lambda_max(const Vector& y);

// t, u_k, s_k, gamma_minus_k, gamma_plus_k with a leading comment line holding
// lambda, objective and residuals. t is 1-based; s is empty on the last two rows.
void write_offline_csv(std::ostream& out, const OfflineSolution& solution, const KktReport& kkt);

}  // namespace dynreg
