#pragma once

#include <vector>

#include "dynreg/types.hpp"

namespace dynreg {

// A = epsilon I + eta * sum g g^T together with its inverse. The inverse is
// kept current by Sherman-Morrison and rebuilt from a Cholesky factorization
// of A every kRefactorInterval updates to bound accumulated drift.
class CorrectionMatrix {
 public:
  static constexpr int kRefactorInterval = 512;

  CorrectionMatrix(int dim, double epsilon);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  double epsilon() const { return epsilon_; }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& inverse() const { return inverse_; }
  int updates_since_refactor() const { return updates_since_refactor_; }

  // matrix += eta g g^T. Throws NumericError on non-finite g.
  void rank_one_update(const Eigen::Ref<const Vector>& g, double eta);

  // Recomputes the inverse from a fresh factorization of the matrix.
  void refactor();

  // v^T A v.
  double quadratic_norm(const Eigen::Ref<const Vector>& v) const;

 private:
  double epsilon_;
  Matrix matrix_;
  Matrix inverse_;
  Vector work_;
  int updates_since_refactor_ = 0;
};

double quadratic_norm(const Eigen::Ref<const Vector>& v, const CorrectionMatrix& state);

// {w : |covariate^T w[2 block : 2 block + 2]| <= radius}. The normal lives on a
// single coordinate pair, which is the shape of every constraint SIONS uses.
struct Slab {
  int block = 0;
  Vector2 covariate = Vector2::Zero();
  double radius = 1.0;
};

using SlabSet = std::vector<Slab>;

// One slab per coordinate pair, all sharing the same covariate and radius.
SlabSet block_slabs(int d, const Vector2& covariate, double radius);

struct ProjectionOptions {
  double tol = 1e-10;
  int max_iterations = 10000;
};

struct ProjectionStats {
  int iterations = 0;
  double last_move = 0.0;
};

// Projection of u onto the intersection of slabs in the norm ||.||_A.
//
// A single slab has a closed form; several slabs are handled by Dykstra's
// alternating projections with the same closed form as the inner step. The
// loop stops once a full sweep moves the iterate by less than
// tol * max(1, ||x||_A) and every slab holds within tol. Throws
// ConvergenceError carrying the last iterate after max_iterations sweeps.
Vector mahalanobis_project(const Vector& u, const CorrectionMatrix& state, const SlabSet& slabs,
                           const ProjectionOptions& options = {},
                           ProjectionStats* stats = nullptr);

// Closed-form A-norm projection onto a single slab.
void project_onto_slab(Eigen::Ref<Vector> x, const Matrix& inverse, const Slab& slab);

}  // namespace dynreg
