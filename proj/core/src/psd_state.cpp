#include "dynreg/psd_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynreg {

CorrectionMatrix::CorrectionMatrix(int dim, double epsilon)
    : epsilon_(epsilon),
      matrix_(Matrix::Identity(dim, dim) * epsilon),
      inverse_(Matrix::Identity(dim, dim) / epsilon),
      work_(Vector::Zero(dim)) {
  if (dim <= 0) throw DomainError("correction matrix dimension must be positive");
  if (!(epsilon > 0.0)) throw DomainError("correction matrix epsilon must be positive");
}

void CorrectionMatrix::rank_one_update(const Eigen::Ref<const Vector>& g, double eta) {
  if (g.size() != matrix_.rows()) throw DomainError("rank-one update dimension mismatch");
  if (!g.allFinite() || !std::isfinite(eta)) {
    throw NumericError("rank-one update with non-finite gradient");
  }
  if (!(eta > 0.0)) throw DomainError("rank-one update needs eta > 0");

  const double norm_sq = g.squaredNorm();
  if (norm_sq == 0.0) return;

  matrix_.noalias() += eta * g * g.transpose();
  ++updates_since_refactor_;
  if (updates_since_refactor_ >= kRefactorInterval) {
    refactor();
    return;
  }
  // (A + eta g g^T)^-1 = A^-1 - eta A^-1 g g^T A^-1 / (1 + eta g^T A^-1 g)
  work_.noalias() = inverse_ * g;
  const double denom = 1.0 + eta * g.dot(work_);
  inverse_.noalias() -= (eta / denom) * work_ * work_.transpose();
}

void CorrectionMatrix::refactor() {
  Eigen::LLT<Matrix> llt(matrix_);
  if (llt.info() != Eigen::Success) {
    throw NumericError("correction matrix lost positive definiteness");
  }
  inverse_ = llt.solve(Matrix::Identity(matrix_.rows(), matrix_.cols()));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
  updates_since_refactor_ = 0;
}

double CorrectionMatrix::quadratic_norm(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != matrix_.rows()) throw DomainError("quadratic_norm dimension mismatch");
  return v.dot(matrix_ * v);
}

double quadratic_norm(const Eigen::Ref<const Vector>& v, const CorrectionMatrix& state) {
  return state.quadratic_norm(v);
}

SlabSet block_slabs(int d, const Vector2& covariate, double radius) {
  SlabSet slabs;
  slabs.reserve(d);
  for (int k = 0; k < d; ++k) slabs.push_back(Slab{k, covariate, radius});
  return slabs;
}

void project_onto_slab(Eigen::Ref<Vector> x, const Matrix& inverse, const Slab& slab) {
  const int i = 2 * slab.block;
  const double value = slab.covariate.dot(x.segment<2>(i));
  double excess = 0.0;
  if (value > slab.radius) {
    excess = value - slab.radius;
  } else if (value < -slab.radius) {
    excess = value + slab.radius;
  } else {
    return;
  }
  // A^-1 a with a supported on the block; a^T A^-1 a is the block quadratic form.
  const double curvature =
      slab.covariate.dot(inverse.block<2, 2>(i, i) * slab.covariate);
  x.noalias() -= (excess / curvature) * (inverse.middleCols<2>(i) * slab.covariate);
}

namespace {

void validate_slabs(const SlabSet& slabs, int dim) {
  for (const Slab& s : slabs) {
    if (s.block < 0 || 2 * s.block + 1 >= dim) throw DomainError("slab block out of range");
    if (s.covariate.squaredNorm() == 0.0) throw DomainError("slab normal must be nonzero");
    if (!(s.radius > 0.0)) throw DomainError("slab radius must be positive");
  }
}

double max_violation(const Vector& x, const SlabSet& slabs) {
  double worst = 0.0;
  for (const Slab& s : slabs) {
    const double value = std::abs(s.covariate.dot(x.segment<2>(2 * s.block)));
    worst = std::max(worst, value - s.radius);
  }
  return worst;
}

}  // namespace

Vector mahalanobis_project(const Vector& u, const CorrectionMatrix& state, const SlabSet& slabs,
                           const ProjectionOptions& options, ProjectionStats* stats) {
  if (u.size() != state.dim()) throw DomainError("projection dimension mismatch");
  if (!(options.tol > 0.0)) throw DomainError("projection tolerance must be positive");
  validate_slabs(slabs, state.dim());

  Vector x = u;
  if (stats) *stats = ProjectionStats{};
  if (max_violation(x, slabs) <= 0.0) return x;

  const Matrix& inverse = state.inverse();
  if (slabs.size() == 1) {
    project_onto_slab(x, inverse, slabs.front());
    if (stats) stats->iterations = 1;
    return x;
  }

  // Dykstra: one correction increment per slab.
  std::vector<Vector> increments(slabs.size(), Vector::Zero(x.size()));
  Vector previous(x.size());
  Vector shifted(x.size());
  double move = 0.0;
  for (int sweep = 1; sweep <= options.max_iterations; ++sweep) {
    previous = x;
    for (std::size_t k = 0; k < slabs.size(); ++k) {
      shifted = x + increments[k];
      x = shifted;
      project_onto_slab(x, inverse, slabs[k]);
      increments[k] = shifted - x;
    }
    const Vector delta = x - previous;
    move = std::sqrt(std::max(0.0, state.quadratic_norm(delta)));
    const double scale = std::max(1.0, std::sqrt(std::max(0.0, state.quadratic_norm(x))));
    if (stats) {
      stats->iterations = sweep;
      stats->last_move = move;
    }
    if (move <= options.tol * scale && max_violation(x, slabs) <= options.tol) return x;
  }
  std::ostringstream msg;
  msg << "Dykstra projection did not converge in " << options.max_iterations
      << " sweeps (last move " << move << ")";
  throw ConvergenceError(msg.str(), x, move);
}

}  // namespace dynreg
