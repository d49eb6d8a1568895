#pragma once

#include <iosfwd>
#include <vector>

#include "dynreg/types.hpp"

namespace dynreg {

// Inclusive 1-based index range [start, end] of a sequence.
struct Bin {
  long start = 1;
  long end = 1;
  long length = 1;
  double tv1 = 0.0;  // ||D^2 u||_1 over second differences inside the bin
};

struct PartitionReport {
  std::vector<Bin> bins;
  long count = 0;
  double bound = 0.0;                  // bin_count_bound(n, ||D^2 u||_1)
  std::vector<long> refinement_splits;  // start indices of bins added by refinement
};

// ||D^2 u_{start:end}||_1 summed over coordinates; rows of u index time.
double bin_tv(const Matrix& u, long start, long end);

// Left-to-right maximal bins with tv1 <= length^{-3/2}. Requires n >= 3.
PartitionReport greedy_partition(const Matrix& u);

// (n^{3/2} tv1_total)^{2/5} + 1.
double bin_count_bound(long n, double tv1_total);

// A point touches +1 when |u - 1| <= 1e-9 or gamma_plus > 0 (likewise for -1).
// Each bin is cut at every time step where some coordinate touches the bound
// opposite to one it already touched inside the current piece.
PartitionReport refine_boundary_touches(const PartitionReport& partition, const Matrix& u,
                                        const Matrix& gamma_minus, const Matrix& gamma_plus);

enum class SlopeShape { kConstant, kConvex, kConcave, kNonMonotonic };

struct MonotonicSplit {
  SlopeShape shape = SlopeShape::kConstant;
  // {start, end} for constant slopes; {start, b, b + 1, c, c + 1, end} when the
  // slopes are monotone, with [start, b] and [c + 1, end] of constant slope.
  // Empty when non-monotonic.
  std::vector<long> indices;
};

// Classifies slopes u_{j+1}[k] - u_j[k] inside the bin with tolerance 1e-12.
MonotonicSplit split_monotonic(const Matrix& u, const Bin& bin, int coordinate);

struct ResidualFit {
  Vector2 beta;      // intercept, slope under covariates [1, t - a + 1]
  Vector residuals;  // r_t = beta' x_t - u_t
  Vector slopes;     // M_t = r_{t+1} - r_t, with M_b = M_{b-1}
  Vector intercepts; // C_t = r_t - (t - a + 1) M_t
};

// Least-squares line through one coordinate of u over the bin. Requires length >= 2.
ResidualFit linear_fit_residuals(const Matrix& u, const Bin& bin, int coordinate = 0);

// start,end,length,tv1 rows under a header.
void write_partition_csv(std::ostream& out, const PartitionReport& report);

}  // namespace dynreg
