#include "dynreg/partition.hpp"

#include <cmath>
#include <ostream>

namespace dynreg {
namespace {

constexpr double kSlopeTol = 1e-12;
constexpr double kTouchTol = 1e-9;

double second_difference_abs(const Matrix& u, long j) {
  // j is the 0-based index of the first of three consecutive rows.
  return (u.row(j) - 2.0 * u.row(j + 1) + u.row(j + 2)).cwiseAbs().sum();
}

Bin make_bin(const Matrix& u, long start, long end) {
  return Bin{start, end, end - start + 1, bin_tv(u, start, end)};
}

void check_bin(const Matrix& u, const Bin& bin) {
  if (bin.start < 1 || bin.end < bin.start || bin.end > u.rows()) {
    throw DomainError("bin lies outside the sequence");
  }
}

}  // namespace

double bin_tv(const Matrix& u, long start, long end) {
  double total = 0.0;
  for (long j = start - 1; j + 2 <= end - 1; ++j) total += second_difference_abs(u, j);
  return total;
}

PartitionReport greedy_partition(const Matrix& u) {
  const long n = u.rows();
  if (n < 3) throw DomainError("partition needs n >= 3");
  PartitionReport report;
  long start = 1;
  while (start <= n) {
    long end = start;
    double tv = 0.0;
    while (end < n) {
      const long length = end + 1 - start + 1;
      double extended = tv;
      if (length >= 3) extended += second_difference_abs(u, end - 2);
      if (extended > std::pow(static_cast<double>(length), -1.5)) break;
      tv = extended;
      ++end;
    }
    report.bins.push_back(Bin{start, end, end - start + 1, tv});
    start = end + 1;
  }
  report.count = static_cast<long>(report.bins.size());
  report.bound = bin_count_bound(n, bin_tv(u, 1, n));
  return report;
}

double bin_count_bound(long n, double tv1_total) {
  if (n < 1) throw DomainError("horizon must be positive");
  if (tv1_total < 0.0) throw DomainError("total variation must be nonnegative");
  return std::pow(std::pow(static_cast<double>(n), 1.5) * tv1_total, 0.4) + 1.0;
}

PartitionReport refine_boundary_touches(const PartitionReport& partition, const Matrix& u,
                                        const Matrix& gamma_minus, const Matrix& gamma_plus) {
  const long n = u.rows();
  const Eigen::Index d = u.cols();
  if (gamma_minus.rows() != n || gamma_plus.rows() != n || gamma_minus.cols() != d ||
      gamma_plus.cols() != d) {
    throw DomainError("dual sequences do not align with u");
  }
  auto touch = [&](long t, Eigen::Index k) -> int {
    const long r = t - 1;
    if (std::abs(u(r, k) - 1.0) <= kTouchTol || gamma_plus(r, k) > 0.0) return 1;
    if (std::abs(u(r, k) + 1.0) <= kTouchTol || gamma_minus(r, k) > 0.0) return -1;
    return 0;
  };

  PartitionReport out;
  out.bound = partition.bound;
  std::vector<int> seen(static_cast<std::size_t>(d));
  for (const Bin& bin : partition.bins) {
    long piece_start = bin.start;
    std::fill(seen.begin(), seen.end(), 0);
    for (long t = bin.start; t <= bin.end; ++t) {
      bool cut = false;
      for (Eigen::Index k = 0; k < d; ++k) {
        const int side = touch(t, k);
        if (side != 0 && seen[k] == -side) cut = true;
      }
      if (cut) {
        out.bins.push_back(make_bin(u, piece_start, t - 1));
        out.refinement_splits.push_back(t);
        piece_start = t;
        std::fill(seen.begin(), seen.end(), 0);
      }
      for (Eigen::Index k = 0; k < d; ++k) {
        const int side = touch(t, k);
        if (side != 0) seen[k] = side;
      }
    }
    out.bins.push_back(make_bin(u, piece_start, bin.end));
  }
  out.count = static_cast<long>(out.bins.size());
  return out;
}

MonotonicSplit split_monotonic(const Matrix& u, const Bin& bin, int coordinate) {
  check_bin(u, bin);
  if (coordinate < 0 || coordinate >= u.cols()) throw DomainError("coordinate out of range");
  MonotonicSplit out;
  // delta[i] is the slope change at 1-based time start + i + 1.
  std::vector<double> delta;
  for (long t = bin.start; t + 2 <= bin.end; ++t) {
    const long r = t - 1;
    delta.push_back(u(r + 2, coordinate) - 2.0 * u(r + 1, coordinate) + u(r, coordinate));
  }
  long first = -1;
  long last = -1;
  bool up = false;
  bool down = false;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i] > kSlopeTol) up = true;
    if (delta[i] < -kSlopeTol) down = true;
    if (std::abs(delta[i]) > kSlopeTol) {
      if (first < 0) first = static_cast<long>(i);
      last = static_cast<long>(i);
    }
  }
  if (first < 0) {
    out.shape = SlopeShape::kConstant;
    out.indices = {bin.start, bin.end};
    return out;
  }
  if (up && down) {
    out.shape = SlopeShape::kNonMonotonic;
    return out;
  }
  out.shape = up ? SlopeShape::kConvex : SlopeShape::kConcave;
  // Slope changes occupy times first + 1 .. last + 1 relative to the start,
  // so [start, b] and [c + 1, end] are straight.
  const long b = bin.start + first;
  const long c = bin.start + last + 1;
  out.indices = {bin.start, b, b + 1, c, c + 1, bin.end};
  return out;
}

ResidualFit linear_fit_residuals(const Matrix& u, const Bin& bin, int coordinate) {
  check_bin(u, bin);
  if (coordinate < 0 || coordinate >= u.cols()) throw DomainError("coordinate out of range");
  const long len = bin.end - bin.start + 1;
  if (len < 2) throw DomainError("a linear fit needs at least two points");
  Eigen::Matrix<double, Eigen::Dynamic, 2> X(len, 2);
  Vector target(len);
  for (long i = 0; i < len; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = static_cast<double>(i + 1);
    target[i] = u(bin.start - 1 + i, coordinate);
  }
  ResidualFit fit;
  const Eigen::Matrix2d gram = X.transpose() * X;
  fit.beta = gram.ldlt().solve(X.transpose() * target);
  fit.residuals = X * fit.beta - target;
  fit.slopes.resize(len);
  for (long i = 0; i + 1 < len; ++i) fit.slopes[i] = fit.residuals[i + 1] - fit.residuals[i];
  fit.slopes[len - 1] = fit.slopes[len - 2];
  fit.intercepts.resize(len);
  for (long i = 0; i < len; ++i) fit.intercepts[i] = fit.residuals[i] - (i + 1) * fit.slopes[i];
  return fit;
}

void write_partition_csv(std::ostream& out, const PartitionReport& report) {
  const auto old_precision = out.precision(17);
  out << "start,end,length,tv1\n";
  for (const Bin& b : report.bins) {
    out << b.start << ',' << b.end << ',' << b.length << ',' << b.tv1 << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dynreg
