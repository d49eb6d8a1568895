#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynreg/losses.hpp"

namespace dynreg {

struct PiecewiseLinearSpec {
  long n = 256;
  int d = 1;
  int kinks = 4;        // slope changes per coordinate
  double budget = 1.0;  // n ||D^2 w||_1, summed over coordinates
  double box = 1.0;
  double noise = 0.05;  // targets are w + uniform[-noise, noise], clipped to the box
  std::uint64_t seed = 1;
};

struct Environment {
  Matrix comparator;  // n x d
  Matrix targets;     // n x d
  std::vector<LossOracle> losses;
  std::vector<std::vector<long>> kink_times;  // per coordinate, 1-based, sorted
  int attempts = 1;  // draws needed before the shape fit in the box
};

// Kinks are drawn uniformly without replacement from {2, ..., n - 1}; slope
// change magnitudes are a symmetric Dirichlet split of budget / n with random
// signs. A linear trend (which leaves D^2 unchanged) is added to centre the
// shape; draws that cannot fit the box are retried, and after 64 failures the
// spec is rejected with a DomainError.
Environment gen_piecewise_linear(const PiecewiseLinearSpec& spec);

// CSV reading failures. Each failure mode has its own kind.
class ParseError : public DomainError {
 public:
  enum class Kind { kMissingFile, kMalformed, kUnknownColumn, kNonNumeric, kEmptySelection };

  ParseError(Kind kind, const std::string& what) : DomainError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Affine map v -> 2 (v - min) / (max - min) - 1 per column.
struct Normalization {
  std::vector<double> min;
  std::vector<double> max;
};

struct Series {
  Matrix values;  // rows index time
  std::vector<std::string> columns;
  std::string name;
  std::string source;
  std::vector<std::string> timestamps;  // empty unless a timestamp column was named
  std::optional<Normalization> normalization;
};

struct CsvSelection {
  std::vector<std::string> columns;  // empty: every column except the timestamp
  std::optional<std::string> timestamp_column;
  bool normalize = true;
};

Series ingest_csv(const std::filesystem::path& path, const CsvSelection& selection = {});

Normalization fit_normalization(const Matrix& values);
Matrix normalize(const Matrix& values, const Normalization& norm);
Matrix denormalize(const Matrix& values, const Normalization& norm);

// t, w_1..w_d, y_1..y_d with 1-based t.
void write_environment_csv(std::ostream& out, const Environment& env);

}  // namespace dynreg
