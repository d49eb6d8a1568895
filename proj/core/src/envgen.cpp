#include "dynreg/envgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace dynreg {
namespace {

constexpr int kMaxAttempts = 64;

// Half the spread of s_t + slope * t after the best vertical shift.
double half_range(const Vector& s, double slope) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index t = 0; t < s.size(); ++t) {
    const double v = s[t] + slope * static_cast<double>(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.5 * (hi - lo);
}

// The spread is convex in the slope, so a ternary search finds the flattest tilt.
double flattest_slope(const Vector& s) {
  const double n = static_cast<double>(s.size());
  double scale = 0.0;
  for (Eigen::Index t = 1; t < s.size(); ++t) scale = std::max(scale, std::abs(s[t] - s[t - 1]));
  double lo = -scale - 1.0 / n;
  double hi = scale + 1.0 / n;
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (half_range(s, a) <= half_range(s, b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

Environment gen_piecewise_linear(const PiecewiseLinearSpec& spec) {
  if (spec.n < 3) throw DomainError("environment needs n >= 3");
  if (spec.d < 1) throw DomainError("environment dimension must be positive");
  if (spec.kinks < 0) throw DomainError("kink count must be nonnegative");
  if (!(spec.budget >= 0.0)) throw DomainError("budget must be nonnegative");
  if (!(spec.box > 0.0 && spec.box <= 1.0)) throw DomainError("box must lie in (0, 1]");
  if (!(spec.noise >= 0.0)) throw DomainError("noise level must be nonnegative");
  if (spec.kinks > spec.n - 2) throw DomainError("more kinks than interior time steps");
  if (spec.kinks == 0 && spec.budget > 0.0) {
    throw DomainError("a positive budget needs at least one kink");
  }

  const long n = spec.n;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> gamma1(1.0);

  Environment env;
  env.comparator.resize(n, spec.d);
  env.kink_times.assign(spec.d, {});
  double worst = 0.0;
  bool fitted = false;
  for (int attempt = 1; attempt <= kMaxAttempts && !fitted; ++attempt) {
    env.attempts = attempt;
    // Dirichlet(1, ..., 1) over all d * kinks slope changes.
    const int total_kinks = spec.kinks * spec.d;
    std::vector<double> weights(total_kinks);
    for (double& w : weights) w = gamma1(rng);
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);

    fitted = true;
    worst = 0.0;
    for (int k = 0; k < spec.d; ++k) {
      std::vector<long> times(static_cast<std::size_t>(n - 2));
      std::iota(times.begin(), times.end(), 2);
      std::shuffle(times.begin(), times.end(), rng);
      times.resize(spec.kinks);
      std::sort(times.begin(), times.end());

      // A kink at time tau changes the slope between tau and tau + 1, i.e. it
      // is the second difference centred on tau.
      Vector shape = Vector::Zero(n);
      double slope = 0.0;
      std::size_t next = 0;
      for (long t = 2; t <= n; ++t) {
        if (next < times.size() && times[next] == t - 1) {
          const double magnitude =
              spec.budget / static_cast<double>(n) * weights[k * spec.kinks + next] / weight_sum;
          slope += (unit(rng) < 0.5 ? -1.0 : 1.0) * magnitude;
          ++next;
        }
        shape[t - 1] = shape[t - 2] + slope;
      }
      const double tilt = flattest_slope(shape);
      const double radius = half_range(shape, tilt);
      worst = std::max(worst, radius);
      if (radius > spec.box) {
        fitted = false;
        break;
      }
      Vector w(n);
      for (long t = 0; t < n; ++t) w[t] = shape[t] + tilt * static_cast<double>(t);
      const double centre = 0.5 * (w.maxCoeff() + w.minCoeff());
      const double room = spec.box - radius;
      const double shift = -centre + room * (2.0 * unit(rng) - 1.0);
      w.array() += shift;
      env.comparator.col(k) = w.cwiseMax(-spec.box).cwiseMin(spec.box);
      env.kink_times[k] = times;
    }
  }
  if (!fitted) {
    std::ostringstream msg;
    msg << "budget " << spec.budget << " with " << spec.kinks << " kinks over n=" << n
        << " does not fit the box " << spec.box << " (smallest half-range seen " << worst
        << " after " << kMaxAttempts << " draws)";
    throw DomainError(msg.str());
  }

  std::uniform_real_distribution<double> noise(-spec.noise, spec.noise);
  env.targets.resize(n, spec.d);
  env.losses.reserve(n);
  for (long t = 0; t < n; ++t) {
    for (int k = 0; k < spec.d; ++k) {
      const double eps = spec.noise > 0.0 ? noise(rng) : 0.0;
      env.targets(t, k) = std::clamp(env.comparator(t, k) + eps, -spec.box, spec.box);
    }
    env.losses.push_back(make_scaled_squared_loss(env.targets.row(t).transpose()));
  }
  return env;
}

Normalization fit_normalization(const Matrix& values) {
  Normalization norm;
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    norm.min.push_back(values.col(k).minCoeff());
    norm.max.push_back(values.col(k).maxCoeff());
  }
  return norm;
}

Matrix normalize(const Matrix& values, const Normalization& norm) {
  Matrix out(values.rows(), values.cols());
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    const double span = norm.max[k] - norm.min[k];
    if (span > 0.0) {
      out.col(k) = (2.0 * (values.col(k).array() - norm.min[k]) / span - 1.0).matrix();
    } else {
      out.col(k).setZero();
    }
  }
  return out;
}

Matrix denormalize(const Matrix& values, const Normalization& norm) {
  Matrix out(values.rows(), values.cols());
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    const double span = norm.max[k] - norm.min[k];
    out.col(k) = ((values.col(k).array() + 1.0) * 0.5 * span + norm.min[k]).matrix();
  }
  return out;
}

Series ingest_csv(const std::filesystem::path& path, const CsvSelection& selection) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseError::Kind::kMissingFile, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(ParseError::Kind::kMalformed, path.string() + ": missing header row");
  }
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ParseError(ParseError::Kind::kUnknownColumn,
                       path.string() + ": no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  std::optional<std::size_t> ts_index;
  if (selection.timestamp_column) ts_index = find_column(*selection.timestamp_column);
  std::vector<std::size_t> picked;
  Series series;
  if (selection.columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (ts_index && *ts_index == i) continue;
      picked.push_back(i);
      series.columns.push_back(header[i]);
    }
  } else {
    for (const auto& name : selection.columns) {
      picked.push_back(find_column(name));
      series.columns.push_back(name);
    }
  }
  if (picked.empty()) {
    throw ParseError(ParseError::Kind::kEmptySelection, path.string() + ": no value columns selected");
  }

  std::vector<std::vector<double>> rows;
  long row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(ParseError::Kind::kMalformed,
                       path.string() + ": row " + std::to_string(row_number) + " has " +
                           std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(header.size()));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < picked.size(); ++c) {
      const std::string cell = trim(cells[picked[c]]);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw ParseError(ParseError::Kind::kNonNumeric,
                         path.string() + ": row " + std::to_string(row_number) + ", column '" +
                             series.columns[c] + "': '" + cell + "' is not a finite number");
      }
      row.push_back(value);
    }
    if (ts_index) series.timestamps.push_back(trim(cells[*ts_index]));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError(ParseError::Kind::kEmptySelection, path.string() + ": no data rows");
  }

  series.values.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(picked.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < picked.size(); ++c) series.values(r, c) = rows[r][c];
  }
  series.name = path.stem().string();
  series.source = path.string();
  if (selection.normalize) {
    series.normalization = fit_normalization(series.values);
    series.values = normalize(series.values, *series.normalization);
  }
  return series;
}

void write_environment_csv(std::ostream& out, const Environment& env) {
  const Eigen::Index d = env.comparator.cols();
  const auto old_precision = out.precision(17);
  out << 't';
  for (Eigen::Index k = 1; k <= d; ++k) out << ",w_" << k;
  for (Eigen::Index k = 1; k <= d; ++k) out << ",y_" << k;
  out << '\n';
  for (Eigen::Index t = 0; t < env.comparator.rows(); ++t) {
    out << t + 1;
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << env.comparator(t, k);
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << env.targets(t, k);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace dynreg
