#include "go4align/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "go4align/error.hpp"

namespace go4align {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty()) {
    throw Error(ErrorCode::kIo,
                fmt::format("fixture line {}: '{}' is not a number", line_no, cell));
  }
  return v;
}

}  // namespace

std::size_t MetricTable::index_of(const std::string& method) const {
  const auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end()) {
    throw Error(ErrorCode::kInvalidInput, fmt::format("unknown method '{}'", method));
  }
  return static_cast<std::size_t>(it - methods.begin());
}

void MetricTable::validate() const {
  if (metrics.empty() || higher_better.size() != metrics.size() ||
      baseline.size() != metrics.size()) {
    throw Error(ErrorCode::kInvalidInput, "metric table: inconsistent columns");
  }
  for (const Vector& row : values) {
    if (row.size() != metrics.size()) {
      throw Error(ErrorCode::kInvalidInput, "metric table: ragged row");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidInput, "metric table: non-finite cell");
      }
    }
  }
}

MetricTable parse_metric_table(const std::string& csv) {
  std::stringstream in(csv);
  std::string line;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    rows.emplace_back(line_no, split_csv(line));
  }
  if (rows.size() < 3) {
    throw Error(ErrorCode::kIo, "fixture needs a header, a direction row and a baseline");
  }

  const auto& header = rows[0].second;
  std::size_t metric_cols = header.size() - 1;
  bool has_mr = false, has_delta = false;
  if (header.size() >= 3 && header[header.size() - 1] == "delta_m" &&
      header[header.size() - 2] == "MR") {
    has_mr = has_delta = true;
    metric_cols -= 2;
  }

  MetricTable table;
  table.metrics.assign(header.begin() + 1, header.begin() + 1 + static_cast<long>(metric_cols));

  const auto& dir = rows[1].second;
  if (dir.empty() || dir[0] != "direction" || dir.size() < metric_cols + 1) {
    throw Error(ErrorCode::kIo, "fixture second row must be 'direction,...'");
  }
  for (std::size_t s = 0; s < metric_cols; ++s) {
    if (dir[1 + s] != "0" && dir[1 + s] != "1") {
      throw Error(ErrorCode::kIo, fmt::format("direction for '{}' must be 0 or 1",
                                              table.metrics[s]));
    }
    table.higher_better.push_back(dir[1 + s] == "1");
  }

  for (std::size_t r = 2; r < rows.size(); ++r) {
    const auto& [no, cells] = rows[r];
    if (cells.size() < metric_cols + 1) {
      throw Error(ErrorCode::kIo, fmt::format("fixture line {}: too few cells", no));
    }
    Vector values;
    for (std::size_t s = 0; s < metric_cols; ++s) {
      values.push_back(parse_number(cells[1 + s], no));
    }
    auto optional_cell = [&, &cells = cells, no = no](std::size_t idx) -> std::optional<double> {
      if (idx >= cells.size() || cells[idx].empty()) return std::nullopt;
      return parse_number(cells[idx], no);
    };
    if (r == 2) {
      table.baseline_name = cells[0];
      table.baseline = std::move(values);
      continue;
    }
    table.methods.push_back(cells[0]);
    table.values.push_back(std::move(values));
    table.published_mr.push_back(has_mr ? optional_cell(1 + metric_cols) : std::nullopt);
    table.published_delta_m.push_back(has_delta ? optional_cell(2 + metric_cols)
                                                : std::nullopt);
  }
  table.validate();
  return table;
}

MetricTable load_metric_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open fixture {}", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_metric_table(buffer.str());
}

double delta_m(std::span<const double> method, std::span<const double> baseline,
               const Directions& higher_better) {
  if (method.size() != baseline.size() || method.size() != higher_better.size() ||
      method.empty()) {
    throw Error(ErrorCode::kDimension, "delta_m: length mismatch");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < method.size(); ++s) {
    if (baseline[s] == 0.0) {
      throw Error(ErrorCode::kDivision,
                  fmt::format("delta_m: baseline metric {} is zero", s));
    }
    const double rel = (method[s] - baseline[s]) / baseline[s];
    total += higher_better[s] ? -rel : rel;
  }
  return 100.0 * total / static_cast<double>(method.size());
}

Vector mean_ranks(const MetricTable& table) {
  if (table.methods.empty() || table.metrics.empty()) {
    throw Error(ErrorCode::kInvalidInput, "mean_rank: empty table");
  }
  table.validate();
  const std::size_t n = table.methods.size();
  Vector total(n, 0.0);
  std::vector<std::size_t> order(n);
  for (std::size_t s = 0; s < table.metrics.size(); ++s) {
    // Ordering key where smaller is better.
    auto key = [&](std::size_t i) {
      return table.higher_better[s] ? -table.values[i][s] : table.values[i][s];
    };
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    for (std::size_t lo = 0; lo < n;) {
      std::size_t hi = lo + 1;
      while (hi < n && key(order[hi]) == key(order[lo])) ++hi;
      // Positions lo..hi-1 share rank mean(lo+1 .. hi).
      const double rank = (static_cast<double>(lo + 1) + static_cast<double>(hi)) / 2.0;
      for (std::size_t p = lo; p < hi; ++p) total[order[p]] += rank;
      lo = hi;
    }
  }
  for (double& v : total) v /= static_cast<double>(table.metrics.size());
  return total;
}

double mean_rank(const MetricTable& table, const std::string& method) {
  const std::size_t idx = table.index_of(method);
  return mean_ranks(table)[idx];
}

double convergence_difference(std::span<const double> epochs) {
  if (epochs.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "convergence_difference needs >= 2 tasks");
  }
  const double n = static_cast<double>(epochs.size());
  const double mu = std::accumulate(epochs.begin(), epochs.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : epochs) ss += (e - mu) * (e - mu);
  return std::sqrt(ss / n);
}

double convergence_difference(std::span<const std::size_t> epochs) {
  Vector as_real(epochs.begin(), epochs.end());
  return convergence_difference(std::span<const double>(as_real));
}

RiskRatios risk_ratios(const Trajectory& trajectory) {
  if (trajectory.iterations.empty()) {
    throw Error(ErrorCode::kInvalidInput, "risk_ratios: empty trajectory");
  }
  auto normalize = [](std::vector<Vector> rows) {
    for (Vector& row : rows) {
      const double total = std::accumulate(row.begin(), row.end(), 0.0);
      for (double& v : row) v /= total;
    }
    return rows;
  };
  return RiskRatios{normalize(trajectory.epoch_risks()),
                    normalize(trajectory.epoch_scaled())};
}

std::size_t elbow_select(const std::map<std::size_t, double>& scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidInput, "elbow_select: no scores");
  }
  std::vector<std::size_t> ks;
  Vector s;
  for (const auto& [k, v] : scores) {
    ks.push_back(k);
    s.push_back(v);
  }
  const double lo = *std::min_element(s.begin(), s.end());
  if (ks.size() < 3) {
    // First minimum, i.e. the smallest k on ties.
    return ks[static_cast<std::size_t>(std::min_element(s.begin(), s.end()) - s.begin())];
  }
  std::size_t best = 0;
  double best_curv = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double curv = s[i - 1] - 2.0 * s[i] + s[i + 1];
    if (curv > best_curv) {
      best_curv = curv;
      best = i;
    }
  }
  if (best_curv > 0.0) return ks[best];
  const double hi = *std::max_element(s.begin(), s.end());
  const double tol = kElbowTolerance * (hi - lo);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] <= lo + tol) return ks[i];
  }
  return ks.front();
}

}  // namespace go4align
