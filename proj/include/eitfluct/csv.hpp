#pragma once
// CSV tables with lossless floats, and the column-wise diff

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "medium.hpp"

namespace eitfluct {

inline constexpr const char* version = "0.1.0";

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
};

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0 ? 0.0 : x);  // no "-0"
  return buf;
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (size_t i = 0; i < t.cols.size(); ++i) os << (i ? "," : "") << t.cols[i];
  os << "\n";
  for (auto& r : t.rows) {
    if (r.size() != t.cols.size()) throw numeric_error("internal: row width does not match header");
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt17(r[i]);
    os << "\n";
  }
}

inline void write_csv(const std::string& path, const Table& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw param_error("cannot write " + path);
  write_csv(os, t);
  if (!os) throw param_error("write failed: " + path);
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw param_error("cannot open " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw param_error(path + ": empty file");
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) t.cols.push_back(detail::trim(c));
  }
  int ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (detail::trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string c;
    std::vector<double> r;
    while (std::getline(ss, c, ',')) {
      c = detail::trim(c);
      try {
        size_t pos = 0;
        r.push_back(std::stod(c, &pos));
        if (pos != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw param_error(path + ":" + std::to_string(ln) + ": not a number: '" + c + "'");
      }
    }
    if (r.size() != t.cols.size()) throw param_error(path + ":" + std::to_string(ln) + ": wrong number of fields");
    t.rows.push_back(std::move(r));
  }
  return t;
}

struct ColumnDiff {
  std::string name;
  double max_abs = 0, max_rel = 0;
  bool ok = true;
};

// a cell agrees when |a-b| <= tol * max(1, |a|, |b|); nan matches nan only
inline std::vector<ColumnDiff> diff_tables(const Table& a, const Table& b, double tol) {
  if (a.cols != b.cols) throw param_error("schema mismatch: column headers differ");
  if (a.rows.size() != b.rows.size()) throw param_error("schema mismatch: row counts differ");
  std::vector<ColumnDiff> out(a.cols.size());
  for (size_t c = 0; c < a.cols.size(); ++c) out[c].name = a.cols[c];
  for (size_t r = 0; r < a.rows.size(); ++r)
    for (size_t c = 0; c < a.cols.size(); ++c) {
      double x = a.rows[r][c], y = b.rows[r][c];
      auto& d = out[c];
      if (std::isnan(x) || std::isnan(y)) {
        if (std::isnan(x) != std::isnan(y)) d.ok = false, d.max_abs = d.max_rel = INFINITY;
        continue;
      }
      if (x == y) continue;  // also equal infinities
      double e = std::abs(x - y), s = std::max(std::abs(x), std::abs(y));
      if (!std::isfinite(e)) e = INFINITY;
      d.max_abs = std::max(d.max_abs, e);
      d.max_rel = std::max(d.max_rel, s > 0 ? e / s : 0.0);
      if (!(e <= tol * std::max(1.0, s))) d.ok = false;
    }
  return out;
}

}  // namespace eitfluct
