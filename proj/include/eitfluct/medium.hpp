#pragma once
// physical parameters, input noise and the parameter file reader

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eitfluct {

// bad user input (exit code 1 in the cli)
struct param_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// numerical failure: poles, singular systems, broken invariants (exit 2)
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct singularity_error : numeric_error {
  using numeric_error::numeric_error;
};
// formula asked for outside the regime it was derived in
struct regime_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double pi = 3.14159265358979323846;

struct MediumParams {
  double gamma1 = 0.5, gamma2 = 0.5;  // partial decay rates into |1>, |2>
  double gamma12 = 0.0;               // ground-state decoherence
  double g1 = 0.1, g2 = 0.1;          // dipole couplings
  double N = 1e12;                    // atom number
  double L = 1.0;                     // medium length
  double c = 1.0;                     // only enters through C

  double gamma() const { return gamma1 + gamma2; }

  void validate() const {
    if (!(gamma1 >= 0) || !(gamma2 >= 0) || !(gamma12 >= 0))
      throw param_error("rates must be >= 0 (gamma1, gamma2, gamma12)");
    if (!(N >= 1)) throw param_error("N must be >= 1");
    if (!(L > 0)) throw param_error("L must be > 0");
    if (!(c > 0)) throw param_error("c must be > 0");
    if (!std::isfinite(g1) || !std::isfinite(g2)) throw param_error("g1, g2 must be finite");
  }
};

struct FieldConfig {
  double delta1 = 0, delta2 = 0;  // carrier detunings
  double alpha1 = 10, alpha2 = 10;

  double omega1(const MediumParams& m) const { return std::abs(m.g1 * alpha1); }
  double omega2(const MediumParams& m) const { return std::abs(m.g2 * alpha2); }
  double omega_sq(const MediumParams& m) const {
    double a = omega1(m), b = omega2(m);
    return a * a + b * b;
  }
  double omega(const MediumParams& m) const { return std::sqrt(omega_sq(m)); }
  bool two_photon_resonant() const { return delta1 == delta2; }
};

// C = N (g1^2 Om2^2 + g2^2 Om1^2) / (Om^2 c)
inline double coupling_constant(const MediumParams& m, const FieldConfig& f) {
  double o1 = f.omega1(m), o2 = f.omega2(m), o = o1 * o1 + o2 * o2;
  if (!(o > 0)) throw param_error("no driving field (Omega = 0)");
  return m.N * (m.g1 * m.g1 * o2 * o2 + m.g2 * m.g2 * o1 * o1) / (o * m.c);
}

struct FG {
  double f = 0, g = 0;
};

inline FG squeezed_preset(double xi) {
  double s = std::sinh(xi);
  return {s * s, -0.5 * std::sinh(2 * xi)};
}

// per-field even spectra f(w), g(w)
class NoiseSpec {
 public:
  enum class Kind { coherent, squeezed, table };

  static NoiseSpec coherent() { return NoiseSpec(); }
  static NoiseSpec squeezed(double xi) {
    NoiseSpec n;
    n.kind_ = Kind::squeezed;
    n.xi_ = xi;
    return n;
  }
  // rows (w, f, g); linear interpolation, clamped at the ends, symmetrized in w
  // (tables on w >= 0 are read at |w|)
  static NoiseSpec table(std::vector<double> w, std::vector<double> f, std::vector<double> g) {
    if (w.empty() || w.size() != f.size() || w.size() != g.size())
      throw param_error("noise table needs equal, non-empty omega/f/g columns");
    std::vector<size_t> idx(w.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return w[a] < w[b]; });
    NoiseSpec n;
    n.kind_ = Kind::table;
    for (size_t i : idx) {
      if (!n.w_.empty() && w[i] == n.w_.back()) throw param_error("noise table has repeated omega");
      n.w_.push_back(w[i]);
      n.f_.push_back(f[i]);
      n.g_.push_back(g[i]);
    }
    return n;
  }
  static NoiseSpec load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw param_error("cannot open noise table " + path);
    std::vector<double> w, f, g;
    std::string line;
    while (std::getline(in, line)) {
      auto h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      double a, b, c;
      if (!(ss >> a)) continue;  // blank or header
      if (!(ss >> b >> c)) throw param_error("noise table " + path + ": expected omega,f,g rows");
      w.push_back(a);
      f.push_back(b);
      g.push_back(c);
    }
    auto n = table(w, f, g);
    n.source_ = path;
    return n;
  }

  Kind kind() const { return kind_; }
  double xi() const { return xi_; }
  const std::string& source() const { return source_; }

  FG at(double w) const {
    switch (kind_) {
      case Kind::coherent: return {};
      case Kind::squeezed: return squeezed_preset(xi_);
      case Kind::table: {
        if (w_.front() >= 0) return interp(std::abs(w));  // half-line table: even extension
        FG a = interp(w), b = interp(-w);
        return {0.5 * (a.f + b.f), 0.5 * (a.g + b.g)};
      }
    }
    return {};
  }
  bool is_coherent() const {
    if (kind_ == Kind::coherent) return true;
    if (kind_ == Kind::squeezed) return xi_ == 0;
    for (size_t i = 0; i < w_.size(); ++i)
      if (f_[i] != 0 || g_[i] != 0) return false;
    return true;
  }
  std::string describe() const {
    switch (kind_) {
      case Kind::coherent: return "coherent";
      case Kind::squeezed: {
        std::ostringstream s;
        s.precision(17);
        s << "squeezed(xi=" << xi_ << ")";
        return s.str();
      }
      case Kind::table: return "table(" + source_ + ")";
    }
    return "";
  }
  // physicality: min over theta of 1 + 2g cos2th + 2f = 1 + 2f - 2|g| >= 0
  void check_physical(double w) const {
    FG v = at(w);
    if (1 + 2 * v.f - 2 * std::abs(v.g) < -1e-12)
      throw param_error("input noise unphysical: 1 + 2f - 2|g| < 0 at omega=" + std::to_string(w));
  }
  void check_physical() const {
    if (kind_ != Kind::table) return check_physical(0.0);
    for (double w : w_) check_physical(w);
  }

 private:
  FG interp(double w) const {
    if (w <= w_.front()) return {f_.front(), g_.front()};
    if (w >= w_.back()) return {f_.back(), g_.back()};
    size_t k = std::upper_bound(w_.begin(), w_.end(), w) - w_.begin();
    double t = (w - w_[k - 1]) / (w_[k] - w_[k - 1]);
    return {f_[k - 1] + t * (f_[k] - f_[k - 1]), g_[k - 1] + t * (g_[k] - g_[k - 1])};
  }

  Kind kind_ = Kind::coherent;
  double xi_ = 0;
  std::vector<double> w_, f_, g_;
  std::string source_;
};

struct InputNoise {
  NoiseSpec n1, n2;
  const NoiseSpec& field(int j) const { return j == 1 ? n1 : n2; }
};

// initial quadrature spectrum 1 + 2g cos2th + 2f
inline double input_spectrum(const NoiseSpec& n, double w, double th) {
  FG v = n.at(w);
  return 1 + 2 * v.g * std::cos(2 * th) + 2 * v.f;
}

struct Params {
  MediumParams medium;
  FieldConfig field;
  InputNoise noise;
  std::map<std::string, std::string> raw;  // as read, for the manifest
};

namespace detail {
inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}
inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw param_error("key '" + key + "': not a finite number: '" + v + "'");
  }
}
}  // namespace detail

// flat "key = value" text, '#' comments; unknown keys are errors
inline Params parse_params(std::istream& in, const std::string& base_dir = ".") {
  static const char* keys[] = {"gamma1", "gamma2", "gamma12", "g1",     "g2",     "N",     "L",     "c",
                               "delta1", "delta2", "alpha1",  "alpha2", "noise1", "noise2", "xi1", "xi2"};
  Params p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw param_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string k = detail::trim(line.substr(0, eq)), v = detail::trim(line.substr(eq + 1));
    if (std::find(std::begin(keys), std::end(keys), k) == std::end(keys))
      throw param_error("unknown key '" + k + "' (line " + std::to_string(lineno) + ")");
    if (p.raw.count(k)) throw param_error("duplicate key '" + k + "'");
    if (v.empty()) throw param_error("key '" + k + "' has no value");
    p.raw[k] = v;
  }
  auto num = [&](const char* k, double& dst) {
    auto it = p.raw.find(k);
    if (it != p.raw.end()) dst = detail::to_double(k, it->second);
  };
  num("gamma1", p.medium.gamma1);
  num("gamma2", p.medium.gamma2);
  num("gamma12", p.medium.gamma12);
  num("g1", p.medium.g1);
  num("g2", p.medium.g2);
  num("N", p.medium.N);
  num("L", p.medium.L);
  num("c", p.medium.c);
  num("delta1", p.field.delta1);
  num("delta2", p.field.delta2);
  num("alpha1", p.field.alpha1);
  num("alpha2", p.field.alpha2);
  double xi[2] = {0, 0};
  num("xi1", xi[0]);
  num("xi2", xi[1]);
  NoiseSpec* dst[2] = {&p.noise.n1, &p.noise.n2};
  for (int j = 0; j < 2; ++j) {
    std::string k = j == 0 ? "noise1" : "noise2";
    std::string kind = p.raw.count(k) ? p.raw[k] : (xi[j] != 0 ? "squeezed" : "coherent");
    if (kind == "coherent") {
      if (xi[j] != 0) throw param_error("key '" + std::string(j ? "xi2" : "xi1") + "' set but " + k + " = coherent");
      *dst[j] = NoiseSpec::coherent();
    } else if (kind == "squeezed") {
      *dst[j] = NoiseSpec::squeezed(xi[j]);
    } else if (kind.rfind("table:", 0) == 0) {
      std::string path = detail::trim(kind.substr(6));
      if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
      *dst[j] = NoiseSpec::load_table(path);
    } else {
      throw param_error("key '" + k + "': expected coherent, squeezed or table:<file>, got '" + kind + "'");
    }
  }
  p.medium.validate();
  p.noise.n1.check_physical();
  p.noise.n2.check_physical();
  return p;
}

inline Params load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw param_error("cannot open parameter file " + path);
  auto slash = path.find_last_of('/');
  return parse_params(in, slash == std::string::npos ? "." : path.substr(0, slash));
}

}  // namespace eitfluct
