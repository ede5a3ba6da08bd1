#pragma once
// Gaussian average over two-photon detuning classes (co-propagating beams)

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "langevin.hpp"
#include "parallel.hpp"

namespace eitfluct {

struct DopplerConfig {
  double width = 0;                // Gaussian width of the detuning distribution
  int nodes = 32;                  // Gauss-Hermite order
  double truncation = 5;           // keep nodes within +-truncation * sigma
  bool width_is_variance = false;  // treat width as the variance instead of the std dev
  bool frame_shift = true;         // w measured from the atomic transition: class delta sees w - delta
  enum class Rule { gauss_hermite, uniform } rule = Rule::gauss_hermite;  // uniform: trapezoid on the truncated range

  double sigma() const { return width_is_variance ? std::sqrt(width) : width; }
  void validate() const {
    if (!(width >= 0) || !std::isfinite(width)) throw param_error("doppler width must be >= 0");
    if (nodes < 1) throw param_error("doppler nodes must be >= 1");
    if (!(truncation > 0)) throw param_error("doppler truncation must be > 0");
  }
};

struct Rule {
  std::vector<double> x, w;
};

// Golub-Welsch, weight exp(-x^2)
inline Rule gauss_hermite(int n) {
  Rule r;
  if (n == 1) {
    r.x = {0.0};
    r.w = {std::sqrt(pi)};
    return r;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  for (int k = 0; k < n; ++k) {
    double v = es.eigenvectors()(0, k);
    r.x.push_back(es.eigenvalues()(k));
    r.w.push_back(std::sqrt(pi) * v * v);
  }
  return r;
}

// detuning nodes and probability weights (sum to 1)
inline Rule detuning_nodes(const DopplerConfig& d) {
  d.validate();
  double s = d.sigma();
  if (s == 0) return {{0.0}, {1.0}};
  Rule r;
  if (d.rule == DopplerConfig::Rule::uniform) {
    // strongly oscillating integrands at long z need many equispaced nodes
    int n = std::max(d.nodes, 2);
    double a = d.truncation * s, tot = 0;
    for (int k = 0; k < n; ++k) {
      double x = -a + 2 * a * k / (n - 1);
      double w = std::exp(-0.5 * x * x / (s * s)) * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
      r.x.push_back(x);
      r.w.push_back(w);
      tot += w;
    }
    for (auto& w : r.w) w /= tot;
    return r;
  }
  Rule g = gauss_hermite(d.nodes);
  double tot = 0;
  for (size_t k = 0; k < g.x.size(); ++k) {
    double x = std::sqrt(2.0) * s * g.x[k];
    if (std::abs(x) > d.truncation * s) continue;
    r.x.push_back(x);
    r.w.push_back(g.w[k] / std::sqrt(pi));
    tot += r.w.back();
  }
  if (r.x.empty()) throw numeric_error("doppler truncation removed every node");
  for (auto& w : r.w) w /= tot;
  return r;
}

// one propagator per velocity class
struct ClassSet {
  Rule rule;
  std::vector<Propagator> prop;
};

inline ClassSet build_classes(double w, const MediumParams& m, const FieldConfig& f, const DopplerConfig& d) {
  ClassSet cs;
  cs.rule = detuning_nodes(d);
  cs.prop.resize(cs.rule.x.size());
  parallel_for(cs.rule.x.size(), [&](size_t k) {
    double dk = cs.rule.x[k];
    FieldConfig fk = f;
    fk.delta1 += dk;
    fk.delta2 += dk;
    cs.prop[k] = Propagator(build_model(m, fk), d.frame_shift ? w - dk : w);
  });
  return cs;
}

// averaged quadrature spectrum of field j at each z; the double integral over the two
// class detunings factorizes because the cross-spectrum is bilinear in the class maps
inline std::vector<double> doppler_curve(const ClassSet& cs, const std::vector<double>& zs, double w, double th,
                                         int j, const InputNoise& in) {
  Vec4 u = quadrature(th, j);
  Mat4 N = input_excess(in, w);
  std::vector<double> out(zs.size());
  parallel_for(zs.size(), [&](size_t i) {
    double z = zs[i];
    Eigen::RowVector4cd L = Eigen::RowVector4cd::Zero();
    Vec4 R = Vec4::Zero();
    cplx ex = 0;
    for (size_t k = 0; k < cs.prop.size(); ++k) {
      const Propagator& p = cs.prop[k];
      double wk = cs.rule.w[k];
      L += wk * (u.transpose() * p.M_minus(z));
      R += wk * (p.M(z).transpose() * u);
      ex += wk * (u.transpose() * atomic_excess(p, z) * u)(0);
    }
    out[i] = 1 + (L * N * R)(0).real() + ex.real();
  });
  return out;
}

struct DopplerResult {
  std::vector<double> value;     // n nodes
  std::vector<double> refined;   // 2n nodes
  double max_rel_change = 0;     // max |refined - value| / |refined|
  bool converged = true;         // max_rel_change <= 1e-3
  std::string warning;
};

inline DopplerResult doppler_spectrum(const std::vector<double>& zs, double th, double w, int j, const InputNoise& in,
                                      const MediumParams& m, const FieldConfig& f, const DopplerConfig& d) {
  DopplerResult r;
  r.value = doppler_curve(build_classes(w, m, f, d), zs, w, th, j, in);
  if (d.sigma() == 0) {
    r.refined = r.value;
    return r;
  }
  DopplerConfig d2 = d;
  d2.nodes = 2 * d.nodes;
  r.refined = doppler_curve(build_classes(w, m, f, d2), zs, w, th, j, in);
  for (size_t i = 0; i < zs.size(); ++i)
    r.max_rel_change =
        std::max(r.max_rel_change, std::abs(r.refined[i] - r.value[i]) / std::max(std::abs(r.refined[i]), 1e-300));
  r.converged = r.max_rel_change <= 1e-3;
  if (!r.converged) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "doppler quadrature not converged: width=%.6g n=%d vs %d max rel change %.3g",
                  d.width, d.nodes, d2.nodes, r.max_rel_change);
    r.warning = buf;
  }
  return r;
}

inline double doppler_spectrum(double z, double th, double w, int j, const InputNoise& in, const MediumParams& m,
                               const FieldConfig& f, const DopplerConfig& d) {
  return doppler_curve(build_classes(w, m, f, d), {z}, w, th, j, in)[0];
}

// explicit double sum over class pairs through cross_spectrum; slow reference
inline double doppler_double_sum(double z, double th, double w, int j, const InputNoise& in, const MediumParams& m,
                                 const FieldConfig& f, const DopplerConfig& d) {
  ClassSet cs = build_classes(w, m, f, d);
  double s = 0;
  for (size_t a = 0; a < cs.prop.size(); ++a)
    for (size_t b = 0; b < cs.prop.size(); ++b)
      s += cs.rule.w[a] * cs.rule.w[b] * cross_spectrum(cs.prop[a], cs.prop[b], z, th, j, in, w);
  return s;
}

struct DopplerCurve {
  double width;
  DopplerResult result;
};

inline std::vector<DopplerCurve> doppler_sweep(const std::vector<double>& zs, const std::vector<double>& widths,
                                               double th, double w, int j, const InputNoise& in,
                                               const MediumParams& m, const FieldConfig& f, DopplerConfig d) {
  std::vector<DopplerCurve> out;
  for (double dd : widths) {
    d.width = dd;
    out.push_back({dd, doppler_spectrum(zs, th, w, j, in, m, f, d)});
  }
  return out;
}

}  // namespace eitfluct
