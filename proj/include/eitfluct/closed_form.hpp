#pragma once
// analytic spectra, correlations and length scales of the linearized model

#include <array>
#include <complex>
#include <string>

#include "medium.hpp"

namespace eitfluct {

using cplx = std::complex<double>;

struct QCoef {
  cplx q;
  double r() const { return q.real(); }
  double i() const { return q.imag(); }
};

struct QPair {
  QCoef plus, minus;
};

namespace detail {
// w C / (Om^2 - w (w + s) + i w gamma/2)
inline cplx q_value(double w, double s, const MediumParams& m, const FieldConfig& f) {
  double C = coupling_constant(m, f);
  cplx den(f.omega_sq(m) - w * (w + s), w * m.gamma() / 2);
  if (den == cplx(0, 0)) {
    if (w == 0) return 0.0;  // numerator vanishes too; limit is 0 when Om > 0
    throw singularity_error("propagation coefficient pole at omega=" + std::to_string(w));
  }
  return w * C / den;
}
inline bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }
inline void need_symmetric(const MediumParams& m, const FieldConfig& f, const char* what) {
  if (!same(f.alpha1, f.alpha2) || !same(m.g1, m.g2))
    throw regime_error(std::string(what) + " needs alpha1 = alpha2 and g1 = g2; use the langevin engine");
}
inline double wrap_pi(double x) {
  x = std::fmod(x, pi);
  if (x < 0) x += pi;
  if (x >= pi) x -= pi;
  return x;
}
}  // namespace detail

inline QCoef q_resonance(double w, const MediumParams& m, const FieldConfig& f) {
  return {detail::q_value(w, 0, m, f)};
}

inline QPair q_detuned(double w, double delta, const MediumParams& m, const FieldConfig& f) {
  return {{detail::q_value(w, delta, m, f)}, {detail::q_value(w, -delta, m, f)}};
}

// resonance case, both fields may carry noise; decay taken as exp(-|Q^(i)| z)
inline double spectrum_resonance(double z, double w, double th, int j, const InputNoise& in,
                                 const MediumParams& m, const FieldConfig& f) {
  if (f.delta1 != 0 || f.delta2 != 0) throw regime_error("spectrum_resonance needs delta1 = delta2 = 0");
  double a1 = f.alpha1 * f.alpha1, a2 = f.alpha2 * f.alpha2;
  if (!(a1 + a2 > 0)) throw param_error("alpha1^2 + alpha2^2 must be > 0");
  QCoef Q = q_resonance(w, m, f);
  FG n1 = in.n1.at(w), n2 = in.n2.at(w);
  double e = std::exp(-std::abs(Q.i()) * z), c2 = std::cos(2 * th), co = std::cos(Q.r() * z);
  double A = (a1 + a2) * (a1 + a2);
  double dfg = n1.f - n2.f + c2 * (n1.g - n2.g);
  if (j == 1)
    return (4 * e * co * a2 * a1 * dfg + 2 * e * e * a2 * (n2.f * a1 + a2 * n1.f + c2 * (n2.g * a1 + a2 * n1.g)) +
            2 * (n1.f * a1 + a2 * n2.f + c2 * (n1.g * a1 + a2 * n2.g)) * a1) / A + 1;
  return (-4 * e * co * a2 * a1 * dfg + 2 * e * e * a1 * (n2.f * a1 + a2 * n1.f + c2 * (n2.g * a1 + a2 * n1.g)) +
          2 * a2 * (n1.f * a1 + a2 * n2.f + c2 * (n1.g * a1 + a2 * n2.g))) / A + 1;
}

// detuned two-photon resonance, coherent pump; the printed forms lack the +1 vacuum term
inline double spectrum_detuned(double z, double w, double th, int j, const InputNoise& in,
                               const MediumParams& m, const FieldConfig& f) {
  if (f.delta1 != f.delta2) throw regime_error("spectrum_detuned needs delta1 = delta2; use the langevin engine");
  FG n1 = in.n1.at(w);
  if (n1.f != 0 || n1.g != 0) throw regime_error("spectrum_detuned needs a coherent pump; use the langevin engine");
  double a1 = f.alpha1 * f.alpha1, a2 = f.alpha2 * f.alpha2;
  if (!(a1 + a2 > 0)) throw param_error("alpha1^2 + alpha2^2 must be > 0");
  QPair q = q_detuned(w, f.delta1, m, f);
  double pr = q.plus.r(), pi_ = q.plus.i(), mr = q.minus.r(), mi = q.minus.i();
  FG n2 = in.n2.at(w);
  double A = (a1 + a2) * (a1 + a2), t2 = 2 * th;
  double ep = std::exp(pi_ * z), em = std::exp(mi * z), epm = std::exp((pi_ + mi) * z);
  if (j == 1)
    return a1 * a2 / A *
               (n2.f * (2 + em * em + ep * ep - 2 * em * std::cos(mr * z) - 2 * ep * std::cos(pr * z)) +
                2 * n2.g *
                    (std::cos(t2) + epm * std::cos(mr * z - pr * z + t2) - ep * std::cos(pr * z - t2) -
                     em * std::cos(mr * z + t2))) + 1;
  return (a1 * a1 * (n2.f * (em * em + ep * ep) + 2 * n2.g * epm * std::cos(mr * z - pr * z + t2)) +
          a1 * a2 *
              (2 * n2.f * (em * std::cos(mr * z) + ep * std::cos(pr * z)) +
               2 * n2.g * (ep * std::cos(pr * z - t2) + em * std::cos(mr * z + t2))) +
          2 * a2 * a2 * (n2.f + n2.g * std::cos(t2))) / A + 1;
}

// resonance correlation as printed (alpha1 = alpha2, g1 = g2), decay sign repaired
inline double correlation_resonance(double z, double w, double th1, double th2, const InputNoise& in,
                                    const MediumParams& m, const FieldConfig& f) {
  if (f.delta1 != 0 || f.delta2 != 0) throw regime_error("correlation_resonance needs delta1 = delta2 = 0");
  detail::need_symmetric(m, f, "correlation_resonance");
  QCoef Q = q_resonance(w, m, f);
  FG n1 = in.n1.at(w), n2 = in.n2.at(w);
  double e = std::exp(-std::abs(Q.i()) * z), D = th1 - th2, S = th1 + th2;
  double plateau = std::cos(D) * (n1.f + n2.f) + std::cos(S) * (n1.g + n2.g);
  return 0.5 * (plateau + 2 * e * std::sin(Q.r() * z) * (std::sin(D) * (n2.f - n1.f) + std::sin(S) * (n1.g - n2.g)) -
                e * plateau);
}

// detuned correlation as printed (alpha1 = alpha2, g1 = g2)
inline double correlation_detuned(double z, double w, double th1, double th2, const InputNoise& in,
                                  const MediumParams& m, const FieldConfig& f) {
  if (f.delta1 != f.delta2) throw regime_error("correlation_detuned needs delta1 = delta2");
  detail::need_symmetric(m, f, "correlation_detuned");
  QPair q = q_detuned(w, f.delta1, m, f);
  double pr = q.plus.r(), pi_ = q.plus.i(), mr = q.minus.r(), mi = q.minus.i();
  FG n1 = in.n1.at(w), n2 = in.n2.at(w);
  double D = th1 - th2, S = th1 + th2;
  return -0.5 * std::exp(mi * z) *
             (std::cos(D) * (n1.f + n2.f) + 2 * std::sin(mr * z) * std::sin(D) * (n1.f - n2.f) +
              std::cos(mr * z + S) * (n1.g - n2.g)) +
         0.5 * std::exp(pi_ * z) * std::cos(pr * z - S) * (n1.g - n2.g) -
         0.5 * std::exp((mi + pi_) * z) * std::cos(mr * z - pr * z + S) * (n1.g + n2.g) +
         0.5 * (std::cos(D) * (n1.f + n2.f) + std::cos(S) * (n1.g + n2.g));
}

// exact cross-spectrum <Y1^th1(-w) Y2^th2(w)> of the linearized model for alpha1 = alpha2, g1 = g2,
// delta1 = delta2; complex in general
inline cplx correlation_exact(double z, double w, double th1, double th2, const InputNoise& in,
                              const MediumParams& m, const FieldConfig& f) {
  if (f.delta1 != f.delta2) throw regime_error("correlation_exact needs delta1 = delta2");
  detail::need_symmetric(m, f, "correlation_exact");
  QPair q = q_detuned(w, f.delta1, m, f);
  const cplx I(0, 1);
  cplx Ea = std::exp(I * std::conj(q.plus.q) * z), Eb = std::exp(I * std::conj(q.minus.q) * z);
  cplx Eam = std::exp(-I * q.minus.q * z), Ebm = std::exp(-I * q.plus.q * z);
  cplx p1 = std::exp(-I * th1), m1 = std::exp(I * th1), p2 = std::exp(-I * th2), m2 = std::exp(I * th2);
  cplx out = 0;
  for (int j = 1; j <= 2; ++j) {
    double s = j == 1 ? 1 : -1;
    FG n = in.field(j).at(w);
    cplx La = p1 * 0.5 * (1.0 + s * Eam), Lb = m1 * 0.5 * (1.0 + s * Ebm);
    cplx Ra = p2 * 0.5 * (1.0 - s * Ea), Rb = m2 * 0.5 * (1.0 - s * Eb);
    out += n.g * (La * Ra + Lb * Rb) + n.f * (La * Rb + Lb * Ra);
  }
  return out;
}

struct PhaseDifference {
  double from_components;  // (S1 + S2 - 2 Sc)/alpha^2 at theta = pi/2, printed component formulas
  double printed;          // exp(-|Q^(i)| z) * value at z = 0
};

// phase-difference noise, alpha1 = alpha2
inline PhaseDifference phase_difference_spectrum(double z, double w, const InputNoise& in, const MediumParams& m,
                                                 const FieldConfig& f) {
  detail::need_symmetric(m, f, "phase_difference_spectrum");
  double a2 = f.alpha1 * f.alpha1;
  if (!(a2 > 0)) throw param_error("phase_difference_spectrum: alpha = 0");
  double h = pi / 2;
  auto at = [&](double zz) {
    return (spectrum_resonance(zz, w, h, 1, in, m, f) + spectrum_resonance(zz, w, h, 2, in, m, f) -
            2 * correlation_resonance(zz, w, h, h, in, m, f)) / a2;
  };
  QCoef Q = q_resonance(w, m, f);
  return {at(z), std::exp(-std::abs(Q.i()) * z) * at(0)};
}

struct Rotation {
  double vacuum_probe;      // (Q-^(r) - Q+^(r)) z / 2 as printed for the vacuum probe
  double vacuum_argmin;     // argmin_theta S2 for alpha2 = 0, exponentials -> 1, in [0, pi)
  double theta_min_printed; // (Q+^(r) - Q-^(r)) z / 4 in [0, pi)
  double theta_min;         // branch-corrected argmin for alpha1 = alpha2, in [0, pi)
  double theta_max;
};

// squeeze_sign: sign of the probe's g (negative for the squeezed preset)
inline Rotation rotation_angle(double z, double w, double delta, const MediumParams& m, const FieldConfig& f,
                               double squeeze_sign = -1) {
  QPair q = q_detuned(w, delta, m, f);
  double P = q.plus.r(), M = q.minus.r();
  Rotation r;
  r.vacuum_probe = (M - P) * z / 2;
  r.vacuum_argmin = detail::wrap_pi((P - M) * z / 2 + (squeeze_sign > 0 ? pi / 2 : 0));
  r.theta_min_printed = detail::wrap_pi((P - M) * z / 4);
  // theta part of S2 is 2 g cos(Mz/2) cos(Pz/2) cos(2 theta + (M-P) z/2)
  double prod = std::cos(M * z / 2) * std::cos(P * z / 2);
  r.theta_min = detail::wrap_pi((P - M) * z / 4 + (squeeze_sign * prod > 0 ? pi / 2 : 0));
  r.theta_max = detail::wrap_pi(r.theta_min + pi / 2);
  return r;
}

struct Diagnostics {
  QPair q;
  double z_abs, z_osc, z_int;  // length units; z_int = inf when Q-^(r) = Q+^(r)
  double ratio_abs_osc;        // z_abs / |z_osc|
  double ratio_formula;        // |Om^2 - w^2| / (pi gamma w), resonance only (nan otherwise)
  std::array<double, 4> roots_atomic;   // absorption maxima, frame w_atomic = w + delta, ascending
  std::array<double, 4> roots_carrier;  // same, carrier frame
  double window;                        // 2 Om^2 / delta, nan at delta = 0
  bool window_defined;
};

inline Diagnostics diagnostics(double w, double delta, const MediumParams& m, const FieldConfig& f) {
  Diagnostics d;
  d.q = q_detuned(w, delta, m, f);
  double qi = std::max(std::abs(d.q.plus.i()), std::abs(d.q.minus.i()));
  d.z_abs = qi > 0 ? 1 / qi : INFINITY;
  if (delta == 0)
    d.z_osc = 2 * pi / d.q.plus.r();
  else
    d.z_osc = pi / d.q.plus.r();
  double dq = d.q.minus.r() - d.q.plus.r();
  d.z_int = dq != 0 ? 2 * pi / dq : INFINITY;
  d.ratio_abs_osc = d.z_abs / std::abs(d.z_osc);
  double o2 = f.omega_sq(m);
  d.ratio_formula = delta == 0 ? std::abs(o2 - w * w) / (pi * m.gamma() * std::abs(w)) : NAN;
  double s = std::sqrt(delta * delta + 4 * o2);
  int k = 0;
  for (double a : {1.0, -1.0})
    for (double b : {1.0, -1.0}) d.roots_atomic[k++] = delta + 0.5 * (a * delta + b * s);
  std::sort(d.roots_atomic.begin(), d.roots_atomic.end());
  for (int i = 0; i < 4; ++i) d.roots_carrier[i] = d.roots_atomic[i] - delta;
  d.window_defined = delta != 0;
  d.window = delta != 0 ? 2 * o2 / std::abs(delta) : NAN;
  return d;
}

struct Isotropy {
  double z2p, z2m, z1p, z1m;  // distances of theta-independent probe (2) and pump (1) spectra
  double value_p, value_m;    // 1 + (cos(Q_-+ z) + 1) sinh^2 xi / 2 at z2p, z2m
};

inline Isotropy isotropy_distances(int mi, double w, double delta, double xi, const MediumParams& m,
                                   const FieldConfig& f) {
  detail::need_symmetric(m, f, "isotropy_distances");
  QPair q = q_detuned(w, delta, m, f);
  double P = q.plus.r(), M = q.minus.r();
  if (P == 0 || M == 0) throw singularity_error("Q^(r) = 0: no finite isotropy distance");
  Isotropy r;
  r.z2p = (4 * pi * mi + pi) / P;
  r.z2m = (4 * pi * mi + pi) / M;
  r.z1p = 4 * pi * mi / P;
  r.z1m = 4 * pi * mi / M;
  double sh = std::sinh(xi);
  r.value_p = 1 + 0.5 * (std::cos(M * r.z2p) + 1) * sh * sh;
  r.value_m = 1 + 0.5 * (std::cos(P * r.z2m) + 1) * sh * sh;
  return r;
}

struct LargeDetuning {
  double S1, S2;
  std::string warning;  // empty when deep in the regime
};

// large two-photon detuning, z < z_abs, alpha1 = alpha2
inline LargeDetuning large_detuning_spectrum(double z, double w, double delta, double xi, const MediumParams& m,
                                             const FieldConfig& f) {
  detail::need_symmetric(m, f, "large_detuning_spectrum");
  QPair q = q_detuned(w, delta, m, f);
  double P = q.plus.r();
  auto s2 = [&](double x) {
    double c = std::cos(x / 2), s = std::sin(x / 2), s1 = std::sin(x);
    return std::exp(-2 * xi) * c * c * c * c + s * s + 0.25 * std::exp(2 * xi) * s1 * s1;
  };
  LargeDetuning r{s2(P * z - pi), s2(P * z), ""};
  double o2 = f.omega_sq(m), dw = std::abs(delta * w), g = m.gamma();
  double zabs = 1 / std::max(std::abs(q.plus.i()), std::abs(q.minus.i()));
  std::string warn;
  if (dw < 10 * std::max(o2, w * w)) warn += "|delta omega| not >> Omega^2, omega^2; ";
  if (std::abs(delta) < 10 * g) warn += "delta not >> gamma; ";
  if (z * 10 > zabs) warn += "z not << z_abs; ";
  r.warning = warn;
  return r;
}

}  // namespace eitfluct
