#pragma once
// linearized Heisenberg-Langevin solver in the frequency domain

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <array>
#include <complex>
#include <vector>

#include "medium.hpp"

namespace eitfluct {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Mat4 = Eigen::Matrix4cd;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Mat84 = Eigen::Matrix<cplx, 8, 4>;
using Mat48 = Eigen::Matrix<cplx, 4, 8>;
using Vec4 = Eigen::Vector4cd;

namespace atom {

// levels |1>, |2>, |e> -> 0, 1, 2
inline Mat3 E(int a, int b) {
  Mat3 m = Mat3::Zero();
  m(a, b) = 1;
  return m;
}

// fluctuation basis: s1e, se1, s2e, se2, s21, s12, w1, w2
inline const std::array<Mat3, 8>& ops() {
  static const std::array<Mat3, 8> o = {E(0, 2), E(2, 0), E(1, 2), E(2, 1), E(1, 0),
                                        E(0, 1), E(2, 2) - E(0, 0), E(2, 2) - E(1, 1)};
  return o;
}
// index of the adjoint operator
constexpr std::array<int, 8> adj = {1, 0, 3, 2, 5, 4, 6, 7};

inline Eigen::Matrix<cplx, 9, 1> vec(const Mat3& m) {
  Eigen::Matrix<cplx, 9, 1> v;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) v(3 * a + b) = m(a, b);
  return v;
}
inline Mat3 unvec(const Eigen::Matrix<cplx, 9, 1>& v) {
  Mat3 m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m(a, b) = v(3 * a + b);
  return m;
}

// coordinates of X in {ops, identity}
inline Eigen::Matrix<cplx, 9, 1> coords(const Mat3& X) {
  static const Eigen::Matrix<cplx, 9, 9> inv = [] {
    Eigen::Matrix<cplx, 9, 9> b;
    for (int k = 0; k < 8; ++k) b.col(k) = vec(ops()[k]);
    b.col(8) = vec(Mat3::Identity());
    return Eigen::Matrix<cplx, 9, 9>(b.inverse());
  }();
  return inv * vec(X);
}

struct System {
  Mat3 H;
  std::vector<Mat3> L;  // jump operators

  Mat3 diss(const Mat3& X) const {
    Mat3 r = Mat3::Zero();
    for (auto& l : L) {
      Mat3 ld = l.adjoint();
      r += ld * X * l - 0.5 * (ld * l * X + X * ld * l);
    }
    return r;
  }
  // Heisenberg-picture drift
  Mat3 heis(const Mat3& X) const { return cplx(0, 1) * (H * X - X * H) + diss(X); }
  // Schrodinger-picture generator acting on rho
  Mat3 lindblad(const Mat3& rho) const {
    Mat3 r = cplx(0, -1) * (H * rho - rho * H);
    for (auto& l : L) {
      Mat3 ld = l.adjoint();
      r += l * rho * ld - 0.5 * (ld * l * rho + rho * ld * l);
    }
    return r;
  }
  Eigen::Matrix<cplx, 9, 9> liouvillian() const {
    Eigen::Matrix<cplx, 9, 9> S;
    for (int k = 0; k < 9; ++k) {
      Eigen::Matrix<cplx, 9, 1> e = Eigen::Matrix<cplx, 9, 1>::Zero();
      e(k) = 1;
      S.col(k) = vec(lindblad(unvec(e)));
    }
    return S;
  }
};

inline std::vector<Mat3> jumps(const MediumParams& m) {
  std::vector<Mat3> L;
  if (m.gamma1 > 0) L.push_back(std::sqrt(m.gamma1) * E(0, 2));
  if (m.gamma2 > 0) L.push_back(std::sqrt(m.gamma2) * E(1, 2));
  // pure ground-state dephasing: sigma21 decays at gamma12
  if (m.gamma12 > 0) L.push_back(std::sqrt(m.gamma12 / 2) * (E(1, 1) - E(0, 0)));
  return L;
}

inline System system(const MediumParams& m, double d1, double d2, double O1, double O2) {
  System s;
  s.H = d1 * E(0, 0) + d2 * E(1, 1) + O1 * (E(2, 0) + E(0, 2)) + O2 * (E(2, 1) + E(1, 2));
  s.L = jumps(m);
  return s;
}

// unique trace-one null vector of the Liouvillian
inline Mat3 steady_rho(const System& s) {
  Eigen::Matrix<cplx, 9, 9> S = s.liouvillian();
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 9, 9>> svd(S, Eigen::ComputeFullV);
  auto sv = svd.singularValues();
  double scale = std::max(sv(0), 1e-300);
  if (sv(7) < 1e-11 * scale) throw numeric_error("steady state not unique (singular Liouvillian)");
  Mat3 rho = unvec(svd.matrixV().col(8));
  cplx tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw numeric_error("steady state has zero trace");
  rho /= tr;
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace atom

struct AtomicSteadyState {
  cplx s1e, s2e, s21;  // <sigma_1e>, <sigma_2e>, <sigma_21>
  double w1, w2;       // <sigma_ee - sigma_jj>
  double p1, p2, pe;   // populations
  Mat3 rho;
};

inline AtomicSteadyState steady_state(const MediumParams& m, const FieldConfig& f) {
  using atom::E;
  auto s = atom::system(m, f.delta1, f.delta2, m.g1 * f.alpha1, m.g2 * f.alpha2);
  Mat3 rho = atom::steady_rho(s);
  auto ev = [&](const Mat3& X) { return (rho * X).trace(); };
  AtomicSteadyState r;
  r.rho = rho;
  r.s1e = ev(E(0, 2));
  r.s2e = ev(E(1, 2));
  r.s21 = ev(E(1, 0));
  r.p1 = rho(0, 0).real();
  r.p2 = rho(1, 1).real();
  r.pe = rho(2, 2).real();
  r.w1 = r.pe - r.p1;
  r.w2 = r.pe - r.p2;
  return r;
}

// 2D_xy = <diss(xy) - diss(x) y - x diss(y)>, over the fluctuation basis
inline Mat8 diffusion_matrix(const AtomicSteadyState& ss, const MediumParams& m, bool check = true) {
  atom::System s;
  s.H = Mat3::Zero();
  s.L = atom::jumps(m);
  const auto& o = atom::ops();
  Mat8 D;
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y)
      D(x, y) = (ss.rho * (s.diss(o[x] * o[y]) - s.diss(o[x]) * o[y] - o[x] * s.diss(o[y]))).trace();
  if (check) {
    // <f_x^dag f_y> must be a Gram matrix
    Mat8 P;
    for (int x = 0; x < 8; ++x)
      for (int y = 0; y < 8; ++y) P(x, y) = D(atom::adj[x], y);
    double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if ((P - P.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw numeric_error("diffusion matrix not Hermitian on the physical sector");
    Mat8 Hm = 0.5 * (P + P.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat8> es(Hm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
      throw numeric_error("diffusion matrix not positive semidefinite");
  }
  return D;
}

// linear response of the atoms to the field fluctuations
struct Model {
  Mat8 A;    // atomic drift
  Mat84 B;   // field -> atoms
  Mat48 C;   // atoms -> dz field
  Mat8 D2;   // 2D
  double noise_scale;  // c / N
  AtomicSteadyState ss;
};

inline Model build_model(const MediumParams& m, const FieldConfig& f) {
  using atom::E;
  Model md;
  md.ss = steady_state(m, f);
  auto s = atom::system(m, f.delta1, f.delta2, m.g1 * f.alpha1, m.g2 * f.alpha2);
  const auto& o = atom::ops();
  for (int k = 0; k < 8; ++k) md.A.row(k) = atom::coords(s.heis(o[k])).head<8>().transpose();
  const Mat3& rho = md.ss.rho;
  auto ev = [&](const Mat3& X) { return (rho * X).trace(); };
  const cplx I(0, 1);
  double g[2] = {m.g1, m.g2};
  Mat3 sej[2] = {E(2, 0), E(2, 1)}, sje[2] = {E(0, 2), E(1, 2)};
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 2; ++j) {
      md.B(k, 2 * j) = I * g[j] * ev(sej[j] * o[k] - o[k] * sej[j]);
      md.B(k, 2 * j + 1) = I * g[j] * ev(sje[j] * o[k] - o[k] * sje[j]);
    }
  md.C = Mat48::Zero();
  md.C(0, 0) = -I * m.g1 * m.N / m.c;
  md.C(1, 1) = I * m.g1 * m.N / m.c;
  md.C(2, 2) = -I * m.g2 * m.N / m.c;
  md.C(3, 3) = I * m.g2 * m.N / m.c;
  md.D2 = diffusion_matrix(md.ss, m);
  md.noise_scale = m.c / m.N;
  return md;
}

namespace detail {

inline Mat8 atomic_resolvent(const Model& md, double w) {
  Mat8 X = cplx(0, -w) * Mat8::Identity() - md.A;
  Eigen::FullPivLU<Mat8> lu(X);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw singularity_error("atomic block singular at omega=" + std::to_string(w));
  return lu.inverse();
}

// (e^{x z} - 1) / x
inline cplx phi(cplx x, double z) {
  cplx y = x * z;
  if (std::abs(y) < 1e-4) return z * (1.0 + y / 2.0 + y * y / 6.0 + y * y * y / 24.0);
  return (std::exp(y) - 1.0) / x;
}

struct Eig4 {
  Mat4 P, Pi;
  Vec4 lam;
  bool ok = false;  // eigenvector basis well conditioned
};

inline Eig4 eig4(const Mat4& G) {
  Eig4 e;
  Eigen::ComplexEigenSolver<Mat4> es(G);
  if (es.info() != Eigen::Success) return e;
  e.P = es.eigenvectors();
  e.lam = es.eigenvalues();
  Eigen::JacobiSVD<Mat4> svd(e.P);
  auto sv = svd.singularValues();
  double cond = sv(0) / std::max(sv(3), 1e-300);
  if (!(cond < 1e8)) return e;
  e.Pi = e.P.inverse();
  e.ok = true;
  return e;
}

}  // namespace detail

struct TransferMatrix {
  Mat4 M;        // exp(G(w) z), acting on (da1, da1^dag, da2, da2^dag) at w
  Mat4 M_minus;  // same at -w
  Mat4 V;        // accumulated Langevin covariance
};

// fixed (w, detunings): generator, source and cached eigen data, then cheap per z
class Propagator {
 public:
  Propagator() = default;
  Propagator(const Model& md, double w) : w_(w) {
    Mat8 Rm = detail::atomic_resolvent(md, -w), Rp = detail::atomic_resolvent(md, w);
    Gm_ = md.C * Rm * md.B;
    Gp_ = md.C * Rp * md.B;
    Xi_ = md.C * Rm * (md.noise_scale * md.D2) * Rp.transpose() * md.C.transpose();
    em_ = detail::eig4(Gm_);
    ep_ = detail::eig4(Gp_);
    if (em_.ok && ep_.ok) {
      // Xi in the product eigenbasis
      Xt_ = em_.Pi * Xi_ * ep_.Pi.transpose();
    }
  }
  Propagator(const MediumParams& m, const FieldConfig& f, double w) : Propagator(build_model(m, f), w) {}

  double omega() const { return w_; }
  const Mat4& generator() const { return Gp_; }
  const Mat4& generator_minus() const { return Gm_; }
  const Mat4& source() const { return Xi_; }
  bool eigen_route() const { return em_.ok && ep_.ok; }

  Mat4 M(double z) const { return expG(ep_, Gp_, z); }
  Mat4 M_minus(double z) const { return expG(em_, Gm_, z); }

  // V = int_0^z exp(G(-w) s) Xi exp(G(w)^T s) ds
  Mat4 V(double z) const {
    if (z == 0) return Mat4::Zero();
    if (eigen_route()) {
      Mat4 W;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) W(a, b) = Xt_(a, b) * detail::phi(em_.lam(a) + ep_.lam(b), z);
      return em_.P * W * ep_.P.transpose();
    }
    // vec form: v' = K v + vec(Xi), K = I (x) Gm + Gp (x) I; augmented exponential
    using M17 = Eigen::Matrix<cplx, 17, 17>;
    M17 big = M17::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          big(4 * i + j, 4 * i + k) += Gm_(j, k);
          big(4 * i + j, 4 * k + j) += Gp_(i, k);
        }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) big(4 * i + j, 16) = Xi_(j, i);
    M17 ex = (big * z).exp();
    Mat4 out;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out(j, i) = ex(4 * i + j, 16);
    return out;
  }

  TransferMatrix transfer(double z) const { return {M(z), M_minus(z), V(z)}; }

  // <v(-w) v(w)^T> at z for input covariance K0
  Mat4 covariance(double z, const Mat4& K0) const { return M_minus(z) * K0 * M(z).transpose() + V(z); }

 private:
  static Mat4 expG(const detail::Eig4& e, const Mat4& G, double z) {
    if (z == 0) return Mat4::Identity();
    if (e.ok) return e.P * (e.lam * z).array().exp().matrix().asDiagonal() * e.Pi;
    return (G * z).exp();
  }

  double w_ = 0;
  Mat4 Gm_, Gp_, Xi_, Xt_;
  detail::Eig4 em_, ep_;
};

// input covariance <v(-w) v(w)^T>, per field [[g, 1+f], [f, g]]
inline Mat4 input_covariance(const InputNoise& in, double w) {
  Mat4 K = Mat4::Zero();
  for (int j = 0; j < 2; ++j) {
    FG n = in.field(j + 1).at(w);
    K(2 * j, 2 * j) = n.g;
    K(2 * j, 2 * j + 1) = 1 + n.f;
    K(2 * j + 1, 2 * j) = n.f;
    K(2 * j + 1, 2 * j + 1) = n.g;
  }
  return K;
}

// commutator part of the input covariance (vacuum)
inline Mat4 vacuum_covariance() {
  Mat4 J = Mat4::Zero();
  J(0, 1) = 1;
  J(2, 3) = 1;
  return J;
}

// quadrature weights of field j (1 or 2)
inline Vec4 quadrature(double th, int j) {
  Vec4 u = Vec4::Zero();
  u(2 * (j - 1)) = std::exp(cplx(0, -th));
  u(2 * (j - 1) + 1) = std::exp(cplx(0, th));
  return u;
}

inline double spectrum(const Propagator& p, double z, double th, int j, const InputNoise& in) {
  Vec4 u = quadrature(th, j);
  return (u.transpose() * p.covariance(z, input_covariance(in, p.omega())) * u)(0).real();
}

inline double spectrum(double z, double w, double th, int j, const InputNoise& in, const MediumParams& m,
                       const FieldConfig& f) {
  return spectrum(Propagator(m, f, w), z, th, j, in);
}

// <Y1^th1(-w) Y2^th2(w)>
inline cplx correlation(const Propagator& p, double z, double th1, double th2, const InputNoise& in) {
  Vec4 u1 = quadrature(th1, 1), u2 = quadrature(th2, 2);
  return (u1.transpose() * p.covariance(z, input_covariance(in, p.omega())) * u2)(0);
}

inline cplx correlation(double z, double w, double th1, double th2, const InputNoise& in, const MediumParams& m,
                        const FieldConfig& f) {
  return correlation(Propagator(m, f, w), z, th1, th2, in);
}

// Normal-ordered input excess (covariance minus vacuum)
inline Mat4 input_excess(const InputNoise& in, double w) { return input_covariance(in, w) - vacuum_covariance(); }

// atomic excess noise added on top of the propagated vacuum: M J M^T + V - J
inline Mat4 atomic_excess(const Propagator& p, double z) {
  Mat4 J = vacuum_covariance();
  return p.M_minus(z) * J * p.M(z).transpose() + p.V(z) - J;
}

// field j quadrature cross-spectrum between the field propagated through atoms at detuning
// offset da (time t) and db (time 0); pa/pb must be built at the class detunings and
// frequencies. Vacuum term is kept at 1, atomic excess noise averaged over the two classes.
inline double cross_spectrum(const Propagator& pa, const Propagator& pb, double z, double th, int j,
                             const InputNoise& in, double w_in) {
  Vec4 u = quadrature(th, j);
  Mat4 N = input_excess(in, w_in);
  cplx sig = (u.transpose() * pa.M_minus(z) * N * pb.M(z).transpose() * u)(0);
  cplx ex = (u.transpose() * (atomic_excess(pa, z) + atomic_excess(pb, z)) * u)(0);
  return 1 + sig.real() + 0.5 * ex.real();
}

struct Susceptibility {
  double delta2;
  cplx chi;
};

// probe susceptibility vs delta2; chi = -<sigma_2e> / Omega2 so Im chi > 0 is absorption.
// weak_probe: first-order response around the pump-only steady state
inline std::vector<Susceptibility> susceptibility(const std::vector<double>& delta2, double delta1,
                                                  const MediumParams& m, const FieldConfig& f,
                                                  bool weak_probe = true) {
  using atom::E;
  double O1 = m.g1 * f.alpha1, O2 = m.g2 * f.alpha2;
  std::vector<Susceptibility> out;
  for (double d2 : delta2) {
    cplx s2e;
    double norm;
    if (weak_probe) {
      auto s0 = atom::system(m, delta1, d2, O1, 0.0);
      Mat3 rho0 = atom::steady_rho(s0);
      Mat3 H1 = E(2, 1) + E(1, 2);
      Mat3 rhs = cplx(0, 1) * (H1 * rho0 - rho0 * H1);  // -L1 rho0
      Eigen::Matrix<cplx, 10, 9> S;
      S.topRows<9>() = s0.liouvillian();
      for (int k = 0; k < 9; ++k) S(9, k) = (k % 4 == 0) ? 1.0 : 0.0;  // trace
      Eigen::Matrix<cplx, 10, 1> b;
      b.head<9>() = atom::vec(rhs);
      b(9) = 0;
      Eigen::Matrix<cplx, 9, 1> r1 = S.colPivHouseholderQr().solve(b);
      if ((S * r1 - b).norm() > 1e-9 * std::max(1.0, b.norm()))
        throw numeric_error("weak-probe response: inconsistent linear system");
      s2e = (atom::unvec(r1) * E(1, 2)).trace();
      norm = 1;
    } else {
      if (O2 == 0) throw param_error("exact susceptibility needs Omega2 > 0");
      auto s = atom::system(m, delta1, d2, O1, O2);
      Mat3 rho = atom::steady_rho(s);
      s2e = (rho * E(1, 2)).trace();
      norm = O2;
    }
    out.push_back({d2, -s2e / norm});
  }
  return out;
}

}  // namespace eitfluct
