#include <sstream>

#include "common.hpp"
#include "eitfluct/closed_form.hpp"

using namespace eitfluct;
using namespace tst;

// ---- medium

TEST(Medium, SqueezedPresetValues) {
  auto at = [](double xi, double th) {
    FG v = squeezed_preset(xi);
    return 1 + 2 * v.g * std::cos(2 * th) + 2 * v.f;
  };
  EXPECT_EQ(squeezed_preset(0).f, 0);
  EXPECT_EQ(squeezed_preset(0).g, 0);
  // oracle: e^{-2 xi} cos^2 + e^{2 xi} sin^2
  for (double xi : {0.3, 1.0, 2.0})
    for (double th : lin(0, pi, 13))
      EXPECT_NEAR(at(xi, th), std::exp(-2 * xi) * std::pow(std::cos(th), 2) + std::exp(2 * xi) * std::pow(std::sin(th), 2),
                  1e-12 * std::exp(2 * xi));
  EXPECT_NEAR(at(1, 0), 0.1353352832366127, 1e-12);
  EXPECT_NEAR(at(1, pi / 2), 7.38905609893065, 1e-12);
}

TEST(Medium, SqueezedPresetIsMinimumUncertainty) {
  for (double xi : {0.1, 1.0, 2.5})
    for (double th : lin(0, pi, 9)) {
      FG v = squeezed_preset(xi);
      double a = 1 + 2 * v.g * std::cos(2 * th) + 2 * v.f, b = 1 - 2 * v.g * std::cos(2 * th) + 2 * v.f;
      EXPECT_NEAR(a * b, 1.0 + 4 * std::pow(v.g * std::sin(2 * th), 2), 1e-9 * a * b);
      if (std::abs(std::sin(2 * th)) < 1e-12) { EXPECT_NEAR(a * b, 1.0, 1e-9 * a * b); }
    }
}

TEST(Medium, CouplingConstant) {
  MediumParams m = medium(1, 0.1, 1e12);
  EXPECT_NEAR(coupling_constant(m, field(1, 1)), 1e12 * 0.01, 1e-3);
  EXPECT_NEAR(coupling_constant(m, field(1, 0)), 1e12 * 0.01, 1e-3);
  m.g1 = 0.2;
  FieldConfig f;
  f.alpha1 = 5;
  f.alpha2 = 0;
  EXPECT_NEAR(coupling_constant(m, f), m.N * m.g2 * m.g2, 1e-3);
  // rescaling g -> lam g, alpha -> alpha / lam at fixed Omega scales C by lam^2 only through N g^2
  MediumParams m2 = medium(1, 0.1, 1e6);
  m2.g1 = 0.3;
  m2.g2 = 0.2;
  FieldConfig f2 = field(0.7, 1.1);
  f2.alpha1 = 0.7 / m2.g1;
  f2.alpha2 = 1.1 / m2.g2;
  double C = coupling_constant(m2, f2);
  MediumParams m3 = m2;
  m3.g1 *= 3, m3.g2 *= 3, m3.N /= 9;
  FieldConfig f3 = f2;
  f3.alpha1 /= 3, f3.alpha2 /= 3;
  EXPECT_NEAR(coupling_constant(m3, f3), C, 1e-12 * C);
  EXPECT_THROW(coupling_constant(m, field(0, 0)), param_error);
}

TEST(Medium, TwoPhotonFlag) {
  FieldConfig f = field(1, 1, 0.5);
  EXPECT_TRUE(f.two_photon_resonant());
  f.delta2 = 0.4;
  EXPECT_FALSE(f.two_photon_resonant());
}

TEST(Medium, ParseParams) {
  std::istringstream in("# comment\ngamma1 = 0.25\ngamma2=0.75  # trailing\nalpha1 = 3\nxi2 = 1\n\ngamma12 = 0.01\n");
  Params p = parse_params(in);
  EXPECT_EQ(p.medium.gamma(), 1.0);
  EXPECT_EQ(p.medium.gamma12, 0.01);
  EXPECT_EQ(p.field.alpha1, 3);
  EXPECT_EQ(p.field.alpha2, 10);  // default
  EXPECT_TRUE(p.noise.n1.is_coherent());
  EXPECT_EQ(p.noise.n2.kind(), NoiseSpec::Kind::squeezed);
  EXPECT_EQ(p.noise.n2.xi(), 1);
}

TEST(Medium, ParseErrorsNameTheKey) {
  auto msg = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_params(in);
    } catch (const param_error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(msg("gama2 = 1\n").find("gama2"), std::string::npos);
  EXPECT_NE(msg("gamma1 = 1\ngamma1 = 2\n").find("gamma1"), std::string::npos);
  EXPECT_NE(msg("N = lots\n").find("'N'"), std::string::npos);
  EXPECT_NE(msg("gamma1 = -1\n").find("rates"), std::string::npos);
  EXPECT_NE(msg("noise2 = thermal\n").find("noise2"), std::string::npos);
  EXPECT_NE(msg("noise1 = coherent\nxi1 = 1\n").find("xi1"), std::string::npos);
  EXPECT_NE(msg("N = 0.5\n").find("N"), std::string::npos);
  EXPECT_NE(msg("gamma1\n").find("line 1"), std::string::npos);
}

TEST(Medium, TableInterpolationClampedAndEven) {
  NoiseSpec n = NoiseSpec::table({1.0, 0.0, 2.0}, {0.2, 0.4, 0.0}, {-0.1, -0.3, 0.0});
  EXPECT_NEAR(n.at(0).f, 0.4, 1e-15);
  EXPECT_NEAR(n.at(0.5).f, 0.3, 1e-15);  // half-line table: read at |w|
  EXPECT_EQ(n.at(0.5).f, n.at(-0.5).f);
  EXPECT_NEAR(n.at(5).f, 0.0, 1e-15);  // clamped
  // two-sided table: average of w and -w
  NoiseSpec t = NoiseSpec::table({-1, 1}, {0.0, 0.4}, {0, 0});
  EXPECT_NEAR(t.at(0.5).f, 0.2, 1e-15);
  EXPECT_NEAR(t.at(-0.5).f, 0.2, 1e-15);
  EXPECT_NEAR(t.at(3).f, 0.2, 1e-15);
  EXPECT_FALSE(n.is_coherent());
  EXPECT_THROW(NoiseSpec::table({0, 0}, {0, 0}, {0, 0}), param_error);
  EXPECT_THROW(NoiseSpec::table({0}, {0, 1}, {0}), param_error);
  NoiseSpec bad = NoiseSpec::table({0, 1}, {0, 0}, {-0.7, 0});
  EXPECT_THROW(bad.check_physical(), param_error);
}

TEST(Medium, TableFromFile) {
  Params p = load_params(std::string(EITFLUCT_TEST_DATA) + "/table.params");
  EXPECT_EQ(p.noise.n2.kind(), NoiseSpec::Kind::table);
  EXPECT_NEAR(p.noise.n2.at(0.25).f, 0.375, 1e-15);
  EXPECT_NEAR(p.noise.n2.at(-0.25).g, -0.45, 1e-15);
}

TEST(Medium, PresetsArePhysical) {
  for (double xi : {0.0, 0.5, 2.0, 4.0})
    for (double w : lin(-3, 3, 31)) {
      double lo = INFINITY;
      for (double th : lin(0, pi, 64)) lo = std::min(lo, input_spectrum(NoiseSpec::squeezed(xi), w, th));
      EXPECT_GE(lo, 0);
    }
}

// ---- propagation coefficients

TEST(Coefficients, MatchDirectDivision) {
  MediumParams m = medium(1, 0.1, 100);  // C = 1
  FieldConfig f = field(1, 1);
  ASSERT_NEAR(coupling_constant(m, f), 1, 1e-14);
  double w = 0.1;
  cplx q = w / cplx(2 - w * w, w / 2);
  EXPECT_NEAR(std::abs(q_resonance(w, m, f).q - q), 0, 1e-15);
  EXPECT_EQ(q_resonance(0, m, f).q, cplx(0, 0));
  double om = f.omega(m);
  QCoef at = q_resonance(om, m, f);
  EXPECT_NEAR(at.r(), 0, 1e-12);
  EXPECT_NEAR(at.i(), -2.0 / m.gamma(), 1e-12);
}

TEST(Coefficients, ImaginaryPartNeverPositive) {
  MediumParams m = medium(1, 0.1, 1e4);
  for (double d : {0.0, 0.3, -2.0, 5.0})
    for (double w : lin(-4, 4, 81)) {
      QPair q = q_detuned(w, d, m, field(0.6, 0.6, d));
      EXPECT_LE(q.plus.i(), 0);
      EXPECT_LE(q.minus.i(), 0);
    }
}

TEST(Coefficients, DetunedReducesAtZero) {
  MediumParams m = medium();
  for (double w : lin(-2, 2, 17)) {
    QPair q = q_detuned(w, 0, m, field(0.6, 0.6));
    EXPECT_EQ(q.plus.q, q.minus.q);
    EXPECT_EQ(q.plus.q, q_resonance(w, m, field(0.6, 0.6)).q);
  }
}

TEST(Coefficients, PoleIsAnError) {
  MediumParams m = medium(0);
  FieldConfig f = field(1, 0);
  EXPECT_THROW(q_resonance(1.0, m, f), singularity_error);
  EXPECT_NO_THROW(q_resonance(0.5, m, f));
}

TEST(Coefficients, ExtremumOfImaginaryPart) {
  MediumParams m = medium(1);
  double Om = 0.6, w = 0.1;
  FieldConfig f = field(Om / std::sqrt(2), Om / std::sqrt(2));
  // golden section on |Q+^(i)|(delta)
  auto F = [&](double d) { return -std::abs(q_detuned(w, d, m, f).plus.i()); };
  double a = 0, b = 10, r = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    double c = b - r * (b - a), d = a + r * (b - a);
    (F(c) < F(d) ? b : a) = (F(c) < F(d) ? d : c);
  }
  EXPECT_NEAR(0.5 * (a + b), (Om * Om - w * w) / w, 1e-6);
  // and the real-part extremum: |Q+^(r)| largest at delta = -gamma/2 + (Om^2 - w^2)/w
  auto G = [&](double d) { return -q_detuned(w, d, m, f).plus.r(); };
  a = -5, b = 10;
  for (int i = 0; i < 200; ++i) {
    double c = b - r * (b - a), d = a + r * (b - a);
    (G(c) < G(d) ? b : a) = (G(c) < G(d) ? d : c);
  }
  // Q+^(r) = wC x / (x^2 + (w gamma/2)^2), x = Om^2 - w^2 - w delta: max at x = w gamma/2
  EXPECT_NEAR(0.5 * (a + b), (Om * Om - w * w - w * m.gamma() / 2) / w, 1e-6);
}

TEST(Coefficients, LargeDetuningLimit) {
  MediumParams m = medium(1);
  FieldConfig f = field(0.6 / std::sqrt(2), 0.6 / std::sqrt(2));
  double C = coupling_constant(m, f), w = 0.1, d = 500;
  QPair q = q_detuned(w, d, m, f);
  double approx = -C * d * w * w / (w * w / 4 + d * d * w * w);
  EXPECT_LT(rel(q.plus.r(), approx), 0.01);
  EXPECT_LT(rel(q.minus.r(), -approx), 0.01);
}

// ---- spectra

TEST(Spectra, EntryFace) {
  MediumParams m = medium();
  Params p = load_params(std::string(EITFLUCT_TEST_DATA) + "/table.params");
  InputNoise in{NoiseSpec::squeezed(0.4), p.noise.n2};
  FieldConfig f = field(0.7, 0.4);
  for (double w : {0.05, 0.3, 0.9})
    for (double th : lin(0, pi, 7))
      for (int j = 1; j <= 2; ++j)
        EXPECT_NEAR(spectrum_resonance(0, w, th, j, in, m, f), input_spectrum(in.field(j), w, th), 1e-13);
}

TEST(Spectra, InterchangeAndMean) {
  // lossless, alpha1 = alpha2, noisy pump and probe
  MediumParams m = medium(0);
  FieldConfig f = field(1, 1);
  InputNoise in{NoiseSpec::squeezed(0.3), NoiseSpec::squeezed(1)};
  for (double w : {0.1, 0.4, 2.0})
    for (double th : lin(0, pi, 5)) {
      QCoef Q = q_resonance(w, m, f);
      double zpi = pi / std::abs(Q.r());
      double s10 = spectrum_resonance(0, w, th, 1, in, m, f), s20 = spectrum_resonance(0, w, th, 2, in, m, f);
      EXPECT_NEAR(spectrum_resonance(zpi, w, th, 2, in, m, f), s10, 1e-10);
      EXPECT_NEAR(spectrum_resonance(zpi, w, th, 1, in, m, f), s20, 1e-10);
      double zh = zpi / 2;
      for (int j = 1; j <= 2; ++j) EXPECT_NEAR(spectrum_resonance(zh, w, th, j, in, m, f), 0.5 * (s10 + s20), 1e-10);
    }
  // with absorption the interchange error is bounded by the decay
  MediumParams ml = medium(1e-6);
  for (double w : {0.1, 0.4}) {
    QCoef Q = q_resonance(w, ml, f);
    double zpi = pi / std::abs(Q.r());
    double err = std::abs(spectrum_resonance(zpi, w, 0, 2, in, ml, f) - spectrum_resonance(0, w, 0, 1, in, ml, f));
    EXPECT_LT(err, 10 * std::abs(Q.i()) * zpi * 10);  // spectra here are O(10); bound scaled accordingly
  }
}

TEST(Spectra, DetunedContinuityAtZero) {
  MediumParams m = medium();
  FieldConfig f = field(0.5, 0.5);
  InputNoise in = squeezed_probe(1);
  double C = coupling_constant(m, f);
  double worst = 0, worst_small = 0;
  for (double zc : lin(0, 60, 20))
    for (double w : lin(0.02, 2, 20))
      for (double th : lin(0, pi, 8))
        for (int j = 1; j <= 2; ++j) {
          double z = zc / C;
          double r = spectrum_resonance(z, w, th, j, in, m, f);
          worst = std::max(worst, std::abs(spectrum_detuned(z, w, th, j, in, m, f) - r));
          FieldConfig fs = f;
          fs.delta1 = fs.delta2 = 1e-9;
          worst_small = std::max(worst_small, std::abs(spectrum_detuned(z, w, th, j, in, m, fs) - r));
        }
  EXPECT_LT(worst, 1e-10);
  EXPECT_LT(worst_small, 1e-6);
}

TEST(Spectra, RotationEquivalence) {
  MediumParams m = medium(0);
  InputNoise in = squeezed_probe(1);
  FieldConfig f = field(1, 0);
  for (double d : {0.5, 2.0, -1.5})
    for (double w : {0.1, 0.3})
      for (double z : {0.0, 0.01, 0.05, 0.2}) {
        f.delta1 = f.delta2 = d;
        Rotation r = rotation_angle(z, w, d, m, f);
        EXPECT_NEAR(spectrum_detuned(z, w, 0, 2, in, m, f), spectrum_detuned(0, w, r.vacuum_probe, 2, in, m, f),
                    1e-10);
      }
}

TEST(Spectra, Nonnegative) {
  MediumParams m = medium();
  for (double d : {0.0, 0.5, 3.0})
    for (auto om : {std::pair{0.5, 0.5}, std::pair{1.0, 0.0}, std::pair{0.3, 0.8}}) {
      FieldConfig f = field(om.first, om.second, d);
      double C = coupling_constant(m, f);
      for (double zc : lin(0, 200, 25))
        for (double w : lin(-2, 2, 24))
          for (double th : lin(0, pi, 6))
            for (int j = 1; j <= 2; ++j) EXPECT_GE(spectrum_detuned(zc / C, w, th, j, squeezed_probe(2), m, f), 0);
    }
}

TEST(Spectra, Asymptotics) {
  MediumParams m = medium();
  InputNoise in = squeezed_probe(1);
  for (double d : {0.0, 0.5})
    for (auto om : {std::pair{0.5, 0.5}, std::pair{0.6, 0.3}}) {
      FieldConfig f = field(om.first, om.second, d);
      double a1 = f.alpha1 * f.alpha1, a2 = f.alpha2 * f.alpha2, A = (a1 + a2) * (a1 + a2);
      for (double w : {0.1, 0.5, 1.5}) {
        // past the slower of the two decays (z_abs itself tracks the faster one)
        QPair q = q_detuned(w, d, m, f);
        double z = 25 / std::min(std::abs(q.plus.i()), std::abs(q.minus.i()));
        for (double th : {0.0, 0.9}) {
          double x = input_spectrum(in.n2, w, th) - 1;
          EXPECT_NEAR(spectrum_detuned(z, w, th, 1, in, m, f), 1 + a1 * a2 / A * x, 1e-8);
          EXPECT_NEAR(spectrum_detuned(z, w, th, 2, in, m, f), 1 + a2 * a2 / A * x, 1e-8);
        }
      }
    }
}

// ---- correlations

TEST(Correlations, EntryFace) {
  MediumParams m = medium();
  FieldConfig f = field(0.5, 0.5);
  InputNoise coh{};
  InputNoise in{NoiseSpec::squeezed(0.2), NoiseSpec::squeezed(1)};
  EXPECT_EQ(correlation_resonance(0, 0.3, 0.2, 0.5, coh, m, f), 0);
  EXPECT_NEAR(correlation_detuned(0, 0.3, 0.2, 0.5, coh, m, field(0.5, 0.5, 1)), 0, 1e-15);
}

// the two printed forms are implemented as given; at delta = 0 they should coincide
TEST(Correlations, PrintedDetunedReducesToPrintedResonance) {
  MediumParams m = medium();
  FieldConfig f = field(0.5, 0.5);
  InputNoise in{NoiseSpec::squeezed(0.2), NoiseSpec::squeezed(1)};
  double C = coupling_constant(m, f);
  for (double zc : lin(0, 50, 11))
    for (double w : {0.1, 0.7})
      for (double t1 : {0.0, 0.4})
        for (double t2 : {0.0, 1.1})
          EXPECT_NEAR(correlation_detuned(zc / C, w, t1, t2, in, m, f), correlation_resonance(zc / C, w, t1, t2, in, m, f),
                      1e-12);
}

TEST(Correlations, ShortAndLongDistance) {
  FieldConfig f = field(0.5, 0.5);
  InputNoise in{NoiseSpec::squeezed(0.2), NoiseSpec::squeezed(1)};
  FG n1 = in.n1.at(0), n2 = in.n2.at(0);
  MediumParams m0 = medium(0);
  for (double z : {0.001, 0.01})
    for (double t1 : {0.2, 0.9})
      for (double t2 : {0.0, 0.5}) {
        double w = 0.2, Qr = q_resonance(w, m0, f).r();
        double expect = std::sin(Qr * z) * (std::sin(t1 - t2) * (n2.f - n1.f) + std::sin(t1 + t2) * (n1.g - n2.g));
        EXPECT_NEAR(correlation_resonance(z, w, t1, t2, in, m0, f), expect, 1e-12);
      }
  MediumParams m = medium(1);
  for (double d : {0.0, 0.5}) {
    FieldConfig fd = field(0.5, 0.5, d);
    QPair q = q_detuned(0.3, d, m, fd);
    double w = 0.3, z = 40 / std::min(std::abs(q.plus.i()), std::abs(q.minus.i())), t1 = 0.3, t2 = 0.8;
    double plateau = 0.5 * (std::cos(t1 - t2) * (n1.f + n2.f) + std::cos(t1 + t2) * (n1.g + n2.g));
    double got = d == 0 ? correlation_resonance(z, w, t1, t2, in, m, fd) : correlation_detuned(z, w, t1, t2, in, m, fd);
    EXPECT_NEAR(got, plateau, 1e-10);
  }
}

TEST(Correlations, RegimeGuards) {
  MediumParams m = medium();
  EXPECT_THROW(correlation_resonance(1, 0.1, 0, 0, {}, m, field(0.5, 0.3)), regime_error);
  EXPECT_THROW(correlation_detuned(1, 0.1, 0, 0, {}, m, field(0.5, 0.3, 1)), regime_error);
  InputNoise noisy{NoiseSpec::squeezed(1), NoiseSpec::squeezed(1)};
  EXPECT_THROW(spectrum_detuned(1, 0.1, 0, 1, noisy, m, field(0.5, 0.5, 1)), regime_error);
  FieldConfig f = field(0.5, 0.5);
  f.delta2 = 0.1;
  EXPECT_THROW(spectrum_detuned(1, 0.1, 0, 1, {}, m, f), regime_error);
}

TEST(Correlations, ExactIsRealAtZeroAndHasCommonPlateau) {
  MediumParams m = medium();
  InputNoise in{NoiseSpec::squeezed(0.2), NoiseSpec::squeezed(1)};
  EXPECT_NEAR(std::abs(correlation_exact(0, 0.3, 0.2, 0.7, in, m, field(0.5, 0.5))), 0, 1e-15);
  FieldConfig f = field(0.5, 0.5, 0.5);
  QPair q = q_detuned(0.3, 0.5, m, f);
  double z = 40 / std::min(std::abs(q.plus.i()), std::abs(q.minus.i()));
  cplx x = correlation_exact(z, 0.3, 0.2, 0.7, in, m, f);
  EXPECT_NEAR(x.real(), correlation_detuned(z, 0.3, 0.2, 0.7, in, m, f), 1e-10);
  EXPECT_NEAR(x.imag(), 0, 1e-10);
}

TEST(PhaseDifference, DecaysFromEntryValue) {
  MediumParams m = medium();
  FieldConfig f = field(0.5, 0.5);
  InputNoise in{NoiseSpec::squeezed(0.5), NoiseSpec::squeezed(1)};
  PhaseDifference p0 = phase_difference_spectrum(0, 0.2, in, m, f);
  EXPECT_NEAR(p0.from_components, p0.printed, 1e-15);
  EXPECT_THROW(phase_difference_spectrum(1, 0.2, in, m, field(0.5, 0.2)), regime_error);
}

// ---- rotation, diagnostics, isotropy, large detuning

TEST(Rotation, TrivialCases) {
  MediumParams m = medium();
  FieldConfig f = field(0.5, 0.5, 0.7);
  Rotation r0 = rotation_angle(0, 0.2, 0.7, m, f);
  EXPECT_EQ(r0.vacuum_probe, 0);
  EXPECT_EQ(r0.theta_min_printed, 0);
  for (double z : {0.1, 1.0, 5.0}) EXPECT_NEAR(rotation_angle(z, 0.2, 0, m, field(0.5, 0.5)).vacuum_probe, 0, 1e-15);
}

TEST(Rotation, BranchCorrectedMinimumIsTheArgmin) {
  MediumParams m = medium(0);
  InputNoise in = squeezed_probe(1);
  for (double d : {0.5, 2.0})
    for (double z : {0.003, 0.02, 0.07}) {
      FieldConfig f = field(0.5, 0.5, d);
      double w = 0.15;
      Rotation r = rotation_angle(z, w, d, m, f);
      double best = INFINITY, arg = 0;
      for (double th : lin(0, pi, 20001)) {
        double s = spectrum_detuned(z, w, th, 2, in, m, f);
        if (s < best) best = s, arg = th;
      }
      double diff = std::remainder(arg - r.theta_min, pi);
      EXPECT_LT(std::abs(diff), 2e-4) << "d=" << d << " z=" << z;
      EXPECT_NEAR(std::remainder(r.theta_max - r.theta_min - pi / 2, pi), 0, 1e-12);
    }
}

TEST(Diagnostics, RatioAndRoots) {
  MediumParams m = medium(1);
  double w = 0.1, om2 = w * w + 2.02 * pi * w;
  FieldConfig f = field(std::sqrt(om2 / 2), std::sqrt(om2 / 2));
  Diagnostics g = diagnostics(w, 0, m, f);
  EXPECT_NEAR(g.ratio_formula, 2.02, 1e-12);
  EXPECT_NEAR(g.ratio_abs_osc, 2.02, 1e-12);
  EXPECT_FALSE(g.window_defined);
  EXPECT_TRUE(std::isnan(g.window));
  FieldConfig f1 = field(0.6, 0);
  Diagnostics g0 = diagnostics(w, 0, m, f1);
  EXPECT_NEAR(g0.roots_atomic[3], 0.6, 1e-14);
  EXPECT_NEAR(g0.roots_atomic[0], -0.6, 1e-14);
  Diagnostics g3 = diagnostics(w, 3, m, field(0.6 / std::sqrt(2), 0.6 / std::sqrt(2), 3));
  EXPECT_NEAR(g3.window, 0.24, 1e-12);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g3.roots_carrier[i], g3.roots_atomic[i] - 3, 1e-14);
  EXPECT_TRUE(std::isinf(diagnostics(w, 0, m, f).z_int));
}

TEST(Isotropy, QuadraturesAgreeAtTheDistances) {
  MediumParams m = medium(0);
  double xi = 2, w = 0.1, d = 2;
  FieldConfig f = field(0.6 / std::sqrt(2), 0.6 / std::sqrt(2), d);
  InputNoise in = squeezed_probe(xi);
  for (int k : {0, 1, 3}) {
    Isotropy iso = isotropy_distances(k, w, d, xi, m, f);
    double lo = INFINITY, hi = -INFINITY;
    for (double th : lin(0, pi, 64)) {
      double s = spectrum_detuned(iso.z2p, w, th, 2, in, m, f);
      lo = std::min(lo, s), hi = std::max(hi, s);
    }
    EXPECT_LT(hi - lo, 1e-9 * hi);
    EXPECT_NEAR(spectrum_detuned(iso.z2p, w, 0.4, 2, in, m, f), iso.value_p, 1e-9 * hi);
  }
  Isotropy i0 = isotropy_distances(0, w, d, xi, m, f);
  EXPECT_EQ(i0.z1p, 0);
  EXPECT_NEAR(spectrum_detuned(0, w, 0.2, 1, in, m, f), spectrum_detuned(0, w, 1.3, 1, in, m, f), 1e-15);
}

double large_detuning_worst(double d) {
  MediumParams m = medium(1);
  double xi = 1, w = 0.1;
  FieldConfig f = field(0.6 / std::sqrt(2), 0.6 / std::sqrt(2), d);
  double worst = 0;
  InputNoise in = squeezed_probe(xi);
  // one oscillation of the pump-probe exchange
  for (double z : lin(0, 2 * pi / std::abs(q_detuned(w, d, m, f).plus.r()), 60)) {
    LargeDetuning a = large_detuning_spectrum(z, w, d, xi, m, f);
    EXPECT_TRUE(a.warning.empty()) << a.warning;
    worst = std::max({worst, rel(a.S2, spectrum_detuned(z, w, 0, 2, in, m, f)),
                      rel(a.S1, spectrum_detuned(z, w, 0, 1, in, m, f))});
  }
  return worst;
}

TEST(LargeDetuning, Limits) {
  MediumParams m = medium(1);
  double xi = 1, w = 0.1, d = 50;
  FieldConfig f = field(0.6 / std::sqrt(2), 0.6 / std::sqrt(2), d);
  LargeDetuning z0 = large_detuning_spectrum(0, w, d, xi, m, f);
  EXPECT_NEAR(z0.S2, std::exp(-2 * xi), 1e-15);
  QPair q = q_detuned(w, d, m, f);
  EXPECT_NEAR(large_detuning_spectrum(pi / q.plus.r(), w, d, xi, m, f).S2, 1, 1e-12);
  double zabs = diagnostics(w, d, m, f).z_abs;
  EXPECT_FALSE(large_detuning_spectrum(0.5 * zabs, 1, 0.5, xi, m, field(0.5, 0.5, 0.5)).warning.empty());
}

TEST(LargeDetuning, WithinTwoPercentAtDelta50) { EXPECT_LT(large_detuning_worst(50), 0.02); }

TEST(LargeDetuning, ErrorShrinksDeeperInRegime) {
  double a = large_detuning_worst(800), b = large_detuning_worst(5000);
  EXPECT_LT(b, a / 3);
  EXPECT_LT(b, 0.02);
}
