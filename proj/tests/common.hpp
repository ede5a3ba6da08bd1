#pragma once
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "eitfluct/medium.hpp"

namespace tst {
using namespace eitfluct;

inline MediumParams medium(double gamma = 1, double g = 0.1, double N = 1e4) {
  MediumParams m;
  m.gamma1 = m.gamma2 = gamma / 2;
  m.g1 = m.g2 = g;
  m.N = N;
  return m;
}
// alpha from a Rabi frequency at coupling g
inline FieldConfig field(double om1, double om2, double delta = 0, double g = 0.1) {
  FieldConfig f;
  f.alpha1 = om1 / g;
  f.alpha2 = om2 / g;
  f.delta1 = f.delta2 = delta;
  return f;
}
inline InputNoise squeezed_probe(double xi) { return {NoiseSpec::coherent(), NoiseSpec::squeezed(xi)}; }

inline std::vector<double> lin(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}
inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }
}  // namespace tst
