#pragma once
// named figure-data experiments behind the cli

#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "closed_form.hpp"
#include "csv.hpp"
#include "doppler.hpp"
#include "langevin.hpp"
#include "parallel.hpp"

namespace eitfluct {

struct Range {
  double a = 0, b = 0;
  int n = 1;
  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
  }
  void check(const char* what) const {
    if (n < 1) throw param_error(std::string(what) + ": count must be >= 1");
    if (!std::isfinite(a) || !std::isfinite(b)) throw param_error(std::string(what) + ": range must be finite");
  }
};

enum class Engine { closed_form, langevin, both };

inline Engine parse_engine(const std::string& s) {
  if (s == "closed-form") return Engine::closed_form;
  if (s == "langevin") return Engine::langevin;
  if (s == "both") return Engine::both;
  throw param_error("--engine: expected closed-form, langevin or both, got '" + s + "'");
}
inline const char* engine_name(Engine e) {
  return e == Engine::closed_form ? "closed-form" : e == Engine::langevin ? "langevin" : "both";
}

// grid values are in units of gamma (rates) and z C / gamma (lengths)
struct ExperimentSpec {
  std::string name;
  std::string params_path;
  std::string out_dir;
  Engine engine = Engine::closed_form;
  Range z{0, 100, 201};
  Range omega{0.1, 0.1, 1};
  std::vector<double> theta{0.0};
  std::vector<double> theta2{0.0};
  std::optional<std::vector<double>> delta;  // default: delta1 from the parameter file
  std::vector<double> widths{0.01, 0.1, 0.25, 0.5};
  std::vector<double> delta1{0.0, 1.0};
  Range delta2{-3, 3, 601};
  bool exact_chi = false;
  DopplerConfig doppler{0, 2001, 5, false, true, DopplerConfig::Rule::uniform};
  bool doppler_refine = true;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline double unit(const MediumParams& m) { return m.gamma() > 0 ? m.gamma() : 1.0; }

inline ojson manifest_base(const ExperimentSpec& s, const Params& p) {
  ojson j;
  j["program"] = "eitfluct";
  j["version"] = version;
  j["experiment"] = s.name;
  j["engine"] = engine_name(s.engine);
  j["params_file"] = s.params_path;
  const auto& m = p.medium;
  const auto& f = p.field;
  j["medium"] = {{"gamma1", m.gamma1}, {"gamma2", m.gamma2}, {"gamma12", m.gamma12}, {"g1", m.g1},
                 {"g2", m.g2},         {"N", m.N},           {"L", m.L},             {"c", m.c}};
  j["field"] = {{"delta1", f.delta1}, {"delta2", f.delta2}, {"alpha1", f.alpha1}, {"alpha2", f.alpha2}};
  j["noise"] = {{"noise1", p.noise.n1.describe()}, {"noise2", p.noise.n2.describe()}};
  ojson d = {{"gamma", m.gamma()}, {"frequency_unit", unit(m)}, {"Omega1", f.omega1(m)}, {"Omega2", f.omega2(m)},
             {"Omega", f.omega(m)}};
  if (f.omega(m) > 0) d["C"] = coupling_constant(m, f);
  j["derived"] = d;
  j["units"] = {{"rates", "gamma = gamma1 + gamma2 (1 if gamma = 0)"}, {"lengths", "z C / gamma"}};
  return j;
}

inline ojson range_json(const Range& r) { return {{"start", r.a}, {"stop", r.b}, {"count", r.n}}; }

inline std::string tag(double x) {
  std::string s = fmt17(x);
  for (auto& ch : s)
    if (ch == '-') ch = 'm';
  return s;
}

struct Runner {
  const ExperimentSpec& s;
  Params p;
  ojson man;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;

  Runner(const ExperimentSpec& spec) : s(spec), p(load_params(spec.params_path)) {
    man = manifest_base(s, p);
    s.z.check("z grid");
    s.omega.check("omega grid");
    if (s.theta.empty()) throw param_error("--theta: list must be non-empty");
  }

  void emit(const std::string& file, const Table& t) {
    write_csv(s.out_dir + "/" + file, t);
    outputs.push_back(file);
  }
  void note(const std::string& n) {
    notes.push_back(n);
    std::cerr << "note: " << n << "\n";
  }
  void finish() {
    man["outputs"] = outputs;
    man["notes"] = notes;
    std::ofstream os(s.out_dir + "/manifest.json", std::ios::binary);
    if (!os) throw param_error("cannot write manifest in " + s.out_dir);
    os << man.dump(2) << "\n";
  }

  double z_of(double zc, const FieldConfig& f) const { return zc * unit(p.medium) / coupling_constant(p.medium, f); }

  std::vector<double> deltas() const {
    if (s.delta) {
      if (s.delta->empty()) throw param_error("--delta: list must be non-empty");
      return *s.delta;
    }
    if (p.field.delta1 != p.field.delta2)
      throw param_error("delta1 != delta2 in the parameter file; give --delta or use the langevin engine directly");
    return {p.field.delta1 / unit(p.medium)};
  }

  // per (omega, delta) block of rows, run in parallel, assembled in order
  template <class F>
  Table blocks(std::vector<std::string> cols, size_t nblocks, F&& fn) {
    std::vector<std::vector<std::vector<double>>> parts(nblocks);
    parallel_for(nblocks, [&](size_t i) { parts[i] = fn(i); });
    Table t{std::move(cols), {}};
    for (auto& b : parts)
      for (auto& r : b) t.rows.push_back(std::move(r));
    return t;
  }

  void spectra(bool detuned) {
    const auto& m = p.medium;
    double u = unit(m);
    std::vector<double> ds = detuned ? deltas() : std::vector<double>{0.0};
    if (!detuned && (p.field.delta1 != 0 || p.field.delta2 != 0))
      throw param_error("resonance-spectra needs delta1 = delta2 = 0 in the parameter file; use detuned-spectra");
    Engine e = s.engine;
    if (detuned && e == Engine::closed_form) {
      auto n1 = p.noise.n1;
      bool noisy = false;
      for (double w : s.omega.values()) {
        FG v = n1.at(w * u);
        noisy = noisy || v.f != 0 || v.g != 0;
      }
      if (noisy) {
        note("closed-form detuned spectra need a coherent pump; routed to the langevin engine");
        e = Engine::langevin;
      }
    }
    bool cf = e != Engine::langevin, lv = e != Engine::closed_form;
    if (detuned && e == Engine::both && !p.noise.n1.is_coherent())
      throw regime_error("closed-form detuned spectra need a coherent pump; use --engine langevin");
    std::vector<std::string> cols = {"omega_over_gamma"};
    if (detuned) cols.push_back("delta_over_gamma");
    for (auto c : {"theta_rad", "z_C_over_gamma"}) cols.push_back(c);
    // single engine: neutral names, so runs of different engines diff directly
    for (int j = 1; j <= 2; ++j) {
      std::string sj = "S" + std::to_string(j);
      if (cf && lv) {
        cols.push_back(sj + "_closed_form");
        cols.push_back(sj + "_langevin");
      } else {
        cols.push_back(sj);
      }
    }
    if (cf && lv) {
      cols.push_back("max_abs_diff");
      cols.push_back("max_rel_diff");
    }
    auto ws = s.omega.values();
    auto zs = s.z.values();
    Table t = blocks(cols, ds.size() * ws.size(), [&](size_t b) {
      double d = ds[b / ws.size()], w = ws[b % ws.size()];
      FieldConfig f = p.field;
      f.delta1 = f.delta2 = d * u;
      std::optional<Propagator> prop;
      if (lv) prop.emplace(m, f, w * u);
      std::vector<std::vector<double>> rows;
      for (double th : s.theta)
        for (double zc : zs) {
          double z = z_of(zc, f);
          std::vector<double> r = {w};
          if (detuned) r.push_back(d);
          r.push_back(th);
          r.push_back(zc);
          double ma = 0, mr = 0;
          for (int j = 1; j <= 2; ++j) {
            double a = 0, bb = 0;
            if (cf) {
              a = detuned ? spectrum_detuned(z, w * u, th, j, p.noise, m, f)
                          : spectrum_resonance(z, w * u, th, j, p.noise, m, f);
              r.push_back(a);
            }
            if (lv) {
              bb = spectrum(*prop, z, th, j, p.noise);
              r.push_back(bb);
            }
            ma = std::max(ma, std::abs(a - bb));
            mr = std::max(mr, std::abs(a - bb) / std::max(std::abs(a), std::abs(bb)));
          }
          if (cf && lv) {
            r.push_back(ma);
            r.push_back(mr);
          }
          rows.push_back(std::move(r));
        }
      return rows;
    });
    man["grids"] = {{"omega_over_gamma", range_json(s.omega)}, {"z_C_over_gamma", range_json(s.z)},
                    {"theta_rad", s.theta}};
    if (detuned) man["grids"]["delta_over_gamma"] = ds;
    man["engine_used"] = engine_name(e);
    emit(detuned ? "detuned_spectra.csv" : "resonance_spectra.csv", t);
  }

  void correlations() {
    const auto& m = p.medium;
    double u = unit(m);
    auto ds = deltas();
    if (s.theta2.empty()) throw param_error("--theta2: list must be non-empty");
    bool cf = s.engine != Engine::langevin, lv = s.engine != Engine::closed_form;
    bool sym = detail::same(p.field.alpha1, p.field.alpha2) && detail::same(m.g1, m.g2);
    if (cf && !sym) {
      if (s.engine == Engine::both || !lv)
        note("closed-form correlations need alpha1 = alpha2 and g1 = g2; closed-form columns are nan");
    }
    std::vector<std::string> cols = {"omega_over_gamma", "delta_over_gamma", "theta1_rad", "theta2_rad",
                                     "z_C_over_gamma"};
    if (cf) {
      cols.push_back("Sc_printed");
      cols.push_back("Sc_exact_re");
      cols.push_back("Sc_exact_im");
    }
    if (lv) {
      cols.push_back("Sc_langevin_re");
      cols.push_back("Sc_langevin_im");
    }
    auto ws = s.omega.values();
    auto zs = s.z.values();
    Table t = blocks(cols, ds.size() * ws.size(), [&](size_t b) {
      double d = ds[b / ws.size()], w = ws[b % ws.size()];
      FieldConfig f = p.field;
      f.delta1 = f.delta2 = d * u;
      std::optional<Propagator> prop;
      if (lv) prop.emplace(m, f, w * u);
      std::vector<std::vector<double>> rows;
      for (double t1 : s.theta)
        for (double t2 : s.theta2)
          for (double zc : zs) {
            double z = z_of(zc, f);
            std::vector<double> r = {w, d, t1, t2, zc};
            if (cf) {
              if (sym) {
                r.push_back(d == 0 ? correlation_resonance(z, w * u, t1, t2, p.noise, m, f)
                                   : correlation_detuned(z, w * u, t1, t2, p.noise, m, f));
                cplx x = correlation_exact(z, w * u, t1, t2, p.noise, m, f);
                r.push_back(x.real());
                r.push_back(x.imag());
              } else {
                r.insert(r.end(), {NAN, NAN, NAN});
              }
            }
            if (lv) {
              cplx x = correlation(*prop, z, t1, t2, p.noise);
              r.push_back(x.real());
              r.push_back(x.imag());
            }
            rows.push_back(std::move(r));
          }
      return rows;
    });
    man["grids"] = {{"omega_over_gamma", range_json(s.omega)}, {"z_C_over_gamma", range_json(s.z)},
                    {"theta1_rad", s.theta}, {"theta2_rad", s.theta2}, {"delta_over_gamma", ds}};
    emit("correlations.csv", t);
  }

  void diagnostics_run() {
    const auto& m = p.medium;
    double u = unit(m);
    auto ds = deltas();
    auto ws = s.omega.values();
    FieldConfig f = p.field;
    double C = coupling_constant(m, f);
    double zu = C / u;  // length -> z C / gamma
    Table t{{"delta_over_gamma", "omega_over_gamma", "Qp_r", "Qp_i", "Qm_r", "Qm_i", "abs_Qp_i_plus_Qm_i",
             "z_abs_C_over_gamma", "z_osc_C_over_gamma", "z_int_C_over_gamma", "ratio_abs_osc", "ratio_formula"},
            {}};
    Table roots{{"delta_over_gamma", "root1_atomic", "root2_atomic", "root3_atomic", "root4_atomic",
                 "root1_carrier", "root2_carrier", "root3_carrier", "root4_carrier", "window_2Omega2_over_delta"},
                {}};
    for (double d : ds) {
      for (double w : ws) {
        f.delta1 = f.delta2 = d * u;
        Diagnostics g = diagnostics(w * u, d * u, m, f);
        t.rows.push_back({d, w, g.q.plus.r() / C, g.q.plus.i() / C, g.q.minus.r() / C, g.q.minus.i() / C,
                          std::abs(g.q.plus.i() + g.q.minus.i()) / C, g.z_abs * zu, g.z_osc * zu, g.z_int * zu,
                          g.ratio_abs_osc, g.ratio_formula});
      }
      Diagnostics g = diagnostics(ws.front() * u, d * u, m, f);
      std::vector<double> r = {d};
      for (double x : g.roots_atomic) r.push_back(x / u);
      for (double x : g.roots_carrier) r.push_back(x / u);
      r.push_back(g.window / u);
      roots.rows.push_back(r);
    }
    man["grids"] = {{"omega_over_gamma", range_json(s.omega)}, {"delta_over_gamma", ds}};
    man["columns_note"] = "Q columns are in units of C (Q / C); lengths in z C / gamma";
    emit("diagnostics.csv", t);
    emit("diagnostics_roots.csv", roots);
  }

  void susceptibility_run() {
    const auto& m = p.medium;
    double u = unit(m);
    auto d2 = s.delta2.values();
    s.delta2.check("delta2 grid");
    if (s.delta1.empty()) throw param_error("--delta1: list must be non-empty");
    std::vector<double> d2r;
    for (double x : d2) d2r.push_back(x * u);
    std::vector<std::string> cols = {"delta2_over_gamma"};
    for (double d1 : s.delta1) {
      cols.push_back("re_chi_delta1_" + tag(d1));
      cols.push_back("im_chi_delta1_" + tag(d1));
    }
    std::vector<std::vector<Susceptibility>> res(s.delta1.size());
    parallel_for(s.delta1.size(),
                 [&](size_t i) { res[i] = susceptibility(d2r, s.delta1[i] * u, m, p.field, !s.exact_chi); });
    Table t{cols, {}};
    for (size_t k = 0; k < d2.size(); ++k) {
      std::vector<double> r = {d2[k]};
      for (auto& v : res) {
        r.push_back(v[k].chi.real());
        r.push_back(v[k].chi.imag());
      }
      t.rows.push_back(r);
    }
    man["grids"] = {{"delta2_over_gamma", range_json(s.delta2)}, {"delta1_over_gamma", s.delta1}};
    man["susceptibility"] = {{"mode", s.exact_chi ? "exact steady state" : "weak probe, first order"},
                             {"normalization", "chi = -<sigma_2e> / Omega2, arbitrary overall constant"}};
    emit("susceptibility.csv", t);
  }

  void doppler_run() {
    const auto& m = p.medium;
    double u = unit(m);
    if (s.widths.empty()) throw param_error("--widths: list must be non-empty");
    DopplerConfig dc = s.doppler;
    auto ws = s.omega.values();
    auto zc = s.z.values();
    std::vector<double> zs;
    for (double x : zc) zs.push_back(z_of(x, p.field));
    double th = s.theta.front();
    Table t{{"omega_over_gamma", "doppler_width_over_gamma", "z_C_over_gamma", "S1", "S2", "S1_refined",
             "S2_refined"},
            {}};
    ojson conv = ojson::array();
    for (double w : ws)
      for (double dd : s.widths) {
        dc.width = dd * (dc.width_is_variance ? u * u : u);
        dc.validate();
        ClassSet cs = build_classes(w * u, m, p.field, dc);
        auto s1 = doppler_curve(cs, zs, w * u, th, 1, p.noise), s2 = doppler_curve(cs, zs, w * u, th, 2, p.noise);
        std::vector<double> r1 = s1, r2 = s2;
        double change = 0;
        if (s.doppler_refine && dc.sigma() > 0) {
          DopplerConfig d2 = dc;
          d2.nodes = dc.rule == DopplerConfig::Rule::uniform ? 2 * dc.nodes - 1 : 2 * dc.nodes;
          ClassSet c2 = build_classes(w * u, m, p.field, d2);
          r1 = doppler_curve(c2, zs, w * u, th, 1, p.noise);
          r2 = doppler_curve(c2, zs, w * u, th, 2, p.noise);
          for (size_t i = 0; i < zs.size(); ++i)
            change = std::max({change, std::abs(r1[i] - s1[i]) / std::abs(r1[i]),
                               std::abs(r2[i] - s2[i]) / std::abs(r2[i])});
          if (change > 1e-3) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "doppler quadrature not converged at omega=%g width=%g: n vs refined max rel change %.3g",
                          w, dd, change);
            note(buf);
          }
        }
        conv.push_back({{"omega_over_gamma", w}, {"width_over_gamma", dd}, {"max_rel_change", change}});
        for (size_t i = 0; i < zs.size(); ++i) t.rows.push_back({w, dd, zc[i], s1[i], s2[i], r1[i], r2[i]});
      }
    man["grids"] = {{"omega_over_gamma", range_json(s.omega)}, {"z_C_over_gamma", range_json(s.z)},
                    {"theta_rad", th}, {"widths_over_gamma", s.widths}};
    man["doppler"] = {{"rule", dc.rule == DopplerConfig::Rule::uniform ? "uniform" : "gauss-hermite"},
                      {"nodes", dc.nodes},
                      {"truncation_sigma", dc.truncation},
                      {"width_is_variance", dc.width_is_variance},
                      {"frame_shift", dc.frame_shift},
                      {"refine_check", s.doppler_refine},
                      {"convergence", conv}};
    emit("doppler.csv", t);
  }
};

}  // namespace detail

// returns normally on success; throws param_error / regime_error (usage) or numeric_error
inline void run_experiment(const ExperimentSpec& s) {
  if (s.out_dir.empty()) throw param_error("--out is required");
  std::filesystem::create_directories(s.out_dir);
  detail::Runner r(s);
  if (s.name == "susceptibility")
    r.susceptibility_run();
  else if (s.name == "resonance-spectra")
    r.spectra(false);
  else if (s.name == "detuned-spectra")
    r.spectra(true);
  else if (s.name == "correlations")
    r.correlations();
  else if (s.name == "diagnostics")
    r.diagnostics_run();
  else if (s.name == "doppler")
    r.doppler_run();
  else
    throw param_error("unknown experiment '" + s.name + "'");
  r.finish();
}

}  // namespace eitfluct
