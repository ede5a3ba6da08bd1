// eitfluct: batch front-end writing figure data as csv + manifest.json

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "eitfluct/experiments.hpp"

using namespace eitfluct;

namespace {

struct Opts {
  std::string params, out, engine = "closed-form";
  std::vector<double> z_range, omega_range, delta2_range;
  int z_count = -1, omega_count = -1, delta2_count = -1;
  std::vector<double> theta, theta2, delta, widths, delta1;
  int nodes = -1;
  std::string rule = "uniform";
  double truncation = 5;
  bool no_shift = false, variance = false, exact = false, no_refine = false;
};

void add_common(CLI::App* c, Opts& o) {
  c->add_option("--params", o.params, "parameter file (key = value)")->required();
  c->add_option("--out", o.out, "output directory")->required();
  c->add_option("--engine", o.engine, "closed-form | langevin | both");
}
void add_grid(CLI::App* c, Opts& o) {
  c->add_option("--z-range", o.z_range, "z C / gamma start stop")->expected(2);
  c->add_option("--z-count", o.z_count, "number of z points");
  c->add_option("--omega-range", o.omega_range, "omega / gamma start stop")->expected(2);
  c->add_option("--omega-count", o.omega_count, "number of omega points");
  c->add_option("--theta", o.theta, "quadrature angles (rad)");
}

Range range_of(const char* opt, const std::vector<double>& r, int n, Range def) {
  if (!r.empty()) def.a = r[0], def.b = r[1];
  if (n >= 0) def.n = n;
  if (r.empty() && n >= 0 && n != 1 && def.a == def.b)
    throw param_error(std::string(opt) + "-count > 1 needs " + opt + "-range");
  return def;
}

ExperimentSpec to_spec(const std::string& name, const Opts& o) {
  ExperimentSpec s;
  s.name = name;
  s.params_path = o.params;
  s.out_dir = o.out;
  s.engine = parse_engine(o.engine);
  s.z = range_of("--z", o.z_range, o.z_count, s.z);
  s.omega = range_of("--omega", o.omega_range, o.omega_count, s.omega);
  s.delta2 = range_of("--delta2", o.delta2_range, o.delta2_count, s.delta2);
  if (!o.theta.empty()) s.theta = o.theta;
  if (!o.theta2.empty()) s.theta2 = o.theta2;
  if (!o.delta.empty()) s.delta = o.delta;
  if (!o.widths.empty()) s.widths = o.widths;
  if (!o.delta1.empty()) s.delta1 = o.delta1;
  s.exact_chi = o.exact;
  if (o.rule == "uniform")
    s.doppler.rule = DopplerConfig::Rule::uniform;
  else if (o.rule == "gauss-hermite")
    s.doppler.rule = DopplerConfig::Rule::gauss_hermite, s.doppler.nodes = 32;
  else
    throw param_error("--doppler-rule: expected uniform or gauss-hermite, got '" + o.rule + "'");
  if (o.nodes >= 0) s.doppler.nodes = o.nodes;
  s.doppler.truncation = o.truncation;
  s.doppler.frame_shift = !o.no_shift;
  s.doppler.width_is_variance = o.variance;
  s.doppler_refine = !o.no_refine;
  s.doppler.validate();
  return s;
}

int run_diff(const std::string& a, const std::string& b, double tol, const std::vector<std::string>& only) {
  Table ta = read_csv(a), tb = read_csv(b);
  if (!only.empty()) {
    auto pick = [&](const Table& t, const std::string& file) {
      Table r{only, std::vector<std::vector<double>>(t.rows.size())};
      for (auto& name : only) {
        auto it = std::find(t.cols.begin(), t.cols.end(), name);
        if (it == t.cols.end()) throw param_error(file + ": no column '" + name + "'");
        size_t k = it - t.cols.begin();
        for (size_t i = 0; i < t.rows.size(); ++i) r.rows[i].push_back(t.rows[i][k]);
      }
      return r;
    };
    ta = pick(ta, a);
    tb = pick(tb, b);
  }
  bool ok = true;
  std::printf("%-28s %-24s %-24s %s\n", "column", "max_abs", "max_rel", "status");
  for (auto& d : diff_tables(ta, tb, tol)) {
    std::printf("%-28s %-24s %-24s %s\n", d.name.c_str(), fmt17(d.max_abs).c_str(), fmt17(d.max_rel).c_str(),
                d.ok ? "ok" : "FAIL");
    ok = ok && d.ok;
  }
  std::printf("%s (tol %s, %zu rows)\n", ok ? "within tolerance" : "OUT OF TOLERANCE", fmt17(tol).c_str(),
              ta.rows.size());
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadrature-noise spectra of pump and probe fields in a lambda-type EIT medium"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));
  Opts o;
  std::map<std::string, CLI::App*> subs;

  auto* c = app.add_subcommand("susceptibility", "probe susceptibility over a delta2 scan");
  add_common(c, o);
  c->add_option("--delta1", o.delta1, "pump detunings / gamma");
  c->add_option("--delta2-range", o.delta2_range, "delta2 / gamma start stop")->expected(2);
  c->add_option("--delta2-count", o.delta2_count, "number of delta2 points");
  c->add_flag("--exact", o.exact, "exact steady state instead of first order in the probe");
  subs["susceptibility"] = c;

  for (auto [n, d] : {std::pair{"resonance-spectra", "S1, S2 at two-photon resonance, delta = 0"},
                      std::pair{"detuned-spectra", "S1, S2 with delta1 = delta2 = delta"}}) {
    c = app.add_subcommand(n, d);
    add_common(c, o);
    add_grid(c, o);
    if (std::string(n) == "detuned-spectra") c->add_option("--delta", o.delta, "detunings / gamma");
    subs[n] = c;
  }

  c = app.add_subcommand("correlations", "pump-probe correlation spectrum");
  add_common(c, o);
  add_grid(c, o);
  c->add_option("--theta2", o.theta2, "probe quadrature angles (rad)");
  c->add_option("--delta", o.delta, "detunings / gamma");
  subs["correlations"] = c;

  c = app.add_subcommand("diagnostics", "propagation coefficients, length scales, absorption roots");
  add_common(c, o);
  c->add_option("--omega-range", o.omega_range, "omega / gamma start stop")->expected(2);
  c->add_option("--omega-count", o.omega_count, "number of omega points");
  c->add_option("--delta", o.delta, "detunings / gamma");
  subs["diagnostics"] = c;

  c = app.add_subcommand("doppler", "Doppler-averaged spectra");
  add_common(c, o);
  add_grid(c, o);
  c->add_option("--widths", o.widths, "Doppler widths / gamma");
  c->add_option("--doppler-rule", o.rule, "uniform | gauss-hermite");
  c->add_option("--doppler-nodes", o.nodes, "nodes per axis");
  c->add_option("--doppler-truncation", o.truncation, "keep nodes within +- this many widths");
  c->add_flag("--no-frame-shift", o.no_shift, "do not move omega with the class detuning");
  c->add_flag("--width-is-variance", o.variance, "read widths as variances");
  c->add_flag("--no-refine", o.no_refine, "skip the 2n-node convergence run");
  subs["doppler"] = c;

  std::string fa, fb;
  double tol = 1e-6;
  std::vector<std::string> only;
  auto* dc = app.add_subcommand("diff", "compare two csv files column by column");
  dc->add_option("file_a", fa)->required();
  dc->add_option("file_b", fb)->required();
  dc->add_option("--tol", tol, "tolerance, |a-b| <= tol * max(1,|a|,|b|)");
  dc->add_option("--columns", only, "compare only these columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (dc->parsed()) return run_diff(fa, fb, tol, only);
    for (auto& [name, sub] : subs)
      if (sub->parsed()) {
        run_experiment(to_spec(name, o));
        return 0;
      }
  } catch (const numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const param_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const regime_error& e) {
    std::cerr << "unsupported regime: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
