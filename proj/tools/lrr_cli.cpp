// Command-line front end: every subcommand is a thin composition of library
// calls plus artifact emission. Exit codes: 0 success, 1 failure, 2 honest
// inapplicability of a requested hypothesis, 3 numerical instability,
// 64 malformed configuration.

#include <CLI11.hpp>
#include <random>
#include <sstream>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "lrr/io.hpp"
#include "lrr/liouville.hpp"
#include "lrr/models.hpp"
#include "lrr/oracle.hpp"
#include "lrr/spectral.hpp"

using namespace lrr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInapplicable = 2;
constexpr int kExitInstability = 3;
constexpr int kExitConfig = 64;

double parse_p(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF")
    return std::numeric_limits<double>::infinity();
  try {
    return std::stod(s);
  } catch (...) {
    throw ConfigError("cannot parse p: " + s);
  }
}

std::vector<Quasimomentum> parse_ks(const std::string& s) {
  std::vector<Quasimomentum> ks;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(';', pos);
    if (end == std::string::npos) end = s.size();
    std::string point = s.substr(pos, end - pos);
    std::vector<double> comps;
    std::size_t p2 = 0;
    while (p2 <= point.size()) {
      std::size_t c2 = point.find(',', p2);
      if (c2 == std::string::npos) c2 = point.size();
      std::string tok = point.substr(p2, c2 - p2);
      if (!tok.empty()) comps.push_back(std::stod(tok));
      p2 = c2 + 1;
    }
    if (!comps.empty()) {
      RealVector k = Eigen::Map<RealVector>(comps.data(), comps.size());
      ks.emplace_back(k);
    }
    pos = end + 1;
  }
  if (ks.empty()) throw ConfigError("--ks: no quasimomenta parsed");
  for (const auto& k : ks)
    if (k.d() != ks[0].d()) throw ConfigError("--ks: mixed dimensions");
  return ks;
}

struct Common {
  std::string op_path;
  std::string divisor_path;
  std::string outdir = ".";
  double level = 0.0;
  int grid = 33;
};

std::string artifact(const Common& c, const std::string& name) {
  return c.outdir + "/" + name;
}

PeriodicLatticeOperator load_op(const Common& c) {
  if (c.op_path.empty()) throw ConfigError("--op is required");
  return operator_from_json(read_json(c.op_path));
}

RiggedPointDivisor load_divisor(const Common& c) {
  if (c.divisor_path.empty()) throw ConfigError("--divisor is required");
  return divisor_from_json(read_json(c.divisor_path));
}

// ---- command handlers; each returns the process exit code ----

int cmd_bands(const Common& c, bool complex_mode, bool fiber_dump) {
  auto op = load_op(c);
  if (!complex_mode && !op.self_adjoint)
    throw ConfigError("bands: operator is not self-adjoint; use --complex");
  BandStructure bs =
      complex_mode ? band_structure_complex(op, c.grid) : band_structure(op, c.grid);
  write_text(artifact(c, "bands.csv"), bands_to_csv(bs));
  if (fiber_dump)
    write_text(artifact(c, "fiber.csv"),
               fiber_samples_to_csv(op, BrillouinGrid{op.d, c.grid}));
  std::printf("bands: %zu grid points x %d bands -> bands.csv\n",
              bs.grid.size(), op.cells);
  return kExitOk;
}

int cmd_spectrum(const Common& c) {
  auto op = load_op(c);
  auto s = spectrum_intervals(op, c.grid);
  emit_report(spectrum_to_json(s), artifact(c, "spectrum.json"));
  std::printf("spectrum: %zu band intervals, %zu gaps -> spectrum.json\n",
              s.per_band.size(), s.gaps.size());
  return kExitOk;
}

int cmd_fermi(const Common& c) {
  auto op = load_op(c);
  FermiOptions opts;
  opts.level = c.level;
  opts.grid_M = c.grid;
  auto pts = fermi_points(op, opts);
  emit_report(fermi_points_to_json(pts), artifact(c, "fermi.json"));
  std::printf("fermi: %zu point(s) at level %.17g -> fermi.json\n", pts.size(),
              c.level);
  return kExitOk;
}

int cmd_liouville_dim(const Common& c, const std::string& p_str, double N) {
  auto op = load_op(c);
  FermiOptions opts;
  opts.level = c.level;
  opts.grid_M = c.grid;
  auto pts = fermi_points(op, opts);
  GrowthSpec growth(parse_p(p_str), N);
  auto v = dim_Vp(edge_data(pts), growth, op.d);
  Json j;
  j["p"] = p_str;
  j["N"] = N;
  j["fermi_points"] = fermi_points_to_json(pts);
  j["status"] = to_string(v.status);
  if (v.ok()) j["dim"] = v.value;
  if (!v.note.empty()) j["note"] = v.note;
  emit_report(j, artifact(c, "liouville-dim.json"));
  if (!v.ok()) {
    std::printf("liouville-dim: inapplicable (%s)\n", v.note.c_str());
    return kExitInapplicable;
  }
  std::printf("liouville-dim: dim V^%s_%.17g = %lld (%s)\n", p_str.c_str(), N,
              v.value, to_string(v.status));
  return kExitOk;
}

int cmd_divisor_degree(const Common& c, const std::string& symbol, int n) {
  auto mu = load_divisor(c);
  DegreeReport rep;
  if (mu.plus.is_continuum() || mu.minus.is_continuum()) {
    if (n <= 0) throw ConfigError("continuum divisor needs --n");
    ContinuumSymbol sym =
        symbol == "bilaplacian" ? symbol_bilaplacian(n) : symbol_laplacian(n);
    rep = degree(sym, mu);
  } else {
    auto op = shift_spectrum(load_op(c), c.level);
    rep = degree(op, mu);
  }
  Json j;
  j["ell_plus"] = rep.ell_plus;
  j["ell_tilde_plus"] = rep.ell_tilde_plus;
  j["ell_minus"] = rep.ell_minus;
  j["ell_tilde_minus"] = rep.ell_tilde_minus;
  j["degree"] = rep.degree;
  emit_report(j, artifact(c, "divisor-degree.json"));
  std::printf("divisor-degree: deg = %lld (l+ %lld, l~+ %lld, l- %lld, l~- %lld)\n",
              rep.degree, rep.ell_plus, rep.ell_tilde_plus, rep.ell_minus,
              rep.ell_tilde_minus);
  return kExitOk;
}

int cmd_lrr(const Common& c, const std::string& p_str, double N) {
  auto op = shift_spectrum(load_op(c), c.level);
  auto mu = load_divisor(c);
  GrowthSpec growth(parse_p(p_str), N);

  FermiOptions opts;
  opts.grid_M = c.grid;
  auto pts = fermi_points(op, opts);
  if (pts.empty())
    throw NotApplicableError(
        "lrr: empty Fermi surface at this level; use the empty-fermi command");

  std::vector<PointAudit> audits;
  for (const auto& p : pts) {
    PointAudit a;
    a.a2 = integrability_audit(op, p, 1).integrable;
    a.strength = integrability_audit(op, p, 2).integrable;
    audits.push_back(a);
  }
  auto deg_mu = degree(op, mu);
  auto deg_plus = degree(op, positive_part(mu));
  auto rep = lrr_bounds(deg_mu, deg_plus, edge_data(pts), growth, op.d, audits);
  emit_report(lrr_report_to_json(rep), artifact(c, "lrr-report.json"));
  if (!rep.applicable || rep.dim_kind != LRRReport::DimKind::Finite) {
    std::string failed;
    for (const auto& f : rep.failed_hypotheses) failed += " " + f;
    std::printf("lrr: inapplicable; failed hypotheses:%s\n", failed.c_str());
    return kExitInapplicable;
  }
  std::printf("lrr: dim V = %lld, deg = %lld, lower = %lld, upper = %lld%s\n",
              rep.dim_value, rep.deg.degree, *rep.lower_bound, *rep.upper_bound,
              rep.existence ? ", nonzero solution exists" : "");
  return kExitOk;
}

int cmd_empty_fermi(const Common& c, bool estimate) {
  auto op = shift_spectrum(load_op(c), c.level);
  auto mu = load_divisor(c);
  auto s = spectrum_intervals(op, c.grid);
  const double margin = s.distance_to(0.0);
  auto rep = empty_fermi_bounds(degree(op, mu), mu.plus.trivial(),
                                mu.minus.trivial(), margin);
  Json j = lrr_report_to_json(rep);
  j["spectral_margin"] = margin;
  if (estimate) {
    auto est = truncated_L_dim_estimate(op, mu, {10, 14, 18}, margin);
    j["truncated_dims"] = est.dims;
    if (est.stabilized)
      j["truncated_estimate"] = *est.stabilized;
    else
      j["truncated_estimate"] = "unstable";
  }
  emit_report(j, artifact(c, "empty-fermi.json"));
  std::printf("empty-fermi: deg = %lld, bounds [%lld, %lld], margin %.3g\n",
              rep.deg.degree, *rep.lower_bound, *rep.upper_bound, margin);
  return kExitOk;
}

int cmd_oracle_vinf(const Common& c, double N) {
  auto op = shift_spectrum(load_op(c), c.level);
  FermiOptions opts;
  opts.grid_M = c.grid;
  auto pts = fermi_points(op, opts);
  std::vector<Quasimomentum> ks;
  for (const auto& p : pts) ks.push_back(p.k);
  const long long oracle = vinf_dim_oracle(op, ks, static_cast<int>(N));
  auto formula = dim_Vinf(edge_data(pts), static_cast<long long>(N), op.d);
  Json j;
  j["N"] = static_cast<long long>(N);
  j["oracle"] = oracle;
  j["formula_status"] = to_string(formula.status);
  if (formula.ok()) j["formula"] = formula.value;
  const bool agree = formula.ok() && formula.value == oracle;
  j["agree"] = agree;
  emit_report(j, artifact(c, "oracle-vinf.json"));
  std::printf("oracle-vinf: oracle %lld, formula %s -> %s\n", oracle,
              formula.ok() ? std::to_string(formula.value).c_str() : "n/a",
              agree ? "agree" : "MISMATCH");
  return kExitOk;
}

int cmd_oracle_continuum(const Common& c, const std::string& experiment, int d,
                         int ell, int M0, int M1, const std::string& p_str,
                         double N, bool decaying, std::uint64_t seed) {
  Json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  if (experiment == "space-dim") {
    auto mu = load_divisor(c);
    if (d <= 0) {
      if (!mu.plus.continuum.empty())
        d = static_cast<int>(mu.plus.continuum[0].x.size());
      else if (!mu.minus.continuum.empty())
        d = static_cast<int>(mu.minus.continuum[0].x.size());
      else
        throw ConfigError("space-dim: cannot infer --d from a trivial divisor");
    }
    ContinuumGrowth growth = decaying
                                 ? ContinuumGrowth::decay()
                                 : ContinuumGrowth::of(GrowthSpec(parse_p(p_str), N));
    const int dim = continuum_space_dim(mu, growth, d);
    j["dim"] = dim;
    emit_report(j, artifact(c, "oracle-continuum.json"));
    std::printf("oracle-continuum space-dim: %d\n", dim);
  } else if (experiment == "rrl-gap") {
    auto e = rrl_gap_experiment(ell, d, static_cast<int>(N), seed);
    j["lhs"] = e.lhs;
    j["rhs"] = e.rhs;
    j["gap"] = e.gap;
    j["gap_at_least_ell"] = e.gap >= ell;
    emit_report(j, artifact(c, "oracle-continuum.json"));
    std::printf("oracle-continuum rrl-gap: lhs %lld rhs %lld gap %lld (ell %d)\n",
                e.lhs, e.rhs, e.gap, ell);
  } else if (experiment == "negative-equality") {
    auto e = negative_divisor_equality_experiment(d, M0, M1,
                                                  GrowthSpec(parse_p(p_str), N),
                                                  seed);
    j["dim"] = e.dim;
    j["expected"] = e.expected;
    j["equal"] = e.equal;
    emit_report(j, artifact(c, "oracle-continuum.json"));
    std::printf("oracle-continuum negative-equality: dim %lld expected %lld %s\n",
                e.dim, e.expected, e.equal ? "equal" : "MISMATCH");
  } else {
    throw ConfigError("unknown experiment: " + experiment);
  }
  return kExitOk;
}

int cmd_oracle_dedekind(const Common& c, const std::string& ks_str, int trials,
                        std::uint64_t seed) {
  auto ks = parse_ks(ks_str);
  auto cert = dedekind_shifts(ks);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> V(-1.0, 1.0);
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    Vector v(static_cast<int>(ks.size()));
    for (int r = 0; r < v.size(); ++r) v[r] = Complex(V(rng), V(rng));
    double lhs = 0.0;
    for (const auto& g : cert.shifts) {
      Complex s(0.0, 0.0);
      for (int r = 0; r < v.size(); ++r) {
        double phase = 0.0;
        for (int a = 0; a < ks[r].d(); ++a) phase += ks[r].real()[a] * g[a];
        s += v[r] * std::exp(Complex(0.0, phase));
      }
      lhs = std::max(lhs, std::abs(s));
    }
    if (lhs < cert.C * v.cwiseAbs().maxCoeff() - 1e-12) ++violations;
  }
  Json j;
  Json shifts = Json::array();
  for (const auto& g : cert.shifts)
    shifts.push_back(std::vector<int>(g.data(), g.data() + g.size()));
  j["shifts"] = shifts;
  j["sigma_min"] = cert.sigma_min;
  j["C"] = cert.C;
  j["trials"] = trials;
  j["seed"] = seed;
  j["violations"] = violations;
  emit_report(j, artifact(c, "oracle-dedekind.json"));
  std::printf("oracle-dedekind: C = %.17g, %d violation(s) in %d trials\n",
              cert.C, violations, trials);
  return violations == 0 ? kExitOk : kExitInstability;
}

int cmd_green(const Common& c, int radius) {
  auto op = shift_spectrum(load_op(c), c.level);
  auto s = spectrum_intervals(op, c.grid);
  const double margin = s.distance_to(0.0);
  auto g = green_function(op, LatticePoint(IntVector::Zero(op.d), 0), radius,
                          margin);
  Json j;
  j["radius"] = radius;
  j["decay_rate"] = g.decay_rate;
  j["fit_r2"] = g.fit_r2;
  j["spectral_margin"] = margin;
  emit_report(j, artifact(c, "green.json"));

  std::ostringstream csv;
  for (int a = 0; a < op.d; ++a) csv << "g_" << (a + 1) << ",";
  csv << "cell,re,im\n";
  IntVector t = g.values.lo;
  char buf[64];
  while (true) {
    for (int cell = 0; cell < op.cells; ++cell) {
      for (int a = 0; a < op.d; ++a) csv << t[a] << ",";
      const Complex v = g.values.at(LatticePoint(t, cell));
      csv << cell << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", v.real());
      csv << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", v.imag());
      csv << buf << "\n";
    }
    int i = op.d - 1;
    while (i >= 0 && ++t[i] > g.values.hi[i]) {
      t[i] = g.values.lo[i];
      --i;
    }
    if (i < 0) break;
  }
  write_text(artifact(c, "green.csv"), csv.str());
  std::printf("green: decay rate %.6g, fit R^2 %.6g -> green.json, green.csv\n",
              g.decay_rate, g.fit_r2);
  return kExitOk;
}

int cmd_principal(const Common& c, double xi_max, int M) {
  auto op = load_op(c);
  PrincipalOptions opts;
  opts.xi_max = xi_max;
  opts.M = M;
  auto curve = maximize_principal(op, opts);
  Json j;
  j["xi0"] = std::vector<double>(curve.xi0.data(),
                                 curve.xi0.data() + curve.xi0.size());
  j["lambda_max"] = curve.lambda_max;
  j["concavity_ok"] = curve.concavity_ok;
  j["concavity_violations"] = curve.concavity_violations;
  emit_report(j, artifact(c, "principal.json"));

  std::ostringstream csv;
  for (int a = 0; a < curve.d; ++a) csv << "xi_" << (a + 1) << ",";
  csv << "lambda\n";
  for (int i = 0; i < curve.values.size(); ++i) {
    int rest = i;
    std::vector<double> xi(curve.d);
    for (int a = curve.d - 1; a >= 0; --a) {
      int t = rest % curve.M;
      rest /= curve.M;
      xi[a] = -curve.xi_max + 2.0 * curve.xi_max * t / (curve.M - 1);
    }
    char buf[64];
    for (int a = 0; a < curve.d; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", xi[a]);
      csv << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", curve.values[i]);
    csv << buf << "\n";
  }
  write_text(artifact(c, "principal.csv"), csv.str());
  std::printf("principal-eigenvalue: max %.12g at xi0 -> principal.json\n",
              curve.lambda_max);
  if (!curve.concavity_ok) {
    std::printf("principal-eigenvalue: concavity violated %d time(s)\n",
                curve.concavity_violations);
    return kExitInstability;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet-Bloch band analysis and rigged-divisor calculus for "
               "periodic lattice operators"};
  app.require_subcommand(1);

  Common c;
  bool complex_mode = false, estimate = false, decaying = false;
  std::string p_str = "inf", symbol = "laplacian", experiment = "space-dim";
  std::string ks_str;
  double N = 0.0, xi_max = 2.0;
  int n_dim = 0, radius = 30, ell = 1, M0 = 0, M1 = 0, trials = 1000, xi_grid = 9;
  std::uint64_t seed = 12345;

  auto add_common = [&](CLI::App* sub, bool needs_op, bool needs_div) {
    if (needs_op) sub->add_option("--op", c.op_path, "operator JSON file");
    if (needs_div)
      sub->add_option("--divisor", c.divisor_path, "divisor JSON file");
    sub->add_option("--outdir", c.outdir, "output directory");
    sub->add_option("--level", c.level, "spectral level (shifts to 0)");
    sub->add_option("--grid", c.grid, "Brillouin grid points per axis");
  };

  bool fiber_dump = false;
  auto* bands = app.add_subcommand("bands", "band structure over the grid");
  add_common(bands, true, false);
  bands->add_flag("--complex", complex_mode, "complex eigenvalue clouds");
  bands->add_flag("--fiber", fiber_dump, "also dump fiber matrix samples");

  auto* spectrum = app.add_subcommand("spectrum", "band intervals and gaps");
  add_common(spectrum, true, false);

  auto* fermi = app.add_subcommand("fermi", "Fermi points at a level");
  add_common(fermi, true, false);

  auto* ldim = app.add_subcommand("liouville-dim",
                                  "dimension of polynomially growing solutions");
  add_common(ldim, true, false);
  ldim->add_option("--p", p_str, "growth exponent p (number or inf)");
  ldim->add_option("--N", N, "growth order N")->required();

  auto* ddeg = app.add_subcommand("divisor-degree", "rigged divisor degree");
  add_common(ddeg, true, true);
  ddeg->add_option("--symbol", symbol, "laplacian | bilaplacian (continuum)");
  ddeg->add_option("--n", n_dim, "continuum space dimension");

  auto* lrr_cmd = app.add_subcommand("lrr", "inequality/equality report");
  add_common(lrr_cmd, true, true);
  lrr_cmd->add_option("--p", p_str, "growth exponent p")->required();
  lrr_cmd->add_option("--N", N, "growth order N")->required();

  auto* ef = app.add_subcommand("empty-fermi",
                                "report when 0 lies outside the spectrum");
  add_common(ef, true, true);
  ef->add_flag("--estimate", estimate, "attach the truncated-solver estimate");

  auto* ovinf = app.add_subcommand("oracle-vinf",
                                   "kernel oracle against the formula");
  add_common(ovinf, true, false);
  ovinf->add_option("--N", N, "growth order N")->required();

  auto* ocont = app.add_subcommand("oracle-continuum", "continuum rank oracle");
  add_common(ocont, false, true);
  ocont->add_option("--experiment", experiment,
                    "space-dim | rrl-gap | negative-equality");
  ocont->add_option("--d", n_dim, "space dimension");
  ocont->add_option("--ell", ell, "number of zero points");
  ocont->add_option("--M0", M0, "top derivative order");
  ocont->add_option("--M1", M1, "bottom derivative order");
  ocont->add_option("--p", p_str, "growth exponent p");
  ocont->add_option("--N", N, "growth order N");
  ocont->add_flag("--decaying", decaying, "decay-at-infinity domain");
  ocont->add_option("--seed", seed, "point generator seed");

  auto* oded = app.add_subcommand("oracle-dedekind",
                                  "character independence certificate");
  add_common(oded, false, false);
  oded->add_option("--ks", ks_str, "characters, e.g. \"0,0;1.5,-0.3\"")
      ->required();
  oded->add_option("--trials", trials, "Monte Carlo verification trials");
  oded->add_option("--seed", seed, "Monte Carlo seed");

  auto* green = app.add_subcommand("green", "truncated Green's function");
  add_common(green, true, false);
  green->add_option("--radius", radius, "truncation radius");

  auto* princ = app.add_subcommand("principal-eigenvalue",
                                   "generalized principal eigenvalue curve");
  add_common(princ, true, false);
  princ->add_option("--xi-max", xi_max, "grid half-width");
  princ->add_option("--xi-grid", xi_grid, "grid points per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (bands->parsed()) return cmd_bands(c, complex_mode, fiber_dump);
    if (spectrum->parsed()) return cmd_spectrum(c);
    if (fermi->parsed()) return cmd_fermi(c);
    if (ldim->parsed()) return cmd_liouville_dim(c, p_str, N);
    if (ddeg->parsed()) return cmd_divisor_degree(c, symbol, n_dim);
    if (lrr_cmd->parsed()) return cmd_lrr(c, p_str, N);
    if (ef->parsed()) return cmd_empty_fermi(c, estimate);
    if (ovinf->parsed()) return cmd_oracle_vinf(c, N);
    if (ocont->parsed())
      return cmd_oracle_continuum(c, experiment, n_dim, ell, M0, M1, p_str, N,
                                  decaying, seed);
    if (oded->parsed()) return cmd_oracle_dedekind(c, ks_str, trials, seed);
    if (green->parsed()) return cmd_green(c, radius);
    if (princ->parsed()) return cmd_principal(c, xi_max, xi_grid);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NotApplicableError& e) {
    std::fprintf(stderr, "inapplicable: %s\n", e.what());
    return kExitInapplicable;
  } catch (const InstabilityError& e) {
    std::fprintf(stderr, "numerical instability: %s\n", e.what());
    return kExitInstability;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitConfig;
}
