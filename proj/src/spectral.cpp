#include "lrr/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "lrr/linalg.hpp"
#include "lrr/parallel.hpp"

namespace lrr {

namespace {

Matrix fiber_at(const PeriodicLatticeOperator& op, const RealVector& k) {
  return fiber_matrix(op, Quasimomentum(k)).entries;
}

RealVector sorted_eigenvalues(const PeriodicLatticeOperator& op,
                              const RealVector& k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(fiber_at(op, k),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double sigma_min_at(const PeriodicLatticeOperator& op, const RealVector& k) {
  return smallest_singular_value(fiber_at(op, k));
}

// Derivative-free compass search; objective must be continuous. Returns the
// refined point, wrapped nowhere (the fiber is periodic anyway).
RealVector compass_minimize(const std::function<double(const RealVector&)>& f,
                            RealVector x, double step, double min_step,
                            double* value_out) {
  double fx = f(x);
  const int d = static_cast<int>(x.size());
  while (step > min_step) {
    bool improved = false;
    for (int a = 0; a < d; ++a) {
      for (double s : {step, -step}) {
        RealVector y = x;
        y[a] += s;
        double fy = f(y);
        if (fy < fx) {
          x = y;
          fx = fy;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  if (value_out) *value_out = fx;
  return x;
}

}  // namespace

BandStructure band_structure(const PeriodicLatticeOperator& op, int M) {
  if (!op.self_adjoint)
    throw ConfigError("band_structure: sorted-real mode requires a "
                      "self-adjoint operator");
  BandStructure bs;
  bs.grid = BrillouinGrid{op.d, M};
  bs.sorted_real = true;
  bs.bands.resize(bs.grid.size(), op.cells);
  parallel_for(bs.grid.size(), [&](std::size_t i) {
    bs.bands.row(i) = sorted_eigenvalues(op, bs.grid.point(i)).transpose();
  });
  return bs;
}

BandStructure band_structure_complex(const PeriodicLatticeOperator& op, int M) {
  BandStructure bs;
  bs.grid = BrillouinGrid{op.d, M};
  bs.sorted_real = false;
  bs.clouds.resize(bs.grid.size(), op.cells);
  parallel_for(bs.grid.size(), [&](std::size_t i) {
    Eigen::ComplexEigenSolver<Matrix> es(fiber_at(op, bs.grid.point(i)), false);
    Vector ev = es.eigenvalues();
    std::vector<Complex> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    for (int c = 0; c < op.cells; ++c) bs.clouds(i, c) = v[c];
  });
  return bs;
}

double SpectrumIntervals::distance_to(double level) const {
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : merged) {
    if (level >= lo && level <= hi) return 0.0;
    dist = std::min(dist, std::min(std::abs(level - lo), std::abs(level - hi)));
  }
  return dist;
}

SpectrumIntervals spectrum_intervals(const PeriodicLatticeOperator& op,
                                     const BandStructure& bands,
                                     double refine_tol) {
  if (!bands.sorted_real)
    throw ConfigError("spectrum_intervals: requires sorted-real bands");
  SpectrumIntervals out;
  const double h = kTwoPi / bands.grid.M;
  for (int j = 0; j < op.cells; ++j) {
    Eigen::Index imin, imax;
    bands.bands.col(j).minCoeff(&imin);
    bands.bands.col(j).maxCoeff(&imax);
    auto band_j = [&](const RealVector& k) {
      return sorted_eigenvalues(op, k)[j];
    };
    double lo, hi;
    compass_minimize(band_j, bands.grid.point(imin), h, refine_tol, &lo);
    compass_minimize([&](const RealVector& k) { return -band_j(k); },
                     bands.grid.point(imax), h, refine_tol, &hi);
    hi = -hi;
    out.per_band.emplace_back(std::min(lo, bands.bands.col(j).minCoeff()),
                              std::max(hi, bands.bands.col(j).maxCoeff()));
  }
  auto sorted = out.per_band;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& iv : sorted) {
    if (!out.merged.empty() && iv.first <= out.merged.back().second + 1e-9)
      out.merged.back().second = std::max(out.merged.back().second, iv.second);
    else
      out.merged.push_back(iv);
  }
  for (std::size_t i = 0; i + 1 < out.merged.size(); ++i)
    out.gaps.emplace_back(out.merged[i].second, out.merged[i + 1].first);
  return out;
}

SpectrumIntervals spectrum_intervals(const PeriodicLatticeOperator& op, int M,
                                     double refine_tol) {
  return spectrum_intervals(op, band_structure(op, M), refine_tol);
}

RieszProjector riesz_projector(const PeriodicLatticeOperator& op,
                               const Quasimomentum& k,
                               const ContourSpec& contour) {
  const Matrix A = fiber_matrix(op, k).entries;
  Eigen::ComplexEigenSolver<Matrix> es(A, true);
  const Vector ev = es.eigenvalues();

  int enclosed = 0;
  for (int i = 0; i < ev.size(); ++i) {
    const double r = std::abs(ev[i] - contour.center);
    if (r >= contour.radius * (1.0 - contour.delta) &&
        r <= contour.radius * (1.0 + contour.delta))
      throw NotApplicableError("riesz_projector: eigenvalue on the contour "
                               "annulus");
    if (r < contour.radius) ++enclosed;
  }

  RieszProjector out;
  out.rank = enclosed;

  const Matrix& V = es.eigenvectors();
  Eigen::JacobiSVD<Matrix> svd(V);
  const double cond = svd.singularValues()(0) /
                      svd.singularValues()(svd.singularValues().size() - 1);
  if (cond < 1e8) {
    Matrix sel = Matrix::Zero(ev.size(), ev.size());
    for (int i = 0; i < ev.size(); ++i)
      if (std::abs(ev[i] - contour.center) < contour.radius) sel(i, i) = 1.0;
    out.P = V * sel * V.inverse();
  } else {
    // defective fiber: trapezoidal contour quadrature of the resolvent
    out.quadrature_fallback = true;
    const int nodes = 256;
    Matrix P = Matrix::Zero(A.rows(), A.cols());
    const Matrix I = Matrix::Identity(A.rows(), A.cols());
    for (int t = 0; t < nodes; ++t) {
      const double th = kTwoPi * t / nodes;
      const Complex w = contour.radius * std::exp(Complex(0.0, th));
      const Complex z = contour.center + w;
      P += w * (z * I - A).partialPivLu().solve(I);
    }
    out.P = P / static_cast<double>(nodes);
  }

  if ((out.P * out.P - out.P).cwiseAbs().maxCoeff() > 1e-10)
    throw InstabilityError("riesz_projector: projector identity violated");
  return out;
}

namespace {

// One grid sweep + refinement pass; returns located zeros only.
std::vector<FermiPoint> locate_fermi_points(const PeriodicLatticeOperator& sh,
                                            const PeriodicLatticeOperator& op,
                                            int grid_M,
                                            const FermiOptions& opts) {
  const BrillouinGrid grid{op.d, grid_M};
  const std::size_t n = grid.size();

  std::vector<double> s(n);
  parallel_for(n, [&](std::size_t i) { s[i] = sigma_min_at(sh, grid.point(i)); });

  // candidates: local minima on the periodic grid (non-strict, so flat
  // valleys survive) plus the low sublevel set, so one-dimensional zero sets
  // produce enough distinct refined points to trip the finiteness budget
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    IntVector t = grid.index_tuple(i);
    bool is_min = true;
    for (int a = 0; a < op.d && is_min; ++a) {
      for (int dt : {-1, 1}) {
        IntVector u = t;
        u[a] += dt;
        // wrap
        int span = grid.M;
        int rel = ((u[a] - grid.t_lo()) % span + span) % span;
        u[a] = grid.t_lo() + rel;
        std::size_t flat = 0;
        for (int b = 0; b < op.d; ++b)
          flat = flat * grid.M + static_cast<std::size_t>(u[b] - grid.t_lo());
        if (s[flat] < s[i]) {
          is_min = false;
          break;
        }
      }
    }
    if (is_min) candidates.push_back(i);
  }
  {
    double coeff_scale = 1.0;
    for (const auto& t : sh.terms)
      coeff_scale = std::max(coeff_scale, std::abs(t.value));
    const double sublevel = 2.5 * (kTwoPi / grid.M) * coeff_scale;
    std::vector<std::size_t> low;
    for (std::size_t i = 0; i < n; ++i)
      if (s[i] <= sublevel) low.push_back(i);
    std::sort(low.begin(), low.end(),
              [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
    const std::size_t cap = 4 * static_cast<std::size_t>(opts.max_points);
    if (low.size() > cap) low.resize(cap);
    candidates.insert(candidates.end(), low.begin(), low.end());
  }

  auto objective = [&](const RealVector& k) { return sigma_min_at(sh, k); };

  // Newton polish on the nearly-zero band branch. Compass search alone hits
  // the sigma roundoff plateau at quadratic minima with ~1e-8 position
  // scatter, which would defeat the 1e-9 deduplication.
  auto polish = [&](RealVector k) {
    auto branch = [&](const RealVector& kk, RealVector* grad) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(fiber_at(sh, kk));
      int j = 0;
      es.eigenvalues().cwiseAbs().minCoeff(&j);
      if (grad) {
        const Vector v = es.eigenvectors().col(j);
        for (int a = 0; a < op.d; ++a)
          (*grad)[a] =
              (v.adjoint() * fiber_matrix_derivative(sh, Quasimomentum(kk), a) *
               v)(0, 0)
                  .real();
      }
      return es.eigenvalues()[j];
    };
    RealVector g(op.d);
    branch(k, &g);
    if (g.norm() > 1e-4) return k;  // zero crossing, not an extremum
    const double h = 1e-5;
    for (int iter = 0; iter < 30; ++iter) {
      branch(k, &g);
      if (g.norm() < 1e-12) break;
      RealMatrix H(op.d, op.d);
      for (int a = 0; a < op.d; ++a) {
        RealVector ea = RealVector::Zero(op.d);
        ea[a] = h;
        RealVector gp(op.d), gm(op.d);
        branch(k + ea, &gp);
        branch(k - ea, &gm);
        H.col(a) = (gp - gm) / (2 * h);
      }
      RealVector step = H.fullPivLu().solve(-g);
      if (!step.allFinite() || step.norm() > 0.1) break;
      k += step;
    }
    return k;
  };

  std::vector<FermiPoint> found;
  for (std::size_t idx : candidates) {
    double val;
    RealVector k = compass_minimize(objective, grid.point(idx),
                                    0.5 * kTwoPi / grid.M, 1e-13, &val);
    if (val > opts.root_tol) continue;
    if (op.self_adjoint) {
      Matrix A = fiber_at(sh, k);
      Eigen::JacobiSVD<Matrix> sv(A);
      int near_zero = 0;
      for (int i = 0; i < sv.singularValues().size(); ++i)
        if (sv.singularValues()[i] <= 1e-6) ++near_zero;
      if (near_zero == 1) {
        k = polish(k);
        val = sigma_min_at(sh, k);
        if (val > opts.root_tol) continue;
      }
    }
    Quasimomentum q(k);
    bool dup = false;
    for (const auto& fp : found) dup = dup || fp.k.equals(q);
    if (dup) continue;
    FermiPoint fp;
    fp.k = q;
    fp.sigma_min = val;
    found.push_back(std::move(fp));
    if (static_cast<int>(found.size()) > opts.max_points)
      throw NotApplicableError(
          "fermi-surface-not-finite: refined zeros exceed the point budget; "
          "dimension formulas are inapplicable");
  }
  return found;
}

}  // namespace

std::vector<FermiPoint> fermi_points(const PeriodicLatticeOperator& op,
                                     const FermiOptions& opts) {
  const PeriodicLatticeOperator sh = shift_spectrum(op, opts.level);
  auto found = locate_fermi_points(sh, op, opts.grid_M, opts);
  if (static_cast<int>(found.size()) > opts.max_points / 2) {
    // suspiciously many zeros: a curve sampled below the budget doubles its
    // count on a finer grid, a finite surface does not
    found = locate_fermi_points(sh, op, 2 * opts.grid_M + 1, opts);
  }

  for (auto& fp : found) {
    const Matrix A = fiber_matrix(sh, fp.k).entries;
    Eigen::ComplexEigenSolver<Matrix> es(A, false);
    const double mult_tol = 10.0 * opts.root_tol;
    fp.multiplicity = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()[i]) <= mult_tol) ++fp.multiplicity;
    Eigen::JacobiSVD<Matrix> svd(A);
    fp.kernel_dim = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] <= mult_tol) ++fp.kernel_dim;
    fp.simple = fp.multiplicity == 1;

    if (!opts.annotate) continue;
    ReducedModel red(sh, fp.k.real(), opts.root_tol);
    TaylorOptions topt;
    topt.max_order = opts.max_taylor_order;
    TaylorData td = taylor_order(
        [&](const RealVector& kappa) { return red.sample(kappa); }, op.d,
        red.multiplicity(), topt);
    fp.ell0 = td.ell0;
    fp.leading_taylor = td.leading;
    fp.det_leading_nonzero = td.det_leading_nonzero;
    if (fp.multiplicity == 1 && fp.ell0 == 2) {
      RealMatrix H = RealMatrix::Zero(op.d, op.d);
      for (const auto& [alpha, coef] : td.leading) {
        int i = -1, j = -1;
        for (int a = 0; a < op.d; ++a) {
          if (alpha[a] == 2) i = j = a;
          if (alpha[a] == 1) (i < 0 ? i : j) = a;
        }
        const double c = coef(0, 0).real();
        if (i == j)
          H(i, i) = 2.0 * c;
        else {
          H(i, j) = c;
          H(j, i) = c;
        }
      }
      fp.hessian = H;
    }
  }
  return found;
}

std::vector<EdgeData> edge_data(const std::vector<FermiPoint>& points) {
  std::vector<EdgeData> out;
  out.reserve(points.size());
  for (const auto& p : points)
    out.push_back(EdgeData{p.multiplicity, p.ell0, p.det_leading_nonzero,
                           p.kernel_dim});
  return out;
}

ReducedModel::ReducedModel(const PeriodicLatticeOperator& op,
                           const RealVector& k_r, double root_tol)
    : op_(op), k_r_(k_r) {
  const Matrix A = fiber_at(op_, k_r_);
  Eigen::ComplexEigenSolver<Matrix> es(A, false);
  const double tol = 10.0 * root_tol;
  double gap = std::numeric_limits<double>::infinity();
  m_ = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double a = std::abs(es.eigenvalues()[i]);
    if (a <= tol)
      ++m_;
    else
      gap = std::min(gap, a);
  }
  if (m_ == 0)
    throw NotApplicableError("reduced model: 0 is not an eigenvalue at k_r");
  contour_.center = Complex(0.0, 0.0);
  contour_.radius = std::isfinite(gap) ? 0.5 * gap : 1.0;

  RieszProjector pr = riesz_projector(op_, Quasimomentum(k_r_), contour_);
  if (pr.rank != m_)
    throw InstabilityError("reduced model: projector rank mismatch");
  Eigen::JacobiSVD<Matrix> svd(pr.P, Eigen::ComputeFullU);
  basis_ = svd.matrixU().leftCols(m_);
}

Matrix ReducedModel::sample(const RealVector& kappa) const {
  const RealVector k = k_r_ + kappa;
  RieszProjector pr = riesz_projector(op_, Quasimomentum(k), contour_);
  if (pr.rank != m_)
    throw InstabilityError("reduced model: rank changed inside the validity "
                           "neighborhood");
  const Matrix pe = pr.P * basis_;
  Matrix gram = pe.adjoint() * pe;
  if (std::abs(gram.determinant()) < 1e-8)
    throw InstabilityError("reduced model: basis degeneration, shrink the "
                           "sampling neighborhood");
  return basis_.adjoint() * fiber_at(op_, k) * pe;
}

namespace {

// All fitted layers for one radii schedule.
struct LayerFit {
  std::vector<std::vector<Matrix>> coeffs;  // [deg-1][monomial] m x m
  std::vector<std::vector<MultiIndex>> monos;
  std::vector<double> norms;  // Frobenius per layer
};

LayerFit fit_layers(const std::function<Matrix(const RealVector&)>& sampler,
                    int d, int m, int max_order,
                    const std::vector<double>& radii,
                    const std::vector<RealVector>& dirs) {
  std::vector<std::vector<MultiIndex>> monos;
  int ncols = 0;
  for (int deg = 1; deg <= max_order; ++deg) {
    monos.push_back(multi_indices_exact(d, deg));
    ncols += static_cast<int>(monos.back().size());
  }
  const int nsamp = static_cast<int>(radii.size() * dirs.size());

  RealMatrix V(nsamp, ncols);
  std::vector<Matrix> rhs(nsamp);
  const Matrix at0 = sampler(RealVector::Zero(d));
  int row = 0;
  for (double rho : radii)
    for (const auto& u : dirs) {
      RealVector kappa = rho * u;
      int col = 0;
      for (int deg = 1; deg <= max_order; ++deg)
        for (const auto& a : monos[deg - 1]) {
          double mono = 1.0;
          for (int i = 0; i < d; ++i) mono *= std::pow(kappa[i], a[i]);
          V(row, col++) = mono;
        }
      rhs[row] = sampler(kappa) - at0;
      ++row;
    }

  // column scaling evens out the rho^deg disparity
  RealVector scale(ncols);
  for (int c = 0; c < ncols; ++c) {
    scale[c] = V.col(c).norm();
    if (scale[c] == 0.0) scale[c] = 1.0;
    V.col(c) /= scale[c];
  }
  Eigen::BDCSVD<RealMatrix> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);

  LayerFit fit;
  fit.monos = monos;
  fit.coeffs.resize(max_order);
  for (int deg = 1; deg <= max_order; ++deg)
    fit.coeffs[deg - 1].assign(monos[deg - 1].size(), Matrix::Zero(m, m));

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Vector b(nsamp);
      for (int r = 0; r < nsamp; ++r) b[r] = rhs[r](i, j);
      Vector x = svd.solve(b);
      int col = 0;
      for (int deg = 1; deg <= max_order; ++deg)
        for (std::size_t t = 0; t < monos[deg - 1].size(); ++t) {
          fit.coeffs[deg - 1][t](i, j) = x[col] / scale[col];
          ++col;
        }
    }

  fit.norms.assign(max_order, 0.0);
  for (int deg = 1; deg <= max_order; ++deg) {
    double s = 0.0;
    for (const auto& c : fit.coeffs[deg - 1]) s += c.squaredNorm();
    fit.norms[deg - 1] = std::sqrt(s);
  }
  return fit;
}

Matrix eval_layer(const std::vector<MultiIndex>& monos,
                  const std::vector<Matrix>& coeffs, const RealVector& u) {
  Matrix out = Matrix::Zero(coeffs[0].rows(), coeffs[0].cols());
  for (std::size_t t = 0; t < monos.size(); ++t) {
    double mono = 1.0;
    for (int i = 0; i < u.size(); ++i) mono *= std::pow(u[i], monos[t][i]);
    out += mono * coeffs[t];
  }
  return out;
}

}  // namespace

TaylorData taylor_order(const std::function<Matrix(const RealVector&)>& sampler,
                        int d, int m, const TaylorOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  int need = 0;
  for (int deg = 1; deg <= opts.max_order; ++deg)
    need += static_cast<int>(binom0(d + deg - 1, deg));
  const int pairs = std::max(2 * need, 8);
  std::vector<RealVector> dirs;
  for (int i = 0; i < pairs; ++i) {
    RealVector u(d);
    do {
      for (int a = 0; a < d; ++a) u[a] = gauss(rng);
    } while (u.norm() < 1e-3);
    u.normalize();
    dirs.push_back(u);
    dirs.push_back(-u);
  }

  LayerFit fit = fit_layers(sampler, d, m, opts.max_order, opts.radii, dirs);
  std::vector<double> half = opts.radii;
  for (double& r : half) r *= 0.5;
  LayerFit check = fit_layers(sampler, d, m, opts.max_order, half, dirs);

  auto pick = [&](const LayerFit& f) {
    double top = 1.0;
    for (double n : f.norms) top = std::max(top, n);
    for (int deg = 1; deg <= opts.max_order; ++deg)
      if (f.norms[deg - 1] > opts.layer_rel_tol * top) return deg;
    return 0;
  };

  TaylorData out;
  const int l0 = pick(fit);
  const int l0b = pick(check);
  if (l0 == 0 || l0b == 0) {
    out.note = "all layers below tolerance up to the maximal order";
    return out;
  }
  if (l0 != l0b) {
    out.note = "half-radius refit disagrees on the leading order";
    return out;
  }
  double diff = 0.0;
  for (std::size_t t = 0; t < fit.coeffs[l0 - 1].size(); ++t)
    diff += (fit.coeffs[l0 - 1][t] - check.coeffs[l0 - 1][t]).squaredNorm();
  if (std::sqrt(diff) > 1e-3 * fit.norms[l0 - 1]) {
    out.note = "half-radius refit drifts on the leading layer";
    return out;
  }

  out.ell0 = l0;
  for (std::size_t t = 0; t < fit.monos[l0 - 1].size(); ++t)
    out.leading.emplace_back(fit.monos[l0 - 1][t], fit.coeffs[l0 - 1][t]);

  std::mt19937_64 rng2(opts.seed + 1);
  double max_det = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    RealVector u(d);
    for (int a = 0; a < d; ++a) u[a] = gauss(rng2);
    u.normalize();
    max_det = std::max(
        max_det,
        std::abs(eval_layer(fit.monos[l0 - 1], fit.coeffs[l0 - 1], u)
                     .determinant()));
  }
  out.det_leading_nonzero = max_det > opts.det_tol;
  return out;
}

IntegrabilityReport integrability_audit(const PeriodicLatticeOperator& op,
                                        const FermiPoint& point, int q) {
  if (q != 1 && q != 2)
    throw ConfigError("integrability_audit: q must be 1 or 2");
  IntegrabilityReport rep;
  rep.q = q;
  const int d = op.d;

  ReducedModel red(op, point.k.real());
  std::mt19937_64 rng(555 + q);
  std::normal_distribution<double> gauss;
  const int ndirs = 16 * d + 16;
  std::vector<RealVector> dirs;
  for (int i = 0; i < ndirs; ++i) {
    RealVector u(d);
    do {
      for (int a = 0; a < d; ++a) u[a] = gauss(rng);
    } while (u.norm() < 1e-3);
    u.normalize();
    dirs.push_back(u);
  }

  double rho0 = 0.1;
  const int levels = 8;
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      rep.annulus.clear();
      for (int lev = 0; lev < levels; ++lev) {
        const double hi = rho0 * std::pow(0.5, lev);
        const double lo = 0.5 * hi;
        const int nr = 6;
        double acc = 0.0;
        for (int t = 0; t < nr; ++t) {
          const double r = lo + (hi - lo) * (t + 0.5) / nr;
          double shell = 0.0;
          for (const auto& u : dirs) {
            Matrix lam = red.sample(r * u);
            const double smin = smallest_singular_value(lam);
            shell += std::pow(1.0 / smin, q);
          }
          acc += shell / ndirs * std::pow(r, d - 1) * (hi - lo) / nr;
        }
        rep.annulus.push_back(acc);
      }
      break;
    } catch (const InstabilityError&) {
      rho0 *= 0.5;  // contour violated at the outer shell; shrink
      if (attempt == 4) throw;
    } catch (const NotApplicableError&) {
      rho0 *= 0.5;
      if (attempt == 4) throw;
    }
  }

  double tail = 0.0;
  for (double c : rep.annulus) {
    tail += c;
    rep.tails.push_back(tail);
  }
  for (std::size_t i = 0; i + 1 < rep.annulus.size(); ++i)
    rep.ratios.push_back(rep.annulus[i + 1] / rep.annulus[i]);
  rep.converged = rep.ratios.size() >= 3;
  for (std::size_t i = rep.ratios.size() >= 3 ? rep.ratios.size() - 3 : 0;
       i < rep.ratios.size(); ++i)
    rep.converged = rep.converged && rep.ratios[i] < 0.9;

  if (point.simple && point.ell0 > 0 && !point.leading_taylor.empty()) {
    // definiteness of the leading scalar layer
    std::mt19937_64 rng2(556);
    double minabs = std::numeric_limits<double>::infinity(), maxabs = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      RealVector u(d);
      for (int a = 0; a < d; ++a) u[a] = gauss(rng2);
      u.normalize();
      Complex v(0.0, 0.0);
      for (const auto& [alpha, coef] : point.leading_taylor) {
        double mono = 1.0;
        for (int i = 0; i < d; ++i) mono *= std::pow(u[i], alpha[i]);
        v += mono * coef(0, 0);
      }
      minabs = std::min(minabs, std::abs(v));
      maxabs = std::max(maxabs, std::abs(v));
    }
    if (maxabs > 0.0 && minabs > 1e-8 * maxabs) {
      rep.analytic = q * point.ell0 < d;
      rep.note = "analytic criterion: q*ell0 < d";
    }
  }
  rep.integrable = rep.analytic.value_or(rep.converged);
  return rep;
}

namespace {

bool strongly_connected(const RealMatrix& B) {
  const int n = static_cast<int>(B.rows());
  if (n == 1) return true;
  auto reach = [&](bool transpose_graph) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        const double e = transpose_graph ? B(w, v) : B(v, w);
        if (v != w && e != 0.0 && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (bool b : seen)
      if (!b) return false;
    return true;
  };
  return reach(false) && reach(true);
}

}  // namespace

PerronPair principal_eigenvalue(const PeriodicLatticeOperator& op,
                                const RealVector& xi) {
  for (const auto& t : op.terms)
    if (t.value.imag() != 0.0)
      throw ConfigError("principal_eigenvalue: real coefficients required");

  Quasimomentum k(RealVector::Zero(op.d), xi);
  const Matrix Ac = fiber_matrix(op, k).entries;
  if (Ac.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw InstabilityError("principal_eigenvalue: fiber at i*xi not real");
  const RealMatrix A = Ac.real();

  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (i != j && A(i, j) > 1e-12)
        throw NotApplicableError(
            "principal_eigenvalue: s*I - A(i xi) is not entrywise "
            "nonnegative; operator outside the second-order sign class");

  const double s = A.diagonal().maxCoeff() + A.cwiseAbs().sum() + 1.0;
  RealMatrix B = s * RealMatrix::Identity(A.rows(), A.cols()) - A;
  if (!strongly_connected(B))
    throw NotApplicableError("principal_eigenvalue: irreducibility failure");

  Eigen::EigenSolver<RealMatrix> es(B);
  int best = 0;
  for (int i = 1; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  const Complex rho = es.eigenvalues()[best];
  if (std::abs(rho.imag()) > 1e-9 * (1.0 + std::abs(rho)))
    throw NotApplicableError("principal_eigenvalue: complex Perron pair");

  Vector v = es.eigenvectors().col(best);
  int arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  v /= v[arg];
  RealVector vec(v.size());
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i].imag()) > 1e-9 || v[i].real() <= 1e-10)
      throw NotApplicableError(
          "principal_eigenvalue: eigenvector is not entrywise positive");
    vec[i] = v[i].real();
  }
  return PerronPair{s - rho.real(), vec};
}

PrincipalEigenvalueCurve maximize_principal(const PeriodicLatticeOperator& op,
                                            const PrincipalOptions& opts) {
  PrincipalEigenvalueCurve out;
  out.d = op.d;
  out.xi_max = opts.xi_max;
  out.M = opts.M;

  auto lam = [&](const RealVector& xi) {
    return principal_eigenvalue(op, xi).lambda;
  };

  const std::size_t n = [&] {
    std::size_t t = 1;
    for (int i = 0; i < op.d; ++i) t *= opts.M;
    return t;
  }();
  out.values.resize(n);
  RealVector best_xi = RealVector::Zero(op.d);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    RealVector xi(op.d);
    for (int a = op.d - 1; a >= 0; --a) {
      int t = static_cast<int>(rest % opts.M);
      rest /= opts.M;
      xi[a] = -opts.xi_max + 2.0 * opts.xi_max * t / (opts.M - 1);
    }
    out.values[i] = lam(xi);
    if (out.values[i] > best) {
      best = out.values[i];
      best_xi = xi;
    }
  }

  // Newton ascent with finite-difference derivatives; the curve is smooth
  // and strictly concave on this operator class.
  RealVector xi = best_xi;
  const double h = 1e-5;
  for (int iter = 0; iter < 200; ++iter) {
    RealVector grad(op.d);
    RealMatrix hess(op.d, op.d);
    const double f0 = lam(xi);
    for (int a = 0; a < op.d; ++a) {
      RealVector ea = RealVector::Zero(op.d);
      ea[a] = h;
      const double fp = lam(xi + ea), fm = lam(xi - ea);
      grad[a] = (fp - fm) / (2 * h);
      hess(a, a) = (fp - 2 * f0 + fm) / (h * h);
      for (int b = a + 1; b < op.d; ++b) {
        RealVector eb = RealVector::Zero(op.d);
        eb[b] = h;
        const double fpp = lam(xi + ea + eb), fpm = lam(xi + ea - eb);
        const double fmp = lam(xi - ea + eb), fmm = lam(xi - ea - eb);
        hess(a, b) = hess(b, a) = (fpp - fpm - fmp + fmm) / (4 * h * h);
      }
    }
    if (grad.norm() < opts.grad_tol) break;
    RealVector step = hess.fullPivLu().solve(-grad);
    if (!step.allFinite() || step.norm() > 1.0) step = grad / (1.0 + grad.norm());
    xi += step;
  }
  out.xi0 = xi;
  out.lambda_max = lam(xi);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> U(-opts.xi_max, opts.xi_max);
  out.concavity_violations = 0;
  for (int t = 0; t < opts.concavity_trials; ++t) {
    RealVector a(op.d), b(op.d);
    for (int i = 0; i < op.d; ++i) {
      a[i] = U(rng);
      b[i] = U(rng);
    }
    const double mid = lam(0.5 * (a + b));
    if (mid < 0.5 * (lam(a) + lam(b)) - 1e-10) ++out.concavity_violations;
  }
  out.concavity_ok = out.concavity_violations == 0;
  return out;
}

}  // namespace lrr
