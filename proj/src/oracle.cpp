#include "lrr/oracle.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <random>

#include "lrr/linalg.hpp"

namespace lrr {

// ---- Bloch-polynomial kernel oracle ----------------------------------------

PolynomialBlochBasis polynomial_bloch_basis(int d, int cells,
                                            const Quasimomentum& k, int N) {
  PolynomialBlochBasis b;
  b.k = k;
  b.N = N;
  b.d = d;
  b.cells = cells;
  for (const auto& j : multi_indices_up_to(d, N))
    for (int c = 0; c < cells; ++c) b.elements.emplace_back(j, c);
  return b;
}

Matrix bloch_action_matrix(const PeriodicLatticeOperator& op,
                           const PolynomialBlochBasis& basis) {
  const int n = basis.dim();
  Matrix M = Matrix::Zero(n, n);
  std::map<std::pair<std::vector<int>, int>, int> row_of;
  for (int r = 0; r < n; ++r) {
    const auto& [j, c] = basis.elements[r];
    row_of[{std::vector<int>(j.data(), j.data() + j.size()), c}] = r;
  }
  const Vector kc = basis.k.complex();
  for (int col = 0; col < n; ++col) {
    const auto& [j, c] = basis.elements[col];
    for (const auto& t : op.terms) {
      if (t.to_cell != c) continue;
      Complex phase = 0.0;
      for (int a = 0; a < op.d; ++a)
        phase += kc[a] * static_cast<double>(t.offset[a]);
      const Complex factor = t.value * std::exp(Complex(0.0, 1.0) * phase);
      // (g+h)^j = sum_{j' <= j} C(j,j') h^{j-j'} g^{j'}
      for (const auto& jp : multi_indices_up_to(op.d, multi_degree(j))) {
        bool leq = true;
        for (int a = 0; a < op.d; ++a) leq = leq && jp[a] <= j[a];
        if (!leq) continue;
        double hpow = 1.0;
        for (int a = 0; a < op.d; ++a)
          hpow *= std::pow(static_cast<double>(t.offset[a]), j[a] - jp[a]);
        const long long cb = multi_binom(j, jp);
        auto it = row_of.find(
            {std::vector<int>(jp.data(), jp.data() + jp.size()), t.from_cell});
        M(it->second, col) += factor * static_cast<double>(cb) * hpow;
      }
    }
    if (op.zero_shift != 0.0) M(col, col) -= op.zero_shift;
  }
  return M;
}

Matrix bloch_action_nullspace(const PeriodicLatticeOperator& op,
                              const PolynomialBlochBasis& basis,
                              double rel_tol) {
  Matrix M = bloch_action_matrix(op, basis);
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeFullV);
  // The threshold is anchored to the coupling scale as well: at a conical
  // point the whole fiber block vanishes and sigma_max is pure roundoff.
  double scale = std::abs(op.zero_shift);
  for (const auto& t : op.terms) scale += std::abs(t.value);
  const auto& s = svd.singularValues();
  scale = std::max(scale, s.size() ? s(0) : 0.0);
  auto rank_with = [&](double tol) {
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > tol * scale) ++r;
    return r;
  };
  // nullity must survive a x10 threshold perturbation
  const int r = rank_with(rel_tol);
  if (r != rank_with(rel_tol * 10.0) || r != rank_with(rel_tol / 10.0))
    throw InstabilityError(
        "bloch kernel oracle: nullity unstable under threshold perturbation "
        "at k = (" +
        std::to_string(basis.k.real()[0]) + ", ...)");
  return svd.matrixV().rightCols(basis.dim() - r);
}

Complex eval_bloch_polynomial(const PolynomialBlochBasis& basis,
                              const Vector& coeffs, const LatticePoint& x) {
  const Vector kc = basis.k.complex();
  Complex phase = 0.0;
  for (int a = 0; a < basis.d; ++a)
    phase += kc[a] * static_cast<double>(x.g[a]);
  const Complex bloch = std::exp(Complex(0.0, 1.0) * phase);
  Complex out(0.0, 0.0);
  for (int i = 0; i < basis.dim(); ++i) {
    const auto& [j, c] = basis.elements[i];
    if (c != x.cell) continue;
    double mono = 1.0;
    for (int a = 0; a < basis.d; ++a)
      mono *= std::pow(static_cast<double>(x.g[a]), j[a]);
    out += coeffs[i] * mono;
  }
  return bloch * out;
}

long long vinf_dim_oracle(const PeriodicLatticeOperator& op,
                          const std::vector<Quasimomentum>& ks, int N) {
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (std::size_t j = i + 1; j < ks.size(); ++j)
      if (ks[i].equals(ks[j]))
        throw ConfigError("vinf oracle: quasimomenta must be distinct mod G*");
  long long total = 0;
  for (const auto& k : ks) {
    auto basis = polynomial_bloch_basis(op.d, op.cells, k, N);
    total += bloch_action_nullspace(op, basis).cols();
  }
  return total;
}

// ---- twisted differences ----------------------------------------------------

std::size_t WindowedFunction::flat(const LatticePoint& p) const {
  std::size_t idx = 0;
  for (int a = 0; a < lo.size(); ++a)
    idx = idx * static_cast<std::size_t>(hi[a] - lo[a] + 1) +
          static_cast<std::size_t>(p.g[a] - lo[a]);
  return idx * static_cast<std::size_t>(cells) + static_cast<std::size_t>(p.cell);
}

bool WindowedFunction::contains(const LatticePoint& p) const {
  for (int a = 0; a < lo.size(); ++a)
    if (p.g[a] < lo[a] || p.g[a] > hi[a]) return false;
  return p.cell >= 0 && p.cell < cells;
}

WindowedFunction sample_window(
    const std::function<Complex(const LatticePoint&)>& f, const IntVector& lo,
    const IntVector& hi, int cells) {
  WindowedFunction w;
  w.lo = lo;
  w.hi = hi;
  w.cells = cells;
  std::size_t n = static_cast<std::size_t>(cells);
  for (int a = 0; a < lo.size(); ++a)
    n *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
  w.vals.resize(n);
  IntVector g = lo;
  while (true) {
    for (int c = 0; c < cells; ++c) {
      LatticePoint p(g, c);
      w.vals[w.flat(p)] = f(p);
    }
    int i = static_cast<int>(lo.size()) - 1;
    while (i >= 0 && ++g[i] > hi[i]) {
      g[i] = lo[i];
      --i;
    }
    if (i < 0) break;
  }
  return w;
}

WindowedFunction twisted_difference(const WindowedFunction& u,
                                    const IntVector& g,
                                    const Quasimomentum& k) {
  IntVector lo = u.lo, hi = u.hi;
  for (int a = 0; a < lo.size(); ++a) {
    lo[a] = std::max(u.lo[a], u.lo[a] - g[a]);
    hi[a] = std::min(u.hi[a], u.hi[a] - g[a]);
    if (lo[a] > hi[a])
      throw ConfigError("twisted difference: window underflow");
  }
  const Vector kc = k.complex();
  Complex phase = 0.0;
  for (int a = 0; a < g.size(); ++a)
    phase += kc[a] * static_cast<double>(g[a]);
  const Complex tw = std::exp(Complex(0.0, -1.0) * phase);
  return sample_window(
      [&](const LatticePoint& p) {
        LatticePoint q(p.g + g, p.cell);
        return tw * u.at(q) - u.at(p);
      },
      lo, hi, u.cells);
}

// ---- character independence certificate ------------------------------------

namespace {

double tuple_sigma_min(const std::vector<Quasimomentum>& ks,
                       const std::vector<IntVector>& shifts) {
  Matrix W(shifts.size(), ks.size());
  for (std::size_t s = 0; s < shifts.size(); ++s)
    for (std::size_t r = 0; r < ks.size(); ++r) {
      double phase = 0.0;
      for (int a = 0; a < shifts[s].size(); ++a)
        phase += ks[r].real()[a] * shifts[s][a];
      W(s, r) = std::exp(Complex(0.0, phase));
    }
  return Eigen::JacobiSVD<Matrix>(W).singularValues().minCoeff();
}

std::vector<IntVector> shift_pool(int d, int radius) {
  std::vector<IntVector> pool;
  IntVector g = IntVector::Constant(d, -radius);
  while (true) {
    pool.push_back(g);
    int i = d - 1;
    while (i >= 0 && ++g[i] > radius) g[i--] = -radius;
    if (i < 0) break;
  }
  std::sort(pool.begin(), pool.end(), [](const IntVector& a, const IntVector& b) {
    const int na = a.cwiseAbs().maxCoeff(), nb = b.cwiseAbs().maxCoeff();
    if (na != nb) return na < nb;
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] > b[i];  // positive shifts first
    return false;
  });
  return pool;
}

}  // namespace

DedekindCertificate dedekind_shifts(const std::vector<Quasimomentum>& ks) {
  const std::size_t ell = ks.size();
  if (ell == 0) throw ConfigError("dedekind: empty character list");
  const int d = ks[0].d();
  for (std::size_t i = 0; i < ell; ++i)
    for (std::size_t j = i + 1; j < ell; ++j)
      if (ks[i].equals(ks[j]))
        throw ConfigError("dedekind: characters must be distinct mod G*");

  for (int radius = 0; radius <= 20; ++radius) {
    auto pool = shift_pool(d, radius);
    if (pool.size() < ell) continue;
    std::vector<IntVector> chosen;
    for (std::size_t step = 0; step < ell; ++step) {
      double best = -1.0;
      IntVector best_g;
      for (const auto& g : pool) {
        bool used = false;
        for (const auto& c : chosen) used = used || c == g;
        if (used) continue;
        auto trial = chosen;
        trial.push_back(g);
        const double s = tuple_sigma_min(ks, trial);
        if (s > best + 1e-12) {
          best = s;
          best_g = g;
        }
      }
      chosen.push_back(best_g);
    }
    const double smin = tuple_sigma_min(ks, chosen);
    if (smin >= 1e-8) {
      DedekindCertificate cert;
      cert.shifts = chosen;
      cert.sigma_min = smin;
      cert.C = smin / static_cast<double>(ell);
      return cert;
    }
  }
  throw InstabilityError(
      "dedekind: shift search exhausted at radius 20; characters may "
      "coincide within tolerance");
}

// ---- continuum rank oracle ---------------------------------------------------

Poly Poly::constant(int d, double c) {
  Poly p;
  p.d = d;
  if (c != 0.0) p.coeff[std::vector<int>(d, 0)] = c;
  return p;
}

Poly Poly::monomial(const MultiIndex& alpha, double c) {
  Poly p;
  p.d = static_cast<int>(alpha.size());
  if (c != 0.0)
    p.coeff[std::vector<int>(alpha.data(), alpha.data() + alpha.size())] = c;
  return p;
}

Poly Poly::derivative(int axis) const {
  Poly out;
  out.d = d;
  for (const auto& [a, c] : coeff) {
    if (a[axis] == 0) continue;
    auto b = a;
    b[axis] -= 1;
    out.coeff[b] += c * a[axis];
  }
  std::erase_if(out.coeff, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

Poly Poly::times_var(int axis) const {
  Poly out;
  out.d = d;
  for (const auto& [a, c] : coeff) {
    auto b = a;
    b[axis] += 1;
    out.coeff[b] += c;
  }
  return out;
}

double Poly::eval(const RealVector& w) const {
  double s = 0.0;
  for (const auto& [a, c] : coeff) {
    double mono = c;
    for (int i = 0; i < d; ++i) mono *= std::pow(w[i], a[i]);
    s += mono;
  }
  return s;
}

void Poly::add(const Poly& other, double scale) {
  for (const auto& [a, c] : other.coeff) {
    coeff[a] += scale * c;
    if (coeff[a] == 0.0) coeff.erase(a);
  }
}

bool Poly::empty() const { return coeff.empty(); }

RadialFn RadialFn::fundamental(int d, const RealVector& center) {
  if (d < 3) throw ConfigError("fundamental solution engine requires d >= 3");
  RadialFn f;
  f.d = d;
  f.center = center;
  f.parts[2 - d] = Poly::constant(d, 1.0);
  return f;
}

RadialFn RadialFn::derivative(int axis) const {
  RadialFn out;
  out.d = d;
  out.center = center;
  auto add_part = [&](int s, const Poly& p, double scale) {
    if (p.empty() || scale == 0.0) return;
    auto it = out.parts.find(s);
    if (it == out.parts.end()) {
      Poly z;
      z.d = d;
      z.add(p, scale);
      out.parts[s] = std::move(z);
    } else {
      it->second.add(p, scale);
    }
  };
  for (const auto& [s, P] : parts) {
    add_part(s, P.derivative(axis), 1.0);
    if (s != 0) add_part(s - 2, P.times_var(axis), static_cast<double>(s));
  }
  std::erase_if(out.parts, [](const auto& kv) { return kv.second.empty(); });
  return out;
}

double RadialFn::eval(const RealVector& x) const {
  const RealVector w = x - center;
  const double r2 = w.squaredNorm();
  if (r2 == 0.0) throw ConfigError("radial function evaluated at its center");
  double s = 0.0;
  for (const auto& [e, P] : parts) s += P.eval(w) * std::pow(r2, e / 2.0);
  return s;
}

int RadialFn::decay_exponent() const {
  int best = std::numeric_limits<int>::min();
  for (const auto& [s, P] : parts) {
    int deg = 0;
    for (const auto& [a, c] : P.coeff) {
      int t = 0;
      for (int v : a) t += v;
      deg = std::max(deg, t);
    }
    best = std::max(best, s + deg);
  }
  return best;
}

ContinuumFn ContinuumFn::derivative(int axis) const {
  ContinuumFn out;
  out.singular = singular;
  if (singular)
    out.rad = rad.derivative(axis);
  else
    out.poly = poly.derivative(axis);
  return out;
}

double ContinuumFn::eval(const RealVector& x) const {
  return singular ? rad.eval(x) : poly.eval(x);
}

std::vector<Poly> harmonic_polynomial_basis(int d, int N) {
  std::vector<Poly> out;
  for (int deg = 0; deg <= N; ++deg) {
    auto monos = multi_indices_exact(d, deg);
    auto rows = multi_indices_exact(d, deg - 2);
    RealMatrix D = RealMatrix::Zero(static_cast<int>(rows.size()),
                                    static_cast<int>(monos.size()));
    for (std::size_t c = 0; c < monos.size(); ++c)
      for (int axis = 0; axis < d; ++axis) {
        if (monos[c][axis] < 2) continue;
        MultiIndex b = monos[c];
        b[axis] -= 2;
        const double coef = monos[c][axis] * (monos[c][axis] - 1);
        for (std::size_t r = 0; r < rows.size(); ++r)
          if (rows[r] == b) D(r, c) += coef;
      }
    RealMatrix null = rows.empty()
                          ? RealMatrix::Identity(monos.size(), monos.size())
                          : nullspace_basis(D, 1e-10);
    for (int c = 0; c < null.cols(); ++c) {
      Poly p;
      p.d = d;
      for (std::size_t m = 0; m < monos.size(); ++m) {
        const double v = null(m, c);
        if (std::abs(v) > 1e-13) p.add(Poly::monomial(monos[m], v));
      }
      out.push_back(p);
    }
  }
  return out;
}

namespace {

long long effective_poly_order(const ContinuumGrowth& growth, int d) {
  if (growth.decaying) return -1;
  const GrowthSpec& g = growth.spec;
  if (g.is_inf())
    return g.N < 0 ? -1 : static_cast<long long>(std::floor(g.N));
  return strict_floor(g.N - d / g.p);
}

bool singular_admissible(int exponent, const ContinuumGrowth& growth, int d) {
  if (growth.decaying) return exponent < 0;
  const GrowthSpec& g = growth.spec;
  if (g.is_inf()) return static_cast<double>(exponent) <= g.N;
  return g.p * (static_cast<double>(exponent) - g.N) < -static_cast<double>(d);
}

}  // namespace

int continuum_space_dim(const RiggedPointDivisor& mu,
                        const ContinuumGrowth& growth, int d) {
  if (mu.plus.is_lattice() || mu.minus.is_lattice())
    throw ConfigError("continuum solver: lattice divisor supplied");

  std::vector<ContinuumFn> candidates;
  for (const auto& pt : mu.plus.continuum) {
    for (const auto& alpha : pt.alphas) {
      ContinuumFn f;
      f.singular = true;
      f.rad = RadialFn::fundamental(d, pt.x);
      for (int axis = 0; axis < d; ++axis)
        for (int rep = 0; rep < alpha[axis]; ++rep)
          f.rad = f.rad.derivative(axis);
      if (singular_admissible(2 - d - multi_degree(alpha), growth, d))
        candidates.push_back(std::move(f));
    }
  }
  const long long neff = effective_poly_order(growth, d);
  if (neff >= 0)
    for (const auto& p : harmonic_polynomial_basis(d, static_cast<int>(neff))) {
      ContinuumFn f;
      f.singular = false;
      f.poly = p;
      candidates.push_back(std::move(f));
    }
  if (candidates.empty()) return 0;

  std::vector<std::pair<RealVector, MultiIndex>> constraints;
  for (const auto& pt : mu.minus.continuum) {
    for (const auto& y : mu.plus.continuum)
      if ((pt.x - y.x).norm() < 1e-9)
        throw ConfigError("continuum solver: constraint at a singular center");
    for (const auto& beta : pt.alphas) constraints.emplace_back(pt.x, beta);
  }
  if (constraints.empty()) return static_cast<int>(candidates.size());

  RealMatrix C(static_cast<int>(constraints.size()),
               static_cast<int>(candidates.size()));
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    const auto& [z, beta] = constraints[r];
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      ContinuumFn f = candidates[c];
      for (int axis = 0; axis < d; ++axis)
        for (int rep = 0; rep < beta[axis]; ++rep) f = f.derivative(axis);
      C(r, c) = f.eval(z);
    }
  }
  return static_cast<int>(candidates.size()) -
         stable_rank(C, 1e-10, "continuum constraint matrix");
}

namespace {

std::vector<RealVector> generic_points(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<RealVector> pts;
  int guard = 0;
  while (static_cast<int>(pts.size()) < n) {
    RealVector x(d);
    for (int a = 0; a < d; ++a) x[a] = U(rng);
    bool ok = true;
    for (const auto& y : pts) ok = ok && (x - y).norm() > 0.35;
    if (ok) pts.push_back(x);
    if (++guard > 10000)
      throw ConfigError("generic point sampling failed to separate");
  }
  return pts;
}

std::vector<MultiIndex> first_order_indices(int d) {
  return multi_indices_exact(d, 1);
}

}  // namespace

GapExperiment rrl_gap_experiment(int ell, int d, int N, std::uint64_t seed) {
  if (d < 3) throw ConfigError("gap experiment requires d >= 3");
  for (int attempt = 0;; ++attempt) {
    try {
      auto pts = generic_points(ell, d, seed + attempt);
      std::vector<ContinuumSpanPoint> minus;
      for (const auto& z : pts) minus.push_back({z, first_order_indices(d)});
      RiggedPointDivisor mu =
          make_divisor(DeltaSpan{}, continuum_span(std::move(minus)));

      GapExperiment out;
      const long long dim_plus =
          continuum_space_dim(mu, ContinuumGrowth::of(GrowthSpec::inf(N)), d);
      const long long dim_minus = continuum_space_dim(
          inverse_divisor(mu), ContinuumGrowth::of(GrowthSpec(1.0, -N)), d);
      out.lhs = dim_plus - dim_minus;
      const DegreeReport deg = degree(symbol_laplacian(d), mu);
      out.rhs = harmonic_dim(d, N) + deg.degree;
      out.gap = out.lhs - out.rhs;
      return out;
    } catch (const InstabilityError&) {
      if (attempt >= 5) throw;
    }
  }
}

NegativeDivisorExperiment negative_divisor_equality_experiment(
    int d, int M0, int M1, const GrowthSpec& growth, std::uint64_t seed) {
  if (M1 < 0 || M0 < M1)
    throw ConfigError("negative divisor experiment: need 0 <= M1 <= M0");
  const bool ok = growth.is_inf() ? growth.N >= M0
                                  : growth.N > d / growth.p + M0;
  if (!ok)
    throw ConfigError(
        "negative divisor experiment: growth must satisfy p=inf & N >= M0 or "
        "N > d/p + M0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RealVector x0(d);
  for (int a = 0; a < d; ++a) x0[a] = U(rng);

  std::vector<MultiIndex> alphas;
  for (int deg = M1; deg <= M0; ++deg)
    for (const auto& a : multi_indices_exact(d, deg)) alphas.push_back(a);
  RiggedPointDivisor mu =
      make_divisor(DeltaSpan{}, continuum_span({{x0, alphas}}));

  NegativeDivisorExperiment out;
  out.dim = continuum_space_dim(mu, ContinuumGrowth::of(growth), d);
  std::vector<EdgeData> edge{{1, 2, true, 1}};
  out.expected =
      dim_Vp(edge, growth, d).value + degree(symbol_laplacian(d), mu).degree;
  out.equal = out.dim == out.expected;
  return out;
}

// ---- truncated lattice solvers -----------------------------------------------

namespace {

struct BoxIndex {
  IntVector lo, hi;
  int cells = 1;
  int d = 1;

  std::size_t size() const {
    std::size_t n = static_cast<std::size_t>(cells);
    for (int a = 0; a < d; ++a)
      n *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
    return n;
  }
  bool contains(const LatticePoint& p) const {
    for (int a = 0; a < d; ++a)
      if (p.g[a] < lo[a] || p.g[a] > hi[a]) return false;
    return true;
  }
  std::size_t flat(const LatticePoint& p) const {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a)
      idx = idx * static_cast<std::size_t>(hi[a] - lo[a] + 1) +
            static_cast<std::size_t>(p.g[a] - lo[a]);
    return idx * cells + p.cell;
  }
  LatticePoint unflat(std::size_t idx) const {
    LatticePoint p;
    p.cell = static_cast<int>(idx % cells);
    idx /= cells;
    p.g = IntVector(d);
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t span = static_cast<std::size_t>(hi[a] - lo[a] + 1);
      p.g[a] = lo[a] + static_cast<int>(idx % span);
      idx /= span;
    }
    return p;
  }
};

BoxIndex centered_box(const PeriodicLatticeOperator& op, int radius) {
  BoxIndex b;
  b.d = op.d;
  b.cells = op.cells;
  b.lo = IntVector::Constant(op.d, -radius);
  b.hi = IntVector::Constant(op.d, radius);
  return b;
}

Eigen::SparseMatrix<Complex> truncated_matrix(const PeriodicLatticeOperator& op,
                                              const BoxIndex& box) {
  std::vector<Eigen::Triplet<Complex>> trip;
  const std::size_t n = box.size();
  for (std::size_t row = 0; row < n; ++row) {
    const LatticePoint x = box.unflat(row);
    if (op.zero_shift != 0.0)
      trip.emplace_back(static_cast<int>(row), static_cast<int>(row),
                        Complex(-op.zero_shift, 0.0));
    for (const auto& t : op.terms) {
      if (t.from_cell != x.cell) continue;
      LatticePoint y(x.g + t.offset, t.to_cell);
      if (!box.contains(y)) continue;  // exterior-zero truncation
      trip.emplace_back(static_cast<int>(row), static_cast<int>(box.flat(y)),
                        t.value);
    }
  }
  Eigen::SparseMatrix<Complex> A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

GreenResult green_function(const PeriodicLatticeOperator& op,
                           const LatticePoint& source, int radius,
                           double margin) {
  if (!(margin >= 1e-6))
    throw NotApplicableError(
        "green_function: requires 0 outside the spectrum with margin");
  const BoxIndex box = centered_box(op, radius);
  Eigen::SparseMatrix<Complex> A = truncated_matrix(op, box);
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(A);
  if (lu.info() != Eigen::Success)
    throw InstabilityError("green_function: singular truncated system");
  Vector rhs = Vector::Zero(static_cast<int>(box.size()));
  rhs[static_cast<int>(box.flat(source))] = 1.0;
  Vector g = lu.solve(rhs);

  GreenResult out;
  out.radius = radius;
  out.values.lo = box.lo;
  out.values.hi = box.hi;
  out.values.cells = box.cells;
  out.values.vals.assign(g.data(), g.data() + g.size());

  // log ||G|| против |g| on the annulus R/2 <= |g| <= R-2
  std::vector<double> xs, ys;
  IntVector t = box.lo;
  while (true) {
    const double dist = t.cast<double>().norm();
    if (dist >= radius / 2.0 && dist <= radius - 2.0) {
      double cell_sq = 0.0;
      for (int c = 0; c < box.cells; ++c)
        cell_sq += std::norm(g[static_cast<int>(box.flat(LatticePoint(t, c)))]);
      if (cell_sq > 0.0) {
        xs.push_back(dist);
        ys.push_back(0.5 * std::log(cell_sq));
      }
    }
    int i = op.d - 1;
    while (i >= 0 && ++t[i] > box.hi[i]) {
      t[i] = box.lo[i];
      --i;
    }
    if (i < 0) break;
  }
  if (xs.size() < 8)
    throw ConfigError("green_function: annulus too thin for a decay fit");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = intercept + slope * xs[i];
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  out.decay_rate = -slope;
  out.fit_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

TruncatedDims truncated_L_dim_estimate(const PeriodicLatticeOperator& op,
                                       const RiggedPointDivisor& mu,
                                       const std::vector<int>& radii,
                                       double margin) {
  if (!(margin >= 1e-6))
    throw NotApplicableError(
        "truncated dimension estimate: requires 0 outside the spectrum");
  if (mu.plus.is_continuum() || mu.minus.is_continuum())
    throw ConfigError("truncated dimension estimate: lattice divisors only");

  TruncatedDims out;
  for (int radius : radii) {
    const BoxIndex box = centered_box(op, radius);
    const std::size_t n = box.size();
    Matrix A = Matrix(truncated_matrix(op, box));

    // project the rows of A off span L+
    const auto& plus = mu.plus.lattice_basis;
    if (!plus.empty()) {
      Matrix L = Matrix::Zero(static_cast<int>(n),
                              static_cast<int>(plus.size()));
      for (std::size_t c = 0; c < plus.size(); ++c)
        for (const auto& [p, v] : plus[c].entries())
          if (box.contains(p)) L(static_cast<int>(box.flat(p)), c) = v;
      Matrix Q = Eigen::HouseholderQR<Matrix>(L).householderQ() *
                 Matrix::Identity(L.rows(), std::min(L.rows(), L.cols()));
      A -= Q * (Q.adjoint() * A);
    }

    const auto& minus = mu.minus.lattice_basis;
    Matrix sys(static_cast<int>(n) + static_cast<int>(minus.size()),
               static_cast<int>(n));
    sys.topRows(static_cast<int>(n)) = A;
    for (std::size_t r = 0; r < minus.size(); ++r) {
      Vector row = Vector::Zero(static_cast<int>(n));
      for (const auto& [p, v] : minus[r].entries())
        if (box.contains(p)) row[static_cast<int>(box.flat(p))] = v;
      // bilinear pairing: no conjugation
      sys.row(static_cast<int>(n) + static_cast<int>(r)) = row.transpose();
    }
    out.dims.push_back(stable_nullity(sys, 1e-10, "truncated solution space"));
  }
  for (std::size_t i = 0; i + 2 < out.dims.size(); ++i)
    if (out.dims[i] == out.dims[i + 1] && out.dims[i] == out.dims[i + 2])
      out.stabilized = out.dims[i];
  if (out.dims.size() == 3 && out.dims[0] == out.dims[1] &&
      out.dims[1] == out.dims[2])
    out.stabilized = out.dims[0];
  return out;
}

}  // namespace lrr
