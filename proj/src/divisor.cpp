#include "lrr/divisor.hpp"

#include <algorithm>
#include <map>

#include "lrr/linalg.hpp"

namespace lrr {

namespace {

bool same_index(const MultiIndex& a, const MultiIndex& b) {
  return a.size() == b.size() && a == b;
}

// Dense matrix whose columns are the given functions over their joint support.
Matrix functions_on_support(const std::vector<LatticeFunction>& fns,
                            std::vector<LatticePoint>& support_out) {
  std::set<LatticePoint> support;
  for (const auto& f : fns)
    for (const auto& [p, v] : f.entries()) support.insert(p);
  support_out.assign(support.begin(), support.end());
  std::map<LatticePoint, int> row;
  int r = 0;
  for (const auto& p : support_out) row[p] = r++;
  Matrix m = Matrix::Zero(static_cast<int>(support_out.size()),
                          static_cast<int>(fns.size()));
  for (std::size_t c = 0; c < fns.size(); ++c)
    for (const auto& [p, v] : fns[c].entries()) m(row.at(p), c) = v;
  return m;
}

}  // namespace

int DeltaSpan::dim() const {
  if (is_lattice()) return static_cast<int>(lattice_basis.size());
  int n = 0;
  for (const auto& pt : continuum) n += static_cast<int>(pt.alphas.size());
  return n;
}

std::set<LatticePoint> DeltaSpan::lattice_support() const {
  std::set<LatticePoint> support;
  for (const auto& f : lattice_basis)
    for (const auto& [p, v] : f.entries()) support.insert(p);
  return support;
}

DeltaSpan lattice_delta_span(const std::vector<LatticePoint>& points) {
  std::set<LatticePoint> seen(points.begin(), points.end());
  if (seen.size() != points.size())
    throw ConfigError("delta span: duplicate points");
  DeltaSpan s;
  for (const auto& p : points) s.lattice_basis.push_back(delta(p.g, p.cell));
  return s;
}

DeltaSpan lattice_function_span(std::vector<LatticeFunction> basis) {
  std::erase_if(basis, [](const LatticeFunction& f) { return f.empty(); });
  if (!basis.empty()) {
    std::vector<LatticePoint> support;
    Matrix m = functions_on_support(basis, support);
    if (stable_rank(m, 1e-10, "lattice span basis") !=
        static_cast<int>(basis.size()))
      throw ConfigError("delta span: basis is linearly dependent");
  }
  DeltaSpan s;
  s.lattice_basis = std::move(basis);
  return s;
}

DeltaSpan continuum_span(std::vector<ContinuumSpanPoint> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& alphas = points[i].alphas;
    std::vector<MultiIndex> dedup;
    for (const auto& a : alphas) {
      bool found = false;
      for (const auto& b : dedup) found = found || same_index(a, b);
      if (!found) dedup.push_back(a);
    }
    alphas = std::move(dedup);
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if ((points[i].x - points[j].x).norm() < 1e-12)
        throw ConfigError("delta span: duplicate continuum points");
  }
  DeltaSpan s;
  s.continuum = std::move(points);
  return s;
}

RiggedPointDivisor make_divisor(DeltaSpan plus, DeltaSpan minus) {
  if (plus.is_lattice() && minus.is_lattice()) {
    auto sp = plus.lattice_support();
    for (const auto& p : minus.lattice_support())
      if (sp.count(p)) throw ConfigError("divisor: D+ and D- intersect");
  }
  if (plus.is_continuum() && minus.is_continuum()) {
    for (const auto& a : plus.continuum)
      for (const auto& b : minus.continuum)
        if ((a.x - b.x).norm() < 1e-12)
          throw ConfigError("divisor: D+ and D- intersect");
  }
  if ((plus.is_lattice() && minus.is_continuum()) ||
      (plus.is_continuum() && minus.is_lattice()))
    throw ConfigError("divisor: mixed lattice/continuum sides");
  return RiggedPointDivisor{std::move(plus), std::move(minus)};
}

RiggedPointDivisor inverse_divisor(const RiggedPointDivisor& mu) {
  return RiggedPointDivisor{mu.minus, mu.plus};
}
RiggedPointDivisor positive_part(const RiggedPointDivisor& mu) {
  return RiggedPointDivisor{mu.plus, DeltaSpan{}};
}
RiggedPointDivisor negative_part(const RiggedPointDivisor& mu) {
  return RiggedPointDivisor{DeltaSpan{}, mu.minus};
}

int ContinuumSymbol::order() const {
  int m = 0;
  for (const auto& [a, c] : coeffs)
    if (c != 0.0) m = std::max(m, multi_degree(a));
  return m;
}

ContinuumSymbol symbol_laplacian(int d) {
  ContinuumSymbol p;
  p.d = d;
  for (int i = 0; i < d; ++i) {
    MultiIndex a = MultiIndex::Zero(d);
    a[i] = 2;
    p.coeffs.emplace_back(a, -1.0);
  }
  return p;
}

ContinuumSymbol symbol_bilaplacian(int d) {
  ContinuumSymbol p;
  p.d = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      MultiIndex a = MultiIndex::Zero(d);
      a[i] += 2;
      a[j] += 2;
      bool merged = false;
      for (auto& [b, c] : p.coeffs)
        if (same_index(a, b)) {
          c += 1.0;
          merged = true;
        }
      if (!merged) p.coeffs.emplace_back(a, 1.0);
    }
  return p;
}

ContinuumSymbol transpose(const ContinuumSymbol& p) {
  ContinuumSymbol q = p;
  for (auto& [a, c] : q.coeffs)
    if (multi_degree(a) % 2 == 1) c = -c;
  return q;
}

int secondary_dim_lattice(const PeriodicLatticeOperator& op,
                          const DeltaSpan& span) {
  if (span.trivial()) return 0;
  if (!span.is_lattice())
    throw ConfigError("secondary_dim_lattice: span is not a lattice span");

  const auto support = span.lattice_support();
  std::vector<LatticePoint> D(support.begin(), support.end());
  std::vector<LatticeFunction> images;
  images.reserve(D.size());
  for (const auto& p : D) images.push_back(apply(op, delta(p.g, p.cell)));

  std::vector<LatticeFunction> all = images;
  all.insert(all.end(), span.lattice_basis.begin(), span.lattice_basis.end());
  std::vector<LatticePoint> rows;
  Matrix big = functions_on_support(all, rows);
  Matrix A = big.leftCols(static_cast<int>(D.size()));
  Matrix L = big.rightCols(static_cast<int>(span.lattice_basis.size()));

  // Injectivity of op on E'_D is an assumption of the degree calculus; it is
  // checked per instance rather than taken on faith.
  if (stable_rank(A, 1e-10, "injectivity on divisor support") !=
      static_cast<int>(D.size()))
    throw NotApplicableError(
        "operator is not injective on functions supported on the divisor");

  // u works iff (I - P_L) A u = 0 with P_L the projector onto col span of L.
  Matrix Q = Eigen::HouseholderQR<Matrix>(L).householderQ() *
             Matrix::Identity(L.rows(), std::min(L.rows(), L.cols()));
  Matrix constrained = A - Q * (Q.adjoint() * A);
  return stable_nullity(constrained, 1e-10, "secondary space dimension");
}

int secondary_dim_continuum(const ContinuumSymbol& p, const DeltaSpan& span) {
  if (span.trivial()) return 0;
  if (!span.is_continuum())
    throw ConfigError("secondary_dim_continuum: span is not a continuum span");
  const int m = p.order();
  if (m == 0) throw ConfigError("secondary_dim_continuum: trivial symbol");

  int total = 0;
  for (const auto& pt : span.continuum) {
    int max_order = 0;
    for (const auto& a : pt.alphas) max_order = std::max(max_order, multi_degree(a));
    const int K = max_order - m;
    if (K < 0) continue;

    auto cand = multi_indices_up_to(p.d, K);
    auto image = multi_indices_up_to(p.d, K + m);
    auto in_span = [&](const MultiIndex& a) {
      for (const auto& b : pt.alphas)
        if (same_index(a, b)) return true;
      return false;
    };
    std::vector<MultiIndex> constrained_rows;
    for (const auto& a : image)
      if (!in_span(a)) constrained_rows.push_back(a);

    RealMatrix M = RealMatrix::Zero(static_cast<int>(constrained_rows.size()),
                                    static_cast<int>(cand.size()));
    for (std::size_t c = 0; c < cand.size(); ++c)
      for (const auto& [beta, coef] : p.coeffs) {
        MultiIndex target = cand[c] + beta;
        for (std::size_t r = 0; r < constrained_rows.size(); ++r)
          if (same_index(constrained_rows[r], target)) M(r, c) += coef;
      }
    total += stable_nullity(M, 1e-10, "continuum secondary space");
  }
  return total;
}

namespace {

DegreeReport assemble_degree(long long lp, long long ltp, long long lm,
                             long long ltm) {
  if (ltp > lp || ltm > lm)
    throw InstabilityError("degree: secondary dimension exceeds l");
  DegreeReport r;
  r.ell_plus = lp;
  r.ell_tilde_plus = ltp;
  r.ell_minus = lm;
  r.ell_tilde_minus = ltm;
  r.degree = (lp - ltp) - (lm - ltm);
  return r;
}

}  // namespace

DegreeReport degree(const PeriodicLatticeOperator& op,
                    const RiggedPointDivisor& mu) {
  return assemble_degree(mu.plus.dim(), secondary_dim_lattice(op, mu.plus),
                         mu.minus.dim(),
                         secondary_dim_lattice(transpose(op), mu.minus));
}

DegreeReport degree(const ContinuumSymbol& p, const RiggedPointDivisor& mu) {
  return assemble_degree(mu.plus.dim(), secondary_dim_continuum(p, mu.plus),
                         mu.minus.dim(),
                         secondary_dim_continuum(transpose(p), mu.minus));
}

long long point_divisor_degree_closed_form(int n, int m,
                                           const std::vector<int>& poles,
                                           const std::vector<int>& zeros) {
  auto block = [&](long long t) {
    return binom0(t + n - 1, n) - binom0(t + n - 1 - m, n);
  };
  long long deg = 0;
  for (int pj : poles) {
    if (pj <= 0) throw ConfigError("point divisor: pole orders must be positive");
    deg += block(pj);
  }
  for (int qj : zeros) {
    if (qj >= 0) throw ConfigError("point divisor: zero orders must be negative");
    deg -= block(-static_cast<long long>(qj));
  }
  return deg;
}

RiggedPointDivisor point_divisor_to_rigged(
    int n, const std::vector<RealVector>& pole_pts, const std::vector<int>& poles,
    const std::vector<RealVector>& zero_pts, const std::vector<int>& zeros) {
  if (pole_pts.size() != poles.size() || zero_pts.size() != zeros.size())
    throw ConfigError("point divisor: point/order count mismatch");
  std::vector<ContinuumSpanPoint> plus, minus;
  for (std::size_t j = 0; j < poles.size(); ++j)
    plus.push_back({pole_pts[j], multi_indices_up_to(n, poles[j] - 1)});
  for (std::size_t j = 0; j < zeros.size(); ++j)
    minus.push_back({zero_pts[j], multi_indices_up_to(n, -zeros[j] - 1)});
  DeltaSpan sp = plus.empty() ? DeltaSpan{} : continuum_span(std::move(plus));
  DeltaSpan sm = minus.empty() ? DeltaSpan{} : continuum_span(std::move(minus));
  return make_divisor(std::move(sp), std::move(sm));
}

}  // namespace lrr
