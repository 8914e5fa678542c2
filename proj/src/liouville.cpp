#include "lrr/liouville.hpp"

#include <algorithm>
#include <cmath>

namespace lrr {

const char* to_string(DimStatus s) {
  switch (s) {
    case DimStatus::Valid: return "valid";
    case DimStatus::ValidAllN: return "valid-all-N";
    case DimStatus::OutsideGuarantee: return "outside-guarantee";
    case DimStatus::Inapplicable: return "inapplicable";
  }
  return "?";
}

DimValue dim_Vinf(const std::vector<EdgeData>& edges, long long N, int d) {
  if (N < 0) throw ConfigError("dim_Vinf: N must be >= 0");
  DimValue out;
  if (edges.empty()) {
    out.value = 0;
    out.status = DimStatus::Valid;
    out.note = "empty Fermi surface: no polynomially growing solutions";
    return out;
  }
  int min_ell0 = std::numeric_limits<int>::max();
  bool all_det = true;
  long long total = 0;
  for (const auto& e : edges) {
    if (e.ell0 <= 0) {
      out.status = DimStatus::Inapplicable;
      out.note = "undetermined Taylor order at a Fermi point";
      return out;
    }
    min_ell0 = std::min(min_ell0, e.ell0);
    all_det = all_det && e.det_leading_nonzero;
    total += e.multiplicity * (binom0(d + N, d) - binom0(d + N - e.ell0, d));
  }
  out.value = total;
  if (N < min_ell0)
    out.status = DimStatus::Valid;
  else if (all_det)
    out.status = DimStatus::ValidAllN;
  else
    out.status = DimStatus::OutsideGuarantee;
  return out;
}

DimValue dim_Vp(const std::vector<EdgeData>& edges, const GrowthSpec& growth,
                int d) {
  if (growth.is_inf()) {
    if (growth.N < 0) return {0, DimStatus::Valid, "p=inf, N<0: trivial space"};
    return dim_Vinf(edges, static_cast<long long>(std::floor(growth.N)), d);
  }
  if (growth.p * growth.N <= static_cast<double>(d))
    return {0, DimStatus::Valid, "pN <= d: trivial space"};
  const long long arg = strict_floor(growth.N - d / growth.p);
  if (arg < 0) return {0, DimStatus::Valid, "reduced order below zero"};
  return dim_Vinf(edges, arg, d);
}

long long crude_bound(const std::vector<EdgeData>& edges, long long N, int d) {
  long long kernels = 0;
  for (const auto& e : edges) kernels += e.kernel_dim;
  return binom0(d + N, N) * kernels;
}

namespace {

std::string fmt_ll(long long v) { return std::to_string(v); }

}  // namespace

LRRReport lrr_bounds(const DegreeReport& deg_mu, const DegreeReport& deg_mu_plus,
                     const std::vector<EdgeData>& edges, const GrowthSpec& growth,
                     int d, const std::vector<PointAudit>& audits) {
  LRRReport rep;
  rep.deg = deg_mu;
  rep.deg_plus = deg_mu_plus.degree;

  const bool baseline_growth =
      (growth.is_inf() && growth.N >= 0.0) ||
      (!growth.is_inf() && growth.p * growth.N > static_cast<double>(d));
  const bool improved_growth =
      (!growth.is_inf() && growth.p >= 2.0 && growth.N >= 0.0) ||
      (growth.is_inf() && growth.N >= 0.0) ||
      (!growth.is_inf() && growth.p < 2.0 &&
       2.0 * growth.p * growth.N > (2.0 - growth.p) * d);
  bool a2_all = !audits.empty();
  bool strength_all = !audits.empty();
  for (const auto& a : audits) {
    a2_all = a2_all && a.a2;
    strength_all = strength_all && a.strength;
  }

  rep.audit.push_back({"growth-baseline", baseline_growth,
                       "p=inf & N>=0, or pN > d"});
  rep.audit.push_back({"growth-improved", improved_growth,
                       "p>=2 & N>=0, or 2pN > (2-p)d"});
  rep.audit.push_back({"A2", a2_all, "integrability of the reduced inverse"});
  rep.audit.push_back({"A2-strengthened", strength_all,
                       "integrability of the squared reduced inverse"});

  DimValue dim = dim_Vp(edges, growth, d);
  if (!dim.ok()) {
    rep.dim_kind = LRRReport::DimKind::Inapplicable;
    rep.failed_hypotheses.push_back("taylor-order-undetermined");
    return rep;
  }
  rep.dim_kind = LRRReport::DimKind::Finite;
  rep.dim_value = dim.value;
  rep.dim_status = dim.status;
  rep.unverified_hypothesis = dim.status == DimStatus::OutsideGuarantee;

  const bool baseline_ok = baseline_growth && a2_all;
  const bool improved_ok = improved_growth && strength_all;
  rep.applicable = baseline_ok || improved_ok;
  if (!rep.applicable) {
    if (!baseline_growth && !improved_growth)
      rep.failed_hypotheses.push_back("growth-regime");
    if (baseline_growth && !a2_all) rep.failed_hypotheses.push_back("A2");
    if (improved_growth && !strength_all)
      rep.failed_hypotheses.push_back("A2-strengthened");
    return rep;
  }

  rep.lower_bound = dim.value + deg_mu.degree;
  rep.upper_bound = dim.value + deg_mu_plus.degree;
  rep.existence = *rep.lower_bound > 0;

  rep.equality_claims.push_back(
      "dim L_p(mu+, A, N) = dim V^p_N + deg(mu+) = " +
      fmt_ll(dim.value + deg_mu_plus.degree));
  if (improved_ok && !growth.is_inf() && growth.p == 2.0 && growth.N == 0.0) {
    rep.equality_claims.push_back("dim L_2(mu+, A, 0) = deg(mu+) = " +
                                  fmt_ll(deg_mu_plus.degree));
    rep.equality_claims.push_back(
        "dim L_2(mu, A, 0) = deg(mu) + dim L_2(mu^-1, A*, 0)");
  }
  return rep;
}

LRRReport empty_fermi_bounds(const DegreeReport& deg_mu, bool plus_trivial,
                             bool minus_trivial, double margin,
                             double min_margin) {
  if (!(margin >= min_margin))
    throw NotApplicableError(
        "empty Fermi surface report requires 0 outside the spectrum with "
        "margin >= " +
        std::to_string(min_margin));
  LRRReport rep;
  rep.deg = deg_mu;
  rep.deg_plus = deg_mu.ell_plus - deg_mu.ell_tilde_plus;
  rep.dim_kind = LRRReport::DimKind::Finite;
  rep.dim_value = 0;
  rep.dim_status = DimStatus::Valid;
  rep.applicable = true;
  rep.all_growth_variants_equal = true;
  rep.audit.push_back({"spectral-margin", true,
                       "dist(0, spectrum) = " + std::to_string(margin)});

  if (minus_trivial) {
    // positive divisor: dimension equals the degree
    rep.lower_bound = deg_mu.degree;
    rep.upper_bound = deg_mu.degree;
    rep.equality_claims.push_back("dim L(mu) = deg(mu) = " +
                                  fmt_ll(deg_mu.degree));
  } else if (plus_trivial) {
    // negative divisor: the inverse is positive for the transpose, so the
    // correction term equals -deg and the dimension collapses to zero
    rep.lower_bound = 0;
    rep.upper_bound = 0;
    rep.equality_claims.push_back(
        "dim L(mu) = deg(mu) + dim L(mu^-1, A*) = 0");
  } else {
    rep.lower_bound = std::max<long long>(deg_mu.degree, 0);
    rep.upper_bound = rep.deg_plus;
    rep.equality_claims.push_back(
        "dim L(mu) = deg(mu) + dim L(mu^-1, A*), correction in [0, " +
        fmt_ll(deg_mu.ell_minus - deg_mu.ell_tilde_minus) + "]");
  }
  rep.existence = rep.lower_bound && *rep.lower_bound > 0;
  return rep;
}

}  // namespace lrr
