#ifndef LRR_LIOUVILLE_HPP
#define LRR_LIOUVILLE_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lrr/combinatorics.hpp"
#include "lrr/divisor.hpp"
#include "lrr/types.hpp"

namespace lrr {

// (p, N): solutions whose cell norms weighted by <g>^{-N} lie in l^p.
struct GrowthSpec {
  double p = std::numeric_limits<double>::infinity();
  double N = 0.0;

  GrowthSpec() = default;
  GrowthSpec(double p_, double N_) : p(p_), N(N_) {
    if (!(p >= 1.0)) throw ConfigError("growth: p must be >= 1");
  }
  static GrowthSpec inf(double N_) {
    return GrowthSpec(std::numeric_limits<double>::infinity(), N_);
  }
  bool is_inf() const { return std::isinf(p); }
  // Hoelder conjugate.
  double conjugate() const {
    if (is_inf()) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
  }
};

// Harmonic polynomials of degree <= N in d variables.
inline long long harmonic_dim(int d, long long N) {
  if (N < 0) return 0;
  return binom0(d + N, d) - binom0(d + N - 2, d);
}

// Homogeneous polynomials of degree N in d variables.
inline long long homogeneous_dim(int d, long long N) {
  if (N < 0) return 0;
  return binom0(d + N - 1, N);
}

// Per-point spectral-edge data consumed by the dimension formulas.
struct EdgeData {
  int multiplicity = 1;          // m_k, algebraic multiplicity of eigenvalue 0
  int ell0 = 0;                  // 0 means undetermined
  bool det_leading_nonzero = false;
  int kernel_dim = 1;            // geometric multiplicity, for the crude bound
};

enum class DimStatus { Valid, ValidAllN, OutsideGuarantee, Inapplicable };

struct DimValue {
  long long value = 0;
  DimStatus status = DimStatus::Valid;
  std::string note;

  bool ok() const { return status != DimStatus::Inapplicable; }
};

const char* to_string(DimStatus s);

// Sum over edge points of m [C(d+N,d) - C(d+N-l0,d)] with validity status.
DimValue dim_Vinf(const std::vector<EdgeData>& edges, long long N, int d);

// p-to-infinity reduction plus the triviality regimes.
DimValue dim_Vp(const std::vector<EdgeData>& edges, const GrowthSpec& growth,
                int d);

// C(d+N, N) * sum of kernel dimensions.
long long crude_bound(const std::vector<EdgeData>& edges, long long N, int d);

struct AuditEntry {
  std::string hypothesis;
  bool passed = false;
  std::string detail;
};

// Per-edge-point integrability audit outcomes feeding the hypothesis gate.
struct PointAudit {
  bool a2 = false;        // ||reduced inverse|| integrable near the point
  bool strength = false;  // squared norm integrable
};

struct LRRReport {
  enum class DimKind { Finite, Infinite, Inapplicable };

  DimKind dim_kind = DimKind::Finite;
  long long dim_value = 0;
  DimStatus dim_status = DimStatus::Valid;

  DegreeReport deg;
  long long deg_plus = 0;

  bool applicable = false;
  // Bound on dim L_p(mu,A,N) - dim L_{p'}(mu^{-1},A*,-N).
  std::optional<long long> lower_bound;
  // Bound on dim L_p(mu,A,N).
  std::optional<long long> upper_bound;
  std::vector<std::string> equality_claims;
  bool existence = false;
  bool unverified_hypothesis = false;
  bool all_growth_variants_equal = false;

  std::vector<AuditEntry> audit;
  std::vector<std::string> failed_hypotheses;
};

// Assembles the inequality/equality report for a finite nonempty Fermi
// surface. deg_mu / deg_mu_plus are degree reports of mu and its positive
// part; audits carry the per-point integrability verdicts.
LRRReport lrr_bounds(const DegreeReport& deg_mu, const DegreeReport& deg_mu_plus,
                     const std::vector<EdgeData>& edges, const GrowthSpec& growth,
                     int d, const std::vector<PointAudit>& audits);

// Report for 0 outside the spectrum. margin is the certified distance from 0
// to the spectrum; plus/minus triviality of the divisor decides which side is
// exact. All (p, phi) growth variants coincide in this regime.
LRRReport empty_fermi_bounds(const DegreeReport& deg_mu, bool plus_trivial,
                             bool minus_trivial, double margin,
                             double min_margin = 1e-6);

}  // namespace lrr

#endif
