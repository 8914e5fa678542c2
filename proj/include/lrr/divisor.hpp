#ifndef LRR_DIVISOR_HPP
#define LRR_DIVISOR_HPP

#include <optional>
#include <set>
#include <vector>

#include "lrr/combinatorics.hpp"
#include "lrr/lattice.hpp"
#include "lrr/types.hpp"

namespace lrr {

// Continuum point with the multi-index set of delta derivatives attached to
// it: span{ d^alpha delta(. - x) : alpha in alphas }.
struct ContinuumSpanPoint {
  RealVector x;
  std::vector<MultiIndex> alphas;
};

// Finite-dimensional space of point-supported distributions, either on the
// lattice (explicit finite-support basis functions, plain deltas included)
// or on the continuum (delta-derivative spans at points).
struct DeltaSpan {
  std::vector<LatticeFunction> lattice_basis;
  std::vector<ContinuumSpanPoint> continuum;

  bool is_lattice() const { return !lattice_basis.empty(); }
  bool is_continuum() const { return !continuum.empty(); }
  bool trivial() const { return lattice_basis.empty() && continuum.empty(); }

  // l = dim of the span (basis is validated to be independent).
  int dim() const;
  // Lattice support set D.
  std::set<LatticePoint> lattice_support() const;
};

DeltaSpan lattice_delta_span(const std::vector<LatticePoint>& points);
DeltaSpan lattice_function_span(std::vector<LatticeFunction> basis);
DeltaSpan continuum_span(std::vector<ContinuumSpanPoint> points);

// Rigged point divisor mu = (D+, L+; D-, L-); supports must be disjoint.
struct RiggedPointDivisor {
  DeltaSpan plus;
  DeltaSpan minus;
};

RiggedPointDivisor make_divisor(DeltaSpan plus, DeltaSpan minus);

RiggedPointDivisor inverse_divisor(const RiggedPointDivisor& mu);
RiggedPointDivisor positive_part(const RiggedPointDivisor& mu);
RiggedPointDivisor negative_part(const RiggedPointDivisor& mu);

struct DegreeReport {
  long long ell_plus = 0;
  long long ell_tilde_plus = 0;
  long long ell_minus = 0;
  long long ell_tilde_minus = 0;
  long long degree = 0;
};

// Constant-coefficient operator sum_alpha c_alpha d^alpha on R^d.
struct ContinuumSymbol {
  int d = 0;
  std::vector<std::pair<MultiIndex, double>> coeffs;

  int order() const;
};

ContinuumSymbol symbol_laplacian(int d);    // -sum d_i^2
ContinuumSymbol symbol_bilaplacian(int d);  // (sum d_i^2)^2
// Transpose under the bilinear duality: c_alpha -> (-1)^|alpha| c_alpha.
ContinuumSymbol transpose(const ContinuumSymbol& p);

// dim { u supported on D : (op u) in span L } for a lattice span, by one SVD
// with a x10 threshold-stability requirement. Also verifies that op is
// injective on functions supported on D.
int secondary_dim_lattice(const PeriodicLatticeOperator& op,
                          const DeltaSpan& span);

// Same for constant-coefficient operators acting on delta-derivative spans.
int secondary_dim_continuum(const ContinuumSymbol& p, const DeltaSpan& span);

// Full degree report for a lattice divisor (secondary dimension of the minus
// side uses the transposed operator).
DegreeReport degree(const PeriodicLatticeOperator& op,
                    const RiggedPointDivisor& mu);
DegreeReport degree(const ContinuumSymbol& p, const RiggedPointDivisor& mu);

// Closed form for point divisors: poles of orders p_j > 0 and zeros of
// orders q_j < 0 on an n-dimensional space for an operator of order m.
long long point_divisor_degree_closed_form(int n, int m,
                                           const std::vector<int>& poles,
                                           const std::vector<int>& zeros);

// Rigged divisor carrying the full delta-derivative span of a point divisor:
// a pole of order p contributes multi-indices |alpha| <= p-1.
RiggedPointDivisor point_divisor_to_rigged(int n,
                                           const std::vector<RealVector>& pole_pts,
                                           const std::vector<int>& poles,
                                           const std::vector<RealVector>& zero_pts,
                                           const std::vector<int>& zeros);

}  // namespace lrr

#endif
