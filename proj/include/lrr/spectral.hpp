#ifndef LRR_SPECTRAL_HPP
#define LRR_SPECTRAL_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lrr/floquet.hpp"
#include "lrr/lattice.hpp"
#include "lrr/liouville.hpp"
#include "lrr/types.hpp"

namespace lrr {

// Sorted real band functions sampled over the Brillouin grid (self-adjoint
// mode) or unsorted complex eigenvalue clouds (general mode).
struct BandStructure {
  BrillouinGrid grid;
  RealMatrix bands;   // size() x cells, non-decreasing per row
  Matrix clouds;      // general mode, sorted by (re, im) per row
  bool sorted_real = true;
};

BandStructure band_structure(const PeriodicLatticeOperator& op, int M);
BandStructure band_structure_complex(const PeriodicLatticeOperator& op, int M);

struct SpectrumIntervals {
  std::vector<std::pair<double, double>> per_band;
  std::vector<std::pair<double, double>> merged;
  std::vector<std::pair<double, double>> gaps;

  double distance_to(double level) const;
};

// Per-band ranges with local refinement of the extrema; overlapping bands
// merged, gaps reported.
SpectrumIntervals spectrum_intervals(const PeriodicLatticeOperator& op,
                                     const BandStructure& bands,
                                     double refine_tol = 1e-8);
SpectrumIntervals spectrum_intervals(const PeriodicLatticeOperator& op,
                                     int M = 33, double refine_tol = 1e-8);

// Contour |z - center| = radius; valid only while no fiber eigenvalue lies in
// the annulus radius * [1-delta, 1+delta], delta = 0.1.
struct ContourSpec {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  double delta = 0.1;
};

struct RieszProjector {
  Matrix P;
  int rank = 0;
  bool quadrature_fallback = false;
};

// Spectral projector onto the eigenvalues strictly inside the contour.
// Defective fibers (eigenvector condition number > 1e8) fall back to
// trapezoidal contour quadrature of the resolvent with 256 nodes.
RieszProjector riesz_projector(const PeriodicLatticeOperator& op,
                               const Quasimomentum& k,
                               const ContourSpec& contour);

// Quasimomentum on the real Fermi surface with its local spectral data.
struct FermiPoint {
  Quasimomentum k;
  double sigma_min = 0.0;
  int multiplicity = 0;  // algebraic multiplicity of the eigenvalue 0
  int kernel_dim = 0;    // geometric multiplicity
  bool simple = false;
  int ell0 = 0;          // first nonvanishing Taylor order; 0 = undetermined
  // Homogeneous leading layer: coefficient matrices per multi-index.
  std::vector<std::pair<MultiIndex, Matrix>> leading_taylor;
  bool det_leading_nonzero = false;
  std::optional<RealMatrix> hessian;  // present iff multiplicity 1, ell0 = 2
};

struct FermiOptions {
  double level = 0.0;
  int grid_M = 33;
  double root_tol = 1e-9;
  int max_taylor_order = 4;
  int max_points = 64;
  bool annotate = true;  // compute ell0 / Taylor / Hessian data
};

// Grid scan of the smallest singular value of A(k) - level, local
// refinement, deduplication modulo the reciprocal lattice, and annotation.
// Throws NotApplicableError when the refined zero set is not finite.
std::vector<FermiPoint> fermi_points(const PeriodicLatticeOperator& op,
                                     const FermiOptions& opts = {});

std::vector<EdgeData> edge_data(const std::vector<FermiPoint>& points);

// Reduced m x m matrix family lambda(k) of A(k) Pi(k) on the fixed
// orthonormal basis of range Pi(k_r).
class ReducedModel {
 public:
  ReducedModel(const PeriodicLatticeOperator& op, const RealVector& k_r,
               double root_tol = 1e-9);

  int multiplicity() const { return m_; }
  const ContourSpec& contour() const { return contour_; }
  // lambda(k_r + kappa); checks the contour stays eigenvalue-free and the
  // projected basis stays non-degenerate.
  Matrix sample(const RealVector& kappa) const;

 private:
  PeriodicLatticeOperator op_;
  RealVector k_r_;
  ContourSpec contour_;
  Matrix basis_;  // cells x m
  int m_ = 0;
};

struct TaylorData {
  int ell0 = 0;  // 0 = undetermined
  std::vector<std::pair<MultiIndex, Matrix>> leading;
  bool det_leading_nonzero = false;
  std::string note;
};

struct TaylorOptions {
  int max_order = 4;
  std::vector<double> radii = {1e-2, 5e-3, 2.5e-3};
  double layer_rel_tol = 1e-6;
  double det_tol = 1e-8;
  std::uint64_t seed = 20240901;
};

// Least-squares fit of homogeneous Taylor layers of a matrix family sampled
// on spheres of shrinking radii, with a half-radius consistency check.
TaylorData taylor_order(const std::function<Matrix(const RealVector&)>& sampler,
                        int d, int m, const TaylorOptions& opts = {});

struct IntegrabilityReport {
  int q = 1;
  std::vector<double> annulus;  // per dyadic annulus contribution
  std::vector<double> tails;    // running sums
  std::vector<double> ratios;
  bool converged = false;
  std::optional<bool> analytic;
  bool integrable = false;
  std::string note;
};

// Numerically integrates ||lambda(k)^{-1}||^q over punctured dyadic annuli
// around the Fermi point; for simple points with a definite leading layer the
// exact criterion q * ell0 < d is reported alongside.
IntegrabilityReport integrability_audit(const PeriodicLatticeOperator& op,
                                        const FermiPoint& point, int q);

struct PerronPair {
  double lambda = 0.0;
  RealVector eigenvector;
};

// Real eigenvalue of A(i xi) with an entrywise positive eigenvector
// (normalized to max component 1), via the Perron pair of s I - A(i xi).
PerronPair principal_eigenvalue(const PeriodicLatticeOperator& op,
                                const RealVector& xi);

struct PrincipalEigenvalueCurve {
  int d = 1;
  double xi_max = 2.0;
  int M = 9;
  RealVector values;  // flattened grid, row-major as BrillouinGrid
  RealVector xi0;
  double lambda_max = 0.0;
  bool concavity_ok = true;
  int concavity_violations = 0;
};

struct PrincipalOptions {
  double xi_max = 2.0;
  int M = 9;
  double grad_tol = 1e-8;
  int concavity_trials = 100;
  std::uint64_t seed = 7041;
};

PrincipalEigenvalueCurve maximize_principal(const PeriodicLatticeOperator& op,
                                            const PrincipalOptions& opts = {});

}  // namespace lrr

#endif
