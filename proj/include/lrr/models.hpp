#ifndef LRR_MODELS_HPP
#define LRR_MODELS_HPP

#include <cstdint>

#include "lrr/lattice.hpp"

namespace lrr {

// Discrete Laplacian on Z^d: (L u)(x) = 2d u(x) - sum of neighbors.
PeriodicLatticeOperator laplacian(int d);

// L + c I (c added to the on-site term, not to zero_shift).
PeriodicLatticeOperator laplacian_plus_constant(int d, double c);

// Nearest-neighbor honeycomb model with two cells per unit cell and hopping t;
// the two bands +-t |1 + e^{i k1} + e^{i k2}| touch conically at two
// quasimomenta +-(2pi/3, -2pi/3).
PeriodicLatticeOperator graphene(double t = 1.0);

// Dimerized 1-D chain folded to a 2-site cell with on-site potential +-v
// plus a constant base: bands base + 2 +- sqrt(v^2 + 2 + 2 cos k).
PeriodicLatticeOperator two_cell_gap_1d(double v, double base = 0.0);

// Same chain along x, uniform hopping of strength ty along y.
// Spectral gap persists while 4 ty < 2 v.
PeriodicLatticeOperator two_cell_gap_2d(double v, double ty);

// 1-D Laplacian plus drift b (u(x+1) - u(x)); real, non-self-adjoint.
PeriodicLatticeOperator laplacian_drift_1d(double b);

// Seeded random finite-hopping operator for property tests.
PeriodicLatticeOperator random_operator(int d, int cells, int range,
                                        std::uint64_t seed,
                                        bool self_adjoint = false);

// Seeded random finitely supported function on [-radius, radius]^d x cells.
LatticeFunction random_function(int d, int cells, int radius,
                                std::uint64_t seed);

}  // namespace lrr

#endif
