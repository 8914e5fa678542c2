#ifndef LRR_FLOQUET_HPP
#define LRR_FLOQUET_HPP

#include <utility>
#include <vector>

#include "lrr/lattice.hpp"
#include "lrr/types.hpp"

namespace lrr {

// Quasimomentum, canonicalized so the real part lies in [-pi, pi)^d.
// Two quasimomenta are equal when they agree modulo (2 pi Z)^d to 1e-9
// componentwise.
class Quasimomentum {
 public:
  static constexpr double kEqualTol = 1e-9;

  Quasimomentum() : re_(0), im_(0) {}
  explicit Quasimomentum(const RealVector& k_real);
  Quasimomentum(const RealVector& k_real, const RealVector& k_imag);
  explicit Quasimomentum(const Vector& k);

  int d() const { return static_cast<int>(re_.size()); }
  const RealVector& real() const { return re_; }
  const RealVector& imag() const { return im_; }
  bool is_real() const { return im_.isZero(0.0); }
  Vector complex() const;

  bool equals(const Quasimomentum& other, double tol = kEqualTol) const;

 private:
  RealVector re_, im_;
};

// Fiber of the operator at quasimomentum k:
//   entries(i,j) = sum over terms (i,j,g,a) of a e^{i k.g} - zero_shift 1_{i=j}.
struct FiberMatrix {
  Quasimomentum k;
  Matrix entries;
};

FiberMatrix fiber_matrix(const PeriodicLatticeOperator& op,
                         const Quasimomentum& k);
inline FiberMatrix fiber_matrix(const PeriodicLatticeOperator& op,
                                const RealVector& k) {
  return fiber_matrix(op, Quasimomentum(k));
}

// d/dk_axis of the fiber matrix (entries are trigonometric polynomials).
Matrix fiber_matrix_derivative(const PeriodicLatticeOperator& op,
                               const Quasimomentum& k, int axis);

// Uniform tensor grid k_t = 2 pi t / M componentwise,
// t in {-floor(M/2), ..., M-1-floor(M/2)}.
struct BrillouinGrid {
  int d = 1;
  int M = 1;

  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(M);
    return n;
  }
  IntVector index_tuple(std::size_t flat) const;
  RealVector point(std::size_t flat) const;
  double axis_value(int t) const { return kTwoPi * t / M; }
  int t_lo() const { return -(M / 2); }
  int t_hi() const { return M - 1 - M / 2; }
};

// (F f)(k, c) = sum_g f(g, c) e^{-i k.g}.
Vector floquet_transform(const LatticeFunction& f, const Quasimomentum& k,
                         int cells);

// Transform sampled over a full grid; values(flat, c).
struct FloquetSamples {
  BrillouinGrid grid;
  int cells = 1;
  Matrix values;
};

FloquetSamples floquet_sample(const LatticeFunction& f,
                              const BrillouinGrid& grid, int cells);

// Inverse transform on the centered window [-W, W]^d; exact when the original
// function is supported there. Requires odd M and W <= (M-1)/2, else the
// window overflows the exactness region.
LatticeFunction inverse_floquet(const FloquetSamples& samples, int window);

// || F(A f)(k) - A(k) F f(k) ||_inf.
double verify_fiber_action(const PeriodicLatticeOperator& op,
                           const LatticeFunction& f, const Quasimomentum& k);

// (sum |f|^2, (1/M^d) sum_grid ||F f(k,.)||^2); equal when f sits inside the
// grid's exactness window.
std::pair<double, double> verify_plancherel(const LatticeFunction& f,
                                            const BrillouinGrid& grid,
                                            int cells);

}  // namespace lrr

#endif
