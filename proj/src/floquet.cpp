#include "lrr/floquet.hpp"

#include <cmath>

namespace lrr {

namespace {

double wrap_to_band(double x) {
  // remainder is exactly rounded, result in [-pi, pi]
  double y = std::remainder(x, kTwoPi);
  if (y >= kPi) y -= kTwoPi;
  if (y < -kPi) y += kTwoPi;
  return y;
}

double wrapped_dist(double a, double b) {
  return std::abs(std::remainder(a - b, kTwoPi));
}

}  // namespace

Quasimomentum::Quasimomentum(const RealVector& k_real)
    : Quasimomentum(k_real, RealVector::Zero(k_real.size())) {}

Quasimomentum::Quasimomentum(const RealVector& k_real, const RealVector& k_imag)
    : re_(k_real), im_(k_imag) {
  if (re_.size() != im_.size())
    throw ConfigError("quasimomentum: real/imag rank mismatch");
  for (int i = 0; i < re_.size(); ++i) re_[i] = wrap_to_band(re_[i]);
}

Quasimomentum::Quasimomentum(const Vector& k)
    : Quasimomentum(k.real().eval(), k.imag().eval()) {}

Vector Quasimomentum::complex() const {
  Vector k(re_.size());
  for (int i = 0; i < re_.size(); ++i) k[i] = Complex(re_[i], im_[i]);
  return k;
}

bool Quasimomentum::equals(const Quasimomentum& other, double tol) const {
  if (d() != other.d()) return false;
  for (int i = 0; i < re_.size(); ++i) {
    if (wrapped_dist(re_[i], other.re_[i]) > tol) return false;
    if (std::abs(im_[i] - other.im_[i]) > tol) return false;
  }
  return true;
}

FiberMatrix fiber_matrix(const PeriodicLatticeOperator& op,
                         const Quasimomentum& k) {
  Matrix m = Matrix::Zero(op.cells, op.cells);
  const Vector kc = k.complex();
  for (const auto& t : op.terms) {
    Complex phase = 0.0;
    for (int i = 0; i < op.d; ++i) phase += kc[i] * static_cast<double>(t.offset[i]);
    m(t.from_cell, t.to_cell) += t.value * std::exp(Complex(0.0, 1.0) * phase);
  }
  for (int i = 0; i < op.cells; ++i) m(i, i) -= op.zero_shift;
  return FiberMatrix{k, std::move(m)};
}

Matrix fiber_matrix_derivative(const PeriodicLatticeOperator& op,
                               const Quasimomentum& k, int axis) {
  Matrix m = Matrix::Zero(op.cells, op.cells);
  const Vector kc = k.complex();
  for (const auto& t : op.terms) {
    Complex phase = 0.0;
    for (int i = 0; i < op.d; ++i) phase += kc[i] * static_cast<double>(t.offset[i]);
    m(t.from_cell, t.to_cell) += t.value * Complex(0.0, t.offset[axis]) *
                                 std::exp(Complex(0.0, 1.0) * phase);
  }
  return m;
}

IntVector BrillouinGrid::index_tuple(std::size_t flat) const {
  IntVector t(d);
  for (int i = d - 1; i >= 0; --i) {
    t[i] = static_cast<int>(flat % M) + t_lo();
    flat /= M;
  }
  return t;
}

RealVector BrillouinGrid::point(std::size_t flat) const {
  IntVector t = index_tuple(flat);
  RealVector k(d);
  for (int i = 0; i < d; ++i) k[i] = axis_value(t[i]);
  return k;
}

Vector floquet_transform(const LatticeFunction& f, const Quasimomentum& k,
                         int cells) {
  Vector out = Vector::Zero(cells);
  const Vector kc = k.complex();
  for (const auto& [p, v] : f.entries()) {
    Complex phase = 0.0;
    for (int i = 0; i < kc.size(); ++i)
      phase += kc[i] * static_cast<double>(p.g[i]);
    out[p.cell] += v * std::exp(Complex(0.0, -1.0) * phase);
  }
  return out;
}

FloquetSamples floquet_sample(const LatticeFunction& f,
                              const BrillouinGrid& grid, int cells) {
  FloquetSamples s{grid, cells, Matrix(grid.size(), cells)};
  for (std::size_t i = 0; i < grid.size(); ++i)
    s.values.row(i) =
        floquet_transform(f, Quasimomentum(grid.point(i)), cells).transpose();
  return s;
}

LatticeFunction inverse_floquet(const FloquetSamples& samples, int window) {
  const BrillouinGrid& grid = samples.grid;
  if (grid.M % 2 == 0)
    throw ConfigError("inverse transform: grid size must be odd");
  if (window > (grid.M - 1) / 2)
    throw ConfigError("inverse transform: window overflows exactness region");
  LatticeFunction f;
  const double scale = 1.0 / static_cast<double>(grid.size());
  std::vector<IntVector> gs;
  {
    IntVector lo = IntVector::Constant(grid.d, -window);
    IntVector g = lo;
    while (true) {
      gs.push_back(g);
      int i = grid.d - 1;
      while (i >= 0 && ++g[i] > window) g[i--] = -window;
      if (i < 0) break;
    }
  }
  for (const auto& g : gs) {
    for (int c = 0; c < samples.cells; ++c) {
      Complex acc(0.0, 0.0);
      // ordered reduction in grid order keeps the result thread-independent
      for (std::size_t i = 0; i < grid.size(); ++i) {
        RealVector k = grid.point(i);
        double phase = 0.0;
        for (int a = 0; a < grid.d; ++a) phase += k[a] * g[a];
        acc += samples.values(i, c) * std::exp(Complex(0.0, phase));
      }
      acc *= scale;
      if (std::abs(acc) > 1e-14) f.set(LatticePoint(g, c), acc);
    }
  }
  return f;
}

double verify_fiber_action(const PeriodicLatticeOperator& op,
                           const LatticeFunction& f, const Quasimomentum& k) {
  Vector lhs = floquet_transform(apply(op, f), k, op.cells);
  Vector rhs = fiber_matrix(op, k).entries * floquet_transform(f, k, op.cells);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

std::pair<double, double> verify_plancherel(const LatticeFunction& f,
                                            const BrillouinGrid& grid,
                                            int cells) {
  const double lhs = f.norm_sq();
  double rhs = 0.0;
  FloquetSamples s = floquet_sample(f, grid, cells);
  for (std::size_t i = 0; i < grid.size(); ++i)
    rhs += s.values.row(i).squaredNorm();
  rhs /= static_cast<double>(grid.size());
  return {lhs, rhs};
}

}  // namespace lrr
