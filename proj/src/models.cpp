#include "lrr/models.hpp"

#include <random>

namespace lrr {

namespace {
IntVector unit(int d, int axis) {
  IntVector e = IntVector::Zero(d);
  e[axis] = 1;
  return e;
}
IntVector zero(int d) { return IntVector::Zero(d); }
}  // namespace

PeriodicLatticeOperator laplacian(int d) {
  std::vector<HoppingTerm> terms;
  terms.push_back({0, 0, zero(d), Complex(2.0 * d, 0.0)});
  for (int a = 0; a < d; ++a) {
    terms.push_back({0, 0, unit(d, a), Complex(-1.0, 0.0)});
    terms.push_back({0, 0, -unit(d, a), Complex(-1.0, 0.0)});
  }
  return make_operator(d, 1, std::move(terms));
}

PeriodicLatticeOperator laplacian_plus_constant(int d, double c) {
  auto op = laplacian(d);
  auto terms = op.terms;
  terms.push_back({0, 0, zero(d), Complex(c, 0.0)});
  return make_operator(d, 1, std::move(terms));
}

PeriodicLatticeOperator graphene(double t) {
  std::vector<HoppingTerm> terms;
  const int d = 2;
  for (const auto& off :
       {zero(d), (-unit(d, 0)).eval(), (-unit(d, 1)).eval()}) {
    terms.push_back({0, 1, off, Complex(t, 0.0)});
    terms.push_back({1, 0, (-off).eval(), Complex(t, 0.0)});
  }
  return make_operator(d, 2, std::move(terms));
}

PeriodicLatticeOperator two_cell_gap_1d(double v, double base) {
  std::vector<HoppingTerm> terms;
  const int d = 1;
  // chain sites at positions 2g (cell 0) and 2g+1 (cell 1)
  terms.push_back({0, 0, zero(d), Complex(2.0 + base + v, 0.0)});
  terms.push_back({1, 1, zero(d), Complex(2.0 + base - v, 0.0)});
  terms.push_back({0, 1, zero(d), Complex(-1.0, 0.0)});
  terms.push_back({1, 0, zero(d), Complex(-1.0, 0.0)});
  terms.push_back({0, 1, -unit(d, 0), Complex(-1.0, 0.0)});
  terms.push_back({1, 0, unit(d, 0), Complex(-1.0, 0.0)});
  return make_operator(d, 2, std::move(terms));
}

PeriodicLatticeOperator two_cell_gap_2d(double v, double ty) {
  std::vector<HoppingTerm> terms;
  const int d = 2;
  terms.push_back({0, 0, zero(d), Complex(2.0 + 2.0 * ty + v, 0.0)});
  terms.push_back({1, 1, zero(d), Complex(2.0 + 2.0 * ty - v, 0.0)});
  terms.push_back({0, 1, zero(d), Complex(-1.0, 0.0)});
  terms.push_back({1, 0, zero(d), Complex(-1.0, 0.0)});
  terms.push_back({0, 1, -unit(d, 0), Complex(-1.0, 0.0)});
  terms.push_back({1, 0, unit(d, 0), Complex(-1.0, 0.0)});
  for (int c = 0; c < 2; ++c) {
    terms.push_back({c, c, unit(d, 1), Complex(-ty, 0.0)});
    terms.push_back({c, c, -unit(d, 1), Complex(-ty, 0.0)});
  }
  return make_operator(d, 2, std::move(terms));
}

PeriodicLatticeOperator laplacian_drift_1d(double b) {
  std::vector<HoppingTerm> terms;
  const int d = 1;
  terms.push_back({0, 0, zero(d), Complex(2.0 - b, 0.0)});
  terms.push_back({0, 0, unit(d, 0), Complex(-1.0 + b, 0.0)});
  terms.push_back({0, 0, -unit(d, 0), Complex(-1.0, 0.0)});
  return make_operator(d, 1, std::move(terms));
}

PeriodicLatticeOperator random_operator(int d, int cells, int range,
                                        std::uint64_t seed,
                                        bool self_adjoint) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> off(-range, range);
  std::uniform_int_distribution<int> cell(0, cells - 1);
  std::vector<HoppingTerm> terms;
  const int n = 4 + cells * d;
  for (int i = 0; i < n; ++i) {
    HoppingTerm t;
    t.from_cell = cell(rng);
    t.to_cell = cell(rng);
    t.offset = IntVector(d);
    for (int a = 0; a < d; ++a) t.offset[a] = off(rng);
    t.value = Complex(val(rng), val(rng));
    terms.push_back(t);
    if (self_adjoint) {
      HoppingTerm s;
      s.from_cell = t.to_cell;
      s.to_cell = t.from_cell;
      s.offset = -t.offset;
      s.value = std::conj(t.value);
      terms.push_back(s);
    }
  }
  return make_operator(d, cells, std::move(terms));
}

LatticeFunction random_function(int d, int cells, int radius,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> pos(-radius, radius);
  std::uniform_int_distribution<int> cell(0, cells - 1);
  LatticeFunction f;
  const int n = 3 + 2 * d;
  for (int i = 0; i < n; ++i) {
    IntVector g(d);
    for (int a = 0; a < d; ++a) g[a] = pos(rng);
    f.add(LatticePoint(g, cell(rng)), Complex(val(rng), val(rng)));
  }
  return f;
}

}  // namespace lrr
