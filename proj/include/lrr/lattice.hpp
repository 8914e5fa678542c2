#ifndef LRR_LATTICE_HPP
#define LRR_LATTICE_HPP

#include <map>
#include <vector>

#include "lrr/types.hpp"

namespace lrr {

// Point of the discrete covering Z^d x {0,...,cells-1}: a deck-group element
// g and a cell index.
struct LatticePoint {
  IntVector g;
  int cell = 0;

  LatticePoint() = default;
  LatticePoint(IntVector g_, int cell_) : g(std::move(g_)), cell(cell_) {}
};

inline bool operator<(const LatticePoint& a, const LatticePoint& b) {
  if (a.g.size() != b.g.size()) return a.g.size() < b.g.size();
  for (int i = 0; i < a.g.size(); ++i)
    if (a.g[i] != b.g[i]) return a.g[i] < b.g[i];
  return a.cell < b.cell;
}
inline bool operator==(const LatticePoint& a, const LatticePoint& b) {
  return a.g.size() == b.g.size() && a.g == b.g && a.cell == b.cell;
}

// One matrix element of the periodic operator: contributes
//   value * f(g + offset, to_cell)  to  (A f)(g, from_cell).
struct HoppingTerm {
  int from_cell = 0;
  int to_cell = 0;
  IntVector offset;
  Complex value;
};

// Z^d-periodic finite-hopping operator on the covering, minus zero_shift*I.
// Terms are canonical: sorted by (from_cell, to_cell, offset), duplicates
// merged, zeros dropped.
struct PeriodicLatticeOperator {
  int d = 1;
  int cells = 1;
  double zero_shift = 0.0;
  std::vector<HoppingTerm> terms;
  bool self_adjoint = false;

  int hop_radius() const;
};

// Canonicalizes the term list and computes the self-adjointness flag.
PeriodicLatticeOperator make_operator(int d, int cells,
                                      std::vector<HoppingTerm> terms,
                                      double zero_shift = 0.0);

bool operator==(const PeriodicLatticeOperator& a,
                const PeriodicLatticeOperator& b);

// Transpose with respect to the bilinear (unconjugated) pairing:
// (i,j,g,a) -> (j,i,-g,a).
PeriodicLatticeOperator transpose(const PeriodicLatticeOperator& op);

// Same operator with the working level moved: A - lambda.
PeriodicLatticeOperator shift_spectrum(const PeriodicLatticeOperator& op,
                                       double lambda);

// Finitely supported function on the covering. Zero entries are pruned.
class LatticeFunction {
 public:
  using Map = std::map<LatticePoint, Complex>;

  LatticeFunction() = default;

  void set(const LatticePoint& p, Complex v) {
    if (v == Complex(0.0, 0.0))
      entries_.erase(p);
    else
      entries_[p] = v;
  }
  void add(const LatticePoint& p, Complex v) {
    auto it = entries_.find(p);
    if (it == entries_.end()) {
      if (v != Complex(0.0, 0.0)) entries_[p] = v;
    } else {
      it->second += v;
      if (it->second == Complex(0.0, 0.0)) entries_.erase(it);
    }
  }
  Complex value(const LatticePoint& p) const {
    auto it = entries_.find(p);
    return it == entries_.end() ? Complex(0.0, 0.0) : it->second;
  }
  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double norm_sq() const {
    double s = 0;
    for (const auto& [p, v] : entries_) s += std::norm(v);
    return s;
  }

 private:
  Map entries_;
};

LatticeFunction delta(const IntVector& g, int cell = 0);

LatticeFunction apply(const PeriodicLatticeOperator& op,
                      const LatticeFunction& f);

// Bilinear duality sum_x u(x) v(x) (no conjugation).
Complex pairing(const LatticeFunction& u, const LatticeFunction& v);

LatticeFunction scaled(const LatticeFunction& f, Complex a);
LatticeFunction sum(const LatticeFunction& u, const LatticeFunction& v);
// Deck translation: (shifted f)(g, c) = f(g - h, c).
LatticeFunction deck_shift(const LatticeFunction& f, const IntVector& h);

// Polynomial weight <g>^N = (1 + |g|_2^2)^(N/2).
double weight(const IntVector& g, double N);

}  // namespace lrr

#endif
