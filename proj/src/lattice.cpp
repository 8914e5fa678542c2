#include "lrr/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "lrr/combinatorics.hpp"

namespace lrr {

namespace {

bool term_order(const HoppingTerm& a, const HoppingTerm& b) {
  if (a.from_cell != b.from_cell) return a.from_cell < b.from_cell;
  if (a.to_cell != b.to_cell) return a.to_cell < b.to_cell;
  for (int i = 0; i < a.offset.size(); ++i)
    if (a.offset[i] != b.offset[i]) return a.offset[i] < b.offset[i];
  return false;
}

bool same_slot(const HoppingTerm& a, const HoppingTerm& b) {
  return a.from_cell == b.from_cell && a.to_cell == b.to_cell &&
         a.offset == b.offset;
}

}  // namespace

int PeriodicLatticeOperator::hop_radius() const {
  int r = 0;
  for (const auto& t : terms) r = std::max(r, t.offset.cwiseAbs().maxCoeff());
  return r;
}

PeriodicLatticeOperator make_operator(int d, int cells,
                                      std::vector<HoppingTerm> terms,
                                      double zero_shift) {
  if (d < 1) throw ConfigError("operator: d must be >= 1");
  if (cells < 1) throw ConfigError("operator: cell count must be >= 1");
  for (auto& t : terms) {
    if (t.offset.size() != d) throw ConfigError("operator: offset rank mismatch");
    if (t.from_cell < 0 || t.from_cell >= cells || t.to_cell < 0 ||
        t.to_cell >= cells)
      throw ConfigError("operator: cell index out of range");
  }
  std::sort(terms.begin(), terms.end(), term_order);
  std::vector<HoppingTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && same_slot(merged.back(), t))
      merged.back().value += t.value;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const HoppingTerm& t) {
    return t.value == Complex(0.0, 0.0);
  });

  PeriodicLatticeOperator op;
  op.d = d;
  op.cells = cells;
  op.zero_shift = zero_shift;
  op.terms = std::move(merged);

  op.self_adjoint = true;
  for (const auto& t : op.terms) {
    HoppingTerm adj;
    adj.from_cell = t.to_cell;
    adj.to_cell = t.from_cell;
    adj.offset = -t.offset;
    auto it = std::lower_bound(op.terms.begin(), op.terms.end(), adj, term_order);
    if (it == op.terms.end() || !same_slot(*it, adj) ||
        it->value != std::conj(t.value)) {
      op.self_adjoint = false;
      break;
    }
  }
  return op;
}

bool operator==(const PeriodicLatticeOperator& a,
                const PeriodicLatticeOperator& b) {
  if (a.d != b.d || a.cells != b.cells || a.zero_shift != b.zero_shift ||
      a.terms.size() != b.terms.size())
    return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (!same_slot(a.terms[i], b.terms[i]) ||
        a.terms[i].value != b.terms[i].value)
      return false;
  }
  return true;
}

PeriodicLatticeOperator transpose(const PeriodicLatticeOperator& op) {
  std::vector<HoppingTerm> terms;
  terms.reserve(op.terms.size());
  for (const auto& t : op.terms) {
    HoppingTerm s;
    s.from_cell = t.to_cell;
    s.to_cell = t.from_cell;
    s.offset = -t.offset;
    s.value = t.value;
    terms.push_back(s);
  }
  return make_operator(op.d, op.cells, std::move(terms), op.zero_shift);
}

PeriodicLatticeOperator shift_spectrum(const PeriodicLatticeOperator& op,
                                       double lambda) {
  PeriodicLatticeOperator s = op;
  s.zero_shift += lambda;
  return s;
}

LatticeFunction delta(const IntVector& g, int cell) {
  LatticeFunction f;
  f.set(LatticePoint(g, cell), Complex(1.0, 0.0));
  return f;
}

LatticeFunction apply(const PeriodicLatticeOperator& op,
                      const LatticeFunction& f) {
  LatticeFunction out;
  for (const auto& [p, v] : f.entries()) {
    if (op.zero_shift != 0.0) out.add(p, -op.zero_shift * v);
    for (const auto& t : op.terms) {
      if (t.to_cell != p.cell) continue;
      // f(g + offset, to) feeds (Af)(g, from); here p = g + offset.
      out.add(LatticePoint(p.g - t.offset, t.from_cell), t.value * v);
    }
  }
  return out;
}

Complex pairing(const LatticeFunction& u, const LatticeFunction& v) {
  const LatticeFunction& small = u.size() <= v.size() ? u : v;
  const LatticeFunction& big = u.size() <= v.size() ? v : u;
  Complex s(0.0, 0.0);
  for (const auto& [p, val] : small.entries()) s += val * big.value(p);
  return s;
}

LatticeFunction scaled(const LatticeFunction& f, Complex a) {
  LatticeFunction out;
  for (const auto& [p, v] : f.entries()) out.set(p, a * v);
  return out;
}

LatticeFunction sum(const LatticeFunction& u, const LatticeFunction& v) {
  LatticeFunction out = u;
  for (const auto& [p, val] : v.entries()) out.add(p, val);
  return out;
}

LatticeFunction deck_shift(const LatticeFunction& f, const IntVector& h) {
  LatticeFunction out;
  for (const auto& [p, v] : f.entries())
    out.set(LatticePoint(p.g + h, p.cell), v);
  return out;
}

double weight(const IntVector& g, double N) {
  double s = 1.0 + g.cast<double>().squaredNorm();
  return std::pow(s, N / 2.0);
}

}  // namespace lrr
