#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pamdp {

// A lattice type L provides:
//   using Elem = ...;            value type with total order < and == (used
//                                only for canonical storage, never for ⪯)
//   bool leq(a, b)               the partial order ⪯
//   Elem meet(a, b)              greatest lower bound
//   Elem top()                   the ⪯-maximum (both instances below have one)
//   bool enumerable()            whether elements() is available
//   std::vector<Elem> elements() full enumeration (oracles and tests only)
//   std::string format(e)        human-readable element

// Tuples of naturals in [0, bound]^dim, ordered componentwise.
struct ProductNatLattice {
  using Elem = std::vector<int>;

  int dim;
  int bound;

  ProductNatLattice(int dim, int bound) : dim(dim), bound(bound) {}

  bool leq(const Elem& a, const Elem& b) const {
    for (int i = 0; i < dim; ++i)
      if (a[i] > b[i]) return false;
    return true;
  }

  Elem meet(const Elem& a, const Elem& b) const {
    Elem m(dim);
    for (int i = 0; i < dim; ++i) m[i] = a[i] < b[i] ? a[i] : b[i];
    return m;
  }

  Elem top() const { return Elem(dim, bound); }

  bool enumerable() const {
    double count = 1;
    for (int i = 0; i < dim; ++i) count *= bound + 1;
    return count <= (1 << 22);
  }

  std::vector<Elem> elements() const {
    if (!enumerable()) throw std::runtime_error("lattice too large to enumerate");
    std::vector<Elem> out;
    Elem cur(dim, 0);
    while (true) {
      out.push_back(cur);
      int i = 0;
      while (i < dim && cur[i] == bound) cur[i++] = 0;
      if (i == dim) break;
      ++cur[i];
    }
    return out;
  }

  std::string format(const Elem& e) const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ",";
      s += std::to_string(e[i]);
    }
    return s + ")";
  }
};

// Subsets of a finite condition set, ordered by REVERSE inclusion:
// s ⪯ s' iff s ⊇ s'. Meets are unions, the ⪯-maximum is the empty set.
// Under this orientation guards are monotone (smaller states enable more
// operators) and goal regions ↓{M} are closed.
struct SupersetLattice {
  using Elem = std::uint64_t;  // bit i set <=> condition i present

  std::vector<std::string> names;

  explicit SupersetLattice(std::vector<std::string> names) : names(std::move(names)) {
    if (this->names.size() > 64) throw std::runtime_error("at most 64 conditions supported");
  }

  int size() const { return static_cast<int>(names.size()); }

  bool leq(Elem a, Elem b) const { return (a & b) == b; }
  Elem meet(Elem a, Elem b) const { return a | b; }
  Elem top() const { return 0; }

  bool enumerable() const { return names.size() <= 22; }

  std::vector<Elem> elements() const {
    if (!enumerable()) throw std::runtime_error("lattice too large to enumerate");
    std::vector<Elem> out;
    out.reserve(std::size_t(1) << names.size());
    for (Elem m = 0; m < (Elem(1) << names.size()); ++m) out.push_back(m);
    return out;
  }

  std::string format(Elem e) const {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (e & (Elem(1) << i)) {
        if (!first) s += ",";
        s += names[i];
        first = false;
      }
    }
    return s + "}";
  }
};

}  // namespace pamdp
