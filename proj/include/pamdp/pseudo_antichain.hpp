#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pamdp/antichain.hpp"

namespace pamdp {

// A pseudo-element (x, α) denotes the pseudo-closure ↓{x} \ ↓α. Validity
// requires x ∉ ↓α (so the denoted set is nonempty); canonical form requires
// every a ∈ α to satisfy a ⪯ x. All constructors below go through
// pe_canonicalize, so stored pseudo-elements are always canonical.
template <class L>
struct PseudoElement {
  using Elem = typename L::Elem;

  Elem x;
  Antichain<L> alpha;

  bool operator==(const PseudoElement& o) const { return x == o.x && alpha == o.alpha; }
  bool operator<(const PseudoElement& o) const {
    if (x != o.x) return x < o.x;
    return alpha < o.alpha;
  }
};

// Accepts an arbitrary pair (x, α). Returns nullopt when the denoted set is
// empty (x ∈ ↓α), otherwise the canonical representation (x, {x} ∩̇ α).
template <class L>
std::optional<PseudoElement<L>> pe_canonicalize(const typename L::Elem& x,
                                                const Antichain<L>& alpha, const L& lat) {
  if (ac_member(x, alpha, lat)) return std::nullopt;
  return PseudoElement<L>{x, ac_intersect(singleton_antichain<L>(x), alpha, lat)};
}

template <class L>
bool pe_member(const typename L::Elem& s, const PseudoElement<L>& pe, const L& lat) {
  return lat.leq(s, pe.x) && !ac_member(s, pe.alpha, lat);
}

// Inclusion of pseudo-closures without enumeration:
// ↕(x,α) ⊆ ↕(y,β) iff x ⪯ y and ∀b ∈ β: b ⊓ x ∈ ↓α.
template <class L>
bool pe_subset(const PseudoElement<L>& pe1, const PseudoElement<L>& pe2, const L& lat) {
  if (!lat.leq(pe1.x, pe2.x)) return false;
  for (const auto& b : pe2.alpha.elems)
    if (!ac_member(lat.meet(b, pe1.x), pe1.alpha, lat)) return false;
  return true;
}

// A finite union of pseudo-closures. Kept in simplified form: members are
// canonical, pairwise distinct x's, and no member pseudo-closure includes
// another. Simplified form is not canonical: two different simplified
// pseudo-antichains may denote the same set.
template <class L>
struct PseudoAntichain {
  std::vector<PseudoElement<L>> elems;

  bool empty() const { return elems.empty(); }
  std::size_t size() const { return elems.size(); }
};

template <class L>
PseudoAntichain<L> pa_empty() {
  return {};
}

template <class L>
PseudoAntichain<L> pa_from_pe(std::optional<PseudoElement<L>> pe) {
  PseudoAntichain<L> a;
  if (pe) a.elems.push_back(std::move(*pe));
  return a;
}

// The closed set ↓α seen as a pseudo-antichain {(x, ∅) | x ∈ α}.
template <class L>
PseudoAntichain<L> pa_from_antichain(const Antichain<L>& alpha) {
  PseudoAntichain<L> a;
  for (const auto& x : alpha.elems) a.elems.push_back(PseudoElement<L>{x, {}});
  return a;
}

template <class L>
bool pa_member(const typename L::Elem& s, const PseudoAntichain<L>& a, const L& lat) {
  for (const auto& pe : a.elems)
    if (pe_member(s, pe, lat)) return true;
  return false;
}

// Members with equal x merge to (x, α_i ∩̇ α_j); then members whose
// pseudo-closure is included in another member's are dropped.
template <class L>
void pa_simplify(PseudoAntichain<L>& a, const L& lat) {
  std::sort(a.elems.begin(), a.elems.end());
  std::vector<PseudoElement<L>> merged;
  for (auto& pe : a.elems) {
    if (!merged.empty() && merged.back().x == pe.x) {
      merged.back().alpha = ac_intersect(merged.back().alpha, pe.alpha, lat);
    } else {
      merged.push_back(std::move(pe));
    }
  }
  // x's are pairwise distinct now, so inclusion can only be strict.
  std::vector<bool> keep(merged.size(), true);
  for (std::size_t i = 0; i < merged.size(); ++i)
    for (std::size_t j = 0; j < merged.size(); ++j)
      if (i != j && keep[i] && pe_subset(merged[i], merged[j], lat)) keep[i] = false;
  a.elems.clear();
  for (std::size_t i = 0; i < merged.size(); ++i)
    if (keep[i]) a.elems.push_back(std::move(merged[i]));
}

template <class L>
PseudoAntichain<L> pa_union(const PseudoAntichain<L>& a, const PseudoAntichain<L>& b,
                            const L& lat) {
  PseudoAntichain<L> r;
  r.elems = a.elems;
  r.elems.insert(r.elems.end(), b.elems.begin(), b.elems.end());
  pa_simplify(r, lat);
  return r;
}

template <class L>
PseudoAntichain<L> pa_intersect(const PseudoAntichain<L>& a, const PseudoAntichain<L>& b,
                                const L& lat) {
  PseudoAntichain<L> r;
  for (const auto& p : a.elems)
    for (const auto& q : b.elems) {
      // ↕(x,α) ∩ ↕(y,β) = ↕(x ⊓ y, α ∪̇ β)
      auto pe = pe_canonicalize(lat.meet(p.x, q.x), ac_union(p.alpha, q.alpha, lat), lat);
      if (pe) r.elems.push_back(std::move(*pe));
    }
  pa_simplify(r, lat);
  return r;
}

// ↕(x,α) \ ↕(y,β) = ↕({(x, {y} ∪̇ α)} ∪ {(x ⊓ b, α) | b ∈ β}).
template <class L>
PseudoAntichain<L> pe_difference(const PseudoElement<L>& p, const PseudoElement<L>& q,
                                 const L& lat) {
  PseudoAntichain<L> r;
  auto first = pe_canonicalize(p.x, ac_union(singleton_antichain<L>(q.x), p.alpha, lat), lat);
  if (first) r.elems.push_back(std::move(*first));
  for (const auto& b : q.alpha.elems) {
    auto pe = pe_canonicalize(lat.meet(p.x, b), p.alpha, lat);
    if (pe) r.elems.push_back(std::move(*pe));
  }
  pa_simplify(r, lat);
  return r;
}

// Coverage test ↕p ⊆ ∪ qs without materializing the difference: some q must
// contain the apex of p (else the apex witnesses non-coverage); the residue
// ↕p \ ↕q is disjoint from ↕q, so each piece recurses on the remaining qs.
// The apex requirement prunes eagerly and every level drops one q.
template <class L>
bool pe_covered(const PseudoElement<L>& p, const std::vector<const PseudoElement<L>*>& qs,
                const L& lat) {
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& q = *qs[i];
    if (!lat.leq(p.x, q.x) || ac_member(p.x, q.alpha, lat)) continue;
    auto rest = qs;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    auto pieces = pe_difference(p, q, lat);
    for (const auto& pc : pieces.elems)
      if (!pe_covered(pc, rest, lat)) return false;
    return true;
  }
  return false;
}

template <class L>
bool pa_covers(const PseudoAntichain<L>& cover, const PseudoElement<L>& p, const L& lat) {
  std::vector<const PseudoElement<L>*> qs;
  qs.reserve(cover.size());
  for (const auto& q : cover.elems) qs.push_back(&q);
  return pe_covered(p, qs, lat);
}

// Semantic redundancy elimination. pa_simplify only catches syntactic
// inclusion between members; unions built from many disjoint fragments (as
// produced by repeated differences) can still be far larger than necessary.
// This pass (1) drops members covered by the union of the others and
// (2) widens members by deleting alpha constraints whose excluded part is
// covered elsewhere, until fixpoint. Preserves the denoted set exactly.
// Quadratic in the member count, so reserve it for long-lived regions.
template <class L>
void pa_compact(PseudoAntichain<L>& a, const L& lat) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < a.elems.size();) {
      std::vector<const PseudoElement<L>*> rest;
      for (std::size_t j = 0; j < a.elems.size(); ++j)
        if (j != i) rest.push_back(&a.elems[j]);
      if (pe_covered(a.elems[i], rest, lat)) {
        a.elems.erase(a.elems.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
    for (auto& pe : a.elems) {
      for (std::size_t k = 0; k < pe.alpha.size();) {
        Antichain<L> reduced;
        for (std::size_t m = 0; m < pe.alpha.size(); ++m)
          if (m != k) reduced.elems.push_back(pe.alpha.elems[m]);
        auto wide = pe_canonicalize(pe.x, reduced, lat);
        if (wide && pa_covers(a, *wide, lat)) {
          pe.alpha = std::move(wide->alpha);
          changed = true;
        } else {
          ++k;
        }
      }
    }
  }
  pa_simplify(a, lat);
}

// Difference with bounded intermediate growth: compacts the running result
// whenever it fragments past a small threshold. pe_difference emits one
// piece per alpha constraint of the subtrahend, so chained differences of
// compact sets can otherwise explode before collapsing back to a few
// members.
template <class L>
PseudoAntichain<L> pa_difference(const PseudoAntichain<L>& a, const PseudoAntichain<L>& b,
                                 const L& lat) {
  constexpr std::size_t kCompactAt = 12;
  // Subtract small-alpha members first: each subtraction branches once per
  // alpha constraint, so deferring the wide ones lets earlier steps shrink
  // the set before they apply.
  std::vector<const PseudoElement<L>*> order;
  order.reserve(b.elems.size());
  for (const auto& q : b.elems) order.push_back(&q);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* p, const auto* q) { return p->alpha.size() < q->alpha.size(); });
  PseudoAntichain<L> cur = a;
  for (const auto* q : order) {
    PseudoAntichain<L> next;
    for (const auto& p : cur.elems) {
      auto piece = pe_difference(p, *q, lat);
      next.elems.insert(next.elems.end(), piece.elems.begin(), piece.elems.end());
    }
    pa_simplify(next, lat);
    if (next.size() > kCompactAt && next.size() > a.size()) pa_compact(next, lat);
    cur = std::move(next);
    if (cur.empty()) break;
  }
  return cur;
}

template <class L>
bool pa_is_empty(const PseudoAntichain<L>& a) {
  // Each stored pseudo-element denotes a nonempty set.
  return a.elems.empty();
}

template <class L>
bool pa_subset(const PseudoAntichain<L>& a, const PseudoAntichain<L>& b, const L& lat) {
  for (const auto& p : a.elems)
    if (!pa_covers(b, p, lat)) return false;
  return true;
}

template <class L>
bool pa_equal(const PseudoAntichain<L>& a, const PseudoAntichain<L>& b, const L& lat) {
  return pa_subset(a, b, lat) && pa_subset(b, a, lat);
}

// Test oracle: expands the denoted set by filtering a full enumeration.
template <class L>
std::vector<typename L::Elem> pa_enumerate(const PseudoAntichain<L>& a, const L& lat) {
  if (!lat.enumerable()) throw std::runtime_error("pa_enumerate requires an enumerable lattice");
  std::vector<typename L::Elem> out;
  for (const auto& s : lat.elements())
    if (pa_member(s, a, lat)) out.push_back(s);
  return out;
}

// Deterministic text form "{(x | a1, a2), ...}" in storage order.
template <class L>
std::string pa_to_string(const PseudoAntichain<L>& a, const L& lat) {
  std::string s = "{";
  for (std::size_t i = 0; i < a.elems.size(); ++i) {
    if (i) s += ", ";
    s += "(" + lat.format(a.elems[i].x) + " |";
    for (std::size_t j = 0; j < a.elems[i].alpha.size(); ++j) {
      s += (j ? ", " : " ") + lat.format(a.elems[i].alpha.elems[j]);
    }
    s += ")";
  }
  return s + "}";
}

}  // namespace pamdp
