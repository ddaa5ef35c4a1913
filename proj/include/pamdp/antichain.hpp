#pragma once

#include <algorithm>
#include <vector>

namespace pamdp {

// Canonical representation of a ⪯-closed set by its maximal elements.
// Elements are kept sorted (by the total storage order) and deduplicated,
// so equal antichains compare equal with ==.
template <class L>
struct Antichain {
  using Elem = typename L::Elem;

  std::vector<Elem> elems;

  bool empty() const { return elems.empty(); }
  std::size_t size() const { return elems.size(); }

  bool operator==(const Antichain& o) const { return elems == o.elems; }
  bool operator<(const Antichain& o) const { return elems < o.elems; }
};

namespace detail {
template <class Elem>
void sort_unique(std::vector<Elem>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace detail

// ⌈set⌉: drops every element strictly below another one.
template <class L>
Antichain<L> maximal_elements(std::vector<typename L::Elem> set, const L& lat) {
  detail::sort_unique(set);
  Antichain<L> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < set.size() && !dominated; ++j)
      if (i != j && lat.leq(set[i], set[j])) dominated = true;
    if (!dominated) out.elems.push_back(set[i]);
  }
  return out;
}

template <class L>
Antichain<L> singleton_antichain(const typename L::Elem& x) {
  Antichain<L> a;
  a.elems.push_back(x);
  return a;
}

// s ∈ ↓α iff some a ∈ α dominates s.
template <class L>
bool ac_member(const typename L::Elem& s, const Antichain<L>& alpha, const L& lat) {
  for (const auto& a : alpha.elems)
    if (lat.leq(s, a)) return true;
  return false;
}

template <class L>
Antichain<L> ac_union(const Antichain<L>& a1, const Antichain<L>& a2, const L& lat) {
  std::vector<typename L::Elem> all = a1.elems;
  all.insert(all.end(), a2.elems.begin(), a2.elems.end());
  return maximal_elements(std::move(all), lat);
}

// ↓α1 ∩ ↓α2 = ↓⌈pairwise meets⌉.
template <class L>
Antichain<L> ac_intersect(const Antichain<L>& a1, const Antichain<L>& a2, const L& lat) {
  std::vector<typename L::Elem> meets;
  meets.reserve(a1.size() * a2.size());
  for (const auto& x : a1.elems)
    for (const auto& y : a2.elems) meets.push_back(lat.meet(x, y));
  return maximal_elements(std::move(meets), lat);
}

template <class L>
bool ac_subset(const Antichain<L>& a1, const Antichain<L>& a2, const L& lat) {
  for (const auto& x : a1.elems)
    if (!ac_member(x, a2, lat)) return false;
  return true;
}

}  // namespace pamdp
