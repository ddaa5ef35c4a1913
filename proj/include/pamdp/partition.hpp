#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "pamdp/pseudo_antichain.hpp"

namespace pamdp {

// A finite list of disjoint pseudo-antichain blocks covering a region, each
// carrying a payload (action, cost, distribution, value, ...).
template <class L, class Payload>
struct PaPartition {
  struct Block {
    PseudoAntichain<L> region;
    Payload payload;
  };

  PseudoAntichain<L> domain;
  std::vector<Block> blocks;

  bool empty() const { return blocks.empty(); }
  std::size_t size() const { return blocks.size(); }
};

// A memoryless strategy as a partition of its domain, payload = action index.
template <class L>
using Strategy = PaPartition<L, int>;

// Representative member of a nonempty pseudo-antichain: for a canonical
// pseudo-element (x, α), x itself belongs to ↕(x, α).
template <class L>
typename L::Elem pa_pick(const PseudoAntichain<L>& a) {
  if (a.empty()) throw std::runtime_error("pa_pick on empty pseudo-antichain");
  return a.elems.front().x;
}

// Coarsest common refinement; payloads carried through as pairs.
template <class L, class P1, class P2>
PaPartition<L, std::pair<P1, P2>> partition_refine(const PaPartition<L, P1>& p,
                                                   const PaPartition<L, P2>& q, const L& lat) {
  if (!pa_equal(p.domain, q.domain, lat))
    throw std::runtime_error("partition_refine: domain mismatch");
  PaPartition<L, std::pair<P1, P2>> out;
  out.domain = p.domain;
  for (const auto& pb : p.blocks)
    for (const auto& qb : q.blocks) {
      auto inter = pa_intersect(pb.region, qb.region, lat);
      if (!pa_is_empty(inter))
        out.blocks.push_back({std::move(inter), {pb.payload, qb.payload}});
    }
  return out;
}

// Disjointness/cover invariants; used in tests and debug checks.
template <class L, class P>
bool partition_validate(const PaPartition<L, P>& p, const L& lat) {
  PseudoAntichain<L> covered;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (pa_is_empty(p.blocks[i].region)) return false;
    for (std::size_t j = i + 1; j < p.blocks.size(); ++j)
      if (!pa_is_empty(pa_intersect(p.blocks[i].region, p.blocks[j].region, lat))) return false;
    covered = pa_union(covered, p.blocks[i].region, lat);
  }
  return pa_equal(covered, p.domain, lat);
}

}  // namespace pamdp
