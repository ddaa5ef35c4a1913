#pragma once

#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "pamdp/mdp.hpp"
#include "pamdp/partition.hpp"
#include "pamdp/pseudo_antichain.hpp"
#include "pamdp/rational.hpp"

namespace pamdp {

// Largest bisimulation of the Markov chain induced by a memoryless strategy,
// via symbolic partition refinement on pseudo-antichain blocks.

// S_{~C,λ}: strategy blocks refined by per-action cost partitions, then
// merged across actions by exact cost equality.
template <class L>
PaPartition<L, Rational> strategy_cost_partition(const MonotonicMdp<L>& mdp,
                                                 const Strategy<L>& lambda) {
  const L& lat = mdp.lattice();
  std::map<Rational, PseudoAntichain<L>> by_cost;
  for (const auto& sb : lambda.blocks) {
    auto cp = mdp.cost_partition(sb.payload);
    for (const auto& cb : cp.blocks) {
      auto inter = pa_intersect(sb.region, cb.region, lat);
      if (pa_is_empty(inter)) continue;
      auto [it, fresh] = by_cost.try_emplace(cb.payload, inter);
      if (!fresh) it->second = pa_union(it->second, inter, lat);
    }
  }
  PaPartition<L, Rational> out;
  out.domain = lambda.domain;
  for (auto& [c, region] : by_cost) out.blocks.push_back({std::move(region), c});
  return out;
}

// S_{~D,λ}: strategy blocks refined by per-action distribution partitions.
// Effect alphabets are disjoint per action, so equal induced distributions
// imply equal actions; the payload keeps the action alongside the
// distribution over its local effect symbols.
template <class L>
PaPartition<L, std::pair<int, Distribution>> strategy_dist_partition(const MonotonicMdp<L>& mdp,
                                                                     const Strategy<L>& lambda) {
  const L& lat = mdp.lattice();
  PaPartition<L, std::pair<int, Distribution>> out;
  out.domain = lambda.domain;
  for (const auto& sb : lambda.blocks) {
    auto dp = mdp.dist_partition(sb.payload);
    for (const auto& db : dp.blocks) {
      auto inter = pa_intersect(sb.region, db.region, lat);
      if (!pa_is_empty(inter))
        out.blocks.push_back({std::move(inter), {sb.payload, db.payload}});
    }
  }
  return out;
}

namespace detail {

// One global effect symbol of the induced chain: action σ, local symbol τ,
// with Pre_λ(C, (σ,τ)) precomputed for the current splitter C.
template <class L>
struct SplitterPre {
  int sigma;
  int tau;
  PseudoAntichain<L> pre;
};

template <class L>
std::vector<SplitterPre<L>> splitter_pres(const MonotonicMdp<L>& mdp,
                                          const PseudoAntichain<L>& c,
                                          const Strategy<L>& lambda) {
  std::vector<bool> used(mdp.num_actions(), false);
  for (const auto& b : lambda.blocks)
    if (!pa_is_empty(b.region)) used[b.payload] = true;
  std::vector<SplitterPre<L>> out;
  for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
    if (!used[sigma]) continue;  // Pre_λ is empty for actions λ never plays
    for (int tau = 0; tau < mdp.num_effects(sigma); ++tau)
      out.push_back({sigma, tau, pre_lambda(mdp, c, sigma, tau, lambda)});
  }
  return out;
}

// Partition one block by exact one-step probability of reaching ↕C: a table
// keyed by accumulated probability, one pass per global symbol, merging
// equal keys and dropping empties eagerly.
template <class L>
std::vector<std::pair<Rational, PseudoAntichain<L>>> split_with_pres(
    const MonotonicMdp<L>& mdp, const PseudoAntichain<L>& b,
    const std::vector<SplitterPre<L>>& pres,
    const PaPartition<L, std::pair<int, Distribution>>& dist_part) {
  const L& lat = mdp.lattice();
  std::map<Rational, PseudoAntichain<L>> table;
  table.emplace(Rational(0), b);
  for (const auto& sp : pres) {
    if (pa_is_empty(sp.pre)) continue;
    std::map<Rational, PseudoAntichain<L>> next;
    auto add = [&](const Rational& key, PseudoAntichain<L> region) {
      auto [it, fresh] = next.try_emplace(key, std::move(region));
      if (!fresh) it->second = pa_union(it->second, region, lat);
    };
    for (auto& [p, block] : table) {
      auto stay = pa_difference(block, sp.pre, lat);
      auto moved = pa_intersect(block, sp.pre, lat);
      if (!pa_is_empty(stay)) add(p, std::move(stay));
      if (pa_is_empty(moved)) continue;
      for (const auto& db : dist_part.blocks) {
        if (db.payload.first != sp.sigma) continue;
        auto part = pa_intersect(moved, db.region, lat);
        if (!pa_is_empty(part)) add(p + db.payload.second.probs[sp.tau], std::move(part));
      }
    }
    table = std::move(next);
  }
  std::vector<std::pair<Rational, PseudoAntichain<L>>> out;
  out.reserve(table.size());
  for (auto& [p, region] : table) {
    pa_compact(region, lat);
    out.emplace_back(p, std::move(region));
  }
  return out;
}

}  // namespace detail

// Split block B by one-step probability of reaching ↕C under λ.
template <class L>
std::vector<std::pair<Rational, PseudoAntichain<L>>> split(
    const MonotonicMdp<L>& mdp, const PseudoAntichain<L>& b, const PseudoAntichain<L>& c,
    const Strategy<L>& lambda) {
  return detail::split_with_pres(mdp, b, detail::splitter_pres(mdp, c, lambda),
                                 strategy_dist_partition(mdp, lambda));
}

template <class L>
struct LumpResult {
  PaPartition<L, Rational> quotient;          // block regions with constant cost
  std::vector<typename L::Elem> reps;         // one member per block
  int split_calls = 0;
};

// Largest bisimulation of M_λ refining the cost partition (optionally
// pre-refined by extra regions, e.g. the goal set). Worklist of splitter
// snapshots: every block enters once, and every fresh sub-block re-enters;
// a stale splitter is a union of final blocks, so splitting against it
// never over-refines, and sub-blocks inherit stability from their parent.
template <class L>
LumpResult<L> lump(const MonotonicMdp<L>& mdp, const Strategy<L>& lambda,
                   const std::vector<PseudoAntichain<L>>& extra = {}) {
  const L& lat = mdp.lattice();
  auto part = strategy_cost_partition(mdp, lambda);
  for (const auto& region : extra) {
    std::vector<typename PaPartition<L, Rational>::Block> refined;
    for (auto& b : part.blocks) {
      auto in = pa_intersect(b.region, region, lat);
      auto out = pa_difference(b.region, region, lat);
      if (!pa_is_empty(in)) refined.push_back({std::move(in), b.payload});
      if (!pa_is_empty(out)) refined.push_back({std::move(out), b.payload});
    }
    part.blocks = std::move(refined);
  }
  auto dist_part = strategy_dist_partition(mdp, lambda);

  LumpResult<L> result;
  std::deque<PseudoAntichain<L>> worklist;
  for (const auto& b : part.blocks) worklist.push_back(b.region);
  while (!worklist.empty()) {
    auto splitter = std::move(worklist.front());
    worklist.pop_front();
    auto pres = detail::splitter_pres(mdp, splitter, lambda);
    std::vector<typename PaPartition<L, Rational>::Block> next;
    next.reserve(part.blocks.size());
    for (auto& b : part.blocks) {
      auto parts = detail::split_with_pres(mdp, b.region, pres, dist_part);
      ++result.split_calls;
      if (parts.size() == 1) {
        next.push_back(std::move(b));
      } else {
        for (auto& [p, region] : parts) {
          worklist.push_back(region);
          next.push_back({std::move(region), b.payload});
        }
      }
    }
    part.blocks = std::move(next);
  }

  result.reps.reserve(part.blocks.size());
  for (const auto& b : part.blocks) result.reps.push_back(pa_pick(b.region));
  result.quotient = std::move(part);
  return result;
}

// Post-hoc stability: every block splits into exactly one part against
// every block (the lump termination condition).
template <class L>
bool lump_is_stable(const MonotonicMdp<L>& mdp, const Strategy<L>& lambda,
                    const PaPartition<L, Rational>& part) {
  auto dist_part = strategy_dist_partition(mdp, lambda);
  for (const auto& c : part.blocks) {
    auto pres = detail::splitter_pres(mdp, c.region, lambda);
    for (const auto& b : part.blocks)
      if (detail::split_with_pres(mdp, b.region, pres, dist_part).size() != 1) return false;
  }
  return true;
}

}  // namespace pamdp
