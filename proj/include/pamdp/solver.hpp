#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pamdp/lumping.hpp"
#include "pamdp/mdp.hpp"
#include "pamdp/partition.hpp"
#include "pamdp/quotient.hpp"

namespace pamdp {

// Symblicit strategy iteration: symbolic strategies and partitions, explicit
// exact numerics on the lumped quotient.

template <class L>
struct SolveReport {
  Strategy<L> strategy;
  PaPartition<L, Rational> values;  // SSP value / mean-payoff gain per block
  PaPartition<L, Rational> bias;    // mean payoff only
  int iterations = 0;
  int max_quotient_blocks = 0;
  double time_lump_s = 0;
  double time_solve_s = 0;
  double time_improve_s = 0;
};

// States from which the goal is reachable almost surely under some strategy:
// greatest fixpoint over Y of the least fixpoint
//   μX. G ∪ ⋃_σ (allow_region(σ, Y) ∩ ⋃_τ Pre_{σ,τ}(X)).
template <class L>
PseudoAntichain<L> proper_states(const MonotonicMdp<L>& mdp) {
  const L& lat = mdp.lattice();
  auto g = mdp.goal_pa();
  auto y = mdp.states_pa();
  for (;;) {
    std::vector<PseudoAntichain<L>> allow;
    for (int sigma = 0; sigma < mdp.num_actions(); ++sigma)
      allow.push_back(allow_region(mdp, sigma, y));
    auto x = pa_intersect(g, y, lat);
    for (bool grew = true; grew;) {
      grew = false;
      for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
        if (pa_is_empty(allow[sigma])) continue;
        PseudoAntichain<L> pre;
        for (int tau = 0; tau < mdp.num_effects(sigma); ++tau)
          pre = pa_union(pre, pre_sigma_tau(mdp, x, sigma, tau), lat);
        auto gain = pa_difference(pa_intersect(allow[sigma], pre, lat), x, lat);
        if (!pa_is_empty(gain)) {
          x = pa_union(x, gain, lat);
          grew = true;
        }
      }
    }
    if (pa_equal(x, y, lat)) return y;
    y = std::move(x);
  }
}

// A strategy reaching the goal with probability 1 from every proper state:
// attractor layers toward G, each layer assigned an action that keeps all
// successors proper and moves to an earlier layer with positive probability.
// Goal states get the first enabled action.
template <class L>
Strategy<L> initial_proper_strategy(const MonotonicMdp<L>& mdp, const PseudoAntichain<L>& sp) {
  const L& lat = mdp.lattice();
  Strategy<L> out;
  out.domain = sp;

  std::vector<PseudoAntichain<L>> allow;
  for (int sigma = 0; sigma < mdp.num_actions(); ++sigma)
    allow.push_back(allow_region(mdp, sigma, sp));

  auto g = pa_intersect(mdp.goal_pa(), sp, lat);
  PseudoAntichain<L> remaining = g;
  for (int sigma = 0; sigma < mdp.num_actions() && !pa_is_empty(remaining); ++sigma) {
    auto region = pa_intersect(remaining, enabled_region(mdp, sigma), lat);
    if (!pa_is_empty(region)) {
      remaining = pa_difference(remaining, region, lat);
      out.blocks.push_back({std::move(region), sigma});
    }
  }

  auto x = g;
  for (bool grew = true; grew;) {
    grew = false;
    for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
      if (pa_is_empty(allow[sigma])) continue;
      PseudoAntichain<L> pre;
      for (int tau = 0; tau < mdp.num_effects(sigma); ++tau)
        pre = pa_union(pre, pre_sigma_tau(mdp, x, sigma, tau), lat);
      auto gain = pa_difference(pa_intersect(allow[sigma], pre, lat), x, lat);
      if (!pa_is_empty(gain)) {
        out.blocks.push_back({gain, sigma});
        x = pa_union(x, gain, lat);
        grew = true;
      }
    }
  }
  if (!pa_equal(x, sp, lat))
    throw std::runtime_error("initial strategy does not cover the proper region");
  return out;
}

namespace detail {

// Partition of a region of S_σ by the exact one-step distribution over the
// quotient blocks under action σ: iterated Split against every block, the
// payload accumulating the sparse probability row.
template <class L>
PaPartition<L, std::vector<std::pair<int, Rational>>> action_row_partition(
    const MonotonicMdp<L>& mdp, int sigma, const PaPartition<L, Rational>& quotient,
    const PseudoAntichain<L>& region) {
  const L& lat = mdp.lattice();
  PaPartition<L, std::vector<std::pair<int, Rational>>> out;
  out.domain = region;
  if (pa_is_empty(region)) return out;

  Strategy<L> const_sigma;
  const_sigma.domain = region;
  const_sigma.blocks.push_back({region, sigma});
  auto dist_part = strategy_dist_partition(mdp, const_sigma);

  out.blocks.push_back({region, {}});
  for (int c = 0; c < static_cast<int>(quotient.size()); ++c) {
    auto pres = splitter_pres(mdp, quotient.blocks[c].region, const_sigma);
    std::vector<typename decltype(out)::Block> next;
    for (auto& b : out.blocks) {
      auto parts = split_with_pres(mdp, b.region, pres, dist_part);
      for (auto& [p, sub] : parts) {
        auto row = b.payload;
        if (p != 0) row.emplace_back(c, p);
        next.push_back({std::move(sub), std::move(row)});
      }
    }
    out.blocks = std::move(next);
  }
  for (const auto& b : out.blocks) {
    Rational sum = 0;
    for (const auto& [c, p] : b.payload) sum += p;
    if (sum != 1) throw std::runtime_error("action row does not sum to 1");
  }
  return out;
}

}  // namespace detail

// Partition of S_σ ∩ region with the constant value
//   l_σ(s) = C(s, σ) + Σ_C P(s, σ, C) · v(C)
// per block, where v is constant per quotient block.
template <class L>
PaPartition<L, Rational> compute_lsigma(const MonotonicMdp<L>& mdp, int sigma,
                                        const PaPartition<L, Rational>& quotient,
                                        const std::vector<Rational>& v,
                                        const PseudoAntichain<L>& region) {
  const L& lat = mdp.lattice();
  auto eligible = pa_intersect(enabled_region(mdp, sigma), region, lat);
  auto rows = detail::action_row_partition(mdp, sigma, quotient, eligible);
  PaPartition<L, Rational> out;
  out.domain = rows.domain;
  auto cp = mdp.cost_partition(sigma);
  for (const auto& b : rows.blocks) {
    Rational acc = 0;
    for (const auto& [c, p] : b.payload) acc += p * v[c];
    for (const auto& cb : cp.blocks) {
      auto inter = pa_intersect(b.region, cb.region, lat);
      if (!pa_is_empty(inter)) out.blocks.push_back({std::move(inter), cb.payload + acc});
    }
  }
  return out;
}

// Function equality: per action, the union of regions matches.
template <class L>
bool strategies_equal(const Strategy<L>& a, const Strategy<L>& b, const L& lat) {
  if (!pa_equal(a.domain, b.domain, lat))
    throw std::runtime_error("strategies_equal: domain mismatch");
  std::map<int, PseudoAntichain<L>> ra, rb;
  for (const auto& blk : a.blocks)
    ra[blk.payload] = pa_union(ra[blk.payload], blk.region, lat);
  for (const auto& blk : b.blocks)
    rb[blk.payload] = pa_union(rb[blk.payload], blk.region, lat);
  for (const auto& [sigma, region] : ra) {
    auto it = rb.find(sigma);
    if (it == rb.end()) {
      if (!pa_is_empty(region)) return false;
    } else if (!pa_equal(region, it->second, lat)) {
      return false;
    }
  }
  for (const auto& [sigma, region] : rb)
    if (!ra.count(sigma) && !pa_is_empty(region)) return false;
  return true;
}

namespace detail {

template <class L>
struct Candidate {
  Rational score;  // ordering key (descending)
  int sigma;
  PseudoAntichain<L> region;
};

// Decreasing-score traversal with later (smaller-score) entries overwriting
// earlier ones on overlaps is equivalent to claiming in reverse: each
// candidate takes what no better candidate has claimed yet. The claim form
// keeps regions compact (differences extend alphas instead of fragmenting
// blocks). Finally same-action regions are merged, deterministic by action.
template <class L>
std::pair<Strategy<L>, bool> apply_candidates(const MonotonicMdp<L>& mdp,
                                              const Strategy<L>& lambda,
                                              std::vector<Candidate<L>>& cands) {
  const L& lat = mdp.lattice();
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate<L>& a, const Candidate<L>& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.sigma < b.sigma;
                   });
  // Claimed space is kept as the list of raw candidate regions: they have
  // small alphas, so sequential subtraction stays compact, whereas an
  // accumulated union grows alphas and makes later differences explode.
  std::vector<const PseudoAntichain<L>*> claimed;
  auto subtract_claimed = [&](PseudoAntichain<L> r) {
    for (const auto* q : claimed) {
      if (pa_is_empty(r)) break;
      r = pa_difference(r, *q, lat);
    }
    return r;
  };
  std::map<int, PseudoAntichain<L>> merged;
  for (auto it = cands.rbegin(); it != cands.rend(); ++it) {
    auto eff = subtract_claimed(it->region);
    if (pa_is_empty(eff)) continue;  // fully covered: claiming it adds nothing
    claimed.push_back(&it->region);
    merged[it->sigma] = pa_union(merged[it->sigma], eff, lat);
  }
  for (const auto& b : lambda.blocks) {
    auto keep = subtract_claimed(b.region);
    if (!pa_is_empty(keep)) merged[b.payload] = pa_union(merged[b.payload], keep, lat);
  }
  Strategy<L> out;
  out.domain = lambda.domain;
  for (auto& [sigma, region] : merged) {
    pa_compact(region, lat);
    out.blocks.push_back({std::move(region), sigma});
  }
  bool changed = !strategies_equal(lambda, out, lat);
  return {std::move(out), changed};
}

// Refine a per-action score partition by the quotient and collect the blocks
// where the score beats the reference block value (strict minimization).
template <class L>
void collect_improvements(const L& lat, int sigma, const PaPartition<L, Rational>& scores,
                          const PaPartition<L, Rational>& quotient,
                          const std::vector<Rational>& reference,
                          std::vector<Candidate<L>>& cands) {
  for (const auto& sb : scores.blocks)
    for (int c = 0; c < static_cast<int>(quotient.size()); ++c) {
      if (sb.payload >= reference[c]) continue;
      auto inter = pa_intersect(sb.region, quotient.blocks[c].region, lat);
      if (!pa_is_empty(inter)) cands.push_back({sb.payload, sigma, std::move(inter)});
    }
}

struct PhaseTimer {
  std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last).count();
    last = now;
    return s;
  }
};

}  // namespace detail

// One strategy-improvement step for the truncated sum: candidates are the
// refined l_σ blocks with l_σ(D) < v(D), restricted to actions keeping all
// successors proper.
template <class L>
std::pair<Strategy<L>, bool> improve_strategy_ssp(const MonotonicMdp<L>& mdp,
                                                  const Strategy<L>& lambda,
                                                  const PaPartition<L, Rational>& quotient,
                                                  const std::vector<Rational>& v,
                                                  const PseudoAntichain<L>& sp) {
  const L& lat = mdp.lattice();
  std::vector<detail::Candidate<L>> cands;
  for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
    auto lsig = compute_lsigma(mdp, sigma, quotient, v, allow_region(mdp, sigma, sp));
    detail::collect_improvements(lat, sigma, lsig, quotient, v, cands);
  }
  return detail::apply_candidates(mdp, lambda, cands);
}

// Two-stage mean-payoff improvement: first strictly smaller expected gain
// q_σ = Σ P·g; if no gain improvement exists anywhere, then among gain ties
// strictly smaller bias candidate r_σ = C - g + Σ P·b.
template <class L>
std::pair<Strategy<L>, bool> improve_strategy_emp(const MonotonicMdp<L>& mdp,
                                                  const Strategy<L>& lambda,
                                                  const PaPartition<L, Rational>& quotient,
                                                  const std::vector<Rational>& g,
                                                  const std::vector<Rational>& b) {
  const L& lat = mdp.lattice();
  std::vector<detail::Candidate<L>> gain_cands;
  // per-action row partitions are reused by stage 2
  std::vector<PaPartition<L, std::vector<std::pair<int, Rational>>>> rows(mdp.num_actions());
  for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
    rows[sigma] =
        detail::action_row_partition(mdp, sigma, quotient, enabled_region(mdp, sigma));
    PaPartition<L, Rational> qsig;
    qsig.domain = rows[sigma].domain;
    for (const auto& rb : rows[sigma].blocks) {
      Rational acc = 0;
      for (const auto& [c, p] : rb.payload) acc += p * g[c];
      qsig.blocks.push_back({rb.region, acc});
    }
    detail::collect_improvements(lat, sigma, qsig, quotient, g, gain_cands);
  }
  if (!gain_cands.empty()) {
    auto [next, changed] = detail::apply_candidates(mdp, lambda, gain_cands);
    if (changed) return {std::move(next), true};
  }

  std::vector<detail::Candidate<L>> bias_cands;
  for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
    auto cp = mdp.cost_partition(sigma);
    for (const auto& rb : rows[sigma].blocks) {
      Rational qacc = 0, bacc = 0;
      for (const auto& [c, p] : rb.payload) {
        qacc += p * g[c];
        bacc += p * b[c];
      }
      for (int c = 0; c < static_cast<int>(quotient.size()); ++c) {
        if (qacc != g[c]) continue;  // stage 2 only among gain ties
        auto inter = pa_intersect(rb.region, quotient.blocks[c].region, lat);
        if (pa_is_empty(inter)) continue;
        for (const auto& cb : cp.blocks) {
          auto piece = pa_intersect(inter, cb.region, lat);
          if (pa_is_empty(piece)) continue;
          Rational r = cb.payload - g[c] + bacc;
          if (r < b[c]) bias_cands.push_back({r, sigma, std::move(piece)});
        }
      }
    }
  }
  return detail::apply_candidates(mdp, lambda, bias_cands);
}

// Full symblicit loop for the expected truncated sum: lump, solve the
// quotient exactly, improve, until the strategy function is stable.
template <class L>
SolveReport<L> solve_ssp(const MonotonicMdp<L>& mdp) {
  const L& lat = mdp.lattice();
  auto sp = proper_states(mdp);
  if (pa_is_empty(sp)) throw std::runtime_error("no proper state");
  auto goal = pa_intersect(mdp.goal_pa(), sp, lat);
  SolveReport<L> report;
  report.strategy = initial_proper_strategy(mdp, sp);

  for (;;) {
    detail::PhaseTimer t;
    auto lumped = lump(mdp, report.strategy, {goal});
    report.time_lump_s += t.lap();
    report.max_quotient_blocks =
        std::max(report.max_quotient_blocks, static_cast<int>(lumped.quotient.size()));
    auto q = build_quotient(mdp, lumped, report.strategy, &goal);
    auto v = solve_ssp_values(q);
    report.time_solve_s += t.lap();
    ++report.iterations;

    auto [next, changed] = improve_strategy_ssp(mdp, report.strategy, lumped.quotient, v, sp);
    report.time_improve_s += t.lap();
    if (!changed) {
      report.values.domain = lumped.quotient.domain;
      for (int c = 0; c < q.n; ++c)
        report.values.blocks.push_back({lumped.quotient.blocks[c].region, v[c]});
      return report;
    }
    report.strategy = std::move(next);
  }
}

// Full symblicit loop for the expected mean payoff (minimization).
template <class L>
SolveReport<L> solve_emp(const MonotonicMdp<L>& mdp) {
  SolveReport<L> report;
  // first enabled action everywhere
  {
    const L& lat = mdp.lattice();
    report.strategy.domain = mdp.states_pa();
    auto remaining = mdp.states_pa();
    for (int sigma = 0; sigma < mdp.num_actions() && !pa_is_empty(remaining); ++sigma) {
      auto region = pa_intersect(remaining, enabled_region(mdp, sigma), lat);
      if (!pa_is_empty(region)) {
        remaining = pa_difference(remaining, region, lat);
        report.strategy.blocks.push_back({std::move(region), sigma});
      }
    }
    if (!pa_is_empty(remaining)) throw std::runtime_error("blocking state with no action");
  }

  for (;;) {
    detail::PhaseTimer t;
    auto lumped = lump(mdp, report.strategy);
    report.time_lump_s += t.lap();
    report.max_quotient_blocks =
        std::max(report.max_quotient_blocks, static_cast<int>(lumped.quotient.size()));
    auto q = build_quotient(mdp, lumped, report.strategy);
    auto [g, b] = solve_gain_bias(q);
    report.time_solve_s += t.lap();
    ++report.iterations;

    auto [next, changed] = improve_strategy_emp(mdp, report.strategy, lumped.quotient, g, b);
    report.time_improve_s += t.lap();
    if (!changed) {
      report.values.domain = lumped.quotient.domain;
      report.bias.domain = lumped.quotient.domain;
      for (int c = 0; c < q.n; ++c) {
        report.values.blocks.push_back({lumped.quotient.blocks[c].region, g[c]});
        report.bias.blocks.push_back({lumped.quotient.blocks[c].region, b[c]});
      }
      return report;
    }
    report.strategy = std::move(next);
  }
}

}  // namespace pamdp
