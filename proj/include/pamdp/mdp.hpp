#pragma once

#include <string>
#include <vector>

#include "pamdp/antichain.hpp"
#include "pamdp/partition.hpp"
#include "pamdp/pseudo_antichain.hpp"
#include "pamdp/rational.hpp"

namespace pamdp {

// A probability distribution over the effect symbols of one action.
struct Distribution {
  std::vector<Rational> probs;

  bool operator==(const Distribution& o) const { return probs == o.probs; }
};

// Behavioral interface of a monotonic MDP in factored (E, D) form. Effect
// alphabets are per action; the global symbol set is their disjoint union.
// pre_max is the single model-specific oracle: the antichain of maximal
// predecessors ⌈Pre_{σ,τ}(↓{x})⌉, with the enabledness check folded in
// (predecessors are states where σ is enabled).
//
// Implementations must be safe for concurrent read-only queries.
template <class L>
class MonotonicMdp {
 public:
  using Elem = typename L::Elem;

  virtual ~MonotonicMdp() = default;

  virtual const L& lattice() const = 0;
  virtual int num_actions() const = 0;
  virtual std::string action_name(int sigma) const = 0;
  virtual int num_effects(int sigma) const = 0;
  virtual Elem successor(const Elem& s, int sigma, int tau) const = 0;
  virtual Rational prob(int sigma, int tau, const Elem& s) const = 0;
  virtual Rational cost(int sigma, const Elem& s) const = 0;
  virtual Antichain<L> pre_max(const Elem& x, int sigma, int tau) const = 0;
  virtual PseudoAntichain<L> states_pa() const = 0;
  virtual PseudoAntichain<L> goal_pa() const { return {}; }
  virtual PaPartition<L, Distribution> dist_partition(int sigma) const = 0;
  virtual PaPartition<L, Rational> cost_partition(int sigma) const = 0;
};

// ⌈Pre_{σ,τ}(↓α)⌉ = ∪̇_{a ∈ α} pre_max(a).
template <class L>
Antichain<L> pre_antichain(const MonotonicMdp<L>& mdp, const Antichain<L>& alpha, int sigma,
                           int tau) {
  const L& lat = mdp.lattice();
  Antichain<L> out;
  for (const auto& a : alpha.elems) out = ac_union(out, mdp.pre_max(a, sigma, tau), lat);
  return out;
}

// Pre_{σ,τ}(↕A): per pseudo-element, ∪_{x' ∈ ⌈Pre(↓{x})⌉} ↕(x', ⌈Pre(↓α)⌉).
template <class L>
PseudoAntichain<L> pre_sigma_tau(const MonotonicMdp<L>& mdp, const PseudoAntichain<L>& a,
                                 int sigma, int tau) {
  const L& lat = mdp.lattice();
  PseudoAntichain<L> out;
  for (const auto& pe : a.elems) {
    Antichain<L> pre_alpha = pre_antichain(mdp, pe.alpha, sigma, tau);
    for (const auto& x : mdp.pre_max(pe.x, sigma, tau).elems) {
      auto cand = pe_canonicalize(x, pre_alpha, lat);
      if (cand) out.elems.push_back(std::move(*cand));
    }
  }
  pa_simplify(out, lat);
  return out;
}

// S_σ = Pre_{σ,τ}(S) for an arbitrary τ; always a closed set.
template <class L>
PseudoAntichain<L> enabled_region(const MonotonicMdp<L>& mdp, int sigma) {
  return pre_sigma_tau(mdp, mdp.states_pa(), sigma, 0);
}

// {s ∈ S_σ | ∀τ: E(s,σ,τ) ∈ ↕Y} = ⋂_τ Pre_{σ,τ}(Y).
template <class L>
PseudoAntichain<L> allow_region(const MonotonicMdp<L>& mdp, int sigma,
                                const PseudoAntichain<L>& y) {
  const L& lat = mdp.lattice();
  PseudoAntichain<L> out = pre_sigma_tau(mdp, y, sigma, 0);
  for (int tau = 1; tau < mdp.num_effects(sigma) && !pa_is_empty(out); ++tau)
    out = pa_intersect(out, pre_sigma_tau(mdp, y, sigma, tau), lat);
  return out;
}

// Pre_λ(C, τ) for the global symbol τ = (σ, tau): states of λ-blocks with
// action σ whose (σ, τ)-successor lies in ↕C.
template <class L>
PseudoAntichain<L> pre_lambda(const MonotonicMdp<L>& mdp, const PseudoAntichain<L>& c, int sigma,
                              int tau, const Strategy<L>& lambda) {
  const L& lat = mdp.lattice();
  PseudoAntichain<L> pre = pre_sigma_tau(mdp, c, sigma, tau);
  PseudoAntichain<L> out;
  for (const auto& b : lambda.blocks)
    if (b.payload == sigma) out = pa_union(out, pa_intersect(pre, b.region, lat), lat);
  return out;
}

}  // namespace pamdp
