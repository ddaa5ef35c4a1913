#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "pamdp/mdp.hpp"
#include "pamdp/rational.hpp"

namespace pamdp {

// Enumerative baseline: a fully explicit copy of an enumerable MDP, plus
// naive strategy-iteration and lumping oracles that share no code with the
// symbolic pipeline. Used for cross-validation only.

template <class L>
struct ExplicitMdp {
  using Elem = typename L::Elem;

  std::vector<Elem> states;
  std::map<Elem, int> index;
  // enabled[s] = action indices; trans[s][k] = per-effect (state, prob);
  // cost[s][k] aligned with enabled[s][k].
  std::vector<std::vector<int>> enabled;
  std::vector<std::vector<std::vector<std::pair<int, Rational>>>> trans;
  std::vector<std::vector<Rational>> cost;
  std::vector<bool> goal;
  int num_actions = 0;
};

template <class L>
ExplicitMdp<L> enumerate_states(const MonotonicMdp<L>& mdp, std::size_t cap) {
  const L& lat = mdp.lattice();
  if (!lat.enumerable()) throw std::runtime_error("state enumeration: lattice not enumerable");
  ExplicitMdp<L> e;
  for (const auto& s : lat.elements()) {
    if (e.states.size() >= cap) throw std::runtime_error("state enumeration: cap exceeded");
    e.index.emplace(s, static_cast<int>(e.states.size()));
    e.states.push_back(s);
  }
  int n = static_cast<int>(e.states.size());
  e.enabled.resize(n);
  e.trans.resize(n);
  e.cost.resize(n);
  e.goal.resize(n);
  e.num_actions = mdp.num_actions();
  auto goal_pa = mdp.goal_pa();
  std::vector<PseudoAntichain<L>> enab;
  for (int sigma = 0; sigma < mdp.num_actions(); ++sigma)
    enab.push_back(enabled_region(mdp, sigma));
  for (int i = 0; i < n; ++i) {
    const auto& s = e.states[i];
    e.goal[i] = pa_member(s, goal_pa, lat);
    for (int sigma = 0; sigma < mdp.num_actions(); ++sigma) {
      if (!pa_member(s, enab[sigma], lat)) continue;
      std::vector<std::pair<int, Rational>> row;
      Rational sum = 0;
      for (int tau = 0; tau < mdp.num_effects(sigma); ++tau) {
        Rational p = mdp.prob(sigma, tau, s);
        sum += p;
        row.emplace_back(e.index.at(mdp.successor(s, sigma, tau)), p);
      }
      if (sum != 1) throw std::runtime_error("state enumeration: distribution does not sum to 1");
      e.enabled[i].push_back(sigma);
      e.trans[i].push_back(std::move(row));
      e.cost[i].push_back(mdp.cost(sigma, s));
    }
  }
  return e;
}

namespace expl {

// Dense exact Gaussian elimination; throws on a singular system.
inline std::vector<Rational> gauss_solve(std::vector<std::vector<Rational>> a,
                                         std::vector<Rational> rhs) {
  int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("singular linear system");
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<Rational> x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return x;
}

// Per-state one-step distribution over states under a fixed strategy.
template <class L>
std::vector<std::map<int, Rational>> chain_rows(const ExplicitMdp<L>& e,
                                                const std::vector<int>& action_of) {
  int n = static_cast<int>(e.states.size());
  std::vector<std::map<int, Rational>> rows(n);
  for (int i = 0; i < n; ++i) {
    if (action_of[i] < 0) continue;
    auto it = std::find(e.enabled[i].begin(), e.enabled[i].end(), action_of[i]);
    if (it == e.enabled[i].end()) throw std::runtime_error("strategy picks disabled action");
    std::size_t k = static_cast<std::size_t>(it - e.enabled[i].begin());
    for (const auto& [j, p] : e.trans[i][k]) rows[i][j] += p;
  }
  return rows;
}

template <class L>
Rational chain_cost(const ExplicitMdp<L>& e, const std::vector<int>& action_of, int i) {
  auto it = std::find(e.enabled[i].begin(), e.enabled[i].end(), action_of[i]);
  std::size_t k = static_cast<std::size_t>(it - e.enabled[i].begin());
  return e.cost[i][k];
}

// States from which the goal is reachable almost surely under some strategy:
// greatest fixpoint over Y of the least fixpoint μX. G ∪ {s | ∃σ: all
// successors in Y and some successor in X}.
template <class L>
std::vector<bool> proper_mask(const ExplicitMdp<L>& e) {
  int n = static_cast<int>(e.states.size());
  std::vector<bool> y(n, true);
  for (;;) {
    std::vector<bool> x(n, false);
    for (int i = 0; i < n; ++i) x[i] = e.goal[i] && y[i];
    for (bool grew = true; grew;) {
      grew = false;
      for (int i = 0; i < n; ++i) {
        if (x[i]) continue;
        for (std::size_t k = 0; k < e.enabled[i].size(); ++k) {
          bool all_y = true, some_x = false;
          for (const auto& [j, p] : e.trans[i][k]) {
            if (!y[j]) all_y = false;
            if (x[j]) some_x = true;
          }
          if (all_y && some_x) {
            x[i] = true;
            grew = true;
            break;
          }
        }
      }
    }
    if (x == y) return y;
    y = std::move(x);
  }
}

}  // namespace expl

template <class L>
struct ExplicitSolution {
  std::vector<int> action_of;      // -1 where undefined (goal / improper)
  std::vector<Rational> value;     // SSP value or EMP gain; 0 where undefined
  std::vector<bool> defined;       // proper states (SSP) or all states (EMP)
};

// Direct per-state strategy iteration for the expected truncated sum to the
// goal, with exact rationals. Values are defined on proper states only.
template <class L>
ExplicitSolution<L> explicit_ssp_oracle(const ExplicitMdp<L>& e) {
  int n = static_cast<int>(e.states.size());
  auto proper = expl::proper_mask(e);
  ExplicitSolution<L> sol;
  sol.action_of.assign(n, -1);
  sol.value.assign(n, Rational(0));
  sol.defined = proper;

  // Only actions keeping all probability mass inside the proper region are
  // admissible; with positive costs any improving switch stays proper.
  auto admissible = [&](int i, std::size_t k) {
    for (const auto& [j, p] : e.trans[i][k])
      if (!proper[j]) return false;
    return true;
  };

  // Initial proper strategy via attractor layers toward the goal.
  {
    std::vector<bool> x(n, false);
    for (int i = 0; i < n; ++i) x[i] = e.goal[i] && proper[i];
    for (bool grew = true; grew;) {
      grew = false;
      for (int i = 0; i < n; ++i) {
        if (x[i] || !proper[i]) continue;
        for (std::size_t k = 0; k < e.enabled[i].size(); ++k) {
          if (!admissible(i, k)) continue;
          bool some_x = false;
          for (const auto& [j, p] : e.trans[i][k])
            if (x[j]) some_x = true;
          if (some_x) {
            sol.action_of[i] = e.enabled[i][k];
            x[i] = true;
            grew = true;
            break;
          }
        }
      }
    }
  }

  // Unknowns: proper non-goal states.
  std::vector<int> unk(n, -1);
  std::vector<int> unk_states;
  for (int i = 0; i < n; ++i)
    if (proper[i] && !e.goal[i]) {
      unk[i] = static_cast<int>(unk_states.size());
      unk_states.push_back(i);
    }
  int m = static_cast<int>(unk_states.size());

  for (;;) {
    auto rows = expl::chain_rows(e, sol.action_of);
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
    std::vector<Rational> rhs(m);
    for (int r = 0; r < m; ++r) {
      int i = unk_states[r];
      a[r][r] = 1;
      for (const auto& [j, p] : rows[i])
        if (unk[j] >= 0) a[r][unk[j]] -= p;
      rhs[r] = expl::chain_cost(e, sol.action_of, i);
    }
    auto v = expl::gauss_solve(a, rhs);
    for (int r = 0; r < m; ++r) sol.value[unk_states[r]] = v[r];

    bool changed = false;
    for (int r = 0; r < m; ++r) {
      int i = unk_states[r];
      Rational best = sol.value[i];
      int best_sigma = sol.action_of[i];
      for (std::size_t k = 0; k < e.enabled[i].size(); ++k) {
        if (!admissible(i, k)) continue;
        Rational cand = e.cost[i][k];
        for (const auto& [j, p] : e.trans[i][k]) cand += p * sol.value[j];
        if (cand < best) {
          best = cand;
          best_sigma = e.enabled[i][k];
        }
      }
      if (best_sigma != sol.action_of[i]) {
        sol.action_of[i] = best_sigma;
        changed = true;
      }
    }
    if (!changed) return sol;
  }
}

namespace expl {

// Strongly connected components of the induced chain (iterative Tarjan);
// returns component id per state, ids in reverse topological order.
inline std::vector<int> scc_ids(const std::vector<std::map<int, Rational>>& rows, int n) {
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1), stk;
  std::vector<bool> on_stack(n, false);
  int counter = 0, ncomp = 0;
  struct Frame {
    int v;
    std::map<int, Rational>::const_iterator it;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    std::vector<Frame> frames;
    idx[root] = low[root] = counter++;
    stk.push_back(root);
    on_stack[root] = true;
    frames.push_back({root, rows[root].begin()});
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.it != rows[f.v].end()) {
        int w = f.it->first;
        ++f.it;
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stk.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, rows[w].begin()});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        int v = f.v;
        if (low[v] == idx[v]) {
          for (;;) {
            int w = stk.back();
            stk.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  return comp;
}

// Exact gain and bias of a unichain/multichain MC with one action per state.
inline void gain_bias(const std::vector<std::map<int, Rational>>& rows,
                      const std::vector<Rational>& c, std::vector<Rational>& g,
                      std::vector<Rational>& b) {
  int n = static_cast<int>(c.size());
  auto comp = scc_ids(rows, n);
  int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<bool> recurrent(ncomp, true);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, p] : rows[i])
      if (comp[j] != comp[i]) recurrent[comp[i]] = false;

  g.assign(n, Rational(0));
  b.assign(n, Rational(0));
  std::vector<bool> solved(n, false);

  // Recurrent classes: g constant; unknowns (g, b with b(ref)=0) from
  // g + b(s) = c(s) + Σ P(s,·) b(·).
  for (int cc = 0; cc < ncomp; ++cc) {
    if (!recurrent[cc]) continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (comp[i] == cc) members.push_back(i);
    int m = static_cast<int>(members.size());
    std::map<int, int> pos;
    for (int k = 0; k < m; ++k) pos[members[k]] = k;
    // unknown 0 = gain, unknowns 1..m-1 = b(members[1..]); b(members[0]) = 0
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
    std::vector<Rational> rhs(m);
    for (int k = 0; k < m; ++k) {
      int i = members[k];
      a[k][0] = 1;
      if (k > 0) a[k][k] = 1;  // + b(i) when i is not the reference
      for (const auto& [j, p] : rows[i]) {
        int pj = pos.at(j);
        if (pj > 0) a[k][pj] -= p;
      }
      rhs[k] = c[i];
    }
    auto x = gauss_solve(std::move(a), std::move(rhs));
    for (int k = 0; k < m; ++k) {
      g[members[k]] = x[0];
      b[members[k]] = k == 0 ? Rational(0) : x[k];
      solved[members[k]] = true;
    }
  }

  // Transient states: (I - P_TT) g_T = P_TR g_R, then
  // (I - P_TT) b_T = c_T - g_T + P_TR b_R.
  std::vector<int> trans_states;
  std::vector<int> tpos(n, -1);
  for (int i = 0; i < n; ++i)
    if (!solved[i]) {
      tpos[i] = static_cast<int>(trans_states.size());
      trans_states.push_back(i);
    }
  int m = static_cast<int>(trans_states.size());
  if (m == 0) return;
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
  std::vector<Rational> rhs_g(m), rhs_b(m);
  for (int k = 0; k < m; ++k) {
    int i = trans_states[k];
    a[k][k] = 1;
    for (const auto& [j, p] : rows[i]) {
      if (tpos[j] >= 0)
        a[k][tpos[j]] -= p;
      else
        rhs_g[k] += p * g[j];
    }
  }
  auto gt = gauss_solve(a, rhs_g);
  for (int k = 0; k < m; ++k) g[trans_states[k]] = gt[k];
  for (int k = 0; k < m; ++k) {
    int i = trans_states[k];
    rhs_b[k] = c[i] - g[i];
    for (const auto& [j, p] : rows[i])
      if (tpos[j] < 0) rhs_b[k] += p * b[j];
  }
  auto bt = gauss_solve(std::move(a), std::move(rhs_b));
  for (int k = 0; k < m; ++k) b[trans_states[k]] = bt[k];
}

}  // namespace expl

// Per-state strategy iteration for the expected mean payoff (minimization),
// with the two-stage gain-then-bias improvement rule.
template <class L>
ExplicitSolution<L> explicit_emp_oracle(const ExplicitMdp<L>& e) {
  int n = static_cast<int>(e.states.size());
  ExplicitSolution<L> sol;
  sol.action_of.assign(n, -1);
  sol.defined.assign(n, true);
  for (int i = 0; i < n; ++i) {
    if (e.enabled[i].empty()) throw std::runtime_error("mean payoff: state with no action");
    sol.action_of[i] = e.enabled[i][0];
  }

  std::vector<Rational> g, b;
  for (;;) {
    auto rows = expl::chain_rows(e, sol.action_of);
    std::vector<Rational> c(n);
    for (int i = 0; i < n; ++i) c[i] = expl::chain_cost(e, sol.action_of, i);
    expl::gain_bias(rows, c, g, b);

    bool changed = false;
    // Stage 1: strictly smaller expected gain.
    for (int i = 0; i < n; ++i) {
      Rational best = g[i];
      int best_sigma = sol.action_of[i];
      for (std::size_t k = 0; k < e.enabled[i].size(); ++k) {
        Rational cand = 0;
        for (const auto& [j, p] : e.trans[i][k]) cand += p * g[j];
        if (cand < best) {
          best = cand;
          best_sigma = e.enabled[i][k];
        }
      }
      if (best_sigma != sol.action_of[i]) {
        sol.action_of[i] = best_sigma;
        changed = true;
      }
    }
    // Stage 2 (only among gain ties): strictly smaller bias candidate.
    if (!changed) {
      for (int i = 0; i < n; ++i) {
        Rational best = b[i];
        int best_sigma = sol.action_of[i];
        for (std::size_t k = 0; k < e.enabled[i].size(); ++k) {
          Rational qg = 0;
          for (const auto& [j, p] : e.trans[i][k]) qg += p * g[j];
          if (qg != g[i]) continue;
          Rational cand = e.cost[i][k] - g[i];
          for (const auto& [j, p] : e.trans[i][k]) cand += p * b[j];
          if (cand < best) {
            best = cand;
            best_sigma = e.enabled[i][k];
          }
        }
        if (best_sigma != sol.action_of[i]) {
          sol.action_of[i] = best_sigma;
          changed = true;
        }
      }
    }
    if (!changed) {
      sol.value = g;
      return sol;
    }
  }
}

// Coarsest cost-and-probability-stable partition of the induced chain by
// naive iterated refinement; returns a block id per state (only states with
// a defined action participate, id -1 otherwise). Initial keys may carry an
// extra tag (e.g. goal membership).
template <class L>
std::vector<int> explicit_lump_oracle(const ExplicitMdp<L>& e, const std::vector<int>& action_of,
                                      const std::vector<int>& extra_tag = {}) {
  int n = static_cast<int>(e.states.size());
  auto rows = expl::chain_rows(e, action_of);
  std::vector<int> block(n, -1);
  {
    std::map<std::pair<Rational, int>, int> ids;
    for (int i = 0; i < n; ++i) {
      if (action_of[i] < 0) continue;
      std::pair<Rational, int> key{expl::chain_cost(e, action_of, i),
                                   extra_tag.empty() ? 0 : extra_tag[i]};
      auto [it, fresh] = ids.try_emplace(key, static_cast<int>(ids.size()));
      block[i] = it->second;
    }
  }
  for (;;) {
    std::map<std::pair<int, std::vector<std::pair<int, Rational>>>, int> ids;
    std::vector<int> next(n, -1);
    for (int i = 0; i < n; ++i) {
      if (block[i] < 0) continue;
      std::map<int, Rational> to_blocks;
      for (const auto& [j, p] : rows[i]) to_blocks[block[j]] += p;
      std::vector<std::pair<int, Rational>> sig(to_blocks.begin(), to_blocks.end());
      auto [it, fresh] = ids.try_emplace({block[i], std::move(sig)}, static_cast<int>(ids.size()));
      next[i] = it->second;
    }
    if (next == block) return block;
    block = std::move(next);
  }
}

}  // namespace pamdp
