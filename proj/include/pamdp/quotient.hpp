#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "pamdp/lumping.hpp"
#include "pamdp/mdp.hpp"
#include "pamdp/rational.hpp"

namespace pamdp {

// Explicit sparse Markov chain over the blocks of a lumped partition, with
// exact rational transition probabilities and per-block cost.
struct QuotientMc {
  int n = 0;
  std::vector<std::vector<std::pair<int, Rational>>> rows;  // sparse, index-sorted
  std::vector<Rational> cost;
  std::vector<bool> goal_mask;  // SSP only; all-false for mean payoff
};

// Quotient chain from a lumped partition: one representative per block, its
// one-step distribution accumulated over blocks. With a goal region, goal
// blocks must be contained in it (the lumping is pre-refined by the goal)
// and are made absorbing with cost 0.
template <class L>
QuotientMc build_quotient(const MonotonicMdp<L>& mdp, const LumpResult<L>& lumped,
                          const Strategy<L>& lambda, const PseudoAntichain<L>* goal = nullptr) {
  const L& lat = mdp.lattice();
  const auto& blocks = lumped.quotient.blocks;
  QuotientMc q;
  q.n = static_cast<int>(blocks.size());
  q.rows.resize(q.n);
  q.cost.resize(q.n);
  q.goal_mask.assign(q.n, false);

  auto block_of = [&](const typename L::Elem& s) {
    for (int j = 0; j < q.n; ++j)
      if (pa_member(s, blocks[j].region, lat)) return j;
    throw std::runtime_error("quotient: successor escapes the lumped domain");
  };
  auto action_of = [&](const typename L::Elem& s) {
    for (const auto& b : lambda.blocks)
      if (pa_member(s, b.region, lat)) return b.payload;
    throw std::runtime_error("quotient: representative outside the strategy domain");
  };

  for (int i = 0; i < q.n; ++i) {
    if (goal) {
      auto inter = pa_intersect(blocks[i].region, *goal, lat);
      if (!pa_is_empty(inter)) {
        if (!pa_subset(blocks[i].region, *goal, lat))
          throw std::runtime_error("quotient: block not goal-pure");
        q.goal_mask[i] = true;
        q.rows[i] = {{i, Rational(1)}};
        q.cost[i] = 0;
        continue;
      }
    }
    const auto& rep = lumped.reps[i];
    int sigma = action_of(rep);
    std::map<int, Rational> acc;
    for (int tau = 0; tau < mdp.num_effects(sigma); ++tau)
      acc[block_of(mdp.successor(rep, sigma, tau))] += mdp.prob(sigma, tau, rep);
    q.rows[i].assign(acc.begin(), acc.end());
    q.cost[i] = mdp.cost(sigma, rep);
    Rational sum = 0;
    for (const auto& [j, p] : q.rows[i]) sum += p;
    if (sum != 1) throw std::runtime_error("quotient: row does not sum to 1");
  }
  return q;
}

namespace qsolve {

// Dense exact Gaussian elimination with largest-magnitude pivoting.
template <class T>
std::vector<T> gauss(std::vector<std::vector<T>> a, std::vector<T> rhs) {
  using std::abs;
  int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0 && (piv < 0 || abs(a[r][col]) > abs(a[piv][col]))) piv = r;
    if (piv < 0) throw std::runtime_error("singular quotient system");
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      T f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<T> x(n);
  for (int i = n - 1; i >= 0; --i) {
    T s = rhs[i];
    for (int c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

inline double to_scalar(const Rational& r, double) { return r.get_d(); }
inline Rational to_scalar(const Rational& r, Rational) { return r; }

// v = 0 on goal blocks; elsewhere v solves c + (P - I)v = 0 with goal
// columns folded into the right-hand side.
template <class T>
std::vector<T> ssp_values_impl(const QuotientMc& q) {
  std::vector<int> unk(q.n, -1);
  std::vector<int> unk_blocks;
  for (int i = 0; i < q.n; ++i)
    if (!q.goal_mask[i]) {
      unk[i] = static_cast<int>(unk_blocks.size());
      unk_blocks.push_back(i);
    }
  int m = static_cast<int>(unk_blocks.size());
  std::vector<std::vector<T>> a(m, std::vector<T>(m, T(0)));
  std::vector<T> rhs(m);
  for (int r = 0; r < m; ++r) {
    int i = unk_blocks[r];
    a[r][r] = T(1);
    for (const auto& [j, p] : q.rows[i])
      if (unk[j] >= 0) a[r][unk[j]] -= to_scalar(p, T(0));
    rhs[r] = to_scalar(q.cost[i], T(0));
  }
  auto v = gauss(std::move(a), std::move(rhs));
  std::vector<T> out(q.n, T(0));
  for (int r = 0; r < m; ++r) out[unk_blocks[r]] = v[r];
  return out;
}

// Strongly connected components of the sparse chain; recurrent classes are
// the components with no outgoing edge.
inline std::vector<int> components(const QuotientMc& q, std::vector<bool>& recurrent) {
  int n = q.n;
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1), stk;
  std::vector<bool> on_stack(n, false);
  int counter = 0, ncomp = 0;
  struct Frame {
    int v;
    std::size_t k;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stk.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.k < q.rows[f.v].size()) {
        int w = q.rows[f.v][f.k++].first;
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stk.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
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
  recurrent.assign(ncomp, true);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, p] : q.rows[i])
      if (comp[j] != comp[i]) recurrent[comp[i]] = false;
  return comp;
}

// Multichain gain/bias: per recurrent class solve {g + b = c + Pb, b(ref)=0}
// with constant g; transient g from (I - P_TT) g_T = P_TR g_R, transient b
// from (I - P_TT) b_T = c_T - g_T + P_TR b_R.
template <class T>
std::pair<std::vector<T>, std::vector<T>> gain_bias_impl(const QuotientMc& q) {
  int n = q.n;
  std::vector<bool> recurrent;
  auto comp = components(q, recurrent);
  std::vector<T> g(n, T(0)), b(n, T(0));
  std::vector<bool> solved(n, false);

  for (int cc = 0; cc < static_cast<int>(recurrent.size()); ++cc) {
    if (!recurrent[cc]) continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (comp[i] == cc) members.push_back(i);
    int m = static_cast<int>(members.size());
    std::vector<int> pos(n, -1);
    for (int k = 0; k < m; ++k) pos[members[k]] = k;
    // unknown 0 = class gain; unknowns 1..m-1 = bias except the reference
    std::vector<std::vector<T>> a(m, std::vector<T>(m, T(0)));
    std::vector<T> rhs(m);
    for (int k = 0; k < m; ++k) {
      int i = members[k];
      a[k][0] = T(1);
      if (k > 0) a[k][k] += T(1);
      for (const auto& [j, p] : q.rows[i])
        if (pos[j] > 0) a[k][pos[j]] -= to_scalar(p, T(0));
      rhs[k] = to_scalar(q.cost[i], T(0));
    }
    auto x = gauss(std::move(a), std::move(rhs));
    for (int k = 0; k < m; ++k) {
      g[members[k]] = x[0];
      b[members[k]] = k == 0 ? T(0) : x[k];
      solved[members[k]] = true;
    }
  }

  std::vector<int> tpos(n, -1), tstates;
  for (int i = 0; i < n; ++i)
    if (!solved[i]) {
      tpos[i] = static_cast<int>(tstates.size());
      tstates.push_back(i);
    }
  int m = static_cast<int>(tstates.size());
  if (m == 0) return {std::move(g), std::move(b)};
  std::vector<std::vector<T>> a(m, std::vector<T>(m, T(0)));
  std::vector<T> rhs_g(m), rhs_b(m);
  for (int k = 0; k < m; ++k) {
    int i = tstates[k];
    a[k][k] = T(1);
    for (const auto& [j, p] : q.rows[i]) {
      if (tpos[j] >= 0)
        a[k][tpos[j]] -= to_scalar(p, T(0));
      else
        rhs_g[k] += to_scalar(p, T(0)) * g[j];
    }
  }
  auto gt = gauss(a, rhs_g);
  for (int k = 0; k < m; ++k) g[tstates[k]] = gt[k];
  for (int k = 0; k < m; ++k) {
    int i = tstates[k];
    rhs_b[k] = to_scalar(q.cost[i], T(0)) - g[i];
    for (const auto& [j, p] : q.rows[i])
      if (tpos[j] < 0) rhs_b[k] += to_scalar(p, T(0)) * b[j];
  }
  auto bt = gauss(std::move(a), std::move(rhs_b));
  for (int k = 0; k < m; ++k) b[tstates[k]] = bt[k];
  return {std::move(g), std::move(b)};
}

}  // namespace qsolve

inline std::vector<Rational> solve_ssp_values(const QuotientMc& q) {
  return qsolve::ssp_values_impl<Rational>(q);
}
inline std::vector<double> solve_ssp_values_float(const QuotientMc& q) {
  return qsolve::ssp_values_impl<double>(q);
}
inline std::pair<std::vector<Rational>, std::vector<Rational>> solve_gain_bias(
    const QuotientMc& q) {
  return qsolve::gain_bias_impl<Rational>(q);
}
inline std::pair<std::vector<double>, std::vector<double>> solve_gain_bias_float(
    const QuotientMc& q) {
  return qsolve::gain_bias_impl<double>(q);
}

}  // namespace pamdp
