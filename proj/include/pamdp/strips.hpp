#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pamdp/lattice.hpp"
#include "pamdp/mdp.hpp"
#include "pamdp/rational.hpp"

namespace pamdp {

// Monotonic stochastic STRIPS: conditions P, initial set I, goal conditions M,
// and guarded operators whose effect is a distribution over (add, del) pairs.
// Condition sets are bit masks over the declared condition list.

struct MssEffect {
  Rational prob;
  std::uint64_t add = 0;
  std::uint64_t del = 0;
};

struct MssOperator {
  std::string name;
  std::uint64_t guard = 0;
  Rational cost;
  std::vector<MssEffect> effects;
};

struct MssProblem {
  std::vector<std::string> conditions;
  std::uint64_t init = 0;
  std::uint64_t goal = 0;
  std::vector<MssOperator> operators;
};

struct MssParseError : std::runtime_error {
  int line;
  MssParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
};

enum class Objective { Ssp, Emp };

// Line-oriented text format, '#' comments. Throws MssParseError.
MssProblem parse_mss(const std::string& text);

// Deterministic printer; parse(print(p)) is a fixpoint.
std::string print_mss(const MssProblem& p);

// Model-level diagnostics (distribution sums, SSP cost positivity, goal).
std::vector<std::string> validate_mss(const MssProblem& p, Objective mode);

// Benchmark generators. Both produce powerset state spaces 2^|P|.
MssProblem gen_monkey(int pieces_per_stick, int sticks);
MssProblem gen_moats(int depths, int castles);

// The reduction to a monotonic MDP over the superset lattice (s ⪯ s' iff
// s ⊇ s'): E(s,o,τ) = (s ∪ add) \ del, guards are closed enabling regions,
// D and C are state-independent, G = ↓{M}.
//
// States where no operator is enabled get an implicit stutter operator
// (empty guard, identity effect, cost 1) so that the MDP is Σ-non-blocking.
class MssMdp final : public MonotonicMdp<SupersetLattice> {
 public:
  explicit MssMdp(MssProblem problem);

  const SupersetLattice& lattice() const override { return lat_; }
  int num_actions() const override { return static_cast<int>(ops_.size()); }
  std::string action_name(int sigma) const override { return ops_[sigma].name; }
  int num_effects(int sigma) const override {
    return static_cast<int>(ops_[sigma].effects.size());
  }
  Elem successor(const Elem& s, int sigma, int tau) const override;
  Rational prob(int sigma, int tau, const Elem& s) const override;
  Rational cost(int sigma, const Elem& s) const override;
  Antichain<SupersetLattice> pre_max(const Elem& x, int sigma, int tau) const override;
  PseudoAntichain<SupersetLattice> states_pa() const override;
  PseudoAntichain<SupersetLattice> goal_pa() const override;
  PaPartition<SupersetLattice, Distribution> dist_partition(int sigma) const override;
  PaPartition<SupersetLattice, Rational> cost_partition(int sigma) const override;

  const MssProblem& problem() const { return problem_; }
  Elem initial_state() const { return problem_.init; }

 private:
  MssProblem problem_;
  SupersetLattice lat_;
  std::vector<MssOperator> ops_;  // problem operators plus optional stutter
};

}  // namespace pamdp
