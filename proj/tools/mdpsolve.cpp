#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "pamdp/explicit_solver.hpp"
#include "pamdp/lumping.hpp"
#include "pamdp/quotient.hpp"
#include "pamdp/solver.hpp"
#include "pamdp/strips.hpp"

namespace {

using namespace pamdp;
using Lat = SupersetLattice;

MssProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mss(buf.str());
}

void require_valid(const MssProblem& p, Objective obj) {
  auto diags = validate_mss(p, obj);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << "error: " << d << "\n";
    throw std::runtime_error("invalid problem");
  }
}

void dump_strategy(const MssMdp& mdp, const Strategy<Lat>& lambda) {
  std::cout << "strategy:\n";
  for (const auto& b : lambda.blocks)
    std::cout << "  " << pa_to_string(b.region, mdp.lattice()) << " -> "
              << mdp.action_name(b.payload) << "\n";
}

int cmd_solve(const std::string& file, const std::string& objective, bool maximize,
              bool use_float) {
  Objective obj = objective == "ssp" ? Objective::Ssp : Objective::Emp;
  if (maximize && obj == Objective::Ssp)
    throw std::runtime_error("--maximize is only supported with --objective emp");
  auto p = load_problem(file);
  require_valid(p, obj);
  if (maximize)
    for (auto& op : p.operators) op.cost = -op.cost;
  MssMdp mdp(p);
  const auto& lat = mdp.lattice();

  auto t0 = std::chrono::steady_clock::now();
  SolveReport<Lat> report = obj == Objective::Ssp ? solve_ssp(mdp) : solve_emp(mdp);
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // value at the initial state; for SSP "inf" when it is not proper
  std::string value = "inf";
  auto init = mdp.initial_state();
  std::vector<double> float_values;
  if (use_float) {
    // re-solve the final quotient in floating point
    auto lumped = lump(mdp, report.strategy,
                       obj == Objective::Ssp
                           ? std::vector<PseudoAntichain<Lat>>{pa_intersect(
                                 mdp.goal_pa(), report.values.domain, lat)}
                           : std::vector<PseudoAntichain<Lat>>{});
    if (obj == Objective::Ssp) {
      auto goal = pa_intersect(mdp.goal_pa(), report.values.domain, lat);
      auto q = build_quotient(mdp, lumped, report.strategy, &goal);
      float_values = solve_ssp_values_float(q);
    } else {
      auto q = build_quotient(mdp, lumped, report.strategy);
      float_values = solve_gain_bias_float(q).first;
    }
    for (std::size_t c = 0; c < lumped.quotient.size(); ++c)
      if (pa_member(init, lumped.quotient.blocks[c].region, lat)) {
        std::ostringstream v;
        v.precision(12);
        v << (maximize ? -float_values[c] : float_values[c]);
        value = v.str();
      }
  } else {
    for (const auto& b : report.values.blocks)
      if (pa_member(init, b.region, lat))
        value = to_string(maximize ? Rational(-b.payload) : b.payload);
  }

  std::cout << "value=" << value << "\n";
  std::cout << "iterations=" << report.iterations << "\n";
  std::cout << "max_quotient_blocks=" << report.max_quotient_blocks << "\n";
  std::cout << "time_lump_s=" << report.time_lump_s << "\n";
  std::cout << "time_solve_s=" << report.time_solve_s << "\n";
  std::cout << "time_improve_s=" << report.time_improve_s << "\n";
  std::cout << "time_total_s=" << total << "\n";
  dump_strategy(mdp, report.strategy);
  return 0;
}

int cmd_lump(const std::string& file) {
  auto p = load_problem(file);
  require_valid(p, Objective::Ssp);
  MssMdp mdp(p);
  const auto& lat = mdp.lattice();
  auto sp = proper_states(mdp);
  if (pa_is_empty(sp)) throw std::runtime_error("no proper state");
  auto goal = pa_intersect(mdp.goal_pa(), sp, lat);
  auto lambda = initial_proper_strategy(mdp, sp);
  auto lumped = lump(mdp, lambda, {goal});
  std::cout << "blocks=" << lumped.quotient.size() << "\n";
  std::cout << "split_calls=" << lumped.split_calls << "\n";
  for (const auto& b : lumped.quotient.blocks)
    std::cout << "  " << pa_to_string(b.region, lat) << " cost=" << to_string(b.payload) << "\n";
  dump_strategy(mdp, lambda);
  return 0;
}

int cmd_compare(const std::string& file, std::size_t cap) {
  auto p = load_problem(file);
  require_valid(p, Objective::Ssp);
  MssMdp mdp(p);
  const auto& lat = mdp.lattice();
  auto e = enumerate_states(mdp, cap);
  bool match = true;

  // mean payoff: both solvers defined everywhere
  {
    auto oracle = explicit_emp_oracle(e);
    auto report = solve_emp(mdp);
    for (const auto& b : report.values.blocks)
      for (auto s : pa_enumerate(b.region, lat))
        if (oracle.value[e.index.at(s)] != b.payload) match = false;
  }
  // truncated sum: compare on the proper region
  {
    auto oracle = explicit_ssp_oracle(e);
    bool any = false;
    for (bool d : oracle.defined) any |= d;
    if (any) {
      auto report = solve_ssp(mdp);
      std::size_t covered = 0;
      for (const auto& b : report.values.blocks)
        for (auto s : pa_enumerate(b.region, lat)) {
          ++covered;
          if (!oracle.defined[e.index.at(s)] || oracle.value[e.index.at(s)] != b.payload)
            match = false;
        }
      std::size_t proper = 0;
      for (bool d : oracle.defined) proper += d;
      if (covered != proper) match = false;
    }
  }
  std::cout << "match=" << (match ? "true" : "false") << "\n";
  return match ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-antichain symblicit solver for monotonic stochastic STRIPS"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "solve an MSS problem");
  std::string objective, solve_file;
  bool maximize = false, use_float = false;
  solve->add_option("--objective", objective, "ssp or emp")
      ->required()
      ->check(CLI::IsMember({"ssp", "emp"}));
  solve->add_flag("--maximize", maximize, "maximize instead of minimize (emp only)");
  solve->add_flag("--float", use_float, "report values from a floating-point quotient solve");
  solve->add_option("file", solve_file, "problem file")->required();

  auto* gen = app.add_subcommand("gen", "generate a benchmark problem");
  auto* monkey = gen->add_subcommand("monkey", "pieces-and-sticks benchmark");
  int mk_p = 0, mk_s = 0;
  monkey->add_option("pieces", mk_p, "pieces per stick")->required();
  monkey->add_option("sticks", mk_s, "number of sticks")->required();
  auto* moats = gen->add_subcommand("moats", "moats-and-castles benchmark");
  int mo_d = 0, mo_c = 0;
  moats->add_option("depths", mo_d, "moat depth levels")->required();
  moats->add_option("castles", mo_c, "number of castles")->required();
  gen->require_subcommand(1);

  auto* lump_cmd = app.add_subcommand("lump", "lump under the initial proper strategy");
  std::string lump_file, lump_strategy = "initial";
  lump_cmd->add_option("file", lump_file, "problem file")->required();
  lump_cmd->add_option("--strategy", lump_strategy, "strategy to lump under")
      ->check(CLI::IsMember({"initial"}));

  auto* compare = app.add_subcommand("compare", "cross-check against the explicit baseline");
  std::string compare_file;
  std::size_t cap = 1 << 12;
  compare->add_option("file", compare_file, "problem file")->required();
  compare->add_option("--cap", cap, "state enumeration cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_file, objective, maximize, use_float);
    if (*monkey) {
      std::cout << pamdp::print_mss(pamdp::gen_monkey(mk_p, mk_s));
      return 0;
    }
    if (*moats) {
      std::cout << pamdp::print_mss(pamdp::gen_moats(mo_d, mo_c));
      return 0;
    }
    if (*lump_cmd) return cmd_lump(lump_file);
    if (*compare) return cmd_compare(compare_file, cap);
  } catch (const pamdp::MssParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
