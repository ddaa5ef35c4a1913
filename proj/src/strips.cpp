#include "pamdp/strips.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pamdp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct NameTable {
  std::map<std::string, int> index;

  std::uint64_t resolve(const std::vector<std::string>& names, int line) const {
    std::uint64_t mask = 0;
    for (const auto& n : names) {
      auto it = index.find(n);
      if (it == index.end()) throw MssParseError(line, "undeclared condition '" + n + "'");
      mask |= std::uint64_t(1) << it->second;
    }
    return mask;
  }
};

Rational parse_rat_or_throw(const std::string& text, int line) {
  auto r = parse_rational(text);
  if (!r) throw MssParseError(line, "malformed rational '" + text + "'");
  return *r;
}

// "add(a b) del(c)" -> the two parenthesized name lists
std::pair<std::vector<std::string>, std::vector<std::string>> parse_effect_sets(
    const std::string& text, int line) {
  auto grab = [&](const std::string& key) -> std::vector<std::string> {
    std::size_t k = text.find(key + "(");
    if (k == std::string::npos) return {};  // omitted clause means the empty set
    std::size_t close = text.find(')', k);
    if (close == std::string::npos) throw MssParseError(line, "unterminated " + key + "(...)");
    return split_ws(text.substr(k + key.size() + 1, close - k - key.size() - 1));
  };
  return {grab("add"), grab("del")};
}

}  // namespace

MssProblem parse_mss(const std::string& text) {
  MssProblem p;
  NameTable table;
  bool have_conditions = false, have_init = false, have_goal = false;
  MssOperator* cur = nullptr;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto finish_operator = [&](const MssOperator& op, int line) {
    if (op.effects.empty()) throw MssParseError(line, "operator '" + op.name + "' has no effect");
    Rational sum = 0;
    for (const auto& e : op.effects) {
      if (e.prob <= 0)
        throw MssParseError(line, "operator '" + op.name + "' has a nonpositive probability");
      sum += e.prob;
    }
    if (sum != 1)
      throw MssParseError(line, "operator '" + op.name + "' probabilities sum to " +
                                    sum.get_str() + ", expected 1");
  };
  int cur_line = 0;

  while (std::getline(in, raw)) {
    ++lineno;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.rfind("conditions:", 0) == 0) {
      if (have_conditions) throw MssParseError(lineno, "duplicate 'conditions:'");
      have_conditions = true;
      for (const auto& n : split_ws(line.substr(11))) {
        if (table.index.count(n)) throw MssParseError(lineno, "duplicate condition '" + n + "'");
        if (table.index.size() >= 64) throw MssParseError(lineno, "more than 64 conditions");
        table.index[n] = static_cast<int>(p.conditions.size());
        p.conditions.push_back(n);
      }
      if (p.conditions.empty()) throw MssParseError(lineno, "empty condition set");
    } else if (line.rfind("init:", 0) == 0) {
      if (!have_conditions) throw MssParseError(lineno, "'init:' before 'conditions:'");
      if (have_init) throw MssParseError(lineno, "duplicate 'init:'");
      have_init = true;
      p.init = table.resolve(split_ws(line.substr(5)), lineno);
    } else if (line.rfind("goal:", 0) == 0) {
      if (!have_conditions) throw MssParseError(lineno, "'goal:' before 'conditions:'");
      if (have_goal) throw MssParseError(lineno, "duplicate 'goal:'");
      have_goal = true;
      auto names = split_ws(line.substr(5));
      if (names.empty()) throw MssParseError(lineno, "'goal:' needs at least one condition");
      p.goal = table.resolve(names, lineno);
    } else if (line.rfind("operator", 0) == 0) {
      if (!have_conditions) throw MssParseError(lineno, "'operator' before 'conditions:'");
      if (cur) finish_operator(*cur, cur_line);
      auto toks = split_ws(line.substr(8));
      if (toks.size() != 1) throw MssParseError(lineno, "expected 'operator NAME'");
      for (const auto& op : p.operators)
        if (op.name == toks[0])
          throw MssParseError(lineno, "duplicate operator '" + toks[0] + "'");
      p.operators.push_back(MssOperator{toks[0], 0, Rational(0), {}});
      cur = &p.operators.back();
      cur_line = lineno;
    } else if (line.rfind("guard:", 0) == 0) {
      if (!cur) throw MssParseError(lineno, "'guard:' outside an operator");
      cur->guard = table.resolve(split_ws(line.substr(6)), lineno);
    } else if (line.rfind("cost:", 0) == 0) {
      if (!cur) throw MssParseError(lineno, "'cost:' outside an operator");
      cur->cost = parse_rat_or_throw(trim(line.substr(5)), lineno);
    } else if (line.rfind("effect:", 0) == 0) {
      if (!cur) throw MssParseError(lineno, "'effect:' outside an operator");
      std::string body = trim(line.substr(7));
      std::size_t arrow = body.find("=>");
      if (arrow == std::string::npos) throw MssParseError(lineno, "expected 'PROB => add(...) del(...)'");
      Rational prob = parse_rat_or_throw(trim(body.substr(0, arrow)), lineno);
      auto [add_names, del_names] = parse_effect_sets(body.substr(arrow + 2), lineno);
      cur->effects.push_back(MssEffect{prob, table.resolve(add_names, lineno),
                                       table.resolve(del_names, lineno)});
    } else {
      throw MssParseError(lineno, "unrecognized line '" + line + "'");
    }
  }
  if (cur) finish_operator(*cur, cur_line);
  if (!have_conditions) throw MssParseError(lineno, "missing 'conditions:'");
  if (!have_goal) throw MssParseError(lineno, "missing 'goal:'");
  if (p.operators.empty()) throw MssParseError(lineno, "no operators");
  return p;
}

namespace {
std::string mask_names(std::uint64_t mask, const std::vector<std::string>& conditions) {
  std::string out;
  for (std::size_t i = 0; i < conditions.size(); ++i)
    if (mask & (std::uint64_t(1) << i)) {
      if (!out.empty()) out += " ";
      out += conditions[i];
    }
  return out;
}
}  // namespace

std::string print_mss(const MssProblem& p) {
  std::ostringstream out;
  out << "conditions:";
  for (const auto& c : p.conditions) out << " " << c;
  out << "\ninit: " << mask_names(p.init, p.conditions);
  out << "\ngoal: " << mask_names(p.goal, p.conditions) << "\n";
  for (const auto& op : p.operators) {
    out << "\noperator " << op.name << "\n";
    out << "  guard: " << mask_names(op.guard, p.conditions) << "\n";
    out << "  cost: " << op.cost.get_str() << "\n";
    for (const auto& e : op.effects)
      out << "  effect: " << e.prob.get_str() << " => add(" << mask_names(e.add, p.conditions)
          << ") del(" << mask_names(e.del, p.conditions) << ")\n";
  }
  return out.str();
}

std::vector<std::string> validate_mss(const MssProblem& p, Objective mode) {
  std::vector<std::string> out;
  for (const auto& op : p.operators) {
    Rational sum = 0;
    for (const auto& e : op.effects) {
      if (e.prob <= 0) out.push_back("operator '" + op.name + "': nonpositive probability");
      sum += e.prob;
    }
    if (sum != 1) out.push_back("operator '" + op.name + "': probabilities sum to " + sum.get_str());
    if (mode == Objective::Ssp && op.cost <= 0)
      out.push_back("operator '" + op.name + "': cost must be strictly positive for SSP");
  }
  if (mode == Objective::Ssp && p.goal == 0) out.push_back("goal condition set is empty");
  return out;
}

MssMdp::MssMdp(MssProblem problem)
    : problem_(std::move(problem)), lat_(problem_.conditions), ops_(problem_.operators) {
  bool covered = std::any_of(ops_.begin(), ops_.end(),
                             [](const MssOperator& o) { return o.guard == 0; });
  if (!covered)
    ops_.push_back(MssOperator{"__stutter", 0, rat(1), {MssEffect{rat(1), 0, 0}}});
}

MssMdp::Elem MssMdp::successor(const Elem& s, int sigma, int tau) const {
  const MssEffect& e = ops_[sigma].effects[tau];
  return (s | e.add) & ~e.del;
}

Rational MssMdp::prob(int sigma, int tau, const Elem&) const {
  return ops_[sigma].effects[tau].prob;
}

Rational MssMdp::cost(int sigma, const Elem&) const { return ops_[sigma].cost; }

Antichain<SupersetLattice> MssMdp::pre_max(const Elem& x, int sigma, int tau) const {
  const MssOperator& op = ops_[sigma];
  const MssEffect& e = op.effects[tau];
  // (s ∪ add) \ del ⊇ x requires x ∩ del = ∅ and s ⊇ (x \ add) ∪ guard.
  if (x & e.del) return {};
  return singleton_antichain<SupersetLattice>((x & ~e.add) | op.guard);
}

PseudoAntichain<SupersetLattice> MssMdp::states_pa() const {
  return pa_from_antichain(singleton_antichain<SupersetLattice>(lat_.top()));
}

PseudoAntichain<SupersetLattice> MssMdp::goal_pa() const {
  return pa_from_antichain(singleton_antichain<SupersetLattice>(problem_.goal));
}

PaPartition<SupersetLattice, Distribution> MssMdp::dist_partition(int sigma) const {
  PaPartition<SupersetLattice, Distribution> part;
  part.domain = pa_from_antichain(singleton_antichain<SupersetLattice>(ops_[sigma].guard));
  Distribution d;
  for (const auto& e : ops_[sigma].effects) d.probs.push_back(e.prob);
  part.blocks.push_back({part.domain, std::move(d)});
  return part;
}

PaPartition<SupersetLattice, Rational> MssMdp::cost_partition(int sigma) const {
  PaPartition<SupersetLattice, Rational> part;
  part.domain = pa_from_antichain(singleton_antichain<SupersetLattice>(ops_[sigma].guard));
  part.blocks.push_back({part.domain, ops_[sigma].cost});
  return part;
}

MssProblem gen_monkey(int pieces_per_stick, int sticks) {
  if (pieces_per_stick < 1 || sticks < 1)
    throw std::invalid_argument("gen_monkey: parameters must be >= 1");
  MssProblem p;
  auto bit = [&](int i) { return std::uint64_t(1) << i; };
  std::vector<std::vector<int>> piece(sticks);
  for (int i = 0; i < sticks; ++i)
    for (int j = 0; j < pieces_per_stick; ++j) {
      piece[i].push_back(static_cast<int>(p.conditions.size()));
      p.conditions.push_back("piece_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    }
  int stick = static_cast<int>(p.conditions.size());
  p.conditions.push_back("stick");
  int bananas = static_cast<int>(p.conditions.size());
  p.conditions.push_back("bananas");

  p.init = 0;
  p.goal = bit(bananas);

  for (int i = 0; i < sticks; ++i) {
    for (int j = 0; j < pieces_per_stick; ++j) {
      MssOperator get;
      get.name = "get_piece_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      get.guard = 0;
      get.cost = rat(1);
      get.effects = {MssEffect{rat(3, 4), bit(piece[i][j]), 0}, MssEffect{rat(1, 4), 0, 0}};
      p.operators.push_back(std::move(get));
    }
    MssOperator assemble;
    assemble.name = "assemble_" + std::to_string(i + 1);
    for (int j = 0; j < pieces_per_stick; ++j) assemble.guard |= bit(piece[i][j]);
    assemble.cost = rat(1 + i);  // building times vary per stick kind
    assemble.effects = {MssEffect{rat(1), bit(stick), 0}};
    p.operators.push_back(std::move(assemble));
  }

  MssOperator grab;
  grab.name = "grab_bananas";
  grab.guard = bit(stick);
  grab.cost = rat(2);
  grab.effects = {MssEffect{rat(2, 3), bit(bananas), 0}, MssEffect{rat(1, 3), 0, 0}};
  p.operators.push_back(std::move(grab));

  MssOperator jump;
  jump.name = "jump_for_bananas";
  jump.guard = 0;
  jump.cost = rat(1);
  jump.effects = {MssEffect{rat(1, 20), bit(bananas), 0}, MssEffect{rat(19, 20), 0, 0}};
  p.operators.push_back(std::move(jump));
  return p;
}

MssProblem gen_moats(int depths, int castles) {
  if (depths < 1 || castles < 1) throw std::invalid_argument("gen_moats: parameters must be >= 1");
  MssProblem p;
  auto bit = [&](int i) { return std::uint64_t(1) << i; };
  std::vector<std::vector<int>> moat(castles);
  std::vector<int> castle(castles);
  for (int k = 0; k < castles; ++k) {
    for (int j = 0; j < depths; ++j) {
      moat[k].push_back(static_cast<int>(p.conditions.size()));
      p.conditions.push_back("moat_" + std::to_string(k + 1) + "_d" + std::to_string(j + 1));
    }
    castle[k] = static_cast<int>(p.conditions.size());
    p.conditions.push_back("castle_" + std::to_string(k + 1));
  }
  p.init = 0;
  for (int k = 0; k < castles; ++k) p.goal |= bit(castle[k]);

  for (int k = 0; k < castles; ++k) {
    for (int j = 0; j < depths; ++j) {
      MssOperator dig;
      dig.name = "dig_" + std::to_string(k + 1) + "_d" + std::to_string(j + 1);
      dig.guard = j == 0 ? 0 : bit(moat[k][j - 1]);
      dig.cost = rat(1);
      dig.effects = {MssEffect{rat(1), bit(moat[k][j]), 0}};
      p.operators.push_back(std::move(dig));
    }
    // Building succeeds with probability growing in the moat depth; on
    // failure the waves demolish the construction.
    for (int j = 0; j <= depths; ++j) {
      MssOperator build;
      build.name = "build_" + std::to_string(k + 1) + "_d" + std::to_string(j);
      build.guard = j == 0 ? 0 : bit(moat[k][j - 1]);
      build.cost = rat(2);
      Rational success = rat(j + 1, depths + 2);
      build.effects = {MssEffect{success, bit(castle[k]), 0},
                       MssEffect{1 - success, 0, bit(castle[k])}};
      p.operators.push_back(std::move(build));
    }
  }
  return p;
}

}  // namespace pamdp
