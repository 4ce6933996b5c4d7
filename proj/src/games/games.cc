#include "itl/games.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace itl::games {

namespace {

bool entity_matches(const world::Perception& p, const std::string& e, const std::vector<std::string>& percepts) {
  return std::all_of(percepts.begin(), percepts.end(),
                     [&](const std::string& name) { return p.holds_atom(name, {e}); });
}

std::vector<std::string> entities_of(const world::Perception& p, const Param& param) {
  std::vector<std::string> out;
  for (const auto& e : p.entities()) {
    const bool is_obj = p.state().is_object(e);
    if ((param.category == "obj") != is_obj) continue;
    if (entity_matches(p, e, param.percepts)) out.push_back(e);
  }
  return out;
}

int highest_param(const Condition& c) {
  int hi = -1;
  for (const auto& a : c.args) {
    if (a.kind == SpecTerm::Kind::kParam) hi = std::max(hi, a.param);
    if (a.relation_param) hi = std::max(hi, *a.relation_param);
  }
  return hi;
}

void check_term(const SpecTerm& t, int nparams, const std::string& where) {
  auto bad = [&](int p) {
    return InvalidSpec(where + " references parameter " + std::to_string(p + 1) + " of " + std::to_string(nparams));
  };
  if (t.kind == SpecTerm::Kind::kParam && (t.param < 0 || t.param >= nparams)) throw bad(t.param);
  if (t.relation_param && (*t.relation_param < 0 || *t.relation_param >= nparams)) throw bad(*t.relation_param);
}

}  // namespace

std::string SpecTerm::to_string() const {
  switch (kind) {
    case Kind::kParam: return std::to_string(param + 1);
    case Kind::kEntity: return entity;
    case Kind::kSome: {
      std::string out = "some(";
      for (std::size_t i = 0; i < filter.size(); ++i) out += (i ? "+" : "") + filter[i];
      if (!relation.empty()) {
        out += ";" + relation + ":" + (relation_param ? std::to_string(*relation_param + 1) : relation_entity);
      }
      return out + ")";
    }
  }
  return "?";
}

std::string Condition::to_string() const {
  std::string out = positive ? "" : "!";
  out += name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i].to_string();
  return out + ")";
}

std::string ProblemSpec::to_text() const {
  std::ostringstream out;
  auto params = [&](const std::vector<Param>& ps) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      out << "  param " << i + 1 << " " << ps[i].description << " (" << ps[i].category << ")\n";
    }
  };
  for (const auto& a : actions) {
    out << "action " << a.verb << "\n";
    params(a.params);
    for (const auto& c : a.conditions) out << "  if " << c.to_string() << "\n";
  }
  for (std::size_t g = 0; g < goals.size(); ++g) {
    out << "goal " << g + 1 << "\n";
    params(goals[g].params);
    for (const auto& c : goals[g].conditions) out << "  if " << c.to_string() << "\n";
  }
  return out.str();
}

void validate(const ProblemSpec& spec) {
  if (spec.goals.empty()) throw InvalidSpec("the problem has no goal");
  for (const auto& a : spec.actions) {
    if (a.verb.empty()) throw InvalidSpec("an action has no verb");
    for (const auto& c : a.conditions) {
      for (const auto& t : c.args) check_term(t, static_cast<int>(a.params.size()), "action " + a.verb);
    }
  }
  for (const auto& g : spec.goals) {
    if (g.conditions.empty()) throw InvalidSpec("a goal has no conditions");
    for (const auto& c : g.conditions) {
      for (const auto& t : c.args) check_term(t, static_cast<int>(g.params.size()), "goal");
    }
  }
}

bool condition_holds(const Condition& c, const Binding& binding, const world::Perception& perception) {
  std::vector<std::string> args;
  int some = -1;
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    const auto& t = c.args[i];
    switch (t.kind) {
      case SpecTerm::Kind::kParam: args.push_back(binding.at(t.param)); break;
      case SpecTerm::Kind::kEntity: args.push_back(t.entity); break;
      case SpecTerm::Kind::kSome:
        args.emplace_back();
        some = static_cast<int>(i);
        break;
    }
  }
  auto eval = [&](const std::vector<std::string>& a) {
    if (c.name == "=") return a.size() == 2 && a[0] == a[1];
    return perception.holds_atom(c.name, a);
  };
  if (some < 0) return eval(args) == c.positive;

  const SpecTerm& t = c.args[some];
  std::string target;
  if (t.relation_param) target = binding.at(*t.relation_param);
  else target = t.relation_entity;
  bool any = false;
  for (const auto& e : perception.entities()) {
    if (!entity_matches(perception, e, t.filter)) continue;
    if (!t.relation.empty() && !perception.holds_atom(t.relation, {e, target})) continue;
    args[some] = e;
    if (eval(args)) {
      any = true;
      break;
    }
  }
  return any == c.positive;
}

std::vector<Binding> satisfying_bindings(const std::vector<Param>& params, const std::vector<Condition>& conditions,
                                         const world::Perception& perception) {
  const int n = static_cast<int>(params.size());
  std::vector<std::vector<const Condition*>> ready(n + 1);
  for (const auto& c : conditions) ready[highest_param(c) + 1].push_back(&c);
  std::vector<std::vector<std::string>> pools;
  for (const auto& p : params) pools.push_back(entities_of(perception, p));

  std::vector<Binding> out;
  Binding binding(n);
  auto ok_at = [&](int level) {
    return std::all_of(ready[level].begin(), ready[level].end(),
                       [&](const Condition* c) { return condition_holds(*c, binding, perception); });
  };
  if (!ok_at(0)) return out;
  std::function<void(int)> extend = [&](int k) {
    if (k == n) {
      out.push_back(binding);
      return;
    }
    for (const auto& e : pools[k]) {
      if (std::find(binding.begin(), binding.begin() + k, e) != binding.begin() + k) continue;
      binding[k] = e;
      if (ok_at(k + 1)) extend(k + 1);
    }
    binding[k].clear();
  };
  extend(0);
  return out;
}

std::optional<task::GroundAction> ground_action(const compile::Library& lib, const Action& action,
                                                const Binding& binding) {
  auto map = lib.verb_map(action.verb, {});
  if (!map) return std::nullopt;
  task::GroundAction g{action.verb, {}};
  std::vector<bool> used(action.params.size(), false);
  for (const auto& slot : task::slots_of(*map)) {
    bool filled = false;
    for (std::size_t i = 0; i < action.params.size(); ++i) {
      if (used[i] || action.params[i].category != slot.category) continue;
      used[i] = true;
      g.roles.emplace_back(slot.role, binding.at(i));
      filled = true;
      break;
    }
    if (!filled) return std::nullopt;
  }
  return g;
}

std::vector<Move> legal_moves(const ProblemSpec& spec, const compile::Library& lib, const world::WorldState& state) {
  world::Perception p(state, *lib.vocab);
  std::vector<Move> out;
  for (std::size_t a = 0; a < spec.actions.size(); ++a) {
    for (auto& b : satisfying_bindings(spec.actions[a].params, spec.actions[a].conditions, p)) {
      auto g = ground_action(lib, spec.actions[a], b);
      if (!g) continue;
      out.push_back(Move{static_cast<int>(a), std::move(b), std::move(*g)});
    }
  }
  return out;
}

std::optional<int> satisfied_goal(const ProblemSpec& spec, const world::Perception& perception) {
  for (std::size_t g = 0; g < spec.goals.size(); ++g) {
    const auto& goal = spec.goals[g];
    // Any satisfying binding will do; stop at the first.
    const int n = static_cast<int>(goal.params.size());
    std::vector<std::vector<const Condition*>> ready(n + 1);
    for (const auto& c : goal.conditions) ready[highest_param(c) + 1].push_back(&c);
    std::vector<std::vector<std::string>> pools;
    for (const auto& p : goal.params) pools.push_back(entities_of(perception, p));
    Binding binding(n);
    auto ok_at = [&](int level) {
      return std::all_of(ready[level].begin(), ready[level].end(),
                         [&](const Condition* c) { return condition_holds(*c, binding, perception); });
    };
    std::function<bool(int)> extend = [&](int k) {
      if (k == n) return true;
      for (const auto& e : pools[k]) {
        if (std::find(binding.begin(), binding.begin() + k, e) != binding.begin() + k) continue;
        binding[k] = e;
        if (ok_at(k + 1) && extend(k + 1)) return true;
      }
      return false;
    };
    if (ok_at(0) && extend(0)) return static_cast<int>(g);
  }
  return std::nullopt;
}

SolveOutcome solve(const ProblemSpec& spec, const compile::Library& lib, const world::WorldState& state, int depth_cap,
                   int* explored) {
  validate(spec);
  for (const auto& a : spec.actions) {
    auto map = lib.verb_map(a.verb, {});
    if (!map) return SpecUsesUncompiledTask{a.verb};
    if (!task::primitive_of(*map) && !lib.rules->has_behavior(a.verb)) return SpecUsesUncompiledTask{a.verb};
  }
  struct NodeRec {
    world::WorldState state;
    int parent;
    Move move;
    int depth;
  };
  std::vector<NodeRec> nodes;
  std::unordered_set<world::StateKey, world::StateKeyHash> seen;
  auto path_to = [&](int i) {
    std::vector<Move> out;
    for (; nodes[i].parent >= 0; i = nodes[i].parent) out.push_back(nodes[i].move);
    std::reverse(out.begin(), out.end());
    return out;
  };
  nodes.push_back(NodeRec{state, -1, {}, 0});
  seen.insert(world::canonical_key(state, *lib.vocab));
  if (satisfied_goal(spec, world::Perception(state, *lib.vocab))) return std::vector<Move>{};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].depth >= depth_cap) continue;
    if (explored) *explored = static_cast<int>(head + 1);
    const auto moves = legal_moves(spec, lib, nodes[head].state);
    for (const auto& m : moves) {
      auto next = compile::simulate(lib, m.ground, nodes[head].state);
      if (!next) continue;
      auto key = world::canonical_key(next.value(), *lib.vocab);
      if (!seen.insert(std::move(key)).second) continue;
      const int depth = nodes[head].depth + 1;
      nodes.push_back(NodeRec{std::move(next.value()), static_cast<int>(head), m, depth});
      if (satisfied_goal(spec, world::Perception(nodes.back().state, *lib.vocab))) {
        if (explored) *explored = static_cast<int>(nodes.size());
        return path_to(static_cast<int>(nodes.size()) - 1);
      }
    }
  }
  return NoSolution{static_cast<int>(nodes.size())};
}

int minimax(const ProblemSpec& spec, const compile::Library& lib, const world::WorldState& state) {
  std::unordered_map<world::StateKey, int, world::StateKeyHash> memo;
  std::function<int(const world::WorldState&)> value = [&](const world::WorldState& s) -> int {
    auto key = world::canonical_key(s, *lib.vocab);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int v;
    if (satisfied_goal(spec, world::Perception(s, *lib.vocab))) {
      v = -1;  // the previous mover completed a line
    } else {
      v = 0;
      bool any = false;
      int best = -2;
      for (const auto& m : legal_moves(spec, lib, s)) {
        auto next = compile::simulate(lib, m.ground, s);
        if (!next) continue;
        any = true;
        best = std::max(best, -value(next.value()));
        if (best == 1) break;
      }
      if (any) v = best;
    }
    memo.emplace(std::move(key), v);
    return v;
  };
  return value(state);
}

}  // namespace itl::games
