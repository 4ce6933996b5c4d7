#include "itl/compile.h"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace itl::compile {

using task::ActionRef;
using task::GroundAction;
using task::Literal;
using task::Term;
using world::Predicate;

namespace {

std::vector<std::string> role_names(const GroundAction& a) {
  std::vector<std::string> out;
  for (const auto& [role, e] : a.roles) out.push_back(role);
  return out;
}

bool matches(const Predicate& pattern, const Predicate& p) {
  if (pattern.name != p.name || pattern.args.size() != p.args.size()) return false;
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    if (pattern.args[i] != "*" && pattern.args[i] != p.args[i]) return false;
  }
  return true;
}

bool matches(const Literal& pattern, const Literal& lit) {
  if (pattern.name != lit.name || pattern.args.size() != lit.args.size()) return false;
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    if (pattern.args[i].kind != Term::Kind::kWildcard && pattern.args[i] != lit.args[i]) return false;
  }
  return true;
}

template <typename L>
bool any_match(const std::vector<L>& patterns, const L& lit) {
  return std::any_of(patterns.begin(), patterns.end(), [&](const L& p) { return matches(p, lit); });
}

// Literal made true by an operator with these effects.
template <typename L>
bool achieved(const L& lit, const std::vector<L>& add, const std::vector<L>& del) {
  if (lit.positive) return any_match(add, lit);
  L pos = lit;
  pos.positive = true;
  return any_match(del, pos) && !any_match(add, pos);
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

}  // namespace

std::string SelectionRule::to_string() const {
  std::string out = "if performing " + task;
  for (std::size_t i = 0; i < conditions.size(); ++i) out += (i ? " and " : " and ") + conditions[i].to_string();
  return out + " then prefer " + op.to_string();
}

void RuleBase::replace(const std::string& task, std::vector<ProposalRule> proposals,
                       std::vector<SelectionRule> selections) {
  std::erase_if(proposals_, [&](const ProposalRule& r) { return r.task == task; });
  std::erase_if(selections_, [&](const SelectionRule& r) { return r.task == task; });
  for (auto& r : proposals) proposals_.push_back(std::move(r));
  for (auto& r : selections) selections_.push_back(std::move(r));
}

bool RuleBase::has_behavior(std::string_view task) const {
  return std::any_of(selections_.begin(), selections_.end(), [&](const SelectionRule& r) { return r.task == task; });
}

std::vector<const ProposalRule*> RuleBase::proposals(std::string_view task) const {
  std::vector<const ProposalRule*> out;
  for (const auto& r : proposals_) {
    if (r.task == task) out.push_back(&r);
  }
  return out;
}

std::vector<const SelectionRule*> RuleBase::selections(std::string_view task) const {
  std::vector<const SelectionRule*> out;
  for (const auto& r : selections_) {
    if (r.task == task) out.push_back(&r);
  }
  return out;
}

std::string RuleBase::dump(std::string_view task) const {
  std::ostringstream out;
  for (const auto& r : proposals_) {
    if (!task.empty() && r.task != task) continue;
    out << "propose " << r.task << ": " << r.op.to_string() << "\n";
  }
  for (const auto& r : selections_) {
    if (!task.empty() && r.task != task) continue;
    out << "rule " << r.task << "#" << r.step << "\n";
    for (const auto& c : r.conditions) out << "  if " << c.to_string() << "\n";
    out << "  then prefer " << r.op.to_string() << "\n";
  }
  return out.str();
}

void RuleBase::write(std::ostream& out) const {
  for (const auto& r : proposals_) out << "proposal " << r.task << " " << r.op.encode() << "\n";
  for (const auto& r : selections_) {
    out << "rule " << r.task << " " << r.step << " " << (r.provenance.empty() ? "-" : r.provenance) << "\n";
    for (const auto& c : r.conditions) out << "if " << c.encode() << "\n";
    out << "then " << r.op.encode() << "\n";
    out << "endrule\n";
  }
}

void RuleBase::read(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<SelectionRule> current;
  auto bad = [&](const std::string& what) {
    return std::runtime_error("knowledge line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split(line);
    if (f.empty()) continue;
    if (f[0] == "proposal") {
      if (f.size() < 3) throw bad("proposal needs task and operator");
      auto ref = ActionRef::decode(f[2], {f.begin() + 3, f.end()});
      if (!ref) throw bad("bad operator");
      proposals_.push_back(ProposalRule{f[1], *ref});
    } else if (f[0] == "rule") {
      if (f.size() != 4) throw bad("rule header");
      current = SelectionRule{f[1], {}, {}, std::stoi(f[2]), f[3] == "-" ? "" : f[3]};
    } else if (f[0] == "if" && current) {
      auto lit = f.size() == 2 ? Literal::decode(f[1]) : std::nullopt;
      if (!lit) throw bad("bad condition");
      current->conditions.push_back(*lit);
    } else if (f[0] == "then" && current) {
      if (f.size() < 2) throw bad("then needs an operator");
      auto ref = ActionRef::decode(f[1], {f.begin() + 2, f.end()});
      if (!ref) throw bad("bad operator");
      current->op = *ref;
    } else if (f[0] == "endrule") {
      if (!current) throw bad("endrule without rule");
      selections_.push_back(std::move(*current));
      current.reset();
    }
  }
  if (current) throw bad("unterminated rule");
}

std::optional<memory::ConceptGraph> Library::verb_map(const std::string& verb,
                                                      const std::vector<std::string>& roles) const {
  auto r = smem->peek(task::map_cue(verb, roles));
  if (!r) return std::nullopt;
  return r->graph;
}

std::optional<memory::ConceptGraph> Library::verb_map(const GroundAction& action) const {
  return verb_map(action.verb, role_names(action));
}

task::ActionModel model_of(const Library& lib, const memory::ConceptGraph& map, int depth) {
  if (auto prim = task::primitive_of(map)) return task::primitive_model(*prim);
  task::ActionModel m;
  if (depth > kMaxDepth) return m;
  const auto goal = task::goal_of(map);
  for (const auto& lit : goal) {
    if (lit.positive) {
      m.add.push_back(lit);
      if (lit.name == "in" && lit.args.size() == 2) m.del.push_back({"in", {lit.args[0], Term::wildcard()}, true});
    } else {
      m.del.push_back(lit.as_positive());
    }
  }

  std::vector<ActionRef> ops;
  const std::string verb = task::verb_of(map);
  if (lib.rules && lib.rules->has_behavior(verb)) {
    for (const auto* r : lib.rules->selections(verb)) {
      if (std::find(ops.begin(), ops.end(), r->op) == ops.end()) ops.push_back(r->op);
    }
  } else {
    ops = task::space_of(map);
  }

  std::vector<Literal> pre, add, del;
  for (const auto& ref : ops) {
    std::vector<std::string> roles;
    for (const auto& [role, t] : ref.roles) roles.push_back(role);
    auto callee = lib.verb_map(ref.verb, roles);
    if (!callee) continue;
    const auto sub = model_of(lib, *callee, depth + 1);
    std::map<std::string, Term> renaming;
    for (const auto& s : task::slots_of(*callee)) {
      for (const auto& [role, t] : ref.roles) {
        if (role == s.role) renaming[s.name] = t;
      }
    }
    for (const auto& l : sub.pre) pre.push_back(task::substitute(l, renaming));
    for (const auto& l : sub.add) add.push_back(task::substitute(l, renaming));
    for (const auto& l : sub.del) del.push_back(task::substitute(l, renaming));
  }
  for (const auto& l : pre) {
    if (achieved(l, add, del)) continue;
    if (std::find(m.pre.begin(), m.pre.end(), l) == m.pre.end()) m.pre.push_back(l);
  }
  return m;
}

std::optional<GroundModel> ground_model(const Library& lib, const GroundAction& action) {
  auto map = lib.verb_map(action);
  if (!map) return std::nullopt;
  const auto model = model_of(lib, *map);
  const auto bindings = task::bind_slots(*map, action.roles);
  auto ground = [&](const std::vector<Literal>& lits) {
    std::vector<Predicate> out;
    for (const auto& l : lits) {
      Predicate p{l.name, {}, l.positive};
      for (const auto& t : l.args) {
        if (t.kind == Term::Kind::kWildcard) p.args.push_back("*");
        else if (t.is_slot()) p.args.push_back(bindings.count(t.name) ? bindings.at(t.name) : t.name);
        else p.args.push_back(t.name);
      }
      out.push_back(std::move(p));
    }
    return out;
  };
  return GroundModel{ground(model.pre), ground(model.add), ground(model.del)};
}

std::optional<GroundAction> select(const Library& lib, const memory::ConceptGraph& tcn, const task::Bindings& bindings,
                                   const world::Perception& perception) {
  const std::string verb = task::verb_of(tcn);
  std::vector<GroundAction> proposed;
  for (const auto* p : lib.rules->proposals(verb)) proposed.push_back(task::instantiate(p->op, bindings));
  for (const auto* r : lib.rules->selections(verb)) {
    bool ok = true;
    for (const auto& c : r->conditions) {
      auto p = task::instantiate(c, bindings);
      if (!p || !perception.holds(*p)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    auto op = task::instantiate(r->op, bindings);
    if (std::find(proposed.begin(), proposed.end(), op) != proposed.end()) return op;
  }
  return std::nullopt;
}

SimResult simulate(const Library& lib, const GroundAction& action, const world::WorldState& state, int depth,
                   std::vector<world::PrimitiveAction>* trace) {
  if (depth > kMaxDepth) return std::string("substate depth exceeded");
  auto map = lib.verb_map(action);
  if (!map) return "unknown verb " + action.verb;
  if (auto prim = task::primitive_of(*map)) {
    auto pa = task::to_primitive(*prim, action.roles);
    if (!pa) return "malformed " + action.to_string();
    auto next = world::apply_primitive(state, *pa);
    if (!next) return next.error().message;
    if (trace) trace->push_back(*pa);
    return std::move(next.value());
  }
  return run_behavior(lib, *map, task::bind_slots(*map, action.roles), state, depth + 1, trace);
}

SimResult run_behavior(const Library& lib, const memory::ConceptGraph& tcn, const task::Bindings& bindings,
                       const world::WorldState& state, int depth, std::vector<world::PrimitiveAction>* trace) {
  if (depth > kMaxDepth) return std::string("substate depth exceeded");
  auto desired = task::generate_desired_state(tcn, bindings, state);
  auto* d = std::get_if<task::DesiredState>(&desired);
  if (d == nullptr) return "no desired state for " + task::verb_of(tcn);
  world::WorldState s = state;
  for (int step = 0; step <= kMaxSteps; ++step) {
    world::Perception p(s, *lib.vocab);
    if (task::check_desired(p, *d)) return s;
    auto op = select(lib, tcn, bindings, p);
    if (!op) return "no behavior for " + task::verb_of(tcn) + " in this state";
    auto next = simulate(lib, *op, s, depth, trace);
    if (!next) return next.error();
    s = std::move(next.value());
  }
  return "behavior for " + task::verb_of(tcn) + " does not terminate";
}

std::vector<Literal> simplify(const std::vector<Literal>& conditions) {
  static const std::vector<std::pair<std::string, std::string>> kComplements = {
      {"open", "closed"}, {"closed", "open"}, {"on", "off"}, {"off", "on"}};
  std::vector<Literal> out;
  for (const auto& c : conditions) {
    if (std::find(out.begin(), out.end(), c) != out.end()) continue;
    bool implied = false;
    if (!c.positive) {
      for (const auto& [a, b] : kComplements) {
        if (c.name != a) continue;
        const Literal other{b, c.args, true};
        implied = implied || std::find(conditions.begin(), conditions.end(), other) != conditions.end();
      }
    }
    if (!implied) out.push_back(c);
  }
  return out;
}

Compiled proceduralize(const Library& lib, const memory::ConceptGraph& tcn, const task::Bindings& bindings,
                       const world::WorldState& initial, const std::vector<GroundAction>& recorded,
                       const std::string& provenance) {
  const std::string verb = task::verb_of(tcn);
  auto outcome = task::generate_desired_state(tcn, bindings, initial);
  auto* desired = std::get_if<task::DesiredState>(&outcome);
  if (desired == nullptr) throw ProjectionFailure("no desired state for " + verb);
  const auto space = task::space_of(tcn);
  if (space.empty()) throw ProjectionFailure("the problem space of " + verb + " is empty");

  Compiled out;
  for (const auto& ref : space) out.proposals.push_back(ProposalRule{verb, ref});

  // Candidates in recorded-instruction order, then remaining space order.
  std::vector<GroundAction> ops;
  for (const auto& r : recorded) {
    if (std::find(ops.begin(), ops.end(), r) != ops.end()) continue;
    bool in_space = std::any_of(space.begin(), space.end(),
                                [&](const ActionRef& ref) { return task::instantiate(ref, bindings) == r; });
    if (in_space) ops.push_back(r);
  }
  for (const auto& ref : space) {
    auto g = task::instantiate(ref, bindings);
    if (std::find(ops.begin(), ops.end(), g) == ops.end()) ops.push_back(g);
  }

  // Iterative deepening keeps the shortest explanation, which is what drops
  // superfluous instructed steps.
  const int bound = std::max<int>(1, 2 * static_cast<int>(recorded.size()));
  std::vector<GroundAction> path;
  std::vector<world::WorldState> states{initial};
  std::set<world::StateKey> on_path{world::canonical_key(initial, *lib.vocab)};
  std::function<bool(int)> dfs = [&](int remaining) -> bool {
    const world::WorldState s = states.back();  // copy: states grows below
    if (task::check_desired(world::Perception(s, *lib.vocab), *desired)) return true;
    if (remaining == 0) return false;
    for (const auto& op : ops) {
      auto next = simulate(lib, op, s);
      ++out.expansions;
      if (!next) continue;
      auto key = world::canonical_key(next.value(), *lib.vocab);
      if (on_path.count(key)) continue;
      on_path.insert(key);
      path.push_back(op);
      states.push_back(std::move(next.value()));
      if (dfs(remaining - 1)) return true;
      states.pop_back();
      path.pop_back();
      on_path.erase(key);
    }
    return false;
  };
  bool found = false;
  for (int limit = 0; limit <= bound && !found; ++limit) found = dfs(limit);
  if (!found) throw ProjectionFailure("could not reach the goal of " + verb + " by projection");
  out.path = path;

  // Entity -> role variable for generalization.
  std::map<std::string, Term> variables;
  for (const auto& [slot, entity] : bindings) variables.emplace(entity, Term::slot(slot));
  auto lift = [&](const Predicate& p) {
    Literal l{p.name, {}, p.positive};
    for (const auto& a : p.args) {
      auto it = variables.find(a);
      l.args.push_back(it != variables.end() ? it->second : Term::constant(a));
    }
    return l;
  };

  // Goal regression from the desired state back along the path.
  std::vector<Predicate> regressed = desired->predicates;
  std::vector<SelectionRule> rules(path.size());
  for (int i = static_cast<int>(path.size()) - 1; i >= 0; --i) {
    auto model = ground_model(lib, path[i]);
    if (!model) throw ProjectionFailure("no action model for " + path[i].to_string());
    std::vector<Predicate> r = model->pre;
    for (const auto& lit : regressed) {
      if (achieved(lit, model->add, model->del)) continue;
      if (std::find(r.begin(), r.end(), lit) == r.end()) r.push_back(lit);
    }
    std::vector<Literal> conditions;
    for (const auto& p : r) conditions.push_back(lift(p));
    world::Perception here(states[i], *lib.vocab);
    for (const auto& d : desired->predicates) {
      if (!here.holds(d)) conditions.push_back(lift(d.negated()));
    }
    ActionRef op{path[i].verb, {}};
    for (const auto& [role, entity] : path[i].roles) {
      auto it = variables.find(entity);
      op.roles.emplace_back(role, it != variables.end() ? it->second : Term::constant(entity));
    }
    rules[i] = SelectionRule{verb, simplify(conditions), op, i + 1, provenance};
    regressed = std::move(r);
  }
  out.selections = std::move(rules);
  return out;
}

std::optional<world::WorldState> replay_initial_state(const memory::EpisodicMemory& epmem, std::string_view verb) {
  const auto* ep = epmem.task_begin(verb);
  if (ep == nullptr) return std::nullopt;
  return ep->snapshot;
}

}  // namespace itl::compile
