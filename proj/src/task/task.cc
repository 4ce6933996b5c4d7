#include "itl/task.h"

#include <algorithm>
#include <sstream>

#include "itl/lingo.h"

namespace itl::task {

using memory::ConceptGraph;
using memory::NodeKind;

std::string Term::encode() const { return is_slot() ? "?" + name : name; }

Term Term::decode(const std::string& s) {
  if (s == "*") return wildcard();
  if (!s.empty() && s[0] == '?') return slot(s.substr(1));
  return constant(s);
}

namespace {

std::string render(const Literal& lit, bool encoded) {
  std::string out = lit.positive ? "" : "!";
  out += lit.name + "(";
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    if (i) out += ",";
    out += encoded ? lit.args[i].encode() : lit.args[i].name;
  }
  return out + ")";
}

template <typename Value, typename Show>
std::string render_action(const std::string& verb, const std::vector<std::pair<std::string, Value>>& roles,
                          Show show) {
  std::vector<std::string> parts;
  for (const auto& [role, v] : roles) {
    if (role != "direct-object" && parts.empty()) parts.push_back(lingo::placement_relation(role));
  }
  std::vector<std::string> args;
  for (const auto& [role, v] : roles) {
    if (role == "direct-object") args.insert(args.begin(), show(v));
    else args.push_back(show(v));
  }
  parts.insert(parts.end(), args.begin(), args.end());
  std::string out = verb + "(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + ")";
}

struct Parts {
  std::string verb;
  std::vector<Slot> slots;
  std::string handle;
  std::optional<world::PrimitiveKind> primitive;
  std::optional<std::vector<Literal>> goal;
  std::vector<ActionRef> space;
};

Term term_of(const ConceptGraph& g, int id) {
  const auto& n = g.node(id);
  return n.kind == NodeKind::kSlot ? Term::slot(n.value) : Term::constant(n.value);
}

Parts decompose(const ConceptGraph& g) {
  Parts p;
  const int lex = *g.target(0, "lexical");
  p.verb = g.node(lex).value;
  for (const auto* e : g.out_edges(lex)) {
    const auto& slot = g.node(e->to);
    const auto cat = g.target(e->to, "category");
    p.slots.push_back(Slot{slot.value, e->label, cat ? g.node(*cat).value : ""});
  }
  const int op = *g.target(0, "operator");
  p.handle = g.node(op).value;
  if (auto prim = g.target(op, "primitive")) p.primitive = world::parse_primitive_kind(g.node(*prim).value);
  if (auto goal = g.target(0, "goal")) {
    std::vector<Literal> lits;
    for (int pr : g.targets(*goal, "pred")) {
      Literal lit;
      std::string v = g.node(pr).value;
      if (!v.empty() && v[0] == '!') {
        lit.positive = false;
        v = v.substr(1);
      }
      lit.name = v;
      for (int a : g.targets(pr, "arg")) lit.args.push_back(term_of(g, a));
      lits.push_back(std::move(lit));
    }
    p.goal = std::move(lits);
  }
  if (auto space = g.target(0, "space")) {
    for (int a : g.targets(*space, "action")) {
      ActionRef ref;
      ref.verb = g.node(a).value;
      for (const auto* e : g.out_edges(a)) ref.roles.emplace_back(e->label, term_of(g, e->to));
      p.space.push_back(std::move(ref));
    }
  }
  return p;
}

ConceptGraph assemble(const Parts& p) {
  ConceptGraph g;
  const int map = g.add(NodeKind::kMap, "verb");
  const int lex = g.add(NodeKind::kLexical, p.verb);
  g.link(map, "lexical", lex);
  std::map<std::string, int> slot_nodes;
  for (const auto& s : p.slots) {
    const int id = g.add(NodeKind::kSlot, s.name);
    g.link(lex, s.role, id);
    if (!s.category.empty()) g.link(id, "category", g.add(NodeKind::kConcept, s.category));
    slot_nodes[s.name] = id;
  }
  const int op = g.add(NodeKind::kOperator, p.handle);
  g.link(map, "operator", op);
  if (p.primitive) g.link(op, "primitive", g.add(NodeKind::kPrimitive, std::string(world::to_string(*p.primitive))));

  std::map<std::string, int> constants;
  auto term_node = [&](const Term& t) {
    if (t.is_slot()) {
      auto it = slot_nodes.find(t.name);
      if (it == slot_nodes.end()) throw memory::MalformedGraph("reference to undeclared slot " + t.name);
      return it->second;
    }
    auto it = constants.find(t.name);
    if (it != constants.end()) return it->second;
    const int id = g.add(NodeKind::kConcept, t.name);
    constants[t.name] = id;
    return id;
  };
  if (p.goal) {
    const int goal = g.add(NodeKind::kGoal);
    g.link(map, "goal", goal);
    for (const auto& lit : *p.goal) {
      const int pr = g.add(NodeKind::kPredicate, (lit.positive ? "" : "!") + lit.name);
      g.link(goal, "pred", pr);
      for (const auto& a : lit.args) g.link(pr, "arg", term_node(a));
    }
  }
  if (!p.space.empty()) {
    const int space = g.add(NodeKind::kProblemSpace);
    g.link(map, "space", space);
    for (const auto& ref : p.space) {
      const int a = g.add(NodeKind::kActionRef, ref.verb);
      g.link(space, "action", a);
      for (const auto& [role, t] : ref.roles) g.link(a, role, term_node(t));
    }
  }
  memory::validate(g);
  return g;
}

}  // namespace

std::string Literal::to_string() const { return render(*this, false); }
std::string Literal::encode() const { return render(*this, true); }

std::optional<Literal> Literal::decode(const std::string& s) {
  auto p = world::Predicate::parse(s);
  if (!p) return std::nullopt;
  Literal lit{p->name, {}, p->positive};
  for (const auto& a : p->args) lit.args.push_back(Term::decode(a));
  return lit;
}

std::optional<world::Predicate> instantiate(const Literal& lit, const Bindings& bindings) {
  world::Predicate p{lit.name, {}, lit.positive};
  for (const auto& t : lit.args) {
    if (t.kind == Term::Kind::kWildcard) return std::nullopt;
    if (t.is_slot()) {
      auto it = bindings.find(t.name);
      if (it == bindings.end()) return std::nullopt;
      p.args.push_back(it->second);
    } else {
      p.args.push_back(t.name);
    }
  }
  return p;
}

Term substitute(const Term& t, const std::map<std::string, Term>& renaming) {
  if (!t.is_slot()) return t;
  auto it = renaming.find(t.name);
  return it == renaming.end() ? t : it->second;
}

Literal substitute(const Literal& lit, const std::map<std::string, Term>& renaming) {
  Literal out = lit;
  for (auto& a : out.args) a = substitute(a, renaming);
  return out;
}

std::string ActionRef::to_string() const {
  return render_action(verb, roles, [](const Term& t) { return t.name; });
}

std::string ActionRef::encode() const {
  std::string out = verb;
  for (const auto& [role, t] : roles) out += " " + role + ":" + t.encode();
  return out;
}

std::optional<ActionRef> ActionRef::decode(const std::string& verb, const std::vector<std::string>& fields) {
  ActionRef ref;
  ref.verb = verb;
  for (const auto& f : fields) {
    const auto colon = f.find(':');
    if (colon == std::string::npos) return std::nullopt;
    ref.roles.emplace_back(f.substr(0, colon), Term::decode(f.substr(colon + 1)));
  }
  return ref;
}

std::string GroundAction::to_string() const {
  return render_action(verb, roles, [](const std::string& e) { return e; });
}

GroundAction instantiate(const ActionRef& ref, const Bindings& bindings) {
  GroundAction g{ref.verb, {}};
  for (const auto& [role, t] : ref.roles) {
    if (t.is_slot()) {
      auto it = bindings.find(t.name);
      g.roles.emplace_back(role, it == bindings.end() ? t.name : it->second);
    } else {
      g.roles.emplace_back(role, t.name);
    }
  }
  return g;
}

ConceptGraph bootstrap_tcn(const std::string& verb, const std::vector<Slot>& slots, const std::string& handle) {
  Parts p;
  p.verb = verb;
  p.slots = slots;
  p.handle = handle;
  return assemble(p);
}

ConceptGraph primitive_map(const std::string& verb, world::PrimitiveKind kind, const std::vector<Slot>& slots) {
  Parts p;
  p.verb = verb;
  p.slots = slots;
  p.handle = std::string(world::to_string(kind));
  p.primitive = kind;
  return assemble(p);
}

std::string verb_of(const ConceptGraph& g) { return g.node(*g.target(0, "lexical")).value; }
std::vector<Slot> slots_of(const ConceptGraph& g) { return decompose(g).slots; }
std::optional<world::PrimitiveKind> primitive_of(const ConceptGraph& g) { return decompose(g).primitive; }
bool has_goal(const ConceptGraph& g) { return g.target(0, "goal").has_value(); }

std::vector<Literal> goal_of(const ConceptGraph& g) {
  auto p = decompose(g);
  return p.goal ? *p.goal : std::vector<Literal>{};
}

void set_goal(ConceptGraph& g, const std::vector<Literal>& goal) {
  auto p = decompose(g);
  p.goal = goal;
  g = assemble(p);
}

std::vector<ActionRef> space_of(const ConceptGraph& g) { return decompose(g).space; }

bool add_action(ConceptGraph& g, const ActionRef& ref) {
  auto p = decompose(g);
  if (std::find(p.space.begin(), p.space.end(), ref) != p.space.end()) return false;
  p.space.push_back(ref);
  g = assemble(p);
  return true;
}

std::vector<Slot> name_slots(const std::vector<std::pair<std::string, std::string>>& role_categories) {
  std::vector<Slot> out;
  std::map<std::string, int> seen;
  for (const auto& [role, cat] : role_categories) {
    const int n = ++seen[cat];
    out.push_back(Slot{n == 1 ? cat : cat + std::to_string(n), role, cat});
  }
  return out;
}

ActionModel primitive_model(world::PrimitiveKind kind) {
  using world::PrimitiveKind;
  const Term obj = Term::slot("obj"), loc = Term::slot("loc");
  ActionModel m;
  switch (kind) {
    case PrimitiveKind::kPickUp:
      m.pre = {{"gripper-empty", {}, true}};
      m.add = {{"holding", {obj}, true}};
      m.del = {{"gripper-empty", {}, true}, {"in", {obj, Term::wildcard()}, true}};
      break;
    case PrimitiveKind::kPutDown:
      m.pre = {{"holding", {obj}, true}, {"closed", {loc}, false}};
      m.add = {{"in", {obj, loc}, true}, {"gripper-empty", {}, true}};
      m.del = {{"holding", {obj}, true}};
      break;
    case PrimitiveKind::kOpen:
    case PrimitiveKind::kClose:
    case PrimitiveKind::kTurnOn:
    case PrimitiveKind::kTurnOff: {
      const bool open_pair = kind == PrimitiveKind::kOpen || kind == PrimitiveKind::kClose;
      const bool forward = kind == PrimitiveKind::kOpen || kind == PrimitiveKind::kTurnOn;
      const std::string yes = open_pair ? "open" : "on";
      const std::string no = open_pair ? "closed" : "off";
      const std::string from = forward ? no : yes;
      const std::string to = forward ? yes : no;
      m.pre = {{from, {loc}, true}};
      m.add = {{to, {loc}, true}};
      m.del = {{from, {loc}, true}};
      break;
    }
  }
  return m;
}

memory::Cue map_cue(const std::string& verb, const std::vector<std::string>& roles) {
  memory::Cue cue;
  cue.constant("", "verb").constant("lexical", verb);
  for (const auto& r : roles) cue.variable("lexical/" + r, r);
  return cue;
}

DesiredOutcome generate_desired_state(const ConceptGraph& tcn, const Bindings& bindings,
                                      const world::WorldState& state) {
  if (!has_goal(tcn)) return UnknownGoal{verb_of(tcn)};
  DesiredState d;
  for (const auto& lit : goal_of(tcn)) {
    for (const auto& t : lit.args) {
      if (!t.is_slot() && !state.has_entity(t.name)) return MissingConstant{t.name};
    }
    auto p = instantiate(lit, bindings);
    if (!p) throw std::logic_error("goal literal " + lit.to_string() + " has an unbound slot");
    d.predicates.push_back(*p);
  }
  return d;
}

bool check_desired(const world::Perception& perception, const DesiredState& desired) {
  return std::all_of(desired.predicates.begin(), desired.predicates.end(),
                     [&](const world::Predicate& p) { return perception.holds(p); });
}

Bindings bind_slots(const ConceptGraph& g, const std::vector<std::pair<std::string, std::string>>& roles) {
  Bindings b;
  for (const auto& s : slots_of(g)) {
    for (const auto& [role, entity] : roles) {
      if (role == s.role) {
        b[s.name] = entity;
        break;
      }
    }
  }
  return b;
}

std::optional<world::PrimitiveAction> to_primitive(world::PrimitiveKind kind,
                                                   const std::vector<std::pair<std::string, std::string>>& roles) {
  std::optional<std::string> object;
  std::optional<std::pair<std::string, std::string>> place;
  for (const auto& [role, entity] : roles) {
    if (role == "direct-object") object = entity;
    else if (!place) place = std::pair{role, entity};
  }
  switch (kind) {
    case world::PrimitiveKind::kPickUp:
      if (!object) return std::nullopt;
      return world::PrimitiveAction::pick_up(*object);
    case world::PrimitiveKind::kPutDown:
      if (!object || !place) return std::nullopt;
      return world::PrimitiveAction::put_down(lingo::placement_relation(place->first), *object, place->second);
    default:
      if (!object) return std::nullopt;
      return world::PrimitiveAction::toggle(kind, *object);
  }
}

}  // namespace itl::task
