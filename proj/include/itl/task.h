#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "itl/memory.h"
#include "itl/perception.h"
#include "itl/world.h"

namespace itl::task {

// A goal or condition argument: a task slot (obj, loc, obj2, ...), a constant
// scene entity (pantry), or the wildcard used only inside action models.
struct Term {
  enum class Kind { kSlot, kConstant, kWildcard };
  Kind kind = Kind::kConstant;
  std::string name;

  static Term slot(std::string n) { return {Kind::kSlot, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::kConstant, std::move(n)}; }
  static Term wildcard() { return {Kind::kWildcard, "*"}; }

  bool is_slot() const { return kind == Kind::kSlot; }
  // Slots serialize with a leading '?'.
  std::string encode() const;
  static Term decode(const std::string& s);

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Literal {
  std::string name;
  std::vector<Term> args;
  bool positive = true;

  Literal negated() const { return {name, args, !positive}; }
  Literal as_positive() const { return {name, args, true}; }
  // "in(obj,pantry)", "!closed(pantry)"
  std::string to_string() const;
  std::string encode() const;
  static std::optional<Literal> decode(const std::string& s);

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

using Bindings = std::map<std::string, std::string>;  // slot -> entity

std::optional<world::Predicate> instantiate(const Literal& lit, const Bindings& bindings);
Term substitute(const Term& t, const std::map<std::string, Term>& renaming);
Literal substitute(const Literal& lit, const std::map<std::string, Term>& renaming);

struct Slot {
  std::string name;      // obj, loc, obj2
  std::string role;      // direct-object, to, in
  std::string category;  // obj | loc
};

// A problem-space entry: verb plus role-abstracted arguments.
struct ActionRef {
  std::string verb;
  std::vector<std::pair<std::string, Term>> roles;

  // Table-style rendering: put-down(in,obj,loc), move(in,obj,pantry), open(pantry)
  std::string to_string() const;
  std::string encode() const;
  static std::optional<ActionRef> decode(const std::string& verb, const std::vector<std::string>& fields);

  bool operator==(const ActionRef&) const = default;
};

// Ground operator: verb with entity per role.
struct GroundAction {
  std::string verb;
  std::vector<std::pair<std::string, std::string>> roles;

  std::string to_string() const;
  bool operator==(const GroundAction&) const = default;
};

GroundAction instantiate(const ActionRef& ref, const Bindings& bindings);

// tCN / verb-map graph helpers. Layout:
//   map -lexical-> lexical(verb) -role-> slot(name)
//   map -operator-> operator(handle) [-primitive-> primitive(kind)]
//   map -goal-> goal -pred-> predicate(name | !name) -arg-> slot|concept
//   map -space-> problem-space -action-> action-ref(verb) -role-> slot|concept
memory::ConceptGraph bootstrap_tcn(const std::string& verb, const std::vector<Slot>& slots, const std::string& handle);
memory::ConceptGraph primitive_map(const std::string& verb, world::PrimitiveKind kind, const std::vector<Slot>& slots);

std::string verb_of(const memory::ConceptGraph& g);
std::vector<Slot> slots_of(const memory::ConceptGraph& g);
std::optional<world::PrimitiveKind> primitive_of(const memory::ConceptGraph& g);
bool has_goal(const memory::ConceptGraph& g);
std::vector<Literal> goal_of(const memory::ConceptGraph& g);
void set_goal(memory::ConceptGraph& g, const std::vector<Literal>& goal);
std::vector<ActionRef> space_of(const memory::ConceptGraph& g);
// Returns false when an equal reference is already present.
bool add_action(memory::ConceptGraph& g, const ActionRef& ref);

// Slot naming by category in order of appearance: obj, obj2, loc, loc2, ...
std::vector<Slot> name_slots(const std::vector<std::pair<std::string, std::string>>& role_categories);

// Preconditions and effects over the verb's slot names (and constants). The
// wildcard in a deleted literal matches any entity.
struct ActionModel {
  std::vector<Literal> pre;
  std::vector<Literal> add;
  std::vector<Literal> del;
};

ActionModel primitive_model(world::PrimitiveKind kind);

// Cue for a verb map by verb and surface roles.
memory::Cue map_cue(const std::string& verb, const std::vector<std::string>& roles);

struct DesiredState {
  std::vector<world::Predicate> predicates;
};

struct UnknownGoal {
  std::string verb;
};

struct MissingConstant {
  std::string entity;
};

using DesiredOutcome = std::variant<DesiredState, UnknownGoal, MissingConstant>;

DesiredOutcome generate_desired_state(const memory::ConceptGraph& tcn, const Bindings& bindings,
                                      const world::WorldState& state);

bool check_desired(const world::Perception& perception, const DesiredState& desired);

// Binds the map's slots from role -> entity pairs.
Bindings bind_slots(const memory::ConceptGraph& g, const std::vector<std::pair<std::string, std::string>>& roles);

// Primitive action for a primitive map and role bindings.
std::optional<world::PrimitiveAction> to_primitive(world::PrimitiveKind kind,
                                                   const std::vector<std::pair<std::string, std::string>>& roles);

}  // namespace itl::task
