#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "itl/compile.h"
#include "itl/perception.h"
#include "itl/task.h"
#include "itl/world.h"

namespace itl::games {

struct Param {
  std::string category;                // obj | loc
  std::vector<std::string> percepts;   // unary constraints from the description
  std::string description;             // "block", "red block"

  bool operator==(const Param&) const = default;
};

// A condition argument: a parameter (0-based), a constant entity, or an
// existential "a location" with an optional relation to a parameter/entity.
struct SpecTerm {
  enum class Kind { kParam, kEntity, kSome };
  Kind kind = Kind::kParam;
  int param = -1;
  std::string entity;
  std::vector<std::string> filter;
  std::string relation;
  std::optional<int> relation_param;
  std::string relation_entity;

  static SpecTerm of_param(int p) { return {Kind::kParam, p, "", {}, "", std::nullopt, ""}; }
  static SpecTerm of_entity(std::string e) { return {Kind::kEntity, -1, std::move(e), {}, "", std::nullopt, ""}; }

  std::string to_string() const;
  bool operator==(const SpecTerm&) const = default;
};

// name(args) with polarity; "=" is identity from nominal clauses.
struct Condition {
  std::string name;
  std::vector<SpecTerm> args;
  bool positive = true;

  std::string to_string() const;
  bool operator==(const Condition&) const = default;
};

struct Action {
  std::string verb;
  std::vector<Param> params;
  std::vector<Condition> conditions;

  bool operator==(const Action&) const = default;
};

struct Goal {
  std::vector<Param> params;
  std::vector<Condition> conditions;

  bool operator==(const Goal&) const = default;
};

struct ProblemSpec {
  std::vector<Action> actions;
  std::vector<Goal> goals;  // alternatives: any satisfied goal ends the problem
  std::optional<world::WorldState> board;

  std::string to_text() const;
};

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every condition references declared parameters; there is a goal.
void validate(const ProblemSpec& spec);

using Binding = std::vector<std::string>;  // entity per parameter, injective

struct Move {
  int action = 0;
  Binding binding;
  task::GroundAction ground;

  bool operator==(const Move& o) const { return action == o.action && binding == o.binding; }
};

bool condition_holds(const Condition& c, const Binding& binding, const world::Perception& perception);

// All injective bindings of the parameters satisfying every condition.
std::vector<Binding> satisfying_bindings(const std::vector<Param>& params, const std::vector<Condition>& conditions,
                                         const world::Perception& perception);

// Verb slots are filled by the first unused parameter of matching category,
// in slot order.
std::optional<task::GroundAction> ground_action(const compile::Library& lib, const Action& action,
                                                const Binding& binding);

std::vector<Move> legal_moves(const ProblemSpec& spec, const compile::Library& lib, const world::WorldState& state);

// Index of the first satisfied goal, if any.
std::optional<int> satisfied_goal(const ProblemSpec& spec, const world::Perception& perception);

struct NoSolution {
  int explored = 0;
};

struct SpecUsesUncompiledTask {
  std::string verb;
};

using SolveOutcome = std::variant<std::vector<Move>, NoSolution, SpecUsesUncompiledTask>;

// Breadth-first search over internally simulated actions with duplicate
// elimination on the canonical predicate key. Never touches `state`.
SolveOutcome solve(const ProblemSpec& spec, const compile::Library& lib, const world::WorldState& state,
                   int depth_cap, int* explored = nullptr);

// Game value for the side to move when the last mover wins on reaching a
// goal: +1 win, 0 draw, -1 loss. Full-tree search with memoization.
int minimax(const ProblemSpec& spec, const compile::Library& lib, const world::WorldState& state);

}  // namespace itl::games
