#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "itl/memory.h"
#include "itl/perception.h"
#include "itl/result.h"
#include "itl/task.h"
#include "itl/world.h"

namespace itl::compile {

// "If performing <task>, consider <op>."
struct ProposalRule {
  std::string task;
  task::ActionRef op;

  bool operator==(const ProposalRule&) const = default;
};

// "If performing <task> and <conditions>, prefer <op>."
struct SelectionRule {
  std::string task;
  std::vector<task::Literal> conditions;
  task::ActionRef op;
  int step = 0;
  std::string provenance;

  std::string to_string() const;
  bool operator==(const SelectionRule&) const = default;
};

class RuleBase {
 public:
  void replace(const std::string& task, std::vector<ProposalRule> proposals, std::vector<SelectionRule> selections);
  bool has_behavior(std::string_view task) const;
  std::vector<const ProposalRule*> proposals(std::string_view task) const;
  std::vector<const SelectionRule*> selections(std::string_view task) const;
  const std::vector<ProposalRule>& all_proposals() const { return proposals_; }
  const std::vector<SelectionRule>& all_selections() const { return selections_; }
  std::size_t size() const { return proposals_.size() + selections_.size(); }

  // Human-readable dump, one block per rule.
  std::string dump(std::string_view task = "") const;
  void write(std::ostream& out) const;
  // Reads rule sections of a knowledge file, skipping everything else.
  void read(std::istream& in);

  bool operator==(const RuleBase&) const = default;

 private:
  std::vector<ProposalRule> proposals_;
  std::vector<SelectionRule> selections_;
};

inline constexpr int kMaxDepth = 8;
inline constexpr int kMaxSteps = 32;

// Read-only knowledge used by internal simulation. Map lookups never bump
// retrieval bias, so simulation leaves semantic memory untouched.
struct Library {
  const memory::SemanticMemory* smem = nullptr;
  const RuleBase* rules = nullptr;
  const world::RelationVocabulary* vocab = nullptr;

  std::optional<memory::ConceptGraph> verb_map(const std::string& verb, const std::vector<std::string>& roles) const;
  std::optional<memory::ConceptGraph> verb_map(const task::GroundAction& action) const;
};

// Action model of a verb map over its own slot names. Task models take the
// goal as effects and, as preconditions, the preconditions of their
// operators that no operator of the task can establish.
task::ActionModel model_of(const Library& lib, const memory::ConceptGraph& map, int depth = 0);

struct GroundModel {
  std::vector<world::Predicate> pre, add, del;  // del may carry "*" arguments
};

std::optional<GroundModel> ground_model(const Library& lib, const task::GroundAction& action);

// Operator the compiled behavior prefers in this state, if any.
std::optional<task::GroundAction> select(const Library& lib, const memory::ConceptGraph& tcn,
                                         const task::Bindings& bindings, const world::Perception& perception);

using SimResult = Result<world::WorldState, std::string>;

// Internal simulation: primitives through the simulator, tasks through their
// compiled behavior. Appends executed primitives to `trace` when given.
SimResult simulate(const Library& lib, const task::GroundAction& action, const world::WorldState& state,
                   int depth = 0, std::vector<world::PrimitiveAction>* trace = nullptr);
SimResult run_behavior(const Library& lib, const memory::ConceptGraph& tcn, const task::Bindings& bindings,
                       const world::WorldState& state, int depth = 0,
                       std::vector<world::PrimitiveAction>* trace = nullptr);

struct ProjectionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Compiled {
  std::vector<ProposalRule> proposals;
  std::vector<SelectionRule> selections;
  std::vector<task::GroundAction> path;  // the explained sequence
  int expansions = 0;
};

// Explains why the instructed execution reached the desired state and
// compiles one proposal rule per problem-space operator plus one selection
// rule per step of the shortest successful projection.
Compiled proceduralize(const Library& lib, const memory::ConceptGraph& tcn, const task::Bindings& bindings,
                       const world::WorldState& initial, const std::vector<task::GroundAction>& recorded,
                       const std::string& provenance);

// Literal set as rule conditions: drops negations implied by a positive
// complementary state flag (!closed(x) next to open(x)).
std::vector<task::Literal> simplify(const std::vector<task::Literal>& conditions);

// Pre-lesson state for the most recent instance of `verb`.
std::optional<world::WorldState> replay_initial_state(const memory::EpisodicMemory& epmem, std::string_view verb);

}  // namespace itl::compile
