#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itl/compile.h"
#include "itl/dialogue.h"
#include "itl/games.h"
#include "itl/lingo.h"
#include "itl/memory.h"
#include "itl/perception.h"
#include "itl/task.h"
#include "itl/world.h"

namespace itl::learner {

enum class Capability { kInteraction, kLexical, kObjectSpatial, kTaskAcquisition, kTaskExecution };

inline constexpr std::array kCapabilities = {Capability::kInteraction, Capability::kLexical,
                                             Capability::kObjectSpatial, Capability::kTaskAcquisition,
                                             Capability::kTaskExecution};

std::string_view to_string(Capability c);

// Utterance categories by the knowledge being acquired. "command" utterances
// are tallied separately and are not teaching.
inline constexpr std::array<std::string_view, 5> kTeachingCategories = {
    "object-attribute", "spatial-relation", "goal", "action", "problem-spec"};

struct Metrics {
  std::map<std::string, long> operators;   // capability -> selections
  std::map<std::string, long> utterances;  // category -> utterances, both speakers
  long cycles = 0;
  double wall_ms = 0;

  Metrics();
  long operator_count(Capability c) const;
  long utterance_count(std::string_view category) const;
  long teaching() const;
};

// Long-term knowledge a learner starts from and can export.
struct Knowledge {
  memory::SemanticMemory smem;
  compile::RuleBase rules;

  void write(std::ostream& out) const;
  void read(std::istream& in);
};

Knowledge load_knowledge(const std::string& path);
void save_knowledge(const Knowledge& k, const std::string& path);

struct ExpertReply {
  std::string text;
  std::optional<std::string> pointing;
};

// Answers one learner question. Blocks until the expert replies; may throw to
// end the session.
using ExpertChannel = std::function<ExpertReply(const std::string& question)>;

// The expert said "stop" or nesting ran too deep; the command is abandoned.
struct Aborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Observer {
  std::function<void(const dialogue::Message&)> on_message;
  std::function<void(const world::PrimitiveAction&, const world::WorldState&)> on_action;
};

// What one top-level expert utterance led to.
struct Outcome {
  bool completed = false;
  bool aborted = false;
  std::vector<world::PrimitiveAction> primitives;
  int questions = 0;
  std::string failure;
};

inline constexpr int kMaxAttempts = 3;  // re-asks before a question is given up

class Agent {
 public:
  Agent(world::WorldState world, Knowledge knowledge, ExpertChannel expert);
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  // One unsolicited expert utterance: a command, a teaching sentence, or a
  // meta phrase ("new problem", "solve").
  Outcome hear(const std::string& text, const std::optional<std::string>& pointing = std::nullopt);

  // Runs a task on ground arguments without language, as if commanded.
  Outcome execute(const task::GroundAction& action);

  // Search for the current problem from the current state.
  games::SolveOutcome solve(int depth_cap, int* explored = nullptr) const;

  // Nouns for every non-tabletop location name (puzzle cells, pegs).
  void learn_location_names();

  void set_world(world::WorldState world);
  void set_observer(Observer observer) { observer_ = std::move(observer); }
  void set_expert(ExpertChannel expert) { expert_ = std::move(expert); }
  void set_templates(dialogue::QuestionTemplates t) { templates_ = std::move(t); }
  void set_solve_depth(int depth) { solve_depth_ = depth; }

  const world::WorldState& world() const { return wm_.world; }
  const memory::WorkingMemory& working_memory() const { return wm_; }
  const Knowledge& knowledge() const { return knowledge_; }
  const memory::EpisodicMemory& episodes() const { return epmem_; }
  const dialogue::InteractionStack& stack() const { return stack_; }
  const world::RelationVocabulary& vocabulary() const { return vocab_; }
  const Metrics& metrics() const { return metrics_; }
  const std::vector<dialogue::Message>& transcript() const { return transcript_; }
  const std::optional<games::ProblemSpec>& problem() const { return problem_; }
  const std::optional<std::vector<games::Move>>& last_solution() const { return last_solution_; }
  compile::Library library() const;

  // Verb map id for a verb and role set, without bias bookkeeping.
  std::optional<int> find_map(const std::string& verb, const std::vector<std::string>& roles) const;

 private:
  struct Heard {
    lingo::ParseTree tree;
    std::optional<std::string> pointing;
  };
  using Roles = std::vector<std::pair<std::string, std::string>>;

  void cycle(Capability c);
  void refresh();
  void refresh_vocabulary();
  world::Perception perception() const { return world::Perception(wm_.world, vocab_); }

  void record_utterance(const std::string& speaker, const std::string& text,
                        const std::optional<std::string>& pointing, const std::string& verb);
  void say(const std::string& text);
  Heard ask(const std::string& question);
  dialogue::Segment& push(dialogue::Purpose purpose, dialogue::Context context,
                          dialogue::Originator originator = dialogue::Originator::kLearner);
  void finish_segment();
  void handle_initiative(const Heard& heard, int depth);

  void dispatch(const Heard& heard, Outcome& outcome);
  void teach(const Heard& heard);
  bool perform_command(const lingo::Imperative& command, const std::optional<std::string>& pointing, int depth);
  std::optional<std::pair<int, Roles>> resolve_command(const lingo::Imperative& command,
                                                       const std::optional<std::string>& pointing);
  bool perform_task(int map_id, const Roles& roles, int depth);
  bool apply(world::PrimitiveKind kind, const Roles& roles, const std::string& verb);

  void acquire_goal(int map_id, const task::Bindings& bindings, int depth);
  task::GroundAction acquire_action(int map_id, const task::Bindings& bindings, int depth);
  void compile_task(int map_id, const task::Bindings& bindings, const std::vector<task::GroundAction>& recorded,
                    long start_index, const world::WorldState& start_state);

  std::string ground(const lingo::NounPhrase& np, const std::optional<std::string>& pointing);
  std::string disambiguate(const lingo::NounPhrase& np, const lingo::GroundingError& error);
  std::vector<std::string> constraints(const lingo::NounPhrase& np);
  std::string percept_word(const std::string& word, const std::string& pos);
  std::string relation_word(const std::string& word);
  void acquire_word(const std::string& word, const std::string& pos);
  void learn_percept_from(const std::string& word, const std::string& pos, const std::string& entity);
  void acquire_relation(const std::string& word);

  void acquire_problem_spec(int depth);
  void ensure_verb(const std::string& verb, int depth);
  games::Param spec_param(const lingo::NounPhrase& np);
  games::Condition spec_condition(const lingo::Clause& clause, const std::vector<games::Param>& params,
                                  std::optional<int> current);
  games::SpecTerm spec_term(const lingo::NounPhrase& np, const std::vector<games::Param>& params,
                            std::optional<int> current);
  void report_solution();
  void complain(const std::string& message, int& strikes);
  void abandon_partial_tcns();

  memory::WorkingMemory wm_;
  Knowledge knowledge_;
  lingo::Lexicon lexicon_;
  world::RelationVocabulary vocab_;
  memory::EpisodicMemory epmem_;
  dialogue::InteractionStack stack_;
  dialogue::QuestionTemplates templates_;
  ExpertChannel expert_;
  Observer observer_;
  Metrics metrics_;
  std::vector<dialogue::Message> transcript_;
  std::vector<int> partial_tcns_;
  std::optional<games::ProblemSpec> problem_;
  std::optional<std::vector<games::Move>> last_solution_;
  Outcome* current_ = nullptr;
  int solve_depth_ = 32;
  int lessons_ = 0;
};

}  // namespace itl::learner
