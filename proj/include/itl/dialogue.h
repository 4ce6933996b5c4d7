#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itl/lingo.h"

namespace itl::dialogue {

enum class Purpose {
  kPerformTask,
  kAcquireGoal,
  kAcquireAction,
  kAcquireWord,
  kAcquireRelation,
  kAcquireProblemSpec,
  kDisambiguate,
};

std::string_view to_string(Purpose p);

// Teaching category of utterances exchanged under a purpose: object-attribute,
// spatial-relation, goal, action, problem-spec; "command" for perform-task.
std::string_view utterance_category(Purpose p);

enum class Originator { kLearner, kExpert };

// Links from a segment into the learner's state: the semantic-memory id of
// the partial tCN, the verb being performed, the word being learned.
struct Context {
  std::optional<int> tcn;
  std::string verb;
  std::string word;
  std::string detail;
};

struct Segment {
  int id = 0;
  Purpose purpose = Purpose::kPerformTask;
  Context context;
  Originator originator = Originator::kLearner;
  bool satisfied = false;
};

struct PopUnsatisfied : std::logic_error {
  using std::logic_error::logic_error;
};

// Never empty: the root perform-task segment lives for the whole session.
class InteractionStack {
 public:
  InteractionStack();

  Segment& push(Purpose purpose, Context context, Originator originator = Originator::kLearner);
  // Pops the top; it must be satisfied and must not be the root.
  void pop();
  void satisfy_top() { segments_.back().satisfied = true; }
  // Drops everything above the root.
  void clear_to_root();

  const Segment& top() const { return segments_.back(); }
  Segment& top() { return segments_.back(); }
  std::size_t depth() const { return segments_.size(); }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Segment> segments_;
  int next_id_ = 1;
};

enum class ImpasseKind { kUnknownVerb, kUnknownGoal, kNoBehavior, kUnknownWord, kUnresolvableRe, kUnknownRelation };

std::string_view to_string(ImpasseKind k);

struct ImpasseRecord {
  ImpasseKind kind = ImpasseKind::kNoBehavior;
  std::string verb;
  std::string word;
  std::string np;
  bool ambiguous = false;  // unresolvable RE: several candidates rather than none
  bool follow_up = false;  // unknown word: asking for the attribute kind
  Context context;
};

// Question wording, kept in one place so transcripts stay stable.
struct QuestionTemplates {
  std::string unknown_goal = "What is the goal of {verb}?";
  std::string no_behavior = "What action should I take?";
  std::string unknown_word = "What does {word} mean?";
  std::string attribute_kind = "What kind of attribute is {word}?";
  std::string unknown_relation = "Can you give me an example of {word}?";
  std::string ambiguous = "Which {np} do you mean?";
  std::string no_referent = "I cannot find {np}. Which one do you mean?";
  std::string unknown_verb = "I do not know how to {verb}. Can you show me an example?";
};

std::string generate_question(const ImpasseRecord& impasse, const QuestionTemplates& templates = {});

// Problem-spec protocol questions, reproduced verbatim.
enum class SpecQuestion { kVerb, kActionParameter, kParameterCondition, kGoalParameter, kGoalCondition, kAnotherGoal };

std::string spec_question(SpecQuestion q);

struct IntegrationOutcome {
  enum class Kind { kAccept, kExpertInitiative, kAbort, kUnexpected };
  Kind kind = Kind::kAccept;
  std::string expected;  // description of the acceptable forms when unexpected
};

// Checks the reply against the purpose of the top segment only.
IntegrationOutcome integrate_reply(const InteractionStack& stack, const lingo::ParseTree& reply);

// The wire message shared by harness, service and UI.
struct Message {
  std::string speaker;  // expert | learner
  std::string text;
  std::optional<std::string> pointing;
  long seq = 0;

  bool operator==(const Message&) const = default;
};

}  // namespace itl::dialogue
