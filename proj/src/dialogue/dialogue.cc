#include "itl/dialogue.h"

namespace itl::dialogue {

namespace {

std::string fill(std::string text, std::string_view key, const std::string& value) {
  const std::string marker = "{" + std::string(key) + "}";
  for (auto at = text.find(marker); at != std::string::npos; at = text.find(marker, at + value.size())) {
    text.replace(at, marker.size(), value);
  }
  return text;
}

}  // namespace

std::string_view to_string(Purpose p) {
  switch (p) {
    case Purpose::kPerformTask: return "perform-task";
    case Purpose::kAcquireGoal: return "acquire-goal";
    case Purpose::kAcquireAction: return "acquire-action";
    case Purpose::kAcquireWord: return "acquire-word";
    case Purpose::kAcquireRelation: return "acquire-relation";
    case Purpose::kAcquireProblemSpec: return "acquire-problem-spec";
    case Purpose::kDisambiguate: return "disambiguate";
  }
  return "?";
}

std::string_view utterance_category(Purpose p) {
  switch (p) {
    case Purpose::kPerformTask: return "command";
    case Purpose::kAcquireGoal: return "goal";
    case Purpose::kAcquireAction: return "action";
    case Purpose::kAcquireWord:
    case Purpose::kDisambiguate: return "object-attribute";
    case Purpose::kAcquireRelation: return "spatial-relation";
    case Purpose::kAcquireProblemSpec: return "problem-spec";
  }
  return "command";
}

InteractionStack::InteractionStack() {
  segments_.push_back(Segment{0, Purpose::kPerformTask, {}, Originator::kExpert, false});
}

Segment& InteractionStack::push(Purpose purpose, Context context, Originator originator) {
  segments_.push_back(Segment{next_id_++, purpose, std::move(context), originator, false});
  return segments_.back();
}

void InteractionStack::pop() {
  if (segments_.size() == 1) throw PopUnsatisfied("the root perform-task segment cannot be popped");
  if (!segments_.back().satisfied) {
    throw PopUnsatisfied(std::string("segment ") + std::string(to_string(segments_.back().purpose)) +
                         " popped before its purpose was satisfied");
  }
  segments_.pop_back();
}

void InteractionStack::clear_to_root() { segments_.resize(1); }

std::string_view to_string(ImpasseKind k) {
  switch (k) {
    case ImpasseKind::kUnknownVerb: return "unknown-verb";
    case ImpasseKind::kUnknownGoal: return "unknown-goal";
    case ImpasseKind::kNoBehavior: return "no-behavior";
    case ImpasseKind::kUnknownWord: return "unknown-word";
    case ImpasseKind::kUnresolvableRe: return "unresolvable-re";
    case ImpasseKind::kUnknownRelation: return "unknown-relation";
  }
  return "?";
}

std::string generate_question(const ImpasseRecord& impasse, const QuestionTemplates& t) {
  switch (impasse.kind) {
    case ImpasseKind::kUnknownVerb: return fill(t.unknown_verb, "verb", impasse.verb);
    case ImpasseKind::kUnknownGoal: return fill(t.unknown_goal, "verb", impasse.verb);
    case ImpasseKind::kNoBehavior: return t.no_behavior;
    case ImpasseKind::kUnknownWord:
      return fill(impasse.follow_up ? t.attribute_kind : t.unknown_word, "word", impasse.word);
    case ImpasseKind::kUnresolvableRe: return fill(impasse.ambiguous ? t.ambiguous : t.no_referent, "np", impasse.np);
    case ImpasseKind::kUnknownRelation: return fill(t.unknown_relation, "word", impasse.word);
  }
  return "";
}

std::string spec_question(SpecQuestion q) {
  switch (q) {
    case SpecQuestion::kVerb: return "What in the name of a verb associated with this action?";
    case SpecQuestion::kActionParameter: return "What is a parameter for this action? (or finished if done)";
    case SpecQuestion::kParameterCondition: return "What is a condition for this parameter?(or finished if done)";
    case SpecQuestion::kGoalParameter: return "What is a parameter for this goal? (or finished if done)";
    case SpecQuestion::kGoalCondition: return "What is a condition for this goal? (or finished if done)";
    case SpecQuestion::kAnotherGoal: return "Is there another goal? (or finished if done)";
  }
  return "";
}

IntegrationOutcome integrate_reply(const InteractionStack& stack, const lingo::ParseTree& reply) {
  using lingo::Form;
  using lingo::TeachingKind;
  using K = IntegrationOutcome::Kind;
  if (reply.form == Form::kMeta && reply.word == "stop") return {K::kAbort, ""};
  const Purpose purpose = stack.top().purpose;
  switch (purpose) {
    case Purpose::kPerformTask:
      if (reply.form == Form::kImperative || reply.form == Form::kTeaching || reply.form == Form::kMeta) {
        return {K::kAccept, ""};
      }
      return {K::kUnexpected, "a command"};
    case Purpose::kAcquireGoal:
      if (reply.form == Form::kGoal) return {K::kAccept, ""};
      if (reply.form == Form::kImperative) return {K::kExpertInitiative, ""};
      return {K::kUnexpected, "a goal description"};
    case Purpose::kAcquireAction:
      if (reply.form == Form::kImperative) return {K::kAccept, ""};
      return {K::kUnexpected, "an action"};
    case Purpose::kAcquireWord:
      if (reply.form == Form::kTeaching) return {K::kAccept, ""};
      if (reply.form == Form::kImperative) return {K::kExpertInitiative, ""};
      return {K::kUnexpected, "a description"};
    case Purpose::kAcquireRelation:
      if (reply.form == Form::kTeaching && reply.teaching == TeachingKind::kClause) return {K::kAccept, ""};
      if (reply.form == Form::kImperative) return {K::kExpertInitiative, ""};
      return {K::kUnexpected, "an example sentence"};
    case Purpose::kDisambiguate:
      if (reply.form == Form::kTeaching && reply.teaching != TeachingKind::kWord) return {K::kAccept, ""};
      if (reply.form == Form::kImperative) return {K::kExpertInitiative, ""};
      return {K::kUnexpected, "a description of the object"};
    case Purpose::kAcquireProblemSpec:
      if (reply.form == Form::kTeaching || reply.form == Form::kMeta) return {K::kAccept, ""};
      if (reply.form == Form::kImperative) return {K::kExpertInitiative, ""};
      return {K::kUnexpected, "a problem description"};
  }
  return {K::kUnexpected, ""};
}

}  // namespace itl::dialogue
