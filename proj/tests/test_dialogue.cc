#include <doctest.h>

#include "support.h"

namespace {

using namespace itl;
using dialogue::IntegrationOutcome;
using dialogue::InteractionStack;
using dialogue::Purpose;

IntegrationOutcome::Kind reply_to(Purpose purpose, const std::string& text) {
  InteractionStack stack;
  if (purpose != Purpose::kPerformTask) stack.push(purpose, {});
  return dialogue::integrate_reply(stack, lingo::parse(text)).kind;
}

}  // namespace

TEST_CASE("Dialogue.StackDiscipline") {
  InteractionStack stack;
  REQUIRE(stack.depth() == 1);
  REQUIRE(stack.top().purpose == Purpose::kPerformTask);
  REQUIRE_THROWS_AS(stack.pop(), dialogue::PopUnsatisfied);

  auto& goal = stack.push(Purpose::kAcquireGoal, {std::nullopt, "store", "", ""});
  REQUIRE(goal.context.verb == "store");
  stack.push(Purpose::kAcquireWord, {std::nullopt, "", "blue", ""});
  REQUIRE(stack.depth() == 3);
  REQUIRE_THROWS_AS(stack.pop(), dialogue::PopUnsatisfied);
  stack.satisfy_top();
  stack.pop();
  REQUIRE(stack.top().purpose == Purpose::kAcquireGoal);
  stack.push(Purpose::kDisambiguate, {});
  REQUIRE(stack.segments()[1].id < stack.segments()[2].id);
  stack.clear_to_root();
  REQUIRE(stack.depth() == 1);
  stack.satisfy_top();
  REQUIRE_THROWS_AS(stack.pop(), dialogue::PopUnsatisfied);
}

TEST_CASE("Dialogue.QuestionWording") {
  dialogue::ImpasseRecord r;
  r.kind = dialogue::ImpasseKind::kUnknownGoal;
  r.verb = "store";
  REQUIRE(dialogue::generate_question(r) == "What is the goal of store?");
  r.kind = dialogue::ImpasseKind::kNoBehavior;
  REQUIRE(dialogue::generate_question(r) == "What action should I take?");
  r.kind = dialogue::ImpasseKind::kUnknownWord;
  r.word = "blue";
  REQUIRE(dialogue::generate_question(r) == "What does blue mean?");
  r.follow_up = true;
  REQUIRE(dialogue::generate_question(r) == "What kind of attribute is blue?");
  r.kind = dialogue::ImpasseKind::kUnknownRelation;
  r.word = "right-of";
  REQUIRE(dialogue::generate_question(r) == "Can you give me an example of right-of?");

  dialogue::QuestionTemplates custom;
  custom.unknown_goal = "Goal of {verb}, please.";
  r.kind = dialogue::ImpasseKind::kUnknownGoal;
  REQUIRE(dialogue::generate_question(r, custom) == "Goal of store, please.");
}

TEST_CASE("Dialogue.SpecQuestionsVerbatim") {
  using dialogue::SpecQuestion;
  REQUIRE(dialogue::spec_question(SpecQuestion::kVerb) == "What in the name of a verb associated with this action?");
  REQUIRE(dialogue::spec_question(SpecQuestion::kActionParameter) ==
          "What is a parameter for this action? (or finished if done)");
  REQUIRE(dialogue::spec_question(SpecQuestion::kParameterCondition) ==
          "What is a condition for this parameter?(or finished if done)");
  REQUIRE(dialogue::spec_question(SpecQuestion::kGoalCondition) ==
          "What is a condition for this goal? (or finished if done)");
}

TEST_CASE("Dialogue.IntegrateReplyChecksTopPurpose") {
  using K = IntegrationOutcome::Kind;
  REQUIRE(reply_to(Purpose::kAcquireGoal, "the goal is the pantry is closed") == K::kAccept);
  REQUIRE(reply_to(Purpose::kAcquireGoal, "open the pantry") == K::kExpertInitiative);
  REQUIRE(reply_to(Purpose::kAcquireGoal, "finished") == K::kUnexpected);
  REQUIRE(reply_to(Purpose::kAcquireAction, "open the pantry") == K::kAccept);
  REQUIRE(reply_to(Purpose::kAcquireAction, "the pantry is closed") == K::kUnexpected);
  REQUIRE(reply_to(Purpose::kAcquireWord, "color") == K::kAccept);
  REQUIRE(reply_to(Purpose::kAcquireRelation, "the red triangle is right of the blue cylinder") == K::kAccept);
  REQUIRE(reply_to(Purpose::kAcquireRelation, "blue") == K::kUnexpected);
  REQUIRE(reply_to(Purpose::kDisambiguate, "the red one") == K::kAccept);
  REQUIRE(reply_to(Purpose::kAcquireProblemSpec, "finished") == K::kAccept);
  REQUIRE(reply_to(Purpose::kAcquireProblemSpec, "a block") == K::kAccept);
  for (auto p : {Purpose::kAcquireGoal, Purpose::kAcquireAction, Purpose::kAcquireWord, Purpose::kPerformTask}) {
    REQUIRE(reply_to(p, "stop") == K::kAbort);
  }
}

TEST_CASE("Dialogue.UtteranceCategories") {
  REQUIRE(dialogue::utterance_category(Purpose::kAcquireWord) == "object-attribute");
  REQUIRE(dialogue::utterance_category(Purpose::kAcquireRelation) == "spatial-relation");
  REQUIRE(dialogue::utterance_category(Purpose::kAcquireGoal) == "goal");
  REQUIRE(dialogue::utterance_category(Purpose::kAcquireAction) == "action");
  REQUIRE(dialogue::utterance_category(Purpose::kAcquireProblemSpec) == "problem-spec");
  REQUIRE(dialogue::utterance_category(Purpose::kPerformTask) == "command");
}
