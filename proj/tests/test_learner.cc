#include <deque>
#include <filesystem>
#include <memory>

#include <doctest.h>

#include "support.h"

namespace {

using namespace itl;
using world::PrimitiveAction;

// Replies in order; records every question asked.
struct Script {
  struct State {
    std::deque<learner::ExpertReply> replies;
    std::vector<std::string> questions;
  };
  std::shared_ptr<State> state = std::make_shared<State>();

  Script& reply(std::string text, std::optional<std::string> pointing = std::nullopt) {
    state->replies.push_back({std::move(text), std::move(pointing)});
    return *this;
  }
  learner::ExpertChannel channel() const {
    return [s = state](const std::string& q) {
      s->questions.push_back(q);
      if (s->replies.empty()) throw learner::Aborted("script exhausted at: " + q);
      auto r = s->replies.front();
      s->replies.pop_front();
      return r;
    };
  }
  const std::vector<std::string>& questions() const { return state->questions; }
  bool exhausted() const { return state->replies.empty(); }
};

std::vector<std::string> failures(const std::vector<testing::Trial>& trials) {
  std::vector<std::string> out;
  for (const auto& t : trials) {
    if (!t.ok) out.push_back(t.label + ": " + t.why);
  }
  return out;
}

}  // namespace

TEST_CASE("Learner.StoreTaughtFromScratchOfTasks") {
  Script script;
  script.reply("the goal is the blue cylinder is in the pantry and the pantry is closed")
      .reply("open the pantry")
      .reply("move the blue cylinder to the pantry")
      .reply("the goal is the blue cylinder is in the pantry")
      .reply("pick up the blue cylinder")
      .reply("put the blue cylinder in the pantry")
      .reply("close the pantry");
  learner::Agent agent(testing::scene("default"), testing::preset("O+S"), script.channel());
  agent.learn_location_names();
  auto outcome = agent.hear("store the blue cylinder");
  REQUIRE(outcome.completed);
  REQUIRE(script.exhausted());
  REQUIRE(script.questions() == std::vector<std::string>{
                                    "What is the goal of store?",
                                    "What action should I take?",
                                    "What action should I take?",
                                    "What is the goal of move?",
                                    "What action should I take?",
                                    "What action should I take?",
                                    "What action should I take?",
                                });
  REQUIRE(outcome.primitives.size() == 4);
  const world::Perception p(agent.world(), agent.vocabulary());
  REQUIRE(p.holds({"in", {"obj1", "pantry"}, true}));
  REQUIRE(p.holds({"closed", {"pantry"}, true}));
  REQUIRE(agent.stack().depth() == 1);

  // The next store needs no help.
  auto again = agent.hear("store the green cube");
  REQUIRE(again.completed);
  REQUIRE(again.questions == 0);
  REQUIRE(again.primitives.size() == 4);
}

TEST_CASE("Learner.StopAbandonsTheCommand") {
  Script script;
  script.reply("stop");
  const auto start = testing::scene("default");
  learner::Agent agent(start, testing::preset("O+S"), script.channel());
  auto outcome = agent.hear("store the blue cylinder");
  REQUIRE(outcome.aborted);
  REQUIRE_FALSE(outcome.completed);
  REQUIRE(agent.stack().depth() == 1);
  REQUIRE(agent.world() == start);
  REQUIRE_FALSE(agent.find_map("store", {"direct-object"}));
}

TEST_CASE("Learner.WordsLearnedByPointing") {
  Script script;
  script.reply("this is blue", "obj1").reply("color").reply("this is a cylinder", "obj1").reply("shape");
  learner::Agent agent(testing::scene("default"), testing::preset("null"), script.channel());
  auto outcome = agent.hear("pick up the blue cylinder");
  REQUIRE(outcome.completed);
  REQUIRE(script.questions() == std::vector<std::string>{"What does blue mean?", "What kind of attribute is blue?",
                                                         "What does cylinder mean?",
                                                         "What kind of attribute is cylinder?"});
  REQUIRE(agent.world().gripper() == "obj1");
  REQUIRE(agent.metrics().utterance_count("object-attribute") == 8);

  // A fresh learner with the exported knowledge understands the words.
  learner::Agent next(testing::scene("default"), agent.knowledge(), testing::silent_expert());
  auto quiet = next.hear("pick up the cylinder");
  REQUIRE(quiet.completed);
  REQUIRE(quiet.questions == 0);
}

TEST_CASE("Learner.AmbiguousReferenceAsksWhichOne") {
  Script script;
  script.reply("the red triangle");
  learner::Agent agent(testing::scene("default"), testing::preset("O"), script.channel());
  auto outcome = agent.hear("pick up the large block");
  REQUIRE(outcome.completed);
  REQUIRE(script.questions() == std::vector<std::string>{"Which large block do you mean?"});
  REQUIRE(agent.world().gripper() == "obj2");
}

TEST_CASE("Learner.UnusableRepliesAreRetriedThenAbandoned") {
  Script script;
  script.reply("finished").reply("finished").reply("finished");
  learner::Agent agent(testing::scene("default"), testing::preset("O+S"), script.channel());
  auto outcome = agent.hear("store the blue cylinder");
  REQUIRE_FALSE(outcome.completed);
  REQUIRE(script.questions().size() == 3);
  REQUIRE(agent.stack().depth() == 1);
}

TEST_CASE("Learner.KnowledgeFileRoundTrip") {
  const auto k = testing::preset("O+S+T");
  const auto path = std::filesystem::temp_directory_path() / "itl-roundtrip.knowledge";
  learner::save_knowledge(k, path.string());
  const auto back = learner::load_knowledge(path.string());
  std::filesystem::remove(path);
  REQUIRE(back.smem == k.smem);
  REQUIRE(back.rules == k.rules);
}

TEST_CASE("Learner.MoveGenerality") {
  const auto k = testing::lesson("move").knowledge;
  const auto trials = testing::move_trials(k, true);
  REQUIRE(trials.size() == 32);
  REQUIRE(failures(trials).empty());
}

TEST_CASE("Learner.ShiftGenerality") {
  const auto k = testing::lesson("shift").knowledge;
  const auto trials = testing::shift_trials(k);
  REQUIRE(trials.size() == 64);
  REQUIRE(failures(trials).empty());
}

TEST_CASE("Learner.StoreGenerality") {
  const auto k = testing::lesson("store-OS").knowledge;
  const auto trials = testing::store_trials(k);
  REQUIRE(trials.size() == 16);
  REQUIRE(failures(trials).empty());
}

// Taught with a detour through the pantry, move still runs in two steps.
TEST_CASE("Learner.DetourIsNotLearned") {
  const auto k = testing::lesson("move-detour").knowledge;
  for (const auto& t : testing::move_trials(k, false)) {
    CAPTURE(t.label);
    CAPTURE(t.why);
    REQUIRE(t.ok);
    REQUIRE(t.primitives == 2);
  }
}

TEST_CASE("Learner.StoreIsStateSensitive") {
  const auto k = testing::preset("O+S+T");
  const auto trials = testing::store_trials(k);
  for (const auto& t : trials) {
    CAPTURE(t.label);
    REQUIRE(t.ok);
    const bool open = t.label.find(" open") != std::string::npos;
    const bool held = t.label.find(" held") != std::string::npos;
    REQUIRE(t.opened == !open);
    REQUIRE(t.primitives == 4 - (open ? 1 : 0) - (held ? 1 : 0));
  }
}

TEST_CASE("Learner.MetricsUnderTaskKnowledge") {
  learner::Agent agent(testing::scene("default"), testing::preset("O+S+T"), testing::silent_expert());
  agent.learn_location_names();
  auto outcome = agent.hear("store the blue cylinder");
  REQUIRE(outcome.completed);
  const auto& m = agent.metrics();
  REQUIRE(m.teaching() == 0);
  REQUIRE(m.operator_count(learner::Capability::kTaskAcquisition) == 0);
  REQUIRE(m.operator_count(learner::Capability::kTaskExecution) > 0);
  REQUIRE(m.utterance_count("command") == 1);
  REQUIRE(m.cycles > 0);
}
