#include <sstream>

#include <doctest.h>

#include "support.h"

namespace {

using namespace itl;
using task::ActionRef;
using task::GroundAction;
using task::Term;

struct Fixture {
  learner::Knowledge k = testing::preset("O+S+T");
  world::RelationVocabulary vocab = testing::vocabulary_of(k);
  compile::Library lib{&k.smem, &k.rules, &vocab};
  world::WorldState s = testing::scene("default");
};

GroundAction move(const std::string& obj, const std::string& loc) {
  return GroundAction{"move", {{"direct-object", obj}, {"to", loc}}};
}

memory::ConceptGraph relocate() {
  auto g = task::bootstrap_tcn("relocate", task::name_slots({{"direct-object", "obj"}, {"to", "loc"}}), "op1");
  task::set_goal(g, {{"in", {Term::slot("obj"), Term::slot("loc")}, true}});
  task::add_action(g, {"open", {{"direct-object", Term::constant("pantry")}}});
  task::add_action(g, {"pick-up", {{"direct-object", Term::slot("obj")}}});
  task::add_action(g, {"put-down", {{"direct-object", Term::slot("obj")}, {"in", Term::slot("loc")}}});
  task::add_action(g, {"close", {{"direct-object", Term::constant("pantry")}}});
  return g;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "Compile.SimulateLeavesInputAlone") {
  const auto before = s;
  const auto smem_before = k.smem;
  std::vector<world::PrimitiveAction> trace;
  auto r = compile::simulate(lib, move("obj2", "garbage"), s, 0, &trace);
  REQUIRE(r.ok());
  REQUIRE(s == before);
  REQUIRE(k.smem == smem_before);
  for (int id : k.smem.ids()) REQUIRE(k.smem.meta(id).frequency == smem_before.meta(id).frequency);
  REQUIRE(trace.size() == 2);
  REQUIRE(trace[0].to_string() == "pick-up(obj2)");
  REQUIRE(trace[1].to_string() == "put-down(in,obj2,garbage)");
  REQUIRE(r->location_of("obj2") == "garbage");
}

TEST_CASE_FIXTURE(Fixture, "Compile.SimulateNestedTask") {
  std::vector<world::PrimitiveAction> trace;
  auto r = compile::simulate(lib, GroundAction{"store", {{"direct-object", "obj1"}}}, s, 0, &trace);
  REQUIRE(r.ok());
  std::vector<std::string> text;
  for (const auto& a : trace) text.push_back(a.to_string());
  REQUIRE(text == std::vector<std::string>{"open(pantry)", "pick-up(obj1)", "put-down(in,obj1,pantry)",
                                           "close(pantry)"});
}

TEST_CASE_FIXTURE(Fixture, "Compile.SimulateReportsFailure") {
  auto r = compile::simulate(lib, GroundAction{"close", {{"direct-object", "pantry"}}}, s);
  REQUIRE_FALSE(r.ok());
  auto unknown = compile::simulate(lib, GroundAction{"juggle", {{"direct-object", "obj1"}}}, s);
  REQUIRE_FALSE(unknown.ok());
}

TEST_CASE_FIXTURE(Fixture, "Compile.SelectFollowsState") {
  const auto tcn = lib.verb_map(move("obj2", "garbage"));
  REQUIRE(tcn);
  const task::Bindings b{{"obj", "obj2"}, {"loc", "garbage"}};
  auto first = compile::select(lib, *tcn, b, world::Perception(s, vocab));
  REQUIRE(first);
  REQUIRE(first->to_string() == "pick-up(obj2)");
  const auto held = testing::apply(s, {world::PrimitiveAction::pick_up("obj2")});
  auto second = compile::select(lib, *tcn, b, world::Perception(held, vocab));
  REQUIRE(second);
  REQUIRE(second->to_string() == "put-down(in,obj2,garbage)");
}

TEST_CASE_FIXTURE(Fixture, "Compile.ModelOfTask") {
  const auto tcn = lib.verb_map(move("obj2", "garbage"));
  const auto m = compile::model_of(lib, *tcn);
  REQUIRE(m.add.size() == 1);
  REQUIRE(m.add[0].to_string() == "in(obj,loc)");
  auto ground = compile::ground_model(lib, move("obj2", "garbage"));
  REQUIRE(ground);
  REQUIRE(ground->add.front().to_string() == "in(obj2,garbage)");
}

// The shortest explanation of an instructed detour drops the superfluous
// open and close.
TEST_CASE_FIXTURE(Fixture, "Compile.ProceduralizeDropsDetour") {
  const auto tcn = relocate();
  const task::Bindings b{{"obj", "obj2"}, {"loc", "garbage"}};
  const std::vector<GroundAction> recorded = {
      {"open", {{"direct-object", "pantry"}}},
      {"pick-up", {{"direct-object", "obj2"}}},
      {"put-down", {{"direct-object", "obj2"}, {"in", "garbage"}}},
      {"close", {{"direct-object", "pantry"}}},
  };
  auto c = compile::proceduralize(lib, tcn, b, s, recorded, "lesson 1");
  REQUIRE(c.proposals.size() == 4);
  REQUIRE(c.path.size() == 2);
  REQUIRE(c.path[0].to_string() == "pick-up(obj2)");
  REQUIRE(c.selections.size() == 2);
  REQUIRE(c.selections[0].op.to_string() == "pick-up(obj)");
  REQUIRE(c.selections[1].op.to_string() == "put-down(in,obj,loc)");
  for (const auto& r : c.selections) {
    REQUIRE(r.task == "relocate");
    REQUIRE(r.provenance == "lesson 1");
    for (const auto& lit : r.conditions) {
      for (const auto& t : lit.args) REQUIRE(t.name != "obj2");
    }
  }
}

TEST_CASE_FIXTURE(Fixture, "Compile.ProceduralizeFailsWithoutPath") {
  auto tcn = task::bootstrap_tcn("relocate", task::name_slots({{"direct-object", "obj"}, {"to", "loc"}}), "op1");
  task::set_goal(tcn, {{"in", {Term::slot("obj"), Term::slot("loc")}, true}});
  task::add_action(tcn, {"open", {{"direct-object", Term::constant("pantry")}}});
  const task::Bindings b{{"obj", "obj2"}, {"loc", "garbage"}};
  REQUIRE_THROWS_AS(compile::proceduralize(lib, tcn, b, s, {{"open", {{"direct-object", "pantry"}}}}, "x"),
                    compile::ProjectionFailure);
}

TEST_CASE("Compile.Simplify") {
  const std::vector<task::Literal> in = {{"open", {Term::constant("pantry")}, true},
                                         {"closed", {Term::constant("pantry")}, false},
                                         {"holding", {Term::slot("obj")}, true}};
  const auto out = compile::simplify(in);
  REQUIRE(out.size() == 2);
}

TEST_CASE_FIXTURE(Fixture, "Compile.RuleBaseRoundTrip") {
  REQUIRE(k.rules.has_behavior("move"));
  REQUIRE(k.rules.has_behavior("store"));
  REQUIRE_FALSE(k.rules.has_behavior("juggle"));
  std::ostringstream out;
  k.rules.write(out);
  compile::RuleBase back;
  std::istringstream in(out.str());
  back.read(in);
  REQUIRE(back == k.rules);

  auto copy = k.rules;
  copy.replace("move", {}, {});
  REQUIRE_FALSE(copy.has_behavior("move"));
  REQUIRE(copy.has_behavior("store"));
}
