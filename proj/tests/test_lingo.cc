#include <fstream>

#include <doctest.h>

#include "support.h"

namespace {

using namespace itl;
using lingo::Form;

struct Utterance {
  std::string form;
  std::string text;
};

std::vector<Utterance> corpus() {
  std::ifstream in(testing::test_data("utterances.txt"));
  REQUIRE(in);
  std::vector<Utterance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto bar = line.find(" | ");
    REQUIRE(bar != std::string::npos);
    out.push_back({line.substr(0, bar), line.substr(bar + 3)});
  }
  return out;
}

std::string grounded(const lingo::Grounding& g) {
  if (const auto* id = std::get_if<std::string>(&g)) return *id;
  return "error: " + std::get<lingo::GroundingError>(g).describe();
}

}  // namespace

TEST_CASE("Lingo.Tokenize") {
  REQUIRE(lingo::tokenize("The goal is X, and Y.") ==
          std::vector<std::string>{"the", "goal", "is", "x", ",", "and", "y"});
  REQUIRE(lingo::tokenize("put it in front of the stove") ==
          std::vector<std::string>{"put", "it", "in-front-of", "the", "stove"});
  REQUIRE(lingo::tokenize("behind right of") == std::vector<std::string>{"behind-right-of"});
}

TEST_CASE("Lingo.CorpusParsesAndRoundTrips") {
  const auto all = corpus();
  REQUIRE(all.size() >= 40);
  for (const auto& u : all) {
    CAPTURE(u.text);
    const auto tree = lingo::parse(u.text);
    REQUIRE(std::string(lingo::to_string(tree.form)) == u.form);
    const std::string text = lingo::pretty(tree);
    REQUIRE(lingo::parse(text) == tree);
    REQUIRE(lingo::pretty(lingo::parse(text)) == text);
  }
}

TEST_CASE("Lingo.Structures") {
  auto t = lingo::parse("pick up the large red triangle");
  REQUIRE(t.command.verb == "pick-up");
  REQUIRE(t.command.object->adjectives == std::vector<std::string>{"large", "red"});
  REQUIRE(t.command.object->noun == "triangle");

  t = lingo::parse("move the red triangle to the garbage");
  REQUIRE(t.command.preps.size() == 1);
  REQUIRE(t.command.preps[0].prep == "to");
  const auto roles = lingo::roles(t.command);
  REQUIRE(roles.size() == 2);
  REQUIRE(roles[0].first == "direct-object");
  REQUIRE(roles[1].first == "to");

  t = lingo::parse("the goal is the blue cylinder is in the pantry, and the pantry is closed");
  REQUIRE(t.clauses.size() == 2);
  REQUIRE(t.clauses[0].kind == lingo::ClauseKind::kRelation);
  REQUIRE(t.clauses[1].kind == lingo::ClauseKind::kAdjective);
  REQUIRE(t.clauses[1].adjective == "closed");

  t = lingo::parse("the block is not larger than a block in 2");
  REQUIRE(t.clauses[0].negated);
  REQUIRE(t.clauses[0].prep == "larger-than");
  REQUIRE(t.clauses[0].object.modifiers.size() == 1);
  REQUIRE(t.clauses[0].object.modifiers[0].object.param == 2);

  t = lingo::parse("the location is not the supply");
  REQUIRE(t.clauses[0].kind == lingo::ClauseKind::kNominal);

  REQUIRE(lingo::parse("new problem").form == Form::kMeta);
  REQUIRE(lingo::placement_relation("to") == "in");
  REQUIRE(lingo::placement_relation("right-of") == "right-of");
  REQUIRE(lingo::surface("turn-on") == "turn on");
}

TEST_CASE("Lingo.ParseErrors") {
  REQUIRE_THROWS_AS(lingo::parse(""), lingo::ParseError);
  REQUIRE_THROWS_AS(lingo::parse("the goal is"), lingo::ParseError);
  REQUIRE_THROWS_AS(lingo::parse("the goal is the cube is red the cube is blue"), lingo::ParseError);
  REQUIRE_THROWS_AS(lingo::parse("move the cube the stove"), lingo::ParseError);
  try {
    lingo::parse("move the cube onto the stove");
    FAIL("expected UnknownWord");
  } catch (const lingo::UnknownWord& e) {
    REQUIRE(e.token == "onto");
    REQUIRE(e.position == 3);
  }
}

TEST_CASE("Lingo.Grounding") {
  auto k = testing::preset("O+S");
  lingo::Lexicon lex(k.smem);
  const auto vocab = lex.vocabulary();
  const auto s = testing::scene("default");
  const world::Perception p(s, vocab);
  auto np = [](const std::string& text) { return lingo::parse(text).np; };

  REQUIRE(grounded(lingo::ground_np(np("the red triangle"), lex, p)) == "obj2");
  REQUIRE(grounded(lingo::ground_np(np("the cylinder"), lex, p)) == "obj1");
  REQUIRE(grounded(lingo::ground_np(np("the pantry"), lex, p)) == "pantry");
  REQUIRE(grounded(lingo::ground_np(np("the large block in front of the yellow sphere"), lex, p)) == "obj2");
  REQUIRE(grounded(lingo::ground_np(np("this"), lex, p, std::string("obj3"))) == "obj3");

  auto ambiguous = lingo::ground_np(np("the large block"), lex, p);
  REQUIRE(std::holds_alternative<lingo::GroundingError>(ambiguous));
  REQUIRE(std::get<lingo::GroundingError>(ambiguous).kind == lingo::GroundingError::Kind::kAmbiguous);
  REQUIRE(std::get<lingo::GroundingError>(ambiguous).candidates == std::vector<std::string>{"obj2", "obj4"});

  auto none = lingo::ground_np(np("the green triangle"), lex, p);
  REQUIRE(std::get<lingo::GroundingError>(none).kind == lingo::GroundingError::Kind::kNoReferent);

  auto unknown = lingo::ground_np(np("the purple cube"), lex, p);
  REQUIRE(std::get<lingo::GroundingError>(unknown).kind == lingo::GroundingError::Kind::kUnknownWord);
  REQUIRE(std::get<lingo::GroundingError>(unknown).word == "purple");
}

TEST_CASE("Lingo.LexiconLearnsWords") {
  auto k = testing::preset("null");
  lingo::Lexicon lex(k.smem);
  REQUIRE_FALSE(lex.knows("blue", "adjective"));
  lex.learn_percept("blue", "adjective", "color-blue");
  REQUIRE(lex.knows("blue", "adjective"));
  auto m = lex.lookup("blue", "adjective");
  REQUIRE(m);
  REQUIRE(m->kind == lingo::Meaning::Kind::kPercept);
  REQUIRE(m->value == "color-blue");

  lex.learn_relation("beside", {"touching", "greater-x"});
  lex.learn_relation("beside", {"touching", "less-x"});
  const auto vocab = lex.vocabulary();
  REQUIRE(vocab.find("beside")->size() == 2);
  REQUIRE(lex.lookup_any("beside")->kind == lingo::Meaning::Kind::kRelation);
}

TEST_CASE("Lingo.IndexVerb") {
  auto k = testing::preset("O+S+T");
  lingo::Lexicon lex(k.smem);
  const auto vocab = lex.vocabulary();
  const auto s = testing::scene("default");
  const world::Perception p(s, vocab);

  auto known = lingo::index_verb(lingo::parse("move the red triangle to the garbage").command, k.smem, lex, p);
  REQUIRE(std::holds_alternative<lingo::GroundedCommand>(known));
  const auto& g = std::get<lingo::GroundedCommand>(known);
  REQUIRE(g.bindings == std::vector<std::pair<std::string, std::string>>{{"direct-object", "obj2"}, {"to", "garbage"}});

  auto unknown = lingo::index_verb(lingo::parse("juggle the red triangle").command, k.smem, lex, p);
  REQUIRE(std::holds_alternative<lingo::UnknownVerb>(unknown));
  REQUIRE(std::get<lingo::UnknownVerb>(unknown).verb == "juggle");
}
