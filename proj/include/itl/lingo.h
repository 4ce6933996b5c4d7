#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "itl/memory.h"
#include "itl/perception.h"

namespace itl::lingo {

struct PrepPhrase;

struct NounPhrase {
  std::string determiner;  // the, a, this; empty for parameter references
  std::vector<std::string> adjectives;
  std::string noun;  // empty for a bare "this"
  std::optional<int> param;
  std::vector<PrepPhrase> modifiers;
};

struct PrepPhrase {
  std::string prep;
  NounPhrase object;
};

bool operator==(const NounPhrase& a, const NounPhrase& b);
bool operator==(const PrepPhrase& a, const PrepPhrase& b);

enum class ClauseKind { kAdjective, kRelation, kNominal };

struct Clause {
  NounPhrase subject;
  bool negated = false;
  ClauseKind kind = ClauseKind::kAdjective;
  std::string adjective;
  std::string prep;
  NounPhrase object;

  bool operator==(const Clause&) const = default;
};

struct Imperative {
  std::string verb;  // particles joined: pick-up, turn-on
  std::optional<NounPhrase> object;
  std::vector<PrepPhrase> preps;

  bool operator==(const Imperative&) const = default;
};

enum class Form { kImperative, kGoal, kTeaching, kMeta };
enum class TeachingKind { kClause, kNounPhrase, kWord };

std::string_view to_string(Form form);

struct ParseTree {
  Form form = Form::kMeta;
  TeachingKind teaching = TeachingKind::kWord;
  Imperative command;
  std::vector<Clause> clauses;
  NounPhrase np;
  std::string word;  // bare teaching word or meta keyword

  bool operator==(const ParseTree&) const = default;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position(position) {}
  std::size_t position;  // token index
};

// A token in a slot reserved for a closed class (prepositions) that is not a
// member of it.
struct UnknownWord : ParseError {
  UnknownWord(std::string token, std::size_t position)
      : ParseError("unknown word '" + token + "'", position), token(std::move(token)) {}
  std::string token;
};

bool is_preposition(std::string_view word);
bool is_determiner(std::string_view word);
bool is_meta(std::string_view phrase);
const std::vector<std::string>& prepositions();

std::vector<std::string> tokenize(std::string_view text);
ParseTree parse(std::string_view text);
std::string pretty(const ParseTree& tree);
std::string pretty(const NounPhrase& np);
std::string pretty(const Clause& clause);
std::string pretty(const Imperative& command);
// "pick-up" -> "pick up", "next-to" -> "next to"
std::string surface(std::string_view joined);

// Relation written into action references for a preposition role:
// directional "to" places things in the destination.
std::string placement_relation(std::string_view prep);

// What a content word denotes once a map for it exists.
struct Meaning {
  enum class Kind { kPercept, kRelation, kVerb };
  Kind kind = Kind::kPercept;
  std::string value;  // percept name, relation name, or verb
  int graph_id = -1;
};

// Word maps stored in semantic memory. Every lookup is a cue-based retrieval
// with the usual bias bookkeeping.
class Lexicon {
 public:
  explicit Lexicon(memory::SemanticMemory& smem) : smem_(&smem) {}

  std::optional<Meaning> lookup(std::string_view word, std::string_view pos);
  std::optional<Meaning> lookup_any(std::string_view word);
  bool knows(std::string_view word, std::string_view pos) const;

  // Adjectives and nouns map to unary percept or state names.
  int learn_percept(const std::string& word, const std::string& pos, const std::string& percept);
  // Adds one alternative (a conjunction of primitive atoms) to a relation.
  int learn_relation(const std::string& word, std::vector<std::string> atoms);

  world::RelationVocabulary vocabulary() const;

 private:
  memory::SemanticMemory* smem_;
};

struct GroundingError {
  enum class Kind { kUnknownWord, kUnknownRelation, kNoReferent, kAmbiguous, kNotGroundable };
  Kind kind = Kind::kNoReferent;
  std::string word;
  std::vector<std::string> candidates;

  std::string describe() const;
};

using Grounding = std::variant<std::string, GroundingError>;

// Unary predicate names an NP constrains its referent by, or the first
// unknown word.
std::variant<std::vector<std::string>, GroundingError> np_constraints(const NounPhrase& np, Lexicon& lex);

// Scene entities satisfying every constraint of the NP (relation modifiers
// included), in scene order.
std::variant<std::vector<std::string>, GroundingError> candidates(const NounPhrase& np, Lexicon& lex,
                                                                  const world::Perception& perception,
                                                                  const std::optional<std::string>& pointing);

Grounding ground_np(const NounPhrase& np, Lexicon& lex, const world::Perception& perception,
                    const std::optional<std::string>& pointing = std::nullopt);

// Literal for a clause once both sides are grounded (adjective and relation
// forms); nominal clauses have none.
std::optional<world::Predicate> clause_literal(const Clause& clause, Lexicon& lex, const std::string& subject,
                                               const std::string& object);

// Cue built from the surface argument structure of a command.
memory::Cue verb_cue(const Imperative& command);

struct GroundedCommand {
  int map_id = -1;
  memory::ConceptGraph map;
  std::vector<std::pair<std::string, std::string>> bindings;  // role -> entity
};

struct UnknownVerb {
  std::string verb;
};

using Indexed = std::variant<GroundedCommand, UnknownVerb, GroundingError>;

Indexed index_verb(const Imperative& command, memory::SemanticMemory& smem, Lexicon& lex,
                   const world::Perception& perception, const std::optional<std::string>& pointing = std::nullopt);

// Surface roles of a command in order: "direct-object", then each preposition.
std::vector<std::pair<std::string, const NounPhrase*>> roles(const Imperative& command);

}  // namespace itl::lingo
