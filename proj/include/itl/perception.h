#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "itl/world.h"

namespace itl::world {

// A ground or pattern literal: name(arg, ...), optionally negated.
struct Predicate {
  std::string name;
  std::vector<std::string> args;
  bool positive = true;

  Predicate negated() const { return {name, args, !positive}; }
  Predicate as_positive() const { return {name, args, true}; }

  // "in(obj1,pantry)", "!closed(pantry)", "gripper-empty()"
  std::string to_string() const;
  static std::optional<Predicate> parse(std::string_view text);

  auto operator<=>(const Predicate&) const = default;
  bool operator==(const Predicate&) const = default;
};

using PredicateSet = std::set<Predicate>;

std::string to_string(const PredicateSet& preds);

// Per-pair primitive names produced by the extractor.
inline constexpr std::string_view kAxisNames = "xyz";
std::vector<std::string> primitive_atom_names();
bool is_primitive_atom(std::string_view name);
bool is_state_predicate(std::string_view name);
bool is_percept(std::string_view name);

inline constexpr int kNearBand = 10;  // cm of clearance still counted as near

// Composed binary relations, each a disjunction of conjunctions of primitive
// atoms over the same ordered pair. Learned relations start with a single
// alternative; further positive examples that do not match add alternatives.
class RelationVocabulary {
 public:
  using Alternative = std::vector<std::string>;

  // Returns false when an equal alternative was already present.
  bool add(const std::string& relation, Alternative atoms);
  bool contains(std::string_view relation) const;
  const std::vector<Alternative>* find(std::string_view relation) const;
  const std::map<std::string, std::vector<Alternative>, std::less<>>& relations() const { return defs_; }
  bool empty() const { return defs_.empty(); }

  bool operator==(const RelationVocabulary&) const = default;

 private:
  std::map<std::string, std::vector<Alternative>, std::less<>> defs_;
};

// The spatial-visual analog: answers literal queries lazily against geometry,
// or enumerates the full predicate set. Both routes share the atom tests.
class Perception {
 public:
  Perception(const WorldState& state, const RelationVocabulary& vocab);

  const WorldState& state() const { return *state_; }
  const RelationVocabulary& vocabulary() const { return *vocab_; }

  // Truth of the literal, respecting polarity. Unknown names are false
  // (so their negation is true).
  bool holds(const Predicate& literal) const;
  bool holds_atom(std::string_view name, const std::vector<std::string>& args) const;

  // Every primitive atom true for the ordered pair (a, b), sorted.
  std::vector<std::string> pair_atoms(std::string_view a, std::string_view b) const;

  // Unary perceptual symbols of an entity (object/location, color-*, name-*).
  std::vector<std::string> percepts(std::string_view entity) const;

  std::vector<std::string> entities() const;

  PredicateSet extract() const;

 private:
  const world::Box* bounds(std::string_view entity) const;
  bool relation_holds(const std::vector<RelationVocabulary::Alternative>& alts, const Box& a,
                      const Box& b) const;

  const WorldState* state_;
  const RelationVocabulary* vocab_;
};

PredicateSet extract_predicates(const WorldState& state, const RelationVocabulary& vocab);

// Duplicate-detection key: the state's predicate set in a packed canonical
// form. Equal for two states iff their extracted predicate sets are equal
// (given the same entity inventory).
using StateKey = std::vector<std::uint64_t>;
StateKey canonical_key(const WorldState& state, const RelationVocabulary& vocab);

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const noexcept;
};

}  // namespace itl::world
