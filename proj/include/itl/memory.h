#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itl/perception.h"
#include "itl/world.h"

namespace itl::memory {

enum class NodeKind {
  kMap,
  kLexical,
  kOperator,
  kSlot,
  kGoal,
  kPredicate,
  kConcept,
  kProblemSpace,
  kActionRef,
  kPercept,
  kRelation,
  kComposition,
  kAtom,
  kPrimitive,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view s);

struct Node {
  NodeKind kind = NodeKind::kConcept;
  std::string value;

  bool operator==(const Node&) const = default;
};

struct Edge {
  int from = 0;
  std::string label;
  int to = 0;

  bool operator==(const Edge&) const = default;
};

// A small labeled digraph. Node 0 is the root (a map node for every graph the
// learner builds). Edges keep insertion order, which the learner relies on for
// argument and problem-space ordering.
class ConceptGraph {
 public:
  int add(NodeKind kind, std::string value = "");
  void link(int from, std::string label, int to);
  void unlink(int from, std::string_view label);

  const Node& node(int id) const { return nodes_.at(id); }
  Node& mutable_node(int id) { return nodes_.at(id); }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<int> targets(int from, std::string_view label) const;
  std::optional<int> target(int from, std::string_view label) const;
  std::vector<const Edge*> out_edges(int from) const;

  // Follows a '/'-separated label path from the root; empty path is the root.
  std::optional<int> follow(std::string_view path) const;

  bool operator==(const ConceptGraph&) const = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

struct MalformedGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws MalformedGraph when a map node lacks exactly one lexical edge and
// exactly one referent (operator, referent) edge, or when goal and
// problem-space arguments point at anything other than slots and concepts.
void validate(const ConceptGraph& graph);

// One conjunct of a cue: the node reached by `path` from the root must carry
// `value` (a constant) or merely exist (a variable named `var`).
struct CueTerm {
  std::string path;
  std::optional<std::string> value;
  std::string var;
};

struct Cue {
  std::vector<CueTerm> terms;

  Cue& constant(std::string path, std::string value);
  Cue& variable(std::string path, std::string var);
};

struct Retrieval {
  int id = -1;
  ConceptGraph graph;
  std::map<std::string, int> bindings;
  int completeness = 0;
};

struct GraphMeta {
  long recency = 0;
  int frequency = 0;
};

inline constexpr double kRecencyWeight = 0.5;

class SemanticMemory {
 public:
  int store(ConceptGraph graph);
  void update(int id, ConceptGraph graph);
  void erase(int id);

  // Best match with bias bumping; nullopt is a retrieval failure.
  std::optional<Retrieval> retrieve(const Cue& cue);
  // Same ordering without side effects.
  std::optional<Retrieval> peek(const Cue& cue) const;
  // Every graph matching all constants, best first.
  std::vector<int> matches(const Cue& cue) const;

  bool contains(int id) const { return graphs_.count(id) != 0; }
  const ConceptGraph& get(int id) const { return graphs_.at(id); }
  const GraphMeta& meta(int id) const { return meta_.at(id); }
  std::vector<int> ids() const;
  long clock() const { return clock_; }
  int size() const { return static_cast<int>(graphs_.size()); }

  // Every store/update/erase is appended to the journal when one is set.
  void set_journal(std::ostream* journal) { journal_ = journal; }

  void write(std::ostream& out) const;
  // Replays an append-only journal or a full dump.
  void read(std::istream& in);

  bool operator==(const SemanticMemory& other) const {
    return graphs_ == other.graphs_;
  }

 private:
  std::vector<std::pair<int, int>> ranked(const Cue& cue) const;  // (id, completeness)
  void journal_graph(int id) const;

  std::map<int, ConceptGraph> graphs_;
  std::map<int, GraphMeta> meta_;
  long clock_ = 0;
  int next_id_ = 1;
  std::ostream* journal_ = nullptr;
};

void write_graph(std::ostream& out, int id, const GraphMeta& meta, const ConceptGraph& graph);

struct Event {
  enum class Kind { kUtterance, kAction };
  Kind kind = Kind::kUtterance;
  std::string speaker;  // expert | learner
  std::string text;
  std::string verb;  // imperative verb of an expert command, when any
  std::optional<world::PrimitiveAction> action;

  bool operator==(const Event&) const = default;
};

struct Episode {
  long index = 0;
  world::WorldState snapshot;  // state before the event
  Event event;
};

struct IndexGap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EpisodicMemory {
 public:
  void record(Episode episode);
  long next_index() const { return episodes_.empty() ? 1 : episodes_.back().index + 1; }
  const std::vector<Episode>& episodes() const { return episodes_; }
  std::size_t size() const { return episodes_.size(); }

  const Episode* retrieve(const std::function<bool(const Episode&)>& match) const;
  // Most recent episode whose snapshot satisfies every literal of the cue.
  const Episode* retrieve(const world::PredicateSet& cue, const world::RelationVocabulary& vocab) const;
  // The command episode at which the most recent instance of `verb` began.
  const Episode* task_begin(std::string_view verb) const;

 private:
  std::vector<Episode> episodes_;
};

struct WorkingMemory {
  world::WorldState world;
  world::PredicateSet beliefs;
  std::optional<int> smem_buffer;
  std::optional<long> epmem_buffer;

  void refresh(const world::RelationVocabulary& vocab) { beliefs = world::extract_predicates(world, vocab); }
};

}  // namespace itl::memory
