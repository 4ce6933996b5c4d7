#include "itl/memory.h"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>

namespace itl::memory {

namespace {

constexpr std::array<std::string_view, 14> kNodeKindNames = {
    "map",    "lexical",       "operator",   "slot",        "goal",    "predicate", "concept",
    "problem-space", "action-ref", "percept", "relation", "composition", "atom", "primitive"};

std::string encode(const std::string& s) {
  if (s.empty()) return "-";
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n') throw MalformedGraph("whitespace in graph token '" + s + "'");
  }
  return s;
}

std::string decode(const std::string& s) { return s == "-" ? "" : s; }

}  // namespace

std::string_view to_string(NodeKind kind) { return kNodeKindNames[static_cast<int>(kind)]; }

std::optional<NodeKind> parse_node_kind(std::string_view s) {
  for (std::size_t i = 0; i < kNodeKindNames.size(); ++i) {
    if (kNodeKindNames[i] == s) return static_cast<NodeKind>(i);
  }
  return std::nullopt;
}

int ConceptGraph::add(NodeKind kind, std::string value) {
  nodes_.push_back(Node{kind, std::move(value)});
  return size() - 1;
}

void ConceptGraph::link(int from, std::string label, int to) {
  if (from < 0 || from >= size() || to < 0 || to >= size()) {
    throw MalformedGraph("edge " + label + " references a missing node");
  }
  edges_.push_back(Edge{from, std::move(label), to});
}

void ConceptGraph::unlink(int from, std::string_view label) {
  std::erase_if(edges_, [&](const Edge& e) { return e.from == from && e.label == label; });
}

std::vector<int> ConceptGraph::targets(int from, std::string_view label) const {
  std::vector<int> out;
  for (const auto& e : edges_) {
    if (e.from == from && e.label == label) out.push_back(e.to);
  }
  return out;
}

std::optional<int> ConceptGraph::target(int from, std::string_view label) const {
  for (const auto& e : edges_) {
    if (e.from == from && e.label == label) return e.to;
  }
  return std::nullopt;
}

std::vector<const Edge*> ConceptGraph::out_edges(int from) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges_) {
    if (e.from == from) out.push_back(&e);
  }
  return out;
}

std::optional<int> ConceptGraph::follow(std::string_view path) const {
  if (nodes_.empty()) return std::nullopt;
  int at = 0;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const auto label = path.substr(0, slash);
    auto next = target(at, label);
    if (!next) return std::nullopt;
    at = *next;
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash + 1);
  }
  return at;
}

void validate(const ConceptGraph& graph) {
  if (graph.empty()) throw MalformedGraph("empty graph");
  auto is_term = [&](int id) {
    const auto kind = graph.node(id).kind;
    return kind == NodeKind::kSlot || kind == NodeKind::kConcept;
  };
  for (int id = 0; id < graph.size(); ++id) {
    const Node& n = graph.node(id);
    if (n.kind == NodeKind::kMap) {
      const auto lex = graph.targets(id, "lexical");
      if (lex.size() != 1 || graph.node(lex[0]).kind != NodeKind::kLexical) {
        throw MalformedGraph("map node " + std::to_string(id) + " needs exactly one lexical node");
      }
      const auto ops = graph.targets(id, "operator");
      const auto refs = graph.targets(id, "referent");
      if (ops.size() + refs.size() != 1) {
        throw MalformedGraph("map node " + std::to_string(id) + " needs exactly one operator or referent");
      }
      if (!ops.empty() && graph.node(ops[0]).kind != NodeKind::kOperator) {
        throw MalformedGraph("map node " + std::to_string(id) + " operator edge to a non-operator");
      }
    }
    if (n.kind == NodeKind::kPredicate || n.kind == NodeKind::kActionRef) {
      for (int arg : graph.targets(id, "arg")) {
        if (!is_term(arg)) {
          throw MalformedGraph(std::string(to_string(n.kind)) + " " + n.value +
                               " has an argument that is neither slot nor concept");
        }
      }
    }
  }
}

Cue& Cue::constant(std::string path, std::string value) {
  terms.push_back(CueTerm{std::move(path), std::move(value), ""});
  return *this;
}

Cue& Cue::variable(std::string path, std::string var) {
  terms.push_back(CueTerm{std::move(path), std::nullopt, std::move(var)});
  return *this;
}

std::vector<std::pair<int, int>> SemanticMemory::ranked(const Cue& cue) const {
  const bool has_constant = std::any_of(cue.terms.begin(), cue.terms.end(),
                                        [](const CueTerm& t) { return t.value.has_value(); });
  if (!has_constant) throw std::invalid_argument("cue needs at least one constant");

  std::vector<std::pair<int, int>> hits;
  for (const auto& [id, graph] : graphs_) {
    int complete = 0;
    bool ok = true;
    for (const auto& term : cue.terms) {
      auto at = graph.follow(term.path);
      if (term.value) {
        if (!at || graph.node(*at).value != *term.value) {
          ok = false;
          break;
        }
        ++complete;
      } else if (at) {
        ++complete;
      }
    }
    if (ok) hits.emplace_back(id, complete);
  }

  // Recency rank among the candidates: 0 for the oldest.
  std::vector<int> by_recency;
  for (const auto& h : hits) by_recency.push_back(h.first);
  std::sort(by_recency.begin(), by_recency.end(),
            [&](int a, int b) { return meta_.at(a).recency < meta_.at(b).recency; });
  std::map<int, double> score;
  for (std::size_t rank = 0; rank < by_recency.size(); ++rank) {
    const int id = by_recency[rank];
    score[id] = meta_.at(id).frequency + kRecencyWeight * static_cast<double>(rank);
  }
  std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (score[a.first] != score[b.first]) return score[a.first] > score[b.first];
    return a.first > b.first;
  });
  return hits;
}

std::optional<Retrieval> SemanticMemory::peek(const Cue& cue) const {
  auto hits = ranked(cue);
  if (hits.empty()) return std::nullopt;
  Retrieval r;
  r.id = hits.front().first;
  r.completeness = hits.front().second;
  r.graph = graphs_.at(r.id);
  for (const auto& term : cue.terms) {
    if (term.var.empty()) continue;
    if (auto at = r.graph.follow(term.path)) r.bindings[term.var] = *at;
  }
  return r;
}

std::optional<Retrieval> SemanticMemory::retrieve(const Cue& cue) {
  auto r = peek(cue);
  if (r) {
    auto& m = meta_.at(r->id);
    ++m.frequency;
    m.recency = ++clock_;
  }
  return r;
}

std::vector<int> SemanticMemory::matches(const Cue& cue) const {
  std::vector<int> out;
  for (const auto& h : ranked(cue)) out.push_back(h.first);
  return out;
}

int SemanticMemory::store(ConceptGraph graph) {
  validate(graph);
  const int id = next_id_++;
  graphs_[id] = std::move(graph);
  meta_[id] = GraphMeta{++clock_, 0};
  journal_graph(id);
  return id;
}

void SemanticMemory::update(int id, ConceptGraph graph) {
  validate(graph);
  if (!contains(id)) throw std::out_of_range("no graph " + std::to_string(id));
  graphs_[id] = std::move(graph);
  meta_[id].recency = ++clock_;
  journal_graph(id);
}

void SemanticMemory::erase(int id) {
  graphs_.erase(id);
  meta_.erase(id);
  if (journal_) *journal_ << "erase " << id << "\n" << std::flush;
}

std::vector<int> SemanticMemory::ids() const {
  std::vector<int> out;
  for (const auto& [id, g] : graphs_) out.push_back(id);
  return out;
}

void SemanticMemory::journal_graph(int id) const {
  if (!journal_) return;
  write_graph(*journal_, id, meta_.at(id), graphs_.at(id));
  journal_->flush();
}

void write_graph(std::ostream& out, int id, const GraphMeta& meta, const ConceptGraph& graph) {
  out << "graph " << id << ' ' << meta.recency << ' ' << meta.frequency << "\n";
  for (const auto& n : graph.nodes()) out << "node " << to_string(n.kind) << ' ' << encode(n.value) << "\n";
  for (const auto& e : graph.edges()) out << "edge " << e.from << ' ' << encode(e.label) << ' ' << e.to << "\n";
  out << "end\n";
}

void SemanticMemory::write(std::ostream& out) const {
  for (const auto& [id, graph] : graphs_) write_graph(out, id, meta_.at(id), graph);
}

void SemanticMemory::read(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<int> current;
  ConceptGraph graph;
  GraphMeta meta;
  auto bad = [&](const std::string& what) {
    return MalformedGraph("knowledge line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word) || word[0] == '#') continue;
    if (word == "graph") {
      if (current) throw bad("nested graph");
      int id;
      if (!(ss >> id >> meta.recency >> meta.frequency)) throw bad("graph header");
      current = id;
      graph = ConceptGraph();
    } else if (word == "node") {
      std::string kind, value;
      if (!current || !(ss >> kind >> value)) throw bad("node outside graph");
      auto k = parse_node_kind(kind);
      if (!k) throw bad("unknown node kind " + kind);
      graph.add(*k, decode(value));
    } else if (word == "edge") {
      int from, to;
      std::string label;
      if (!current || !(ss >> from >> label >> to)) throw bad("edge outside graph");
      graph.link(from, decode(label), to);
    } else if (word == "end") {
      if (!current) throw bad("end without graph");
      try {
        validate(graph);
      } catch (const MalformedGraph& e) {
        throw bad(e.what());
      }
      graphs_[*current] = std::move(graph);
      meta_[*current] = meta;
      clock_ = std::max(clock_, meta.recency);
      next_id_ = std::max(next_id_, *current + 1);
      current.reset();
    } else if (word == "erase") {
      int id;
      if (!(ss >> id)) throw bad("erase id");
      graphs_.erase(id);
      meta_.erase(id);
    } else if (!current) {
      // Other sections of a knowledge file belong to other readers.
      continue;
    } else {
      throw bad("unexpected '" + word + "'");
    }
  }
  if (current) throw bad("unterminated graph");
}

void EpisodicMemory::record(Episode episode) {
  if (episode.index != next_index()) {
    throw IndexGap("episode " + std::to_string(episode.index) + " recorded after " +
                   std::to_string(next_index() - 1));
  }
  episodes_.push_back(std::move(episode));
}

const Episode* EpisodicMemory::retrieve(const std::function<bool(const Episode&)>& match) const {
  for (auto it = episodes_.rbegin(); it != episodes_.rend(); ++it) {
    if (match(*it)) return &*it;
  }
  return nullptr;
}

const Episode* EpisodicMemory::retrieve(const world::PredicateSet& cue,
                                        const world::RelationVocabulary& vocab) const {
  return retrieve([&](const Episode& ep) {
    world::Perception p(ep.snapshot, vocab);
    return std::all_of(cue.begin(), cue.end(), [&](const world::Predicate& lit) { return p.holds(lit); });
  });
}

const Episode* EpisodicMemory::task_begin(std::string_view verb) const {
  return retrieve([&](const Episode& ep) {
    return ep.event.kind == Event::Kind::kUtterance && ep.event.speaker == "expert" && ep.event.verb == verb;
  });
}

}  // namespace itl::memory
