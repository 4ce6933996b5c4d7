#include "itl/perception.h"

#include <algorithm>
#include <functional>

namespace itl::world {

namespace {

constexpr std::array<std::string_view, 5> kAxisRelations = {"greater", "less", "overlap", "within",
                                                            "wider"};
constexpr std::array<std::string_view, 3> kDistanceBands = {"touching", "near", "far"};
constexpr std::array<std::string_view, 6> kStateNames = {"open",    "closed",  "on",
                                                         "off",     "holding", "gripper-empty"};

bool axis_atom(int rel, int axis, const Box& a, const Box& b) {
  switch (rel) {
    case 0: return a.lo(axis) >= b.hi(axis);
    case 1: return a.hi(axis) <= b.lo(axis);
    case 2: return std::min(a.hi(axis), b.hi(axis)) > std::max(a.lo(axis), b.lo(axis));
    case 3: return b.lo(axis) <= a.lo(axis) && a.hi(axis) <= b.hi(axis);
    case 4: return a.extent(axis) > b.extent(axis);
  }
  return false;
}

int gap(const Box& a, const Box& b) {
  int g = 0;
  for (int axis = 0; axis < 3; ++axis) {
    g = std::max({g, a.lo(axis) - b.hi(axis), b.lo(axis) - a.hi(axis)});
  }
  return g;
}

int distance_band(const Box& a, const Box& b) {
  const int g = gap(a, b);
  return g == 0 ? 0 : g <= kNearBand ? 1 : 2;
}

// Parses "greater-x" style names into (relation, axis); distance bands map to
// relation -1 with axis = band index.
std::optional<std::pair<int, int>> decode_atom(std::string_view name) {
  for (int band = 0; band < 3; ++band) {
    if (name == kDistanceBands[band]) return std::pair{-1, band};
  }
  if (name.size() < 3 || name[name.size() - 2] != '-') return std::nullopt;
  const auto axis = kAxisNames.find(name.back());
  if (axis == std::string_view::npos) return std::nullopt;
  const auto stem = name.substr(0, name.size() - 2);
  for (int rel = 0; rel < 5; ++rel) {
    if (stem == kAxisRelations[rel]) return std::pair{rel, static_cast<int>(axis)};
  }
  return std::nullopt;
}

bool atom_true(const std::pair<int, int>& code, const Box& a, const Box& b) {
  if (code.first < 0) return distance_band(a, b) == code.second;
  return axis_atom(code.first, code.second, a, b);
}

std::vector<std::string> object_percepts(const SceneObject& o) {
  return {"object", "color-" + std::string(to_string(o.color)),
          "shape-" + std::string(to_string(o.shape)), "size-" + std::string(to_string(o.size))};
}

}  // namespace

std::string Predicate::to_string() const {
  std::string out = positive ? "" : "!";
  out += name;
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += args[i];
  }
  out += ')';
  return out;
}

std::optional<Predicate> Predicate::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  Predicate p;
  if (!text.empty() && text.front() == '!') {
    p.positive = false;
    text.remove_prefix(1);
  }
  const auto open = text.find('(');
  if (open == std::string_view::npos || open == 0 || text.back() != ')') return std::nullopt;
  p.name = std::string(text.substr(0, open));
  std::string_view inner = text.substr(open + 1, text.size() - open - 2);
  std::string cur;
  for (char c : inner) {
    if (c == ',') {
      if (cur.empty()) return std::nullopt;
      p.args.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) p.args.push_back(cur);
  else if (!inner.empty()) return std::nullopt;
  return p;
}

std::string to_string(const PredicateSet& preds) {
  std::string out;
  for (const auto& p : preds) {
    if (!out.empty()) out += ' ';
    out += p.to_string();
  }
  return out;
}

std::vector<std::string> primitive_atom_names() {
  std::vector<std::string> out;
  for (auto rel : kAxisRelations) {
    for (char axis : kAxisNames) out.push_back(std::string(rel) + "-" + axis);
  }
  for (auto band : kDistanceBands) out.emplace_back(band);
  return out;
}

bool is_primitive_atom(std::string_view name) { return decode_atom(name).has_value(); }

bool is_state_predicate(std::string_view name) {
  return std::find(kStateNames.begin(), kStateNames.end(), name) != kStateNames.end();
}

bool is_percept(std::string_view name) {
  return name == "object" || name == "location" || name.starts_with("color-") ||
         name.starts_with("shape-") || name.starts_with("size-") || name.starts_with("name-");
}

bool RelationVocabulary::add(const std::string& relation, Alternative atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  auto& alts = defs_[relation];
  if (std::find(alts.begin(), alts.end(), atoms) != alts.end()) return false;
  alts.push_back(std::move(atoms));
  return true;
}

bool RelationVocabulary::contains(std::string_view relation) const { return defs_.find(relation) != defs_.end(); }

const std::vector<RelationVocabulary::Alternative>* RelationVocabulary::find(std::string_view relation) const {
  auto it = defs_.find(relation);
  return it == defs_.end() ? nullptr : &it->second;
}

Perception::Perception(const WorldState& state, const RelationVocabulary& vocab)
    : state_(&state), vocab_(&vocab) {}

const Box* Perception::bounds(std::string_view entity) const {
  if (const auto* o = state_->find_object(entity)) return &o->bounds;
  if (const auto* l = state_->find_location(entity)) return &l->region;
  return nullptr;
}

bool Perception::relation_holds(const std::vector<RelationVocabulary::Alternative>& alts,
                                const Box& a, const Box& b) const {
  for (const auto& alt : alts) {
    bool all = true;
    for (const auto& atom : alt) {
      auto code = decode_atom(atom);
      if (!code || !atom_true(*code, a, b)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool Perception::holds(const Predicate& literal) const {
  return holds_atom(literal.name, literal.args) == literal.positive;
}

bool Perception::holds_atom(std::string_view name, const std::vector<std::string>& args) const {
  if (args.size() == 2) {
    if (args[0] == args[1]) return false;
    const Box* a = bounds(args[0]);
    const Box* b = bounds(args[1]);
    if (a == nullptr || b == nullptr) return false;
    if (auto code = decode_atom(name)) return atom_true(*code, *a, *b);
    if (const auto* alts = vocab_->find(name)) return relation_holds(*alts, *a, *b);
    return false;
  }
  if (args.empty()) return name == "gripper-empty" && !state_->gripper();
  if (args.size() != 1) return false;
  const std::string& e = args[0];
  if (name == "holding") return state_->gripper() && *state_->gripper() == e;
  if (const auto* loc = state_->find_location(e)) {
    if (name == "location") return true;
    if (name == "open") return loc->openable && loc->open;
    if (name == "closed") return loc->openable && !loc->open;
    if (name == "on") return loc->powered && loc->on;
    if (name == "off") return loc->powered && !loc->on;
    if (name == "empty") {
      return std::none_of(state_->objects().begin(), state_->objects().end(), [&](const SceneObject& o) {
        return loc->region.contains(o.bounds);
      });
    }
    return name.starts_with("name-") && name.substr(5) == loc->name;
  }
  if (const auto* obj = state_->find_object(e)) {
    auto p = object_percepts(*obj);
    return std::find(p.begin(), p.end(), name) != p.end();
  }
  return false;
}

std::vector<std::string> Perception::pair_atoms(std::string_view a, std::string_view b) const {
  std::vector<std::string> out;
  const Box* ba = bounds(a);
  const Box* bb = bounds(b);
  if (ba == nullptr || bb == nullptr || a == b) return out;
  for (const auto& name : primitive_atom_names()) {
    if (atom_true(*decode_atom(name), *ba, *bb)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Perception::percepts(std::string_view entity) const {
  if (const auto* obj = state_->find_object(entity)) return object_percepts(*obj);
  if (const auto* loc = state_->find_location(entity)) return {"location", "name-" + loc->name};
  return {};
}

std::vector<std::string> Perception::entities() const {
  std::vector<std::string> out;
  for (const auto& o : state_->objects()) out.push_back(o.id);
  for (const auto& l : state_->locations()) out.push_back(l.name);
  return out;
}

namespace {

// Shared enumeration behind extract() and canonical_key(): calls
// emit(name_index, name, a, b) for every true predicate, with entity indexes
// (-1 for absent arguments). Name indexes are stable for a fixed vocabulary.
template <typename Emit>
void enumerate(const WorldState& state, const RelationVocabulary& vocab, Emit&& emit) {
  std::vector<const Box*> boxes;
  std::vector<std::string_view> ids;
  for (const auto& o : state.objects()) {
    boxes.push_back(&o.bounds);
    ids.push_back(o.id);
  }
  const int n_objects = static_cast<int>(ids.size());
  for (const auto& l : state.locations()) {
    boxes.push_back(&l.region);
    ids.push_back(l.name);
  }
  const int n = static_cast<int>(ids.size());

  // Unary percepts and state flags. Indexes 0..31 are fixed names.
  for (int i = 0; i < n_objects; ++i) {
    const auto& o = state.objects()[i];
    emit(0, "object", i, -1);
    emit(1 + static_cast<int>(o.color), "color-" + std::string(to_string(o.color)), i, -1);
    emit(5 + static_cast<int>(o.shape), "shape-" + std::string(to_string(o.shape)), i, -1);
    emit(9 + static_cast<int>(o.size), "size-" + std::string(to_string(o.size)), i, -1);
    if (state.gripper() && *state.gripper() == o.id) emit(11, "holding", i, -1);
  }
  if (!state.gripper()) emit(12, "gripper-empty", -1, -1);
  for (int i = n_objects; i < n; ++i) {
    const auto& l = state.locations()[i - n_objects];
    emit(13, "location", i, -1);
    emit(14, "name-" + l.name, i, -1);
    if (l.openable) emit(l.open ? 15 : 16, l.open ? "open" : "closed", i, -1);
    if (l.powered) emit(l.on ? 17 : 18, l.on ? "on" : "off", i, -1);
  }

  // Binary atoms: 32 + 3*rel + axis for axis atoms, 47..49 distance bands,
  // 64+ for composed relations in vocabulary order.
  std::vector<std::pair<const std::string*, std::vector<std::vector<std::pair<int, int>>>>> rels;
  for (const auto& [name, alts] : vocab.relations()) {
    std::vector<std::vector<std::pair<int, int>>> decoded;
    for (const auto& alt : alts) {
      std::vector<std::pair<int, int>> codes;
      bool valid = true;
      for (const auto& atom : alt) {
        auto code = decode_atom(atom);
        if (!code) {
          valid = false;
          break;
        }
        codes.push_back(*code);
      }
      if (valid) decoded.push_back(std::move(codes));
    }
    rels.emplace_back(&name, std::move(decoded));
  }
  static const std::vector<std::string> atom_names = primitive_atom_names();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Box& a = *boxes[i];
      const Box& b = *boxes[j];
      bool axis_truth[5][3];
      for (int rel = 0; rel < 5; ++rel) {
        for (int axis = 0; axis < 3; ++axis) {
          axis_truth[rel][axis] = axis_atom(rel, axis, a, b);
          if (axis_truth[rel][axis]) emit(32 + 3 * rel + axis, atom_names[3 * rel + axis], i, j);
        }
      }
      const int band = distance_band(a, b);
      emit(47 + band, atom_names[15 + band], i, j);
      for (std::size_t r = 0; r < rels.size(); ++r) {
        for (const auto& alt : rels[r].second) {
          bool all = true;
          for (const auto& [rel, axis] : alt) {
            const bool t = rel < 0 ? band == axis : axis_truth[rel][axis];
            if (!t) {
              all = false;
              break;
            }
          }
          if (all) {
            emit(64 + static_cast<int>(r), *rels[r].first, i, j);
            break;
          }
        }
      }
    }
  }
  (void)ids;
}

}  // namespace

PredicateSet Perception::extract() const {
  PredicateSet out;
  const auto ids = entities();
  enumerate(*state_, *vocab_, [&](int, const std::string& name, int a, int b) {
    Predicate p{name, {}, true};
    if (a >= 0) p.args.push_back(ids[a]);
    if (b >= 0) p.args.push_back(ids[b]);
    out.insert(std::move(p));
  });
  return out;
}

PredicateSet extract_predicates(const WorldState& state, const RelationVocabulary& vocab) {
  return Perception(state, vocab).extract();
}

StateKey canonical_key(const WorldState& state, const RelationVocabulary& vocab) {
  StateKey key;
  key.reserve(512);
  enumerate(state, vocab, [&](int name, const std::string&, int a, int b) {
    key.push_back((static_cast<std::uint64_t>(name) << 32) |
                  (static_cast<std::uint64_t>(a + 1) << 16) | static_cast<std::uint64_t>(b + 1));
  });
  std::sort(key.begin(), key.end());
  return key;
}

std::size_t StateKeyHash::operator()(const StateKey& key) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto v : key) {
    h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace itl::world
