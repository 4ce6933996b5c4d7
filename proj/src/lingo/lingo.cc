#include "itl/lingo.h"

#include <algorithm>
#include <cctype>

namespace itl::lingo {

namespace {

const std::vector<std::string> kPrepositions = {
    "in",          "to",         "from",        "next-to",         "right-of",
    "left-of",     "behind",     "in-front-of", "below",           "above",
    "near",        "larger-than", "smaller-than", "behind-right-of", "behind-left-of",
    "in-front-right-of", "in-front-left-of"};

const std::vector<std::string> kParticles = {"up", "down", "on", "off"};
const std::vector<std::string> kMeta = {"finished", "stop", "yes", "no", "new problem", "solve"};

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_function_word(std::string_view s) {
  return s == "is" || s == "not" || s == "and" || s == "," || is_determiner(s) || is_preposition(s);
}

bool is_content(std::string_view s) {
  if (s.empty() || is_function_word(s) || is_digits(s)) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_'; });
}

class Parser {
 public:
  explicit Parser(std::vector<std::string> tokens) : toks_(std::move(tokens)) {}

  ParseTree run() {
    ParseTree tree;
    if (toks_.empty()) throw ParseError("empty utterance", 0);
    std::string joined;
    for (const auto& t : toks_) joined += (joined.empty() ? "" : " ") + t;
    if (is_meta(joined)) {
      tree.form = Form::kMeta;
      tree.word = joined;
      return tree;
    }
    if (toks_.size() >= 3 && toks_[0] == "the" && toks_[1] == "goal" && toks_[2] == "is") {
      pos_ = 3;
      tree.form = Form::kGoal;
      tree.clauses.push_back(clause());
      while (!done()) {
        bool sep = false;
        if (peek() == ",") {
          ++pos_;
          sep = true;
        }
        if (peek() == "and") {
          ++pos_;
          sep = true;
        }
        if (!sep) throw ParseError("expected ', and' between goal clauses", pos_);
        tree.clauses.push_back(clause());
      }
      return tree;
    }
    const std::string& first = toks_[0];
    if (is_determiner(first) || is_digits(first)) {
      tree.form = Form::kTeaching;
      NounPhrase np = noun_phrase(true);
      if (done()) {
        tree.teaching = TeachingKind::kNounPhrase;
        tree.np = std::move(np);
        return tree;
      }
      tree.teaching = TeachingKind::kClause;
      tree.clauses.push_back(clause_rest(std::move(np)));
      if (!done()) throw ParseError("unexpected '" + peek() + "' after clause", pos_);
      return tree;
    }
    if (!is_content(first)) throw ParseError("unexpected '" + first + "'", 0);
    if (toks_.size() == 1) {
      tree.form = Form::kTeaching;
      tree.teaching = TeachingKind::kWord;
      tree.word = first;
      return tree;
    }
    tree.form = Form::kImperative;
    tree.command = imperative();
    return tree;
  }

 private:
  bool done() const { return pos_ >= toks_.size(); }
  const std::string& peek() const {
    static const std::string kEnd;
    return done() ? kEnd : toks_[pos_];
  }

  Imperative imperative() {
    Imperative cmd;
    cmd.verb = toks_[pos_++];
    if (!done() && contains(kParticles, peek())) cmd.verb += "-" + toks_[pos_++];
    if (!done() && (is_determiner(peek()) || is_digits(peek()))) cmd.object = noun_phrase(false);
    while (!done()) {
      if (!is_preposition(peek())) {
        if (is_content(peek())) throw UnknownWord(peek(), pos_);
        // "the cube onto the stove": the unknown word was read as the noun.
        if (is_determiner(peek()) && pos_ > 0 && is_content(toks_[pos_ - 1])) throw UnknownWord(toks_[pos_ - 1], pos_ - 1);
        throw ParseError("unexpected '" + peek() + "' in command", pos_);
      }
      PrepPhrase pp;
      pp.prep = toks_[pos_++];
      pp.object = noun_phrase(false);
      cmd.preps.push_back(std::move(pp));
    }
    return cmd;
  }

  NounPhrase noun_phrase(bool modifiers) {
    NounPhrase np;
    if (done()) throw ParseError("expected a noun phrase", pos_);
    if (is_digits(peek())) {
      np.param = std::stoi(toks_[pos_++]);
      return np;
    }
    if (!is_determiner(peek())) throw ParseError("expected a determiner before '" + peek() + "'", pos_);
    np.determiner = toks_[pos_++];
    if (np.determiner == "an") np.determiner = "a";
    std::vector<std::string> words;
    while (!done() && is_content(peek())) words.push_back(toks_[pos_++]);
    if (words.empty()) {
      if (np.determiner != "this") throw ParseError("expected a noun after '" + np.determiner + "'", pos_);
    } else {
      np.noun = words.back();
      words.pop_back();
      np.adjectives = std::move(words);
    }
    while (modifiers && !done() && is_preposition(peek())) {
      PrepPhrase pp;
      pp.prep = toks_[pos_++];
      pp.object = noun_phrase(false);
      np.modifiers.push_back(std::move(pp));
    }
    return np;
  }

  Clause clause() { return clause_rest(noun_phrase(true)); }

  Clause clause_rest(NounPhrase subject) {
    Clause c;
    c.subject = std::move(subject);
    if (peek() != "is") {
      if (is_content(peek())) throw UnknownWord(peek(), pos_);
      throw ParseError("expected 'is'", pos_);
    }
    ++pos_;
    if (peek() == "not") {
      c.negated = true;
      ++pos_;
    }
    if (done()) throw ParseError("clause ends after 'is'", pos_);
    if (is_determiner(peek()) || is_digits(peek())) {
      c.kind = ClauseKind::kNominal;
      c.object = noun_phrase(true);
    } else if (is_preposition(peek())) {
      c.kind = ClauseKind::kRelation;
      c.prep = toks_[pos_++];
      c.object = noun_phrase(true);
    } else if (is_content(peek())) {
      const std::size_t at = pos_++;
      if (!done() && peek() != "," && peek() != "and") throw UnknownWord(toks_[at], at);
      c.kind = ClauseKind::kAdjective;
      c.adjective = toks_[at];
    } else {
      throw ParseError("unexpected '" + peek() + "' after 'is'", pos_);
    }
    return c;
  }

  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool operator==(const NounPhrase& a, const NounPhrase& b) {
  return a.determiner == b.determiner && a.adjectives == b.adjectives && a.noun == b.noun &&
         a.param == b.param && a.modifiers == b.modifiers;
}

bool operator==(const PrepPhrase& a, const PrepPhrase& b) { return a.prep == b.prep && a.object == b.object; }

std::string_view to_string(Form form) {
  switch (form) {
    case Form::kImperative: return "imperative";
    case Form::kGoal: return "goal-statement";
    case Form::kTeaching: return "teaching-reply";
    case Form::kMeta: return "meta-reply";
  }
  return "?";
}

bool is_preposition(std::string_view word) { return contains(kPrepositions, word); }
bool is_determiner(std::string_view word) { return word == "the" || word == "a" || word == "an" || word == "this"; }
bool is_meta(std::string_view phrase) { return contains(kMeta, phrase); }
const std::vector<std::string>& prepositions() { return kPrepositions; }

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> raw;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) raw.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (ch == ',') {
      flush();
      raw.emplace_back(",");
    } else if (ch == '.' || ch == '?' || ch == '!') {
      flush();
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  flush();

  // Multi-word prepositions become single hyphenated tokens, longest first.
  std::vector<std::string> out;
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t taken = 1;
    for (std::size_t n = std::min<std::size_t>(4, raw.size() - i); n >= 2; --n) {
      std::string joined = raw[i];
      for (std::size_t k = 1; k < n; ++k) joined += "-" + raw[i + k];
      if (is_preposition(joined)) {
        out.push_back(joined);
        taken = n;
        break;
      }
    }
    if (taken == 1) out.push_back(raw[i]);
    i += taken;
  }
  return out;
}

ParseTree parse(std::string_view text) { return Parser(tokenize(text)).run(); }

std::string surface(std::string_view joined) {
  std::string out(joined);
  std::replace(out.begin(), out.end(), '-', ' ');
  return out;
}

std::string placement_relation(std::string_view prep) {
  if (prep == "to") return "in";
  return std::string(prep);
}

std::string pretty(const NounPhrase& np) {
  if (np.param) return std::to_string(*np.param);
  std::string out = np.determiner;
  for (const auto& a : np.adjectives) out += " " + a;
  if (!np.noun.empty()) out += " " + np.noun;
  for (const auto& pp : np.modifiers) out += " " + surface(pp.prep) + " " + pretty(pp.object);
  return out;
}

std::string pretty(const Clause& c) {
  std::string out = pretty(c.subject) + " is";
  if (c.negated) out += " not";
  switch (c.kind) {
    case ClauseKind::kAdjective: return out + " " + c.adjective;
    case ClauseKind::kRelation: return out + " " + surface(c.prep) + " " + pretty(c.object);
    case ClauseKind::kNominal: return out + " " + pretty(c.object);
  }
  return out;
}

std::string pretty(const Imperative& cmd) {
  std::string out = surface(cmd.verb);
  if (cmd.object) out += " " + pretty(*cmd.object);
  for (const auto& pp : cmd.preps) out += " " + surface(pp.prep) + " " + pretty(pp.object);
  return out;
}

std::string pretty(const ParseTree& tree) {
  switch (tree.form) {
    case Form::kImperative: return pretty(tree.command);
    case Form::kGoal: {
      std::string out = "the goal is ";
      for (std::size_t i = 0; i < tree.clauses.size(); ++i) {
        if (i) out += ", and ";
        out += pretty(tree.clauses[i]);
      }
      return out;
    }
    case Form::kTeaching:
      switch (tree.teaching) {
        case TeachingKind::kClause: return pretty(tree.clauses.front());
        case TeachingKind::kNounPhrase: return pretty(tree.np);
        case TeachingKind::kWord: return tree.word;
      }
      break;
    case Form::kMeta: return tree.word;
  }
  return "";
}

std::optional<Meaning> Lexicon::lookup(std::string_view word, std::string_view pos) {
  memory::Cue cue;
  cue.constant("", std::string(pos)).constant("lexical", std::string(word));
  auto r = smem_->retrieve(cue);
  if (!r) return std::nullopt;
  Meaning m;
  m.graph_id = r->id;
  if (auto op = r->graph.target(0, "operator")) {
    m.kind = Meaning::Kind::kVerb;
    m.value = std::string(word);
    (void)op;
    return m;
  }
  const int ref = *r->graph.target(0, "referent");
  const auto& node = r->graph.node(ref);
  m.kind = node.kind == memory::NodeKind::kRelation ? Meaning::Kind::kRelation : Meaning::Kind::kPercept;
  m.value = node.value;
  return m;
}

std::optional<Meaning> Lexicon::lookup_any(std::string_view word) {
  for (std::string_view pos : {"adjective", "noun", "preposition", "verb"}) {
    if (knows(word, pos)) return lookup(word, pos);
  }
  return std::nullopt;
}

bool Lexicon::knows(std::string_view word, std::string_view pos) const {
  memory::Cue cue;
  cue.constant("", std::string(pos)).constant("lexical", std::string(word));
  return smem_->peek(cue).has_value();
}

int Lexicon::learn_percept(const std::string& word, const std::string& pos, const std::string& percept) {
  memory::ConceptGraph g;
  const int map = g.add(memory::NodeKind::kMap, pos);
  g.link(map, "lexical", g.add(memory::NodeKind::kLexical, word));
  g.link(map, "referent", g.add(memory::NodeKind::kPercept, percept));
  memory::Cue cue;
  cue.constant("", pos).constant("lexical", word);
  if (auto existing = smem_->peek(cue)) {
    smem_->update(existing->id, std::move(g));
    return existing->id;
  }
  return smem_->store(std::move(g));
}

int Lexicon::learn_relation(const std::string& word, std::vector<std::string> atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  memory::Cue cue;
  cue.constant("", "preposition").constant("lexical", word);
  auto existing = smem_->peek(cue);
  memory::ConceptGraph g;
  if (existing) {
    g = existing->graph;
  } else {
    const int map = g.add(memory::NodeKind::kMap, "preposition");
    g.link(map, "lexical", g.add(memory::NodeKind::kLexical, word));
    g.link(map, "referent", g.add(memory::NodeKind::kRelation, word));
  }
  const int rel = *g.target(0, "referent");
  for (int alt : g.targets(rel, "alt")) {
    std::vector<std::string> have;
    for (int a : g.targets(alt, "atom")) have.push_back(g.node(a).value);
    if (have == atoms) return existing ? existing->id : smem_->store(std::move(g));
  }
  const int alt = g.add(memory::NodeKind::kComposition);
  g.link(rel, "alt", alt);
  for (const auto& a : atoms) g.link(alt, "atom", g.add(memory::NodeKind::kAtom, a));
  if (existing) {
    smem_->update(existing->id, std::move(g));
    return existing->id;
  }
  return smem_->store(std::move(g));
}

world::RelationVocabulary Lexicon::vocabulary() const {
  world::RelationVocabulary vocab;
  for (int id : smem_->ids()) {
    const auto& g = smem_->get(id);
    if (g.node(0).value != "preposition") continue;
    auto ref = g.target(0, "referent");
    if (!ref || g.node(*ref).kind != memory::NodeKind::kRelation) continue;
    for (int alt : g.targets(*ref, "alt")) {
      std::vector<std::string> atoms;
      for (int a : g.targets(alt, "atom")) atoms.push_back(g.node(a).value);
      vocab.add(g.node(*ref).value, atoms);
    }
  }
  return vocab;
}

std::string GroundingError::describe() const {
  switch (kind) {
    case Kind::kUnknownWord: return "unknown word '" + word + "'";
    case Kind::kUnknownRelation: return "unknown relation '" + word + "'";
    case Kind::kNoReferent: return "nothing matches '" + word + "'";
    case Kind::kAmbiguous: return std::to_string(candidates.size()) + " things match '" + word + "'";
    case Kind::kNotGroundable: return "cannot ground '" + word + "'";
  }
  return word;
}

std::variant<std::vector<std::string>, GroundingError> np_constraints(const NounPhrase& np, Lexicon& lex) {
  std::vector<std::string> out;
  for (const auto& adj : np.adjectives) {
    auto m = lex.lookup(adj, "adjective");
    if (!m || m->kind != Meaning::Kind::kPercept) return GroundingError{GroundingError::Kind::kUnknownWord, adj, {}};
    out.push_back(m->value);
  }
  if (!np.noun.empty()) {
    auto m = lex.lookup(np.noun, "noun");
    if (!m || m->kind != Meaning::Kind::kPercept) {
      return GroundingError{GroundingError::Kind::kUnknownWord, np.noun, {}};
    }
    out.push_back(m->value);
  }
  return out;
}

std::variant<std::vector<std::string>, GroundingError> candidates(const NounPhrase& np, Lexicon& lex,
                                                                  const world::Perception& perception,
                                                                  const std::optional<std::string>& pointing) {
  if (np.param) return GroundingError{GroundingError::Kind::kNotGroundable, pretty(np), {}};
  auto constraints = np_constraints(np, lex);
  if (auto* err = std::get_if<GroundingError>(&constraints)) return *err;
  const auto& preds = std::get<std::vector<std::string>>(constraints);

  std::vector<std::pair<std::string, std::string>> relational;  // relation, entity
  for (const auto& pp : np.modifiers) {
    auto m = lex.lookup(pp.prep, "preposition");
    if (!m || m->kind != Meaning::Kind::kRelation) {
      return GroundingError{GroundingError::Kind::kUnknownRelation, pp.prep, {}};
    }
    auto obj = ground_np(pp.object, lex, perception);
    if (auto* err = std::get_if<GroundingError>(&obj)) return *err;
    relational.emplace_back(m->value, std::get<std::string>(obj));
  }

  std::vector<std::string> pool;
  if (np.determiner == "this") {
    if (!pointing) return GroundingError{GroundingError::Kind::kNotGroundable, "this", {}};
    pool.push_back(*pointing);
  } else {
    pool = perception.entities();
  }
  std::vector<std::string> out;
  for (const auto& e : pool) {
    if (!perception.state().has_entity(e)) continue;
    bool ok = std::all_of(preds.begin(), preds.end(), [&](const std::string& p) {
      return perception.holds_atom(p, {e});
    });
    for (const auto& [rel, other] : relational) ok = ok && perception.holds_atom(rel, {e, other});
    if (ok) out.push_back(e);
  }
  return out;
}

Grounding ground_np(const NounPhrase& np, Lexicon& lex, const world::Perception& perception,
                    const std::optional<std::string>& pointing) {
  auto found = candidates(np, lex, perception, pointing);
  if (auto* err = std::get_if<GroundingError>(&found)) return *err;
  auto& ids = std::get<std::vector<std::string>>(found);
  if (ids.empty()) return GroundingError{GroundingError::Kind::kNoReferent, pretty(np), {}};
  if (ids.size() > 1 && np.determiner != "a") {
    return GroundingError{GroundingError::Kind::kAmbiguous, pretty(np), ids};
  }
  return ids.front();
}

std::optional<world::Predicate> clause_literal(const Clause& clause, Lexicon& lex, const std::string& subject,
                                               const std::string& object) {
  switch (clause.kind) {
    case ClauseKind::kAdjective: {
      auto m = lex.lookup(clause.adjective, "adjective");
      if (!m || m->kind != Meaning::Kind::kPercept) return std::nullopt;
      return world::Predicate{m->value, {subject}, !clause.negated};
    }
    case ClauseKind::kRelation: {
      auto m = lex.lookup(clause.prep, "preposition");
      if (!m || m->kind != Meaning::Kind::kRelation) return std::nullopt;
      return world::Predicate{m->value, {subject, object}, !clause.negated};
    }
    case ClauseKind::kNominal: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, const NounPhrase*>> roles(const Imperative& command) {
  std::vector<std::pair<std::string, const NounPhrase*>> out;
  if (command.object) out.emplace_back("direct-object", &*command.object);
  for (const auto& pp : command.preps) out.emplace_back(pp.prep, &pp.object);
  return out;
}

memory::Cue verb_cue(const Imperative& command) {
  memory::Cue cue;
  cue.constant("", "verb").constant("lexical", command.verb);
  for (const auto& [role, np] : roles(command)) cue.variable("lexical/" + role, role);
  return cue;
}

Indexed index_verb(const Imperative& command, memory::SemanticMemory& smem, Lexicon& lex,
                   const world::Perception& perception, const std::optional<std::string>& pointing) {
  auto r = smem.retrieve(verb_cue(command));
  if (!r) return UnknownVerb{command.verb};
  GroundedCommand out;
  out.map_id = r->id;
  out.map = r->graph;
  const int lexical = *out.map.target(0, "lexical");
  for (const auto& [role, np] : roles(command)) {
    if (!out.map.target(lexical, role)) continue;
    auto g = ground_np(*np, lex, perception, pointing);
    if (auto* err = std::get_if<GroundingError>(&g)) return *err;
    out.bindings.emplace_back(role, std::get<std::string>(g));
  }
  for (const auto* e : out.map.out_edges(lexical)) {
    const bool bound = std::any_of(out.bindings.begin(), out.bindings.end(),
                                   [&](const auto& b) { return b.first == e->label; });
    if (!bound) return GroundingError{GroundingError::Kind::kNotGroundable, e->label, {}};
  }
  return out;
}

}  // namespace itl::lingo
