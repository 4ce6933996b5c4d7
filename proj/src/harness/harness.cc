#include "itl/harness.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace itl::harness {

namespace {

using learner::Knowledge;
using task::Slot;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words_of(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& v, std::size_t from = 0) {
  std::string out;
  for (std::size_t i = from; i < v.size(); ++i) out += (i > from ? " " : "") + v[i];
  return out;
}

void add_verb(Knowledge& k, const std::string& verb, world::PrimitiveKind kind, const std::vector<Slot>& slots) {
  k.smem.store(task::primitive_map(verb, kind, slots));
}

void null_knowledge(Knowledge& k) {
  using world::PrimitiveKind;
  const Slot obj{"obj", "direct-object", "obj"};
  const Slot loc{"loc", "direct-object", "loc"};
  const Slot in{"loc", "in", "loc"};
  add_verb(k, "pick-up", PrimitiveKind::kPickUp, {obj});
  add_verb(k, "put", PrimitiveKind::kPutDown, {obj, in});
  add_verb(k, "put-down", PrimitiveKind::kPutDown, {obj, in});
  add_verb(k, "open", PrimitiveKind::kOpen, {loc});
  add_verb(k, "close", PrimitiveKind::kClose, {loc});
  add_verb(k, "turn-on", PrimitiveKind::kTurnOn, {loc});
  add_verb(k, "turn-off", PrimitiveKind::kTurnOff, {loc});
  lingo::Lexicon lex(k.smem);
  for (const char* state : {"open", "closed", "on", "off", "empty"}) lex.learn_percept(state, "adjective", state);
  lex.learn_percept("block", "noun", "object");
  lex.learn_percept("object", "noun", "object");
  lex.learn_percept("location", "noun", "location");
}

void object_knowledge(Knowledge& k) {
  lingo::Lexicon lex(k.smem);
  for (auto c : world::kColors) {
    const std::string w(world::to_string(c));
    lex.learn_percept(w, "adjective", "color-" + w);
  }
  for (auto s : world::kShapes) {
    const std::string w(world::to_string(s));
    lex.learn_percept(w, "noun", "shape-" + w);
  }
  for (auto s : world::kSizes) {
    const std::string w(world::to_string(s));
    lex.learn_percept(w, "adjective", "size-" + w);
  }
  for (auto name : world::kTabletopLocations) {
    const std::string w(name);
    lex.learn_percept(w, "noun", "name-" + w);
  }
}

void spatial_knowledge(Knowledge& k) {
  lingo::Lexicon lex(k.smem);
  lex.learn_relation("in", {"within-x", "within-y", "within-z"});
  lex.learn_relation("right-of", {"greater-x"});
  lex.learn_relation("left-of", {"less-x"});
  lex.learn_relation("behind", {"greater-y"});
  lex.learn_relation("in-front-of", {"less-y"});
  lex.learn_relation("above", {"greater-z", "overlap-x", "overlap-y"});
  lex.learn_relation("below", {"less-z", "overlap-x", "overlap-y"});
  lex.learn_relation("larger-than", {"wider-x"});
  lex.learn_relation("near", {"near"});
  lex.learn_relation("next-to", {"touching", "greater-x", "overlap-y"});
  lex.learn_relation("next-to", {"touching", "less-x", "overlap-y"});
  lex.learn_relation("next-to", {"touching", "greater-y", "overlap-x"});
  lex.learn_relation("next-to", {"touching", "less-y", "overlap-x"});
  lex.learn_relation("behind-right-of", {"touching", "greater-x", "greater-y"});
  lex.learn_relation("behind-left-of", {"touching", "less-x", "greater-y"});
  lex.learn_relation("in-front-right-of", {"touching", "greater-x", "less-y"});
  lex.learn_relation("in-front-left-of", {"touching", "less-x", "less-y"});
}

std::optional<int> find_task(const memory::SemanticMemory& smem, const std::string& verb) {
  for (int id : smem.ids()) {
    const auto& g = smem.get(id);
    if (g.node(0).value == "verb" && !task::primitive_of(g) && task::verb_of(g) == verb) return id;
  }
  return std::nullopt;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

fs::path resolve(const fs::path& dir, const std::string& file) {
  fs::path p(file);
  return p.is_absolute() || dir.empty() ? p : dir / p;
}

std::string escape_regex(const std::string& s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

Paths Paths::defaults() {
  if (const char* env = std::getenv("ITL_DATA")) return under(env);
#ifdef ITL_DATA_DIR
  return under(ITL_DATA_DIR);
#else
  return under("data");
#endif
}

Paths Paths::under(const fs::path& data_dir) {
  return Paths{data_dir / "scenes", data_dir / "presets", data_dir / "lessons"};
}

Knowledge builtin_preset(std::string_view name) {
  Knowledge k;
  if (name != "null" && name != "O" && name != "O+S") {
    throw std::invalid_argument("no built-in preset " + std::string(name));
  }
  null_knowledge(k);
  if (name != "null") object_knowledge(k);
  if (name == "O+S") spatial_knowledge(k);
  return k;
}

Knowledge load_preset(std::string_view name, const Paths& paths) {
  if (std::find(kPresets.begin(), kPresets.end(), name) == kPresets.end()) {
    throw std::invalid_argument("unknown preset " + std::string(name));
  }
  const fs::path file = paths.presets / (std::string(name) + ".knowledge");
  if (fs::exists(file)) return learner::load_knowledge(file.string());
  if (name == "O+S+T") return build_task_preset(paths);
  return builtin_preset(name);
}

Knowledge build_task_preset(const Paths& paths) {
  auto script = load_lesson(paths.lessons / "ost.lesson");
  script.knowledge.reset();
  script.preset = "O+S";
  auto result = run_lesson(script, paths);
  if (!result.ok()) throw std::runtime_error("task preset lesson failed: " + result.failures.front());
  return std::move(result.knowledge);
}

world::WorldState load_scene_named(const std::string& name, const Paths& paths) {
  fs::path p(name);
  if (p.has_extension() || p.has_parent_path()) return world::load_scene(p.string());
  return world::load_scene((paths.scenes / (name + ".scene")).string());
}

void ReplyRule::compile() {
  std::string re;
  captures_.clear();
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern[i] == '{') {
      const auto close = pattern.find('}', i);
      if (close == std::string::npos) throw std::invalid_argument("unclosed capture in " + pattern);
      captures_.push_back(pattern.substr(i + 1, close - i - 1));
      re += "(.+?)";
      i = close + 1;
    } else if (pattern[i] == '*') {
      re += ".*";
      ++i;
    } else {
      re += escape_regex(std::string(1, pattern[i]));
      ++i;
    }
  }
  regex_ = std::regex(re);
}

std::optional<std::string> ReplyRule::match(const std::string& question) const {
  std::smatch m;
  if (!std::regex_match(question, m, regex_)) return std::nullopt;
  std::string out = reply;
  for (std::size_t c = 0; c < captures_.size(); ++c) {
    const std::string marker = "{" + captures_[c] + "}";
    for (auto at = out.find(marker); at != std::string::npos; at = out.find(marker)) {
      out.replace(at, marker.size(), m[c + 1].str());
    }
  }
  return out;
}

LessonScript parse_lesson(std::istream& in, const fs::path& dir, const std::string& name) {
  LessonScript script;
  script.dir = dir;
  script.name = name;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto words = words_of(line);
    const std::string& head = words[0];
    auto fail = [&](const std::string& why) { throw LessonError(why + " at line " + std::to_string(line_no), line_no); };
    if (head == "scene" || head == "preset" || head == "knowledge") {
      if (words.size() != 2) fail(head + " takes one argument");
      if (head == "scene") script.scene = words[1];
      else if (head == "preset") script.preset = words[1];
      else script.knowledge = words[1];
    } else if (head == "say") {
      Step s;
      s.line = line_no;
      std::size_t from = 1;
      if (words.size() > 2 && words[1] == "point") {
        s.pointing = words[2];
        from = 3;
      }
      s.text = join(words, from);
      if (s.text.empty()) fail("say needs an utterance");
      lingo::parse(s.text);
      script.steps.push_back(std::move(s));
    } else if (head == "solve") {
      Step s{Step::Kind::kSolve, "", {}, std::nullopt, 0, line_no};
      if (words.size() != 2) fail("solve takes a depth");
      s.depth = std::stoi(words[1]);
      script.steps.push_back(std::move(s));
    } else if (head == "export") {
      if (words.size() != 2) fail("export takes a file");
      script.steps.push_back(Step{Step::Kind::kExport, words[1], {}, std::nullopt, 0, line_no});
    } else if (head == "expect") {
      if (words.size() < 2) fail("expect needs a check");
      script.steps.push_back(Step{Step::Kind::kExpect, words[1], {words.begin() + 2, words.end()}, std::nullopt, 0,
                                  line_no});
    } else if (head == "reply") {
      const auto sep = line.find("::");
      const auto arrow = line.find("=>", sep == std::string::npos ? 0 : sep);
      if (sep == std::string::npos || arrow == std::string::npos) fail("reply needs 'PATTERN => TEMPLATE'");
      ReplyRule r;
      r.line = line_no;
      auto opts = words_of(line.substr(5, sep - 5));
      for (std::size_t i = 0; i < opts.size(); ++i) {
        if (opts[i] == "once") {
          r.once = true;
        } else if (opts[i] == "during" && i + 1 < opts.size()) {
          r.during = opts[++i];
        } else if (opts[i] == "point" && i + 1 < opts.size()) {
          r.pointing = opts[++i];
        } else if (opts[i] == "when") {
          while (i + 1 < opts.size() && opts[i + 1].find('(') != std::string::npos) {
            auto p = world::Predicate::parse(opts[++i]);
            if (!p) fail("bad literal " + opts[i]);
            r.when.push_back(*p);
          }
        } else {
          fail("unknown reply option " + opts[i]);
        }
      }
      r.pattern = trim(line.substr(sep + 2, arrow - sep - 2));
      r.reply = trim(line.substr(arrow + 2));
      r.compile();
      if (r.reply.find('{') == std::string::npos) lingo::parse(r.reply);
      script.replies.push_back(std::move(r));
    } else {
      fail("unknown directive " + head);
    }
  }
  if (script.scene.empty()) throw LessonError("lesson names no scene", 0);
  return script;
}

LessonScript load_lesson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read lesson " + path.string());
  return parse_lesson(in, path.parent_path(), path.stem().string());
}

namespace {

class Runner {
 public:
  Runner(const LessonScript& script, const Paths& paths)
      : script_(script),
        agent_(load_scene_named(script.scene, paths),
               script.knowledge ? learner::load_knowledge(resolve(script.dir, *script.knowledge).string())
                                : load_preset(script.preset, paths),
               {}),
        used_(script.replies.size(), false) {
    if (script.knowledge || script.preset != "null") agent_.learn_location_names();
    agent_.set_expert([this](const std::string& q) { return answer(q); });
  }

  LessonResult run() {
    for (const auto& step : script_.steps) {
      switch (step.kind) {
        case Step::Kind::kSay: last_ = agent_.hear(step.text, step.pointing); break;
        case Step::Kind::kSolve:
          agent_.set_solve_depth(step.depth);
          last_ = agent_.hear("solve");
          break;
        case Step::Kind::kExport:
          learner::save_knowledge(agent_.knowledge(), resolve(script_.dir, step.text).string());
          break;
        case Step::Kind::kExpect: check(step); break;
      }
    }
    LessonResult r;
    r.metrics = agent_.metrics();
    r.transcript = agent_.transcript();
    r.world = agent_.world();
    r.knowledge = agent_.knowledge();
    r.vocabulary = agent_.vocabulary();
    r.problem = agent_.problem();
    r.failures = std::move(failures_);
    return r;
  }

 private:
  learner::ExpertReply answer(const std::string& question) {
    std::string during;
    for (auto it = agent_.stack().segments().rbegin(); it != agent_.stack().segments().rend(); ++it) {
      if (!it->context.verb.empty()) {
        during = it->context.verb;
        break;
      }
    }
    const world::Perception p(agent_.world(), agent_.vocabulary());
    for (std::size_t i = 0; i < script_.replies.size(); ++i) {
      const auto& r = script_.replies[i];
      if (r.once && used_[i]) continue;
      if (r.during && *r.during != during) continue;
      if (!std::all_of(r.when.begin(), r.when.end(), [&](const world::Predicate& w) { return p.holds(w); })) continue;
      auto text = r.match(question);
      if (!text) continue;
      used_[i] = true;
      return {*text, r.pointing};
    }
    throw UnmatchedQuestion("no reply for \"" + question + "\"" + (during.empty() ? "" : " during " + during));
  }

  void fail(const Step& step, const std::string& expected, const std::string& actual) {
    failures_.push_back("line " + std::to_string(step.line) + ": expect " + step.text + " " + join(step.args) +
                        "\n  expected: " + expected + "\n  actual:   " + actual);
  }

  void compare(const Step& step, long expected, long actual) {
    if (expected != actual) fail(step, std::to_string(expected), std::to_string(actual));
  }

  long number(const Step& step, std::size_t i) const {
    if (i >= step.args.size()) throw LessonError("missing number", step.line);
    return std::stol(step.args[i]);
  }

  void check(const Step& step) {
    const auto& a = step.args;
    const auto& k = agent_.knowledge();
    if (step.text == "holds") {
      const world::Perception p(agent_.world(), agent_.vocabulary());
      for (const auto& lit : a) {
        auto pred = world::Predicate::parse(lit);
        if (!pred) throw LessonError("bad literal " + lit, step.line);
        if (!p.holds(*pred)) fail(step, lit, "false");
      }
    } else if (step.text == "goal" || step.text == "space") {
      if (a.empty()) throw LessonError("missing verb", step.line);
      auto id = find_task(k.smem, a[0]);
      if (!id) return fail(step, "a task " + a[0], "none");
      std::vector<std::string> actual;
      if (step.text == "goal") {
        for (const auto& l : task::goal_of(k.smem.get(*id))) actual.push_back(l.to_string());
      } else {
        for (const auto& r : task::space_of(k.smem.get(*id))) actual.push_back(r.to_string());
      }
      const auto want = sorted({a.begin() + 1, a.end()});
      if (want != sorted(actual)) fail(step, join(want), join(sorted(actual)));
    } else if (step.text == "rules") {
      compare(step, number(step, 1), static_cast<long>(k.rules.selections(a.at(0)).size()));
    } else if (step.text == "primitives") {
      compare(step, number(step, 0), static_cast<long>(last_.primitives.size()));
    } else if (step.text == "questions") {
      compare(step, number(step, 0), last_.questions);
    } else if (step.text == "utterances") {
      compare(step, number(step, 1), agent_.metrics().utterance_count(a.at(0)));
    } else if (step.text == "teaching") {
      compare(step, number(step, 0), agent_.metrics().teaching());
    } else if (step.text == "stack") {
      compare(step, number(step, 0), static_cast<long>(agent_.stack().depth()));
    } else if (step.text == "outcome") {
      const std::string actual = last_.aborted ? "aborted" : last_.completed ? "completed" : "failed";
      if (a.empty() || a[0] != actual) fail(step, join(a), actual + (last_.failure.empty() ? "" : " (" + last_.failure + ")"));
    } else if (step.text == "said") {
      const std::string text = join(a);
      const auto& t = agent_.transcript();
      const bool found = std::any_of(t.begin(), t.end(), [&](const dialogue::Message& m) {
        return m.speaker == "learner" && m.text.find(text) != std::string::npos;
      });
      if (!found) fail(step, "learner said \"" + text + "\"", "not said");
    } else if (step.text == "solution") {
      const auto& s = agent_.last_solution();
      const std::string actual = s ? std::to_string(s->size()) : "none";
      if (a.empty() || a[0] != actual) fail(step, join(a), actual);
    } else if (step.text == "legal") {
      if (!agent_.problem()) return fail(step, join(a), "no problem");
      const auto moves = games::legal_moves(*agent_.problem(), agent_.library(), agent_.world());
      compare(step, number(step, 0), static_cast<long>(moves.size()));
    } else {
      throw LessonError("unknown expectation " + step.text, step.line);
    }
  }

  const LessonScript& script_;
  learner::Agent agent_;
  std::vector<bool> used_;
  learner::Outcome last_;
  std::vector<std::string> failures_;
};

}  // namespace

LessonResult run_lesson(const LessonScript& script, const Paths& paths) { return Runner(script, paths).run(); }

std::string transcript_text(const std::vector<dialogue::Message>& transcript) {
  std::string out;
  for (const auto& m : transcript) {
    out += m.speaker + ": " + m.text;
    if (m.pointing) out += " [point " + *m.pointing + "]";
    out += "\n";
  }
  return out;
}

std::string metrics_json(const learner::Metrics& metrics, bool with_wall_time) {
  nlohmann::ordered_json j;
  j["operators"] = metrics.operators;
  j["utterances"] = metrics.utterances;
  j["teaching"] = metrics.teaching();
  j["cycles"] = metrics.cycles;
  if (with_wall_time) j["wall_ms"] = metrics.wall_ms;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> sweep(const std::string& task, const Paths& paths) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < kPresets.size(); ++i) {
    const auto file = paths.lessons / (task + "-" + std::string(kPresetFileTags[i]) + ".lesson");
    auto result = run_lesson(load_lesson(file), paths);
    rows.push_back(SweepRow{std::string(kPresets[i]), result.metrics, result.failures});
  }
  return rows;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "preset";
  for (auto c : learner::kCapabilities) out << "\t" << learner::to_string(c);
  for (auto c : learner::kTeachingCategories) out << "\t" << c;
  out << "\tteaching\tcycles\n";
  for (const auto& r : rows) {
    out << r.preset;
    for (auto c : learner::kCapabilities) out << "\t" << r.metrics.operator_count(c);
    for (auto c : learner::kTeachingCategories) out << "\t" << r.metrics.utterance_count(c);
    out << "\t" << r.metrics.teaching() << "\t" << r.metrics.cycles << "\n";
  }
  return out.str();
}

}  // namespace itl::harness
