#include "support.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace itl::testing {

using world::PrimitiveAction;
using world::PrimitiveKind;

harness::Paths paths() { return harness::Paths::under(ITL_DATA_DIR); }

std::string test_data(const std::string& file) { return std::string(ITL_TEST_DATA) + "/" + file; }

world::WorldState scene(const std::string& name) { return harness::load_scene_named(name, paths()); }

learner::Knowledge preset(const std::string& name) { return harness::load_preset(name, paths()); }

harness::LessonResult lesson(const std::string& name) {
  auto result = harness::run_lesson(harness::load_lesson(paths().lessons / (name + ".lesson")), paths());
  if (!result.ok()) throw std::runtime_error(name + ": " + result.failures.front());
  return result;
}

world::RelationVocabulary vocabulary_of(const learner::Knowledge& k) {
  memory::SemanticMemory copy = k.smem;
  return lingo::Lexicon(copy).vocabulary();
}

world::WorldState apply(world::WorldState s, const std::vector<PrimitiveAction>& actions) {
  for (const auto& a : actions) {
    auto next = world::apply_primitive(s, a);
    if (!next) throw std::runtime_error(a.to_string() + ": " + next.error().message);
    s = std::move(next.value());
  }
  return s;
}

learner::ExpertChannel silent_expert() {
  return [](const std::string& q) -> learner::ExpertReply { throw learner::Aborted("unexpected question: " + q); };
}

Trial run_trial(const learner::Knowledge& k, const world::WorldState& start, const task::GroundAction& action,
                const std::vector<world::Predicate>& goal, const std::string& label) {
  Trial t;
  t.label = label;
  learner::Agent agent(start, k, silent_expert());
  auto outcome = agent.execute(action);
  t.primitives = static_cast<int>(outcome.primitives.size());
  t.questions = outcome.questions;
  t.opened = std::any_of(outcome.primitives.begin(), outcome.primitives.end(),
                         [](const PrimitiveAction& a) { return a.kind == PrimitiveKind::kOpen; });
  if (!outcome.completed) {
    t.why = "not completed: " + outcome.failure;
    return t;
  }
  world::WorldState replayed;
  try {
    replayed = testing::apply(start, outcome.primitives);
  } catch (const std::exception& e) {
    t.why = std::string("replay failed: ") + e.what();
    return t;
  }
  if (!(replayed == agent.world())) {
    t.why = "replayed state differs from the learner's world";
    return t;
  }
  const auto vocab = vocabulary_of(k);
  const world::Perception p(replayed, vocab);
  for (const auto& g : goal) {
    if (!p.holds(g)) {
      t.why = "goal literal false: " + g.to_string();
      return t;
    }
  }
  t.ok = t.questions == 0;
  if (!t.ok) t.why = "asked questions";
  return t;
}

world::WorldState move_start(const std::string& obj, const std::string& loc, bool held) {
  auto s = scene("default");
  if (loc == "table") s = apply(s, {PrimitiveAction::pick_up(obj), PrimitiveAction::put_down("in", obj, "garbage")});
  if (loc == "pantry") s = apply(s, {PrimitiveAction::toggle(PrimitiveKind::kOpen, "pantry")});
  if (held) s = apply(s, {PrimitiveAction::pick_up(obj)});
  return s;
}

namespace {

task::GroundAction placement(const std::string& verb, const std::string& obj, const std::string& loc) {
  return task::GroundAction{verb, {{"direct-object", obj}, {"to", loc}}};
}

world::Predicate in(const std::string& obj, const std::string& loc) { return {"in", {obj, loc}, true}; }

}  // namespace

std::vector<Trial> move_trials(const learner::Knowledge& k, bool with_held) {
  std::vector<Trial> out;
  for (const auto& obj : kObjects) {
    for (const auto& loc : kLocations) {
      for (bool held : {false, true}) {
        if (held && !with_held) continue;
        out.push_back(run_trial(k, move_start(obj, loc, held), placement("move", obj, loc), {in(obj, loc)},
                                "move " + obj + " " + loc + (held ? " held" : "")));
      }
    }
  }
  return out;
}

std::vector<Trial> shift_trials(const learner::Knowledge& k) {
  std::vector<Trial> out;
  for (const auto& obj : kObjects) {
    for (const auto& loc : kLocations) {
      for (bool held : {false, true}) {
        for (bool stove_on : {false, true}) {
          auto s = move_start(obj, loc, held);
          if (stove_on) s = apply(s, {PrimitiveAction::toggle(PrimitiveKind::kTurnOn, "stove")});
          out.push_back(run_trial(k, s, placement("shift", obj, loc), {in(obj, loc)},
                                  "shift " + obj + " " + loc + (held ? " held" : "") + (stove_on ? " stove-on" : "")));
        }
      }
    }
  }
  return out;
}

std::vector<Trial> store_trials(const learner::Knowledge& k) {
  std::vector<Trial> out;
  for (const auto& obj : kObjects) {
    for (bool open : {false, true}) {
      for (bool held : {false, true}) {
        auto s = scene("default");
        if (open) s = apply(s, {PrimitiveAction::toggle(PrimitiveKind::kOpen, "pantry")});
        if (held) s = apply(s, {PrimitiveAction::pick_up(obj)});
        out.push_back(run_trial(k, s, task::GroundAction{"store", {{"direct-object", obj}}},
                                {in(obj, "pantry"), {"closed", {"pantry"}, true}},
                                "store " + obj + (open ? " open" : "") + (held ? " held" : "")));
      }
    }
  }
  return out;
}

const std::vector<TaskShape>& task_table() {
  // The store goal also keeps the closed pantry, which the taught goal
  // sentence states.
  static const std::vector<TaskShape> table = {
      {"move", {"direct-object", "to"}, {"in(obj,loc)"}, {"pick-up(obj)", "put-down(in,obj,loc)"}},
      {"shift", {"direct-object", "to"}, {"in(obj,loc)"}, {"move(in,obj,loc)"}},
      {"store", {"direct-object"}, {"in(obj,pantry)", "closed(pantry)"},
       {"open(pantry)", "move(in,obj,pantry)", "close(pantry)"}},
  };
  return table;
}

std::vector<std::string> shape_mismatches(const learner::Knowledge& k, const std::vector<std::string>& verbs) {
  std::vector<std::string> out;
  const auto vocab = vocabulary_of(k);
  const compile::Library lib{&k.smem, &k.rules, &vocab};
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  for (const auto& row : task_table()) {
    if (!verbs.empty() && std::find(verbs.begin(), verbs.end(), row.verb) == verbs.end()) continue;
    const auto map = lib.verb_map(row.verb, row.roles);
    if (!map) {
      out.push_back(row.verb + ": no task");
      continue;
    }
    std::vector<std::string> goal, space;
    for (const auto& lit : task::goal_of(*map)) goal.push_back(lit.to_string());
    for (const auto& ref : task::space_of(*map)) space.push_back(ref.to_string());
    if (sorted(goal) != sorted(row.goal)) out.push_back(row.verb + ": goal differs");
    if (sorted(space) != sorted(row.space)) out.push_back(row.verb + ": problem space differs");
    if (!k.rules.has_behavior(row.verb)) out.push_back(row.verb + ": no compiled behavior");
  }
  return out;
}

const std::array<SweepGolden, 4>& store_sweep_goldens() {
  static const std::array<SweepGolden, 4> goldens = {{
      {"null", {53, 32, 5, 11, 15}, {12, 2, 4, 10, 0}, 28, 116},
      {"O", {33, 28, 1, 11, 15}, {0, 2, 4, 10, 0}, 16, 88},
      {"O+S", {29, 25, 0, 11, 15}, {0, 0, 4, 10, 0}, 14, 80},
      {"O+S+T", {1, 2, 0, 0, 18}, {0, 0, 0, 0, 0}, 0, 21},
  }};
  return goldens;
}

std::vector<std::string> utterance_trend_violations(const std::vector<harness::SweepRow>& rows) {
  std::vector<std::string> out;
  if (rows.size() != 4) return {"expected four presets"};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (auto cat : learner::kTeachingCategories) {
      if (rows[i].metrics.utterance_count(cat) > rows[i - 1].metrics.utterance_count(cat)) {
        out.push_back(std::string(cat) + " rises from " + rows[i - 1].preset + " to " + rows[i].preset);
      }
    }
  }
  if (rows[3].metrics.teaching() != 0) out.push_back("O+S+T needs teaching");
  if (rows[0].metrics.utterance_count("object-attribute") == 0) out.push_back("null has no object-attribute dialogue");
  if (rows[0].metrics.utterance_count("spatial-relation") == 0) out.push_back("null has no spatial-relation dialogue");
  return out;
}

std::vector<std::string> operator_trend_violations(const std::vector<harness::SweepRow>& rows) {
  using learner::Capability;
  std::vector<std::string> out;
  if (rows.size() != 4) return {"expected four presets"};
  auto comm = [](const harness::SweepRow& r) {
    return r.metrics.operator_count(Capability::kInteraction) + r.metrics.operator_count(Capability::kLexical);
  };
  // null, O+S, O+S+T
  if (!(comm(rows[0]) > comm(rows[2]) && comm(rows[2]) > comm(rows[3]))) {
    out.push_back("interaction + lexical does not strictly decrease null > O+S > O+S+T");
  }
  const auto& ost = rows[3].metrics;
  for (auto c : learner::kCapabilities) {
    if (c != Capability::kTaskExecution && ost.operator_count(c) >= ost.operator_count(Capability::kTaskExecution)) {
      out.push_back("task-execution is not the maximum under O+S+T");
      break;
    }
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].metrics.cycles > rows[i - 1].metrics.cycles) {
      out.push_back("cycles rise from " + rows[i - 1].preset + " to " + rows[i].preset);
    }
  }
  return out;
}

std::vector<std::string> golden_mismatches(const std::vector<harness::SweepRow>& rows) {
  std::vector<std::string> out;
  const auto& goldens = store_sweep_goldens();
  if (rows.size() != goldens.size()) return {"expected four presets"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = rows[i].metrics;
    const auto& g = goldens[i];
    for (std::size_t c = 0; c < learner::kCapabilities.size(); ++c) {
      if (m.operator_count(learner::kCapabilities[c]) != g.operators[c]) {
        out.push_back(g.preset + " " + std::string(learner::to_string(learner::kCapabilities[c])) + " = " +
                      std::to_string(m.operator_count(learner::kCapabilities[c])) + ", pinned " +
                      std::to_string(g.operators[c]));
      }
    }
    for (std::size_t c = 0; c < learner::kTeachingCategories.size(); ++c) {
      if (m.utterance_count(learner::kTeachingCategories[c]) != g.utterances[c]) {
        out.push_back(g.preset + " " + std::string(learner::kTeachingCategories[c]) + " = " +
                      std::to_string(m.utterance_count(learner::kTeachingCategories[c])) + ", pinned " +
                      std::to_string(g.utterances[c]));
      }
    }
    if (m.teaching() != g.teaching) out.push_back(g.preset + " teaching = " + std::to_string(m.teaching()));
    if (m.cycles != g.cycles) out.push_back(g.preset + " cycles = " + std::to_string(m.cycles));
  }
  return out;
}

namespace oracle {

int eight_puzzle_distance(const std::array<int, 9>& start, const std::array<int, 9>& goal) {
  std::map<std::array<int, 9>, int> dist{{start, 0}};
  std::deque<std::array<int, 9>> queue{start};
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    if (s == goal) return dist[s];
    const int blank = static_cast<int>(std::find(s.begin(), s.end(), 0) - s.begin());
    const int r = blank / 3, c = blank % 3;
    const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int nr = r + dr[d], nc = c + dc[d];
      if (nr < 0 || nr > 2 || nc < 0 || nc > 2) continue;
      auto t = s;
      std::swap(t[blank], t[nr * 3 + nc]);
      if (dist.emplace(t, dist[s] + 1).second) queue.push_back(t);
    }
  }
  return -1;
}

namespace {

std::vector<std::string> toads_frogs_next(const std::string& b) {
  std::vector<std::string> out;
  const int n = static_cast<int>(b.size());
  for (int i = 0; i < n; ++i) {
    const int dir = b[i] == 'T' ? 1 : b[i] == 'F' ? -1 : 0;
    if (dir == 0) continue;
    for (int step : {1, 2}) {
      const int j = i + dir * step;
      if (j < 0 || j >= n || b[j] != '_') continue;
      if (step == 2 && b[i + dir] == '_') continue;
      auto t = b;
      std::swap(t[i], t[j]);
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace

int toads_frogs_distance(const std::string& start, const std::string& goal) {
  std::map<std::string, int> dist{{start, 0}};
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    if (s == goal) return dist[s];
    for (auto& t : toads_frogs_next(s)) {
      if (dist.emplace(t, dist[s] + 1).second) queue.push_back(t);
    }
  }
  return -1;
}

int toads_frogs_moves(const std::string& board) { return static_cast<int>(toads_frogs_next(board).size()); }

int hanoi_distance(int disks, int from, int to) {
  using State = std::vector<int>;  // peg of each disk, smallest first
  const State start(disks, from), goal(disks, to);
  std::map<State, int> dist{{start, 0}};
  std::deque<State> queue{start};
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    if (s == goal) return dist[s];
    for (int d = 0; d < disks; ++d) {
      // Only the smallest disk on its peg may move, onto a peg whose smallest
      // disk is larger.
      bool top = true;
      for (int e = 0; e < d; ++e) top = top && s[e] != s[d];
      if (!top) continue;
      for (int p = 0; p < 3; ++p) {
        if (p == s[d]) continue;
        bool ok = true;
        for (int e = 0; e < d; ++e) ok = ok && s[e] != p;
        if (!ok) continue;
        auto t = s;
        t[d] = p;
        if (dist.emplace(t, dist[s] + 1).second) queue.push_back(t);
      }
    }
  }
  return -1;
}

std::vector<std::array<int, 3>> tictactoe_lines() {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a < 9; ++a) {
    for (int b = a + 1; b < 9; ++b) {
      for (int c = b + 1; c < 9; ++c) {
        const int ar = a / 3, ac = a % 3, br = b / 3, bc = b % 3, cr = c / 3, cc = c % 3;
        // Evenly spaced collinear points: b is the midpoint of a and c.
        if (2 * br == ar + cr && 2 * bc == ac + cc) out.push_back({a + 1, b + 1, c + 1});
      }
    }
  }
  return out;
}

bool tictactoe_won(const std::string& board, char player) {
  for (const auto& l : tictactoe_lines()) {
    if (board[l[0] - 1] == player && board[l[1] - 1] == player && board[l[2] - 1] == player) return true;
  }
  return false;
}

int tictactoe_value(const std::string& board) {
  static std::map<std::string, int> memo;
  if (auto it = memo.find(board); it != memo.end()) return it->second;
  const int xs = static_cast<int>(std::count(board.begin(), board.end(), 'X'));
  const int os = static_cast<int>(std::count(board.begin(), board.end(), 'O'));
  const char me = xs == os ? 'X' : 'O';
  const char them = me == 'X' ? 'O' : 'X';
  int v;
  if (tictactoe_won(board, them)) {
    v = -1;
  } else if (board.find('.') == std::string::npos) {
    v = 0;
  } else {
    v = -2;
    for (std::size_t i = 0; i < board.size(); ++i) {
      if (board[i] != '.') continue;
      auto t = board;
      t[i] = me;
      v = std::max(v, -tictactoe_value(t));
    }
  }
  memo[board] = v;
  return v;
}

}  // namespace oracle

}  // namespace itl::testing
