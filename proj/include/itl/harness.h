#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itl/agent.h"

namespace itl::harness {

namespace fs = std::filesystem;

inline constexpr std::array<std::string_view, 4> kPresets = {"null", "O", "O+S", "O+S+T"};

// Where lessons find scenes, presets and one another. Defaults to the data
// directory of the source tree.
struct Paths {
  fs::path scenes;
  fs::path presets;
  fs::path lessons;

  static Paths defaults();
  static Paths under(const fs::path& data_dir);
};

// Built-in presets. null knows the primitive verbs and the state adjectives;
// O adds colors, shapes, sizes and location names; O+S adds the spatial
// prepositions. O+S+T is produced by teaching (see build_task_preset).
learner::Knowledge builtin_preset(std::string_view name);

// A preset by name: the file <presets>/<name>.knowledge when present, else
// the built-in; O+S+T without a file is built by running its lesson.
learner::Knowledge load_preset(std::string_view name, const Paths& paths);

// Runs <lessons>/ost.lesson and returns the learner's knowledge afterwards.
learner::Knowledge build_task_preset(const Paths& paths);

world::WorldState load_scene_named(const std::string& name, const Paths& paths);

struct UnmatchedQuestion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LessonError : std::runtime_error {
  LessonError(const std::string& what, int line) : std::runtime_error(what), line(line) {}
  int line;
};

// Pattern with {name} captures and * wildcards matched against the whole
// question; the template may use the captures.
struct ReplyRule {
  std::string pattern;
  std::string reply;
  std::optional<std::string> pointing;
  std::optional<std::string> during;      // verb of the innermost task segment
  std::vector<world::Predicate> when;     // must hold in the current scene
  bool once = false;
  int line = 0;

  // Must run after the pattern is set.
  void compile();
  // The reply with captures filled in, when the pattern matches.
  std::optional<std::string> match(const std::string& question) const;

 private:
  std::regex regex_;
  std::vector<std::string> captures_;
};

struct Step {
  enum class Kind { kSay, kSolve, kExport, kExpect };
  Kind kind = Kind::kSay;
  std::string text;                      // utterance, export path, or expectation name
  std::vector<std::string> args;         // expectation arguments
  std::optional<std::string> pointing;
  int depth = 0;                         // solve
  int line = 0;
};

struct LessonScript {
  std::string scene;
  std::string preset = "null";
  std::optional<std::string> knowledge;  // file overriding the preset
  std::vector<ReplyRule> replies;
  std::vector<Step> steps;
  fs::path dir;                          // relative paths resolve here
  std::string name;
};

LessonScript parse_lesson(std::istream& in, const fs::path& dir = {}, const std::string& name = "");
LessonScript load_lesson(const fs::path& path);

struct LessonResult {
  learner::Metrics metrics;
  std::vector<dialogue::Message> transcript;
  world::WorldState world;
  learner::Knowledge knowledge;
  world::RelationVocabulary vocabulary;
  std::optional<games::ProblemSpec> problem;
  std::vector<std::string> failures;  // one line per failed expectation

  bool ok() const { return failures.empty(); }
};

// Drives the lesson deterministically. Throws UnmatchedQuestion when no reply
// rule answers a learner question.
LessonResult run_lesson(const LessonScript& script, const Paths& paths);

std::string transcript_text(const std::vector<dialogue::Message>& transcript);
std::string metrics_json(const learner::Metrics& metrics, bool with_wall_time = true);

struct SweepRow {
  std::string preset;
  learner::Metrics metrics;
  std::vector<std::string> failures;
};

// Suffixes of the per-preset lesson files: <task>-null.lesson, <task>-O.lesson, ...
inline constexpr std::array<std::string_view, 4> kPresetFileTags = {"null", "O", "OS", "OST"};

std::vector<SweepRow> sweep(const std::string& task, const Paths& paths);
std::string sweep_table(const std::vector<SweepRow>& rows);

}  // namespace itl::harness
