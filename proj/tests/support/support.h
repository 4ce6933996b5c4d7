#pragma once

#include <array>
#include <string>
#include <vector>

#include "itl/agent.h"
#include "itl/harness.h"

namespace itl::testing {

harness::Paths paths();
std::string test_data(const std::string& file);

world::WorldState scene(const std::string& name);
learner::Knowledge preset(const std::string& name);

// Runs a lesson from the data directory and fails loudly on expectation errors.
harness::LessonResult lesson(const std::string& name);

world::RelationVocabulary vocabulary_of(const learner::Knowledge& k);

// Applies primitives to a state; throws on failure.
world::WorldState apply(world::WorldState s, const std::vector<world::PrimitiveAction>& actions);

// An expert that must never be consulted.
learner::ExpertChannel silent_expert();

// One execution of a taught task from a prepared initial state, checked by
// replaying the emitted primitives through the simulator.
struct Trial {
  std::string label;
  bool ok = false;
  int primitives = 0;
  int questions = 0;
  bool opened = false;  // an open primitive was applied
  std::string why;
};

Trial run_trial(const learner::Knowledge& k, const world::WorldState& start, const task::GroundAction& action,
                const std::vector<world::Predicate>& goal, const std::string& label);

inline const std::array<std::string, 4> kObjects = {"obj1", "obj2", "obj3", "obj4"};
inline const std::array<std::string, 4> kLocations = {"table", "pantry", "garbage", "stove"};

// The object starts somewhere other than the destination so that every
// instantiation needs work; `held` starts with it in the gripper.
world::WorldState move_start(const std::string& obj, const std::string& loc, bool held);

std::vector<Trial> move_trials(const learner::Knowledge& k, bool with_held);
std::vector<Trial> shift_trials(const learner::Knowledge& k);
std::vector<Trial> store_trials(const learner::Knowledge& k);

// Learned task structure against the task table: goal literals and problem
// space, compared as sets. Returns one line per mismatch.
struct TaskShape {
  std::string verb;
  std::vector<std::string> roles;
  std::vector<std::string> goal;
  std::vector<std::string> space;
};
const std::vector<TaskShape>& task_table();
// An empty verb list checks every row.
std::vector<std::string> shape_mismatches(const learner::Knowledge& k, const std::vector<std::string>& verbs = {});

// Store sweep counts pinned after the first deterministic run.
struct SweepGolden {
  std::string preset;
  std::array<long, 5> operators;   // in capability order
  std::array<long, 5> utterances;  // in teaching-category order
  long teaching;
  long cycles;
};
const std::array<SweepGolden, 4>& store_sweep_goldens();

// Trend checks over sweep rows in preset order; empty when the trend holds.
std::vector<std::string> utterance_trend_violations(const std::vector<harness::SweepRow>& rows);
std::vector<std::string> operator_trend_violations(const std::vector<harness::SweepRow>& rows);
std::vector<std::string> golden_mismatches(const std::vector<harness::SweepRow>& rows);

// Independent oracles over explicit tuple states; no simulator involved.
namespace oracle {

// Board as 9 tiles row by row, 0 for the blank.
int eight_puzzle_distance(const std::array<int, 9>& start, const std::array<int, 9>& goal);
// 'T' toad (moves right), 'F' frog (moves left), '_' empty.
int toads_frogs_distance(const std::string& start, const std::string& goal);
int toads_frogs_moves(const std::string& board);
// Pegs as the peg index of each disk, smallest first.
int hanoi_distance(int disks, int from, int to);
// Collinear cell triples of the 3x3 grid, cells numbered 1..9 row by row.
std::vector<std::array<int, 3>> tictactoe_lines();
// 'X' (first player), 'O', '.'; value for the side to move with perfect play.
int tictactoe_value(const std::string& board);
bool tictactoe_won(const std::string& board, char player);

}  // namespace oracle

}  // namespace itl::testing
