#include <algorithm>
#include <map>

#include <doctest.h>

#include "support.h"

namespace {

using namespace itl;
namespace oracle = testing::oracle;

struct Taught {
  harness::LessonResult r;
  compile::Library lib;

  explicit Taught(const std::string& lesson)
      : r(testing::lesson(lesson)), lib{&r.knowledge.smem, &r.knowledge.rules, &r.vocabulary} {
    REQUIRE(r.problem);
  }

  const games::ProblemSpec& spec() const { return *r.problem; }
  std::vector<games::Move> legal(const world::WorldState& s) const { return games::legal_moves(spec(), lib, s); }
  world::WorldState play(const world::WorldState& s, const games::Move& m) const {
    auto next = compile::simulate(lib, m.ground, s);
    REQUIRE(next.ok());
    return next.value();
  }
};

// Tile number in each cell c1..c9, 0 for the blank; tile ti is ti's number.
std::array<int, 9> eight_board(const world::WorldState& s) {
  std::array<int, 9> b{};
  for (const auto& o : s.objects()) {
    const auto cell = s.location_of(o.id);
    REQUIRE(cell);
    b[std::stoi(cell->substr(1)) - 1] = std::stoi(o.id.substr(1));
  }
  return b;
}

std::string toads_board(const world::WorldState& s) {
  std::string b(7, '_');
  for (const auto& o : s.objects()) {
    const auto cell = s.location_of(o.id);
    b[std::stoi(cell->substr(1)) - 1] = o.color == world::Color::kGreen ? 'T' : 'F';
  }
  return b;
}

std::string tictactoe_board(const world::WorldState& s) {
  std::string b(9, '.');
  for (const auto& o : s.objects()) {
    const auto cell = s.location_of(o.id);
    if (!cell || *cell == "supply") continue;
    b[std::stoi(cell->substr(1)) - 1] = o.color == world::Color::kRed ? 'X' : 'O';
  }
  return b;
}

// Disk pegs smallest first, for the hanoi oracle.
std::vector<int> hanoi_pegs(const world::WorldState& s) {
  std::vector<int> out;
  for (auto id : {"d1", "d2", "d3"}) out.push_back(std::stoi(s.location_of(id)->substr(3)) - 1);
  return out;
}

int hanoi_legal(const std::vector<int>& pegs) {
  int n = 0;
  for (std::size_t d = 0; d < pegs.size(); ++d) {
    bool top = true;
    for (std::size_t e = 0; e < d; ++e) top = top && pegs[e] != pegs[d];
    if (!top) continue;
    for (int p = 0; p < 3; ++p) {
      if (p == pegs[d]) continue;
      bool ok = true;
      for (std::size_t e = 0; e < d; ++e) ok = ok && pegs[e] != p;
      n += ok;
    }
  }
  return n;
}

const games::Move& move_to(const std::vector<games::Move>& moves, const std::string& cell) {
  auto it = std::find_if(moves.begin(), moves.end(), [&](const games::Move& m) { return m.binding.back() == cell; });
  REQUIRE(it != moves.end());
  return *it;
}

}  // namespace

TEST_CASE("Games.OracleSanity") {
  REQUIRE(oracle::eight_puzzle_distance({1, 2, 3, 4, 5, 6, 7, 8, 0}, {1, 2, 3, 4, 5, 6, 7, 8, 0}) == 0);
  REQUIRE(oracle::eight_puzzle_distance({1, 2, 3, 4, 5, 6, 7, 0, 8}, {1, 2, 3, 4, 5, 6, 7, 8, 0}) == 1);
  REQUIRE(oracle::toads_frogs_distance("T_F", "F_T") == 3);
  REQUIRE(oracle::hanoi_distance(1, 0, 2) == 1);
  REQUIRE(oracle::hanoi_distance(4, 0, 2) == 15);
  REQUIRE(oracle::tictactoe_lines().size() == 8);
  REQUIRE(oracle::tictactoe_value(".........") == 0);
  REQUIRE(oracle::tictactoe_value("XX.OO....") == 1);
}

TEST_CASE("Games.SpecValidation") {
  games::ProblemSpec empty;
  REQUIRE_THROWS_AS(games::validate(empty), games::InvalidSpec);
  Taught t("hanoi");
  REQUIRE_NOTHROW(games::validate(t.spec()));
  auto broken = t.spec();
  broken.actions[0].conditions.push_back({"in", {games::SpecTerm::of_param(7)}, true});
  REQUIRE_THROWS_AS(games::validate(broken), games::InvalidSpec);
}

TEST_CASE("Games.HanoiMatchesOracle") {
  Taught t("hanoi");
  const auto& start = t.r.world;
  REQUIRE(hanoi_pegs(start) == std::vector<int>{0, 0, 0});
  const int expected = oracle::hanoi_distance(3, 0, 2);
  REQUIRE(expected == 7);

  auto outcome = games::solve(t.spec(), t.lib, start, 10);
  auto* moves = std::get_if<std::vector<games::Move>>(&outcome);
  REQUIRE(moves);
  REQUIRE(static_cast<int>(moves->size()) == expected);

  // Legal move counts agree with the oracle along the solution.
  auto s = start;
  for (const auto& m : *moves) {
    REQUIRE(static_cast<int>(t.legal(s).size()) == hanoi_legal(hanoi_pegs(s)));
    s = t.play(s, m);
  }
  REQUIRE(hanoi_pegs(s) == std::vector<int>{2, 2, 2});
  REQUIRE(games::satisfied_goal(t.spec(), world::Perception(s, t.r.vocabulary)));
  REQUIRE_FALSE(games::satisfied_goal(t.spec(), world::Perception(start, t.r.vocabulary)));
}

TEST_CASE("Games.EightPuzzleMatchesOracle") {
  Taught t("eight");
  const auto start = eight_board(t.r.world);
  const std::array<int, 9> goal = {1, 2, 3, 4, 5, 6, 7, 8, 0};
  const int expected = oracle::eight_puzzle_distance(start, goal);
  REQUIRE(expected == 10);

  int explored = 0;
  auto outcome = games::solve(t.spec(), t.lib, t.r.world, 12, &explored);
  auto* moves = std::get_if<std::vector<games::Move>>(&outcome);
  REQUIRE(moves);
  REQUIRE(static_cast<int>(moves->size()) == expected);
  REQUIRE(explored > 0);

  auto s = t.r.world;
  for (const auto& m : *moves) {
    const auto board = eight_board(s);
    const int blank = static_cast<int>(std::find(board.begin(), board.end(), 0) - board.begin());
    const int r = blank / 3, c = blank % 3;
    const int neighbours = (r > 0) + (r < 2) + (c > 0) + (c < 2);
    REQUIRE(static_cast<int>(t.legal(s).size()) == neighbours);
    s = t.play(s, m);
  }
  REQUIRE(eight_board(s) == goal);

  auto capped = games::solve(t.spec(), t.lib, t.r.world, expected - 1);
  REQUIRE(std::holds_alternative<games::NoSolution>(capped));
}

TEST_CASE("Games.ToadsAndFrogsMatchesOracle") {
  Taught t("toads");
  const std::string start = toads_board(t.r.world);
  REQUIRE(start == "TTT_FFF");
  const int expected = oracle::toads_frogs_distance(start, "FFF_TTT");
  REQUIRE(expected == 15);

  auto outcome = games::solve(t.spec(), t.lib, t.r.world, 16);
  auto* moves = std::get_if<std::vector<games::Move>>(&outcome);
  REQUIRE(moves);
  REQUIRE(static_cast<int>(moves->size()) == expected);
  auto s = t.r.world;
  for (const auto& m : *moves) {
    REQUIRE(static_cast<int>(t.legal(s).size()) == oracle::toads_frogs_moves(toads_board(s)));
    s = t.play(s, m);
  }
  REQUIRE(toads_board(s) == "FFF_TTT");
}

TEST_CASE("Games.TicTacToeLegalMovesAlongAGame") {
  Taught t("tictactoe");
  auto s = t.r.world;
  // X fills the top row while O plays below it.
  const std::vector<int> line = {1, 4, 2, 5, 3};
  for (std::size_t i = 0; i < line.size(); ++i) {
    const auto board = tictactoe_board(s);
    REQUIRE_FALSE(oracle::tictactoe_won(board, 'X'));
    REQUIRE_FALSE(oracle::tictactoe_won(board, 'O'));
    const auto moves = t.legal(s);
    REQUIRE(static_cast<int>(moves.size()) == std::count(board.begin(), board.end(), '.'));
    REQUIRE(moves.size() == 9 - i);
    s = t.play(s, move_to(moves, "g" + std::to_string(line[i])));
  }
  const auto board = tictactoe_board(s);
  REQUIRE(board == "XXXOO....");
  REQUIRE(oracle::tictactoe_won(board, 'X'));
  REQUIRE(games::satisfied_goal(t.spec(), world::Perception(s, t.r.vocabulary)));
}

// Every one of the eight lines is a goal for each color, and nothing else is.
TEST_CASE("Games.TicTacToeDetectsEveryLine") {
  Taught t("tictactoe");
  const auto lines = oracle::tictactoe_lines();
  REQUIRE(lines.size() == 8);
  for (const char player : {'X', 'O'}) {
    const std::vector<std::string> pieces =
        player == 'X' ? std::vector<std::string>{"p1", "p3", "p5"} : std::vector<std::string>{"p2", "p4", "p6"};
    for (const auto& l : lines) {
      auto s = t.r.world;
      for (int i = 0; i < 3; ++i) {
        s = testing::apply(s, {world::PrimitiveAction::pick_up(pieces[i]),
                               world::PrimitiveAction::put_down("in", pieces[i], "g" + std::to_string(l[i]))});
      }
      REQUIRE(oracle::tictactoe_won(tictactoe_board(s), player));
      REQUIRE(games::satisfied_goal(t.spec(), world::Perception(s, t.r.vocabulary)));
    }
  }
  // Two in a row plus an opposing piece completes nothing.
  auto s = testing::apply(t.r.world, {world::PrimitiveAction::pick_up("p1"),
                                      world::PrimitiveAction::put_down("in", "p1", "g1"),
                                      world::PrimitiveAction::pick_up("p2"),
                                      world::PrimitiveAction::put_down("in", "p2", "g2"),
                                      world::PrimitiveAction::pick_up("p3"),
                                      world::PrimitiveAction::put_down("in", "p3", "g3")});
  REQUIRE_FALSE(games::satisfied_goal(t.spec(), world::Perception(s, t.r.vocabulary)));
}

TEST_CASE("Games.TicTacToeMinimaxMatchesOracle") {
  Taught t("tictactoe");
  // Openings whose remaining game trees are small enough to search fully.
  const std::vector<std::vector<int>> openings = {{5, 1, 9, 3}, {1, 2, 5, 9, 3}, {1, 5, 9, 2, 8}, {5, 1, 2, 8, 3}};
  for (const auto& opening : openings) {
    auto s = t.r.world;
    for (int cell : opening) s = t.play(s, move_to(t.legal(s), "g" + std::to_string(cell)));
    const auto board = tictactoe_board(s);
    CAPTURE(board);
    REQUIRE(games::minimax(t.spec(), t.lib, s) == oracle::tictactoe_value(board));
  }
}

TEST_CASE("Games.SolveLeavesStateAlone") {
  Taught t("hanoi");
  const auto before = t.r.world;
  games::solve(t.spec(), t.lib, t.r.world, 10);
  REQUIRE(t.r.world == before);
}
