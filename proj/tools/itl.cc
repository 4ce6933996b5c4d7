// Command-line front end: lessons, preset sweeps, puzzle solving, the session
// service and a terminal expert.
#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "itl/harness.h"
#include "itl/service.h"

namespace {

using namespace itl;
namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run(const std::string& lesson, const std::string& metrics, const std::string& transcript,
        const harness::Paths& paths) {
  auto result = harness::run_lesson(harness::load_lesson(lesson), paths);
  if (!metrics.empty()) write_file(metrics, harness::metrics_json(result.metrics));
  if (!transcript.empty()) write_file(transcript, harness::transcript_text(result.transcript));
  if (transcript.empty()) std::cout << harness::transcript_text(result.transcript);
  for (const auto& f : result.failures) std::cerr << "ExpectationFailed: " << f << "\n";
  return result.ok() ? 0 : 1;
}

int sweep(const std::string& task, const std::string& out, const harness::Paths& paths) {
  auto rows = harness::sweep(task, paths);
  const fs::path dir(out);
  fs::create_directories(dir);
  const std::string table = harness::sweep_table(rows);
  write_file(dir / (task + "-sweep.tsv"), table);
  int failed = 0;
  for (const auto& r : rows) {
    write_file(dir / (task + "-" + r.preset + ".json"), harness::metrics_json(r.metrics));
    for (const auto& f : r.failures) {
      std::cerr << r.preset << ": ExpectationFailed: " << f << "\n";
      ++failed;
    }
  }
  std::cout << table;
  return failed ? 1 : 0;
}

int solve(const std::string& puzzle, int depth, const harness::Paths& paths) {
  auto result = harness::run_lesson(harness::load_lesson(puzzle), paths);
  for (const auto& f : result.failures) std::cerr << "ExpectationFailed: " << f << "\n";
  if (!result.problem) {
    std::cerr << "the lesson taught no problem\n";
    return 1;
  }
  std::cout << result.problem->to_text();
  const compile::Library lib{&result.knowledge.smem, &result.knowledge.rules, &result.vocabulary};
  int explored = 0;
  auto outcome = games::solve(*result.problem, lib, result.world, depth, &explored);
  if (auto* moves = std::get_if<std::vector<games::Move>>(&outcome)) {
    std::cout << "solution " << moves->size() << " moves, " << explored << " states\n";
    for (std::size_t i = 0; i < moves->size(); ++i) std::cout << i + 1 << ". " << (*moves)[i].ground.to_string() << "\n";
    return result.ok() ? 0 : 1;
  }
  if (auto* none = std::get_if<games::NoSolution>(&outcome)) {
    std::cout << "no solution within " << depth << " moves, " << none->explored << " states\n";
  } else {
    std::cout << "uses an uncompiled task: " << std::get<games::SpecUsesUncompiledTask>(outcome).verb << "\n";
  }
  return 2;
}

int presets(const std::string& out, const harness::Paths& paths) {
  const fs::path dir(out);
  fs::create_directories(dir);
  for (auto name : {"null", "O", "O+S"}) {
    learner::save_knowledge(harness::builtin_preset(name), (dir / (std::string(name) + ".knowledge")).string());
  }
  learner::save_knowledge(harness::build_task_preset(paths), (dir / "O+S+T.knowledge").string());
  std::cout << "wrote 4 presets to " << dir.string() << "\n";
  return 0;
}

httplib::Server* g_server = nullptr;

int serve(int port, const std::string& scenes, const std::string& presets_dir, harness::Paths paths) {
  if (!scenes.empty()) paths.scenes = scenes;
  if (!presets_dir.empty()) paths.presets = presets_dir;
  service::Service svc(paths);
  httplib::Server server;
  svc.bind(server);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on port " << port << "\n" << std::flush;
  const bool ok = server.listen("0.0.0.0", port);
  g_server = nullptr;
  return ok ? 0 : 1;
}

// Lines starting with "@id " point at that entity.
learner::ExpertReply read_reply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw learner::Aborted("end of input");
  learner::ExpertReply r;
  if (line.size() > 1 && line[0] == '@') {
    const auto space = line.find(' ');
    r.pointing = line.substr(1, space == std::string::npos ? std::string::npos : space - 1);
    r.text = space == std::string::npos ? "" : line.substr(space + 1);
  } else {
    r.text = line;
  }
  return r;
}

int repl(const std::string& scene, const std::string& preset, const harness::Paths& paths) {
  learner::Agent agent(harness::load_scene_named(scene, paths), harness::load_preset(preset, paths), {});
  if (preset != "null") agent.learn_location_names();
  learner::Observer observer;
  observer.on_message = [](const dialogue::Message& m) {
    if (m.speaker == "learner") std::cout << "learner: " << m.text << "\n";
  };
  observer.on_action = [](const world::PrimitiveAction& a, const world::WorldState&) {
    std::cout << "  [" << a.to_string() << "]\n";
  };
  agent.set_observer(observer);
  agent.set_expert([](const std::string&) {
    std::cout << "expert> " << std::flush;
    return read_reply(std::cin);
  });
  std::cout << world::format_scene(agent.world());
  for (;;) {
    std::cout << "expert> " << std::flush;
    learner::ExpertReply r;
    try {
      r = read_reply(std::cin);
    } catch (const learner::Aborted&) {
      break;
    }
    if (r.text == "quit") break;
    if (r.text == "scene") {
      std::cout << world::format_scene(agent.world());
      continue;
    }
    if (r.text.empty()) continue;
    agent.hear(r.text, r.pointing);
  }
  std::cout << harness::metrics_json(agent.metrics());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive task learning agent"};
  app.require_subcommand(1);
  std::string data_dir;
  app.add_option("--data", data_dir, "Data directory with scenes/, presets/ and lessons/");

  std::string lesson, metrics_out, transcript_out;
  auto* run_cmd = app.add_subcommand("run", "Run a lesson script");
  run_cmd->add_option("--lesson", lesson, "Lesson file")->required();
  run_cmd->add_option("--metrics", metrics_out, "Write metrics JSON here");
  run_cmd->add_option("--transcript", transcript_out, "Write the transcript here");

  std::string task, out_dir;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a task under every knowledge preset");
  sweep_cmd->add_option("--task", task, "Task name (lesson family)")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::string puzzle;
  int depth = 32;
  auto* solve_cmd = app.add_subcommand("solve", "Teach a puzzle by lesson, then search for a solution");
  solve_cmd->add_option("--puzzle", puzzle, "Puzzle lesson file")->required();
  solve_cmd->add_option("--depth", depth, "Depth cap")->required();

  int port = 8080;
  std::string scenes_dir, presets_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the session service");
  serve_cmd->add_option("--port", port, "Port")->required();
  serve_cmd->add_option("--scenes", scenes_dir, "Scene directory");
  serve_cmd->add_option("--presets", presets_dir, "Preset directory");

  std::string scene = "default", preset = "null";
  auto* repl_cmd = app.add_subcommand("repl", "Act as the expert from the terminal");
  repl_cmd->add_option("--scene", scene, "Scene name");
  repl_cmd->add_option("--preset", preset, "Knowledge preset");

  std::string presets_out;
  auto* presets_cmd = app.add_subcommand("presets", "Write the four knowledge presets");
  presets_cmd->add_option("--out", presets_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  const auto paths = data_dir.empty() ? harness::Paths::defaults() : harness::Paths::under(data_dir);
  try {
    if (*run_cmd) return run(lesson, metrics_out, transcript_out, paths);
    if (*sweep_cmd) return sweep(task, out_dir, paths);
    if (*solve_cmd) return solve(puzzle, depth, paths);
    if (*serve_cmd) return serve(port, scenes_dir, presets_dir, paths);
    if (*repl_cmd) return repl(scene, preset, paths);
    if (*presets_cmd) return presets(presets_out, paths);
  } catch (const harness::UnmatchedQuestion& e) {
    std::cerr << "UnmatchedQuestion: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
