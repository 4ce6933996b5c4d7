#include "itl/agent.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace itl::learner {

using dialogue::ImpasseKind;
using dialogue::ImpasseRecord;
using dialogue::Purpose;
using lingo::Form;
using lingo::TeachingKind;
using Integration = dialogue::IntegrationOutcome::Kind;

namespace {

task::Term term_for(const task::Bindings& bindings, const std::string& entity) {
  for (const auto& [slot, e] : bindings) {
    if (e == entity) return task::Term::slot(slot);
  }
  return task::Term::constant(entity);
}

bool mentions_noun(const lingo::NounPhrase& np, const std::string& word) {
  if (np.noun == word) return true;
  return std::any_of(np.modifiers.begin(), np.modifiers.end(),
                     [&](const lingo::PrepPhrase& pp) { return mentions_noun(pp.object, word); });
}

std::vector<std::string> np_words(const lingo::NounPhrase& np) {
  std::vector<std::string> out = np.adjectives;
  if (!np.noun.empty()) out.push_back(np.noun);
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream ss(text);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

bool is_finished(const lingo::ParseTree& t) {
  return t.form == Form::kMeta && (t.word == "finished" || t.word == "no");
}

}  // namespace

std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::kInteraction: return "interaction-management";
    case Capability::kLexical: return "lexical-referential";
    case Capability::kObjectSpatial: return "object-spatial-learning";
    case Capability::kTaskAcquisition: return "task-acquisition";
    case Capability::kTaskExecution: return "task-execution";
  }
  return "?";
}

Metrics::Metrics() {
  for (auto c : kCapabilities) operators[std::string(to_string(c))] = 0;
  for (auto c : kTeachingCategories) utterances[std::string(c)] = 0;
  utterances["command"] = 0;
}

long Metrics::operator_count(Capability c) const {
  auto it = operators.find(std::string(to_string(c)));
  return it == operators.end() ? 0 : it->second;
}

long Metrics::utterance_count(std::string_view category) const {
  auto it = utterances.find(std::string(category));
  return it == utterances.end() ? 0 : it->second;
}

long Metrics::teaching() const {
  long n = 0;
  for (auto c : kTeachingCategories) n += utterance_count(c);
  return n;
}

void Knowledge::write(std::ostream& out) const {
  smem.write(out);
  rules.write(out);
}

void Knowledge::read(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::istringstream graphs(text);
  smem.read(graphs);
  std::istringstream rule_lines(text);
  rules.read(rule_lines);
}

Knowledge load_knowledge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read knowledge file " + path);
  Knowledge k;
  k.read(in);
  return k;
}

void save_knowledge(const Knowledge& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write knowledge file " + path);
  k.write(out);
}

Agent::Agent(world::WorldState world, Knowledge knowledge, ExpertChannel expert)
    : knowledge_(std::move(knowledge)), lexicon_(knowledge_.smem), expert_(std::move(expert)) {
  wm_.world = std::move(world);
  refresh_vocabulary();
}

compile::Library Agent::library() const { return compile::Library{&knowledge_.smem, &knowledge_.rules, &vocab_}; }

std::optional<int> Agent::find_map(const std::string& verb, const std::vector<std::string>& roles) const {
  auto r = knowledge_.smem.peek(task::map_cue(verb, roles));
  if (!r) return std::nullopt;
  return r->id;
}

void Agent::set_world(world::WorldState world) {
  wm_.world = std::move(world);
  refresh();
}

void Agent::learn_location_names() {
  for (const auto& loc : wm_.world.locations()) {
    const bool tabletop = std::find(world::kTabletopLocations.begin(), world::kTabletopLocations.end(), loc.name) !=
                          world::kTabletopLocations.end();
    if (tabletop || lexicon_.knows(loc.name, "noun")) continue;
    lexicon_.learn_percept(loc.name, "noun", "name-" + loc.name);
  }
}

void Agent::cycle(Capability c) {
  ++metrics_.operators[std::string(to_string(c))];
  ++metrics_.cycles;
}

void Agent::refresh() { wm_.refresh(vocab_); }

void Agent::refresh_vocabulary() {
  vocab_ = lexicon_.vocabulary();
  refresh();
}

void Agent::record_utterance(const std::string& speaker, const std::string& text,
                             const std::optional<std::string>& pointing, const std::string& verb) {
  ++metrics_.utterances[std::string(dialogue::utterance_category(stack_.top().purpose))];
  memory::Event event{memory::Event::Kind::kUtterance, speaker, text, verb, std::nullopt};
  epmem_.record(memory::Episode{epmem_.next_index(), wm_.world, std::move(event)});
  dialogue::Message m{speaker, text, pointing, static_cast<long>(transcript_.size()) + 1};
  transcript_.push_back(m);
  if (observer_.on_message) observer_.on_message(m);
}

void Agent::say(const std::string& text) {
  cycle(Capability::kInteraction);
  record_utterance("learner", text, std::nullopt, "");
}

Agent::Heard Agent::ask(const std::string& question) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    cycle(Capability::kInteraction);
    record_utterance("learner", question, std::nullopt, "");
    if (current_) ++current_->questions;
    if (!expert_) throw Aborted("nobody to answer: " + question);
    ExpertReply reply = expert_(question);
    cycle(Capability::kInteraction);
    try {
      auto tree = lingo::parse(reply.text);
      record_utterance("expert", reply.text, reply.pointing,
                       tree.form == Form::kImperative ? tree.command.verb : "");
      if (tree.form == Form::kMeta && tree.word == "stop") throw Aborted("stopped by the expert");
      return Heard{std::move(tree), reply.pointing};
    } catch (const lingo::ParseError& e) {
      record_utterance("expert", reply.text, reply.pointing, "");
      say(std::string("I do not understand: ") + e.what() + ".");
    }
  }
  say("Sorry, I cannot make sense of the answers.");
  throw Aborted("no usable answer to: " + question);
}

void Agent::complain(const std::string& message, int& strikes) {
  say(message);
  if (++strikes >= kMaxAttempts) {
    say("Sorry, I cannot continue with this.");
    throw Aborted(message);
  }
}

dialogue::Segment& Agent::push(Purpose purpose, dialogue::Context context, dialogue::Originator originator) {
  cycle(Capability::kInteraction);
  if (static_cast<int>(stack_.depth()) > compile::kMaxDepth) {
    say("Sorry, this is nested too deeply for me to follow.");
    throw Aborted("nesting too deep");
  }
  return stack_.push(purpose, std::move(context), originator);
}

void Agent::finish_segment() {
  cycle(Capability::kInteraction);
  stack_.satisfy_top();
  stack_.pop();
}

void Agent::abandon_partial_tcns() {
  for (int id : partial_tcns_) {
    if (knowledge_.smem.contains(id) && !task::has_goal(knowledge_.smem.get(id))) knowledge_.smem.erase(id);
  }
  partial_tcns_.clear();
}

Outcome Agent::hear(const std::string& text, const std::optional<std::string>& pointing) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  current_ = &outcome;
  cycle(Capability::kInteraction);
  std::optional<lingo::ParseTree> tree;
  std::string error;
  try {
    tree = lingo::parse(text);
  } catch (const lingo::ParseError& e) {
    error = e.what();
  }
  record_utterance("expert", text, pointing, tree && tree->form == Form::kImperative ? tree->command.verb : "");
  try {
    if (!tree) {
      say("I do not understand: " + error + ".");
      outcome.failure = error;
    } else {
      dispatch(Heard{*tree, pointing}, outcome);
    }
  } catch (const Aborted& e) {
    stack_.clear_to_root();
    abandon_partial_tcns();
    outcome.aborted = true;
    outcome.completed = false;
    outcome.failure = e.what();
    say("OK, I stopped.");
  } catch (...) {
    stack_.clear_to_root();
    current_ = nullptr;
    throw;
  }
  current_ = nullptr;
  metrics_.wall_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return outcome;
}

Outcome Agent::execute(const task::GroundAction& action) {
  Outcome outcome;
  current_ = &outcome;
  std::vector<std::string> roles;
  for (const auto& [role, e] : action.roles) roles.push_back(role);
  try {
    auto id = find_map(action.verb, roles);
    if (!id) {
      outcome.failure = "unknown verb " + action.verb;
    } else {
      outcome.completed = perform_task(*id, action.roles, 0);
    }
  } catch (const Aborted& e) {
    stack_.clear_to_root();
    abandon_partial_tcns();
    outcome.aborted = true;
    outcome.failure = e.what();
  }
  current_ = nullptr;
  return outcome;
}

void Agent::dispatch(const Heard& heard, Outcome& outcome) {
  const auto& tree = heard.tree;
  switch (tree.form) {
    case Form::kImperative:
      outcome.completed = perform_command(tree.command, heard.pointing, 0);
      if (outcome.completed) partial_tcns_.clear();
      break;
    case Form::kMeta:
      if (tree.word == "new problem") {
        acquire_problem_spec(0);
      } else if (tree.word == "solve") {
        report_solution();
      }
      outcome.completed = true;
      break;
    case Form::kTeaching:
      teach(heard);
      outcome.completed = true;
      break;
    case Form::kGoal:
      say("I am not learning a task right now.");
      break;
  }
}

void Agent::teach(const Heard& heard) {
  const auto& tree = heard.tree;
  if (tree.teaching != TeachingKind::kClause) {
    say("I do not know what to do with that.");
    return;
  }
  const auto& c = tree.clauses.front();
  cycle(Capability::kLexical);
  if (c.kind == lingo::ClauseKind::kAdjective) {
    const std::string subject = ground(c.subject, heard.pointing);
    if (lexicon_.knows(c.adjective, "adjective")) return;
    push(Purpose::kAcquireWord, {std::nullopt, "", c.adjective, "adjective"}, dialogue::Originator::kExpert);
    learn_percept_from(c.adjective, "adjective", subject);
    finish_segment();
  } else if (c.kind == lingo::ClauseKind::kRelation) {
    const std::string subject = ground(c.subject, heard.pointing);
    const std::string object = ground(c.object, heard.pointing);
    if (c.negated) return;
    if (lexicon_.knows(c.prep, "preposition") && perception().holds_atom(c.prep, {subject, object})) return;
    push(Purpose::kAcquireRelation, {std::nullopt, "", c.prep, ""}, dialogue::Originator::kExpert);
    cycle(Capability::kObjectSpatial);
    lexicon_.learn_relation(c.prep, perception().pair_atoms(subject, object));
    refresh_vocabulary();
    finish_segment();
  } else {
    say("I do not know what to do with that.");
  }
}

void Agent::handle_initiative(const Heard& heard, int depth) {
  push(Purpose::kPerformTask, {}, dialogue::Originator::kExpert);
  perform_command(heard.tree.command, heard.pointing, depth + 1);
  finish_segment();
}

bool Agent::perform_command(const lingo::Imperative& command, const std::optional<std::string>& pointing,
                            int depth) {
  auto resolved = resolve_command(command, pointing);
  if (!resolved) return false;
  return perform_task(resolved->first, resolved->second, depth);
}

std::optional<std::pair<int, Agent::Roles>> Agent::resolve_command(const lingo::Imperative& command,
                                                                   const std::optional<std::string>& pointing) {
  cycle(Capability::kLexical);
  const auto surface_roles = lingo::roles(command);
  auto r = knowledge_.smem.retrieve(lingo::verb_cue(command));
  Roles roles;
  if (r) {
    const int lexical = *r->graph.target(0, "lexical");
    for (const auto& [role, np] : surface_roles) {
      if (!r->graph.target(lexical, role)) {
        say("I do not know how to " + lingo::surface(command.verb) + " something " + lingo::surface(role) +
            " something.");
        return std::nullopt;
      }
      roles.emplace_back(role, ground(*np, pointing));
    }
    for (const auto* e : r->graph.out_edges(lexical)) {
      const bool bound =
          std::any_of(roles.begin(), roles.end(), [&](const auto& b) { return b.first == e->label; });
      if (!bound) {
        say("I need to know what to " + lingo::surface(command.verb) + ".");
        return std::nullopt;
      }
    }
    return std::pair{r->id, roles};
  }

  // An unknown verb starts a new task concept network.
  std::vector<std::pair<std::string, std::string>> categories;
  for (const auto& [role, np] : surface_roles) {
    const std::string e = ground(*np, pointing);
    roles.emplace_back(role, e);
    categories.emplace_back(role, wm_.world.is_object(e) ? "obj" : "loc");
  }
  cycle(Capability::kTaskAcquisition);
  int tasks = 0;
  for (int id : knowledge_.smem.ids()) {
    const auto& g = knowledge_.smem.get(id);
    if (g.node(0).value == "verb" && !task::primitive_of(g)) ++tasks;
  }
  auto tcn = task::bootstrap_tcn(command.verb, task::name_slots(categories), "op" + std::to_string(tasks + 1));
  const int id = knowledge_.smem.store(std::move(tcn));
  partial_tcns_.push_back(id);
  return std::pair{id, roles};
}

bool Agent::apply(world::PrimitiveKind kind, const Roles& roles, const std::string& verb) {
  cycle(Capability::kTaskExecution);
  auto action = task::to_primitive(kind, roles);
  if (!action) {
    say("I cannot " + lingo::surface(verb) + " that.");
    return false;
  }
  auto next = world::apply_primitive(wm_.world, *action);
  if (!next) {
    say("I cannot " + lingo::surface(verb) + ": " + next.error().message + ".");
    return false;
  }
  memory::Event event{memory::Event::Kind::kAction, "learner", action->to_string(), verb, *action};
  epmem_.record(memory::Episode{epmem_.next_index(), wm_.world, std::move(event)});
  wm_.world = std::move(next.value());
  refresh();
  if (current_) current_->primitives.push_back(*action);
  if (observer_.on_action) observer_.on_action(*action, wm_.world);
  return true;
}

bool Agent::perform_task(int map_id, const Roles& roles, int depth) {
  if (depth > compile::kMaxDepth) {
    say("Sorry, this task is nested too deeply for me.");
    throw Aborted("task nesting too deep");
  }
  memory::ConceptGraph map = knowledge_.smem.get(map_id);
  const std::string verb = task::verb_of(map);
  if (auto kind = task::primitive_of(map)) return apply(*kind, roles, verb);

  const long start_index = epmem_.next_index();
  const world::WorldState start_state = wm_.world;
  const auto bindings = task::bind_slots(map, roles);
  task::DesiredState desired;
  for (;;) {
    cycle(Capability::kTaskExecution);
    auto d = task::generate_desired_state(map, bindings, wm_.world);
    if (auto* ok = std::get_if<task::DesiredState>(&d)) {
      desired = *ok;
      break;
    }
    if (auto* missing = std::get_if<task::MissingConstant>(&d)) {
      say("I cannot find the " + missing->entity + " here.");
      return false;
    }
    acquire_goal(map_id, bindings, depth);
    map = knowledge_.smem.get(map_id);
  }

  std::vector<task::GroundAction> recorded;
  bool instructed = false;
  for (int step = 0;; ++step) {
    cycle(Capability::kTaskExecution);
    if (task::check_desired(perception(), desired)) break;
    if (step >= compile::kMaxSteps) {
      say("I could not finish " + lingo::surface(verb) + ".");
      return false;
    }
    std::optional<task::GroundAction> op;
    if (knowledge_.rules.has_behavior(verb)) {
      cycle(Capability::kTaskExecution);
      op = compile::select(library(), map, bindings, perception());
    }
    if (op) {
      std::vector<std::string> role_names;
      for (const auto& [role, e] : op->roles) role_names.push_back(role);
      auto sub = find_map(op->verb, role_names);
      if (!sub) {
        say("I do not remember how to " + lingo::surface(op->verb) + ".");
        return false;
      }
      if (!perform_task(*sub, op->roles, depth + 1)) return false;
      continue;
    }
    instructed = true;
    recorded.push_back(acquire_action(map_id, bindings, depth));
    map = knowledge_.smem.get(map_id);
  }
  if (instructed) compile_task(map_id, bindings, recorded, start_index, start_state);
  return true;
}

void Agent::acquire_goal(int map_id, const task::Bindings& bindings, int depth) {
  const std::string verb = task::verb_of(knowledge_.smem.get(map_id));
  push(Purpose::kAcquireGoal, {map_id, verb, "", ""});
  ImpasseRecord impasse{ImpasseKind::kUnknownGoal, verb, "", "", false, false, {map_id, verb, "", ""}};
  int strikes = 0;
  for (;;) {
    auto heard = ask(dialogue::generate_question(impasse, templates_));
    auto how = dialogue::integrate_reply(stack_, heard.tree);
    if (how.kind == Integration::kExpertInitiative) {
      handle_initiative(heard, depth);
      continue;
    }
    if (how.kind != Integration::kAccept) {
      complain("I expected " + how.expected + ".", strikes);
      continue;
    }
    std::vector<task::Literal> goal;
    bool usable = true;
    for (const auto& c : heard.tree.clauses) {
      cycle(Capability::kLexical);
      if (c.kind == lingo::ClauseKind::kNominal) {
        usable = false;
        break;
      }
      const std::string subject = ground(c.subject, heard.pointing);
      task::Literal lit;
      lit.positive = !c.negated;
      if (c.kind == lingo::ClauseKind::kAdjective) {
        lit.name = percept_word(c.adjective, "adjective");
        lit.args = {term_for(bindings, subject)};
      } else {
        lit.name = relation_word(c.prep);
        const std::string object = ground(c.object, heard.pointing);
        lit.args = {term_for(bindings, subject), term_for(bindings, object)};
      }
      goal.push_back(std::move(lit));
    }
    if (!usable) {
      complain("I cannot use that as a goal.", strikes);
      continue;
    }
    cycle(Capability::kTaskAcquisition);
    auto g = knowledge_.smem.get(map_id);
    task::set_goal(g, goal);
    knowledge_.smem.update(map_id, std::move(g));
    finish_segment();
    return;
  }
}

task::GroundAction Agent::acquire_action(int map_id, const task::Bindings& bindings, int depth) {
  const std::string verb = task::verb_of(knowledge_.smem.get(map_id));
  push(Purpose::kAcquireAction, {map_id, verb, "", ""});
  ImpasseRecord impasse{ImpasseKind::kNoBehavior, verb, "", "", false, false, {map_id, verb, "", ""}};
  int strikes = 0;
  for (;;) {
    auto heard = ask(dialogue::generate_question(impasse, templates_));
    auto how = dialogue::integrate_reply(stack_, heard.tree);
    if (how.kind != Integration::kAccept) {
      complain("I expected " + how.expected + ".", strikes);
      continue;
    }
    auto resolved = resolve_command(heard.tree.command, heard.pointing);
    if (!resolved) {
      complain("I could not follow that instruction.", strikes);
      continue;
    }
    const auto& [sub_id, roles] = *resolved;
    if (!perform_task(sub_id, roles, depth + 1)) {
      complain("That did not work.", strikes);
      continue;
    }
    const auto& sub = knowledge_.smem.get(sub_id);
    auto kind = task::primitive_of(sub);
    const std::string name = kind ? std::string(world::to_string(*kind)) : task::verb_of(sub);
    task::ActionRef ref{name, {}};
    task::GroundAction ground_action{name, {}};
    for (const auto& [role, e] : roles) {
      ref.roles.emplace_back(role, term_for(bindings, e));
      ground_action.roles.emplace_back(role, e);
    }
    cycle(Capability::kTaskAcquisition);
    auto g = knowledge_.smem.get(map_id);
    if (task::add_action(g, ref)) knowledge_.smem.update(map_id, std::move(g));
    finish_segment();
    return ground_action;
  }
}

void Agent::compile_task(int map_id, const task::Bindings& bindings, const std::vector<task::GroundAction>& recorded,
                         long start_index, const world::WorldState& start_state) {
  cycle(Capability::kTaskAcquisition);
  const auto& tcn = knowledge_.smem.get(map_id);
  const std::string verb = task::verb_of(tcn);
  const auto* begin = epmem_.task_begin(verb);
  const world::WorldState initial = begin && begin->index == start_index - 1 ? begin->snapshot : start_state;
  compile::Compiled compiled;
  try {
    compiled = compile::proceduralize(library(), tcn, bindings, initial, recorded,
                                      "lesson-" + std::to_string(++lessons_));
  } catch (const compile::ProjectionFailure&) {
    say("I could not work out why those actions achieve the goal of " + lingo::surface(verb) + ".");
    return;
  }
  std::vector<compile::SelectionRule> merged;
  for (const auto* r : knowledge_.rules.selections(verb)) merged.push_back(*r);
  for (auto& r : compiled.selections) {
    const bool known = std::any_of(merged.begin(), merged.end(), [&](const compile::SelectionRule& m) {
      return m.conditions == r.conditions && m.op == r.op;
    });
    if (!known) merged.push_back(std::move(r));
  }
  knowledge_.rules.replace(verb, std::move(compiled.proposals), std::move(merged));
  std::erase(partial_tcns_, map_id);
}

std::string Agent::ground(const lingo::NounPhrase& np, const std::optional<std::string>& pointing) {
  for (int learned = 0;; ++learned) {
    cycle(Capability::kLexical);
    auto g = lingo::ground_np(np, lexicon_, perception(), pointing);
    if (auto* id = std::get_if<std::string>(&g)) return *id;
    const auto& err = std::get<lingo::GroundingError>(g);
    if (learned > 16) throw Aborted("cannot ground " + lingo::pretty(np));
    switch (err.kind) {
      case lingo::GroundingError::Kind::kUnknownWord:
        acquire_word(err.word, mentions_noun(np, err.word) ? "noun" : "adjective");
        break;
      case lingo::GroundingError::Kind::kUnknownRelation: acquire_relation(err.word); break;
      default: return disambiguate(np, err);
    }
  }
}

std::string Agent::disambiguate(const lingo::NounPhrase& np, const lingo::GroundingError& error) {
  push(Purpose::kDisambiguate, {std::nullopt, "", lingo::pretty(np), error.describe()});
  ImpasseRecord impasse;
  impasse.kind = ImpasseKind::kUnresolvableRe;
  impasse.ambiguous = error.kind == lingo::GroundingError::Kind::kAmbiguous;
  impasse.np = impasse.ambiguous ? join(np_words(np)) : lingo::pretty(np);
  int strikes = 0;
  for (;;) {
    auto heard = ask(dialogue::generate_question(impasse, templates_));
    auto how = dialogue::integrate_reply(stack_, heard.tree);
    if (how.kind != Integration::kAccept) {
      complain("I expected " + how.expected + ".", strikes);
      continue;
    }
    const auto& reply = heard.tree.teaching == TeachingKind::kClause ? heard.tree.clauses.front().subject
                                                                     : heard.tree.np;
    const std::string entity = ground(reply, heard.pointing);
    finish_segment();
    return entity;
  }
}

std::vector<std::string> Agent::constraints(const lingo::NounPhrase& np) {
  for (int learned = 0;; ++learned) {
    cycle(Capability::kLexical);
    auto c = lingo::np_constraints(np, lexicon_);
    if (auto* ok = std::get_if<std::vector<std::string>>(&c)) return *ok;
    const auto& err = std::get<lingo::GroundingError>(c);
    if (learned > 16) throw Aborted("cannot understand " + lingo::pretty(np));
    acquire_word(err.word, mentions_noun(np, err.word) ? "noun" : "adjective");
  }
}

std::string Agent::percept_word(const std::string& word, const std::string& pos) {
  for (;;) {
    cycle(Capability::kLexical);
    auto m = lexicon_.lookup(word, pos);
    if (m && m->kind == lingo::Meaning::Kind::kPercept) return m->value;
    acquire_word(word, pos);
  }
}

std::string Agent::relation_word(const std::string& word) {
  for (;;) {
    cycle(Capability::kLexical);
    auto m = lexicon_.lookup(word, "preposition");
    if (m && m->kind == lingo::Meaning::Kind::kRelation) return m->value;
    acquire_relation(word);
  }
}

void Agent::acquire_word(const std::string& word, const std::string& pos) {
  push(Purpose::kAcquireWord, {std::nullopt, "", word, pos});
  ImpasseRecord impasse{ImpasseKind::kUnknownWord, "", word, "", false, false, {std::nullopt, "", word, pos}};
  int strikes = 0;
  for (;;) {
    auto heard = ask(dialogue::generate_question(impasse, templates_));
    auto how = dialogue::integrate_reply(stack_, heard.tree);
    if (how.kind != Integration::kAccept) {
      complain("I expected " + how.expected + ".", strikes);
      continue;
    }
    std::optional<std::string> entity = heard.pointing;
    if (!entity) {
      const lingo::NounPhrase* np = nullptr;
      if (heard.tree.teaching == TeachingKind::kNounPhrase) np = &heard.tree.np;
      if (heard.tree.teaching == TeachingKind::kClause) np = &heard.tree.clauses.front().subject;
      if (np && np->determiner != "this") entity = ground(*np, std::nullopt);
    }
    if (!entity || !wm_.world.has_entity(*entity)) {
      complain("Please point at an example of " + word + ".", strikes);
      continue;
    }
    learn_percept_from(word, pos, *entity);
    finish_segment();
    return;
  }
}

void Agent::learn_percept_from(const std::string& word, const std::string& pos, const std::string& entity) {
  std::string percept;
  if (wm_.world.is_location(entity)) {
    percept = "name-" + entity;
  } else {
    const auto* obj = wm_.world.find_object(entity);
    ImpasseRecord impasse{ImpasseKind::kUnknownWord, "", word, "", false, true, {}};
    int strikes = 0;
    while (percept.empty()) {
      auto heard = ask(dialogue::generate_question(impasse, templates_));
      std::string kind = heard.tree.word;
      if (heard.tree.form == Form::kTeaching && heard.tree.teaching == TeachingKind::kNounPhrase) {
        kind = heard.tree.np.noun;
      }
      if (kind == "color") percept = "color-" + std::string(world::to_string(obj->color));
      else if (kind == "shape") percept = "shape-" + std::string(world::to_string(obj->shape));
      else if (kind == "size") percept = "size-" + std::string(world::to_string(obj->size));
      else if (kind == "object") percept = "object";
      else complain("I know about colors, shapes and sizes.", strikes);
    }
  }
  cycle(Capability::kObjectSpatial);
  lexicon_.learn_percept(word, pos, percept);
}

void Agent::acquire_relation(const std::string& word) {
  push(Purpose::kAcquireRelation, {std::nullopt, "", word, ""});
  ImpasseRecord impasse{ImpasseKind::kUnknownRelation, "", word, "", false, false, {std::nullopt, "", word, ""}};
  int strikes = 0;
  for (;;) {
    auto heard = ask(dialogue::generate_question(impasse, templates_));
    auto how = dialogue::integrate_reply(stack_, heard.tree);
    if (how.kind != Integration::kAccept) {
      complain("I expected " + how.expected + ".", strikes);
      continue;
    }
    const auto& c = heard.tree.clauses.front();
    if (c.kind != lingo::ClauseKind::kRelation || c.prep != word || c.negated) {
      complain("I need an example where something is " + lingo::surface(word) + " something.", strikes);
      continue;
    }
    const std::string subject = ground(c.subject, heard.pointing);
    const std::string object = ground(c.object, heard.pointing);
    auto atoms = perception().pair_atoms(subject, object);
    if (atoms.empty()) {
      complain("I cannot see how those two are related.", strikes);
      continue;
    }
    cycle(Capability::kObjectSpatial);
    lexicon_.learn_relation(word, std::move(atoms));
    refresh_vocabulary();
    finish_segment();
    return;
  }
}

void Agent::ensure_verb(const std::string& verb, int depth) {
  int strikes = 0;
  for (;;) {
    if (auto id = find_map(verb, {})) {
      const auto& g = knowledge_.smem.get(*id);
      if (task::primitive_of(g) || knowledge_.rules.has_behavior(verb)) return;
    }
    ImpasseRecord impasse{ImpasseKind::kUnknownVerb, verb, "", "", false, false, {std::nullopt, verb, "", ""}};
    auto heard = ask(dialogue::generate_question(impasse, templates_));
    if (heard.tree.form != Form::kImperative) {
      complain("I expected an example of " + lingo::surface(verb) + ".", strikes);
      continue;
    }
    handle_initiative(heard, depth);
  }
}

games::Param Agent::spec_param(const lingo::NounPhrase& np) {
  games::Param p;
  const auto cs = constraints(np);
  const bool location = std::find(cs.begin(), cs.end(), "location") != cs.end();
  p.category = location ? "loc" : "obj";
  for (const auto& c : cs) {
    if (c != "object" && c != "location") p.percepts.push_back(c);
  }
  p.description = join(np_words(np));
  return p;
}

games::SpecTerm Agent::spec_term(const lingo::NounPhrase& np, const std::vector<games::Param>& params,
                                 std::optional<int> current) {
  if (np.param) return games::SpecTerm::of_param(*np.param - 1);
  const auto words = np_words(np);
  auto describes = [&](int i) {
    if (words.empty()) return false;
    const auto have = split_words(params[i].description);
    return std::all_of(words.begin(), words.end(),
                       [&](const std::string& w) { return std::find(have.begin(), have.end(), w) != have.end(); });
  };
  if (np.determiner == "the") {
    if (current && describes(*current)) return games::SpecTerm::of_param(*current);
    std::vector<int> hits;
    for (int i = 0; i < static_cast<int>(params.size()); ++i) {
      if (describes(i)) hits.push_back(i);
    }
    if (hits.size() == 1) return games::SpecTerm::of_param(hits.front());
  }
  if (np.determiner == "a") {
    games::SpecTerm t;
    t.kind = games::SpecTerm::Kind::kSome;
    t.filter = constraints(np);
    if (!np.modifiers.empty()) {
      const auto& pp = np.modifiers.front();
      t.relation = relation_word(pp.prep);
      auto target = spec_term(pp.object, params, current);
      if (target.kind == games::SpecTerm::Kind::kParam) t.relation_param = target.param;
      else t.relation_entity = target.entity;
    }
    return t;
  }
  return games::SpecTerm::of_entity(ground(np, std::nullopt));
}

games::Condition Agent::spec_condition(const lingo::Clause& clause, const std::vector<games::Param>& params,
                                       std::optional<int> current) {
  cycle(Capability::kLexical);
  games::Condition c;
  c.positive = !clause.negated;
  auto subject = spec_term(clause.subject, params, current);
  switch (clause.kind) {
    case lingo::ClauseKind::kAdjective:
      c.name = percept_word(clause.adjective, "adjective");
      c.args = {subject};
      break;
    case lingo::ClauseKind::kRelation:
      c.name = relation_word(clause.prep);
      c.args = {subject, spec_term(clause.object, params, current)};
      break;
    case lingo::ClauseKind::kNominal:
      c.name = "=";
      c.args = {subject, spec_term(clause.object, params, current)};
      break;
  }
  return c;
}

void Agent::acquire_problem_spec(int depth) {
  push(Purpose::kAcquireProblemSpec, {std::nullopt, "", "", "problem"});
  games::ProblemSpec spec;
  spec.board = wm_.world;
  int strikes = 0;
  auto ask_for = [&](dialogue::SpecQuestion q) { return ask(dialogue::spec_question(q)); };

  for (;;) {
    auto heard = ask_for(dialogue::SpecQuestion::kVerb);
    if (is_finished(heard.tree)) break;
    if (heard.tree.form != Form::kTeaching || heard.tree.teaching != TeachingKind::kWord) {
      complain("I expected the name of a verb.", strikes);
      continue;
    }
    const std::string verb = heard.tree.word;
    ensure_verb(verb, depth);
    cycle(Capability::kTaskAcquisition);
    games::Action action{verb, {}, {}};
    for (;;) {
      auto p = ask_for(dialogue::SpecQuestion::kActionParameter);
      if (is_finished(p.tree)) break;
      if (p.tree.form != Form::kTeaching || p.tree.teaching != TeachingKind::kNounPhrase) {
        complain("I expected a parameter such as a block.", strikes);
        continue;
      }
      action.params.push_back(spec_param(p.tree.np));
      const int current = static_cast<int>(action.params.size()) - 1;
      for (;;) {
        auto c = ask_for(dialogue::SpecQuestion::kParameterCondition);
        if (is_finished(c.tree)) break;
        if (c.tree.form != Form::kTeaching || c.tree.teaching != TeachingKind::kClause) {
          complain("I expected a condition such as the block is in 3.", strikes);
          continue;
        }
        action.conditions.push_back(spec_condition(c.tree.clauses.front(), action.params, current));
      }
    }
    spec.actions.push_back(std::move(action));
  }

  for (;;) {
    games::Goal goal;
    for (;;) {
      auto p = ask_for(dialogue::SpecQuestion::kGoalParameter);
      if (is_finished(p.tree)) break;
      if (p.tree.form != Form::kTeaching || p.tree.teaching != TeachingKind::kNounPhrase) {
        complain("I expected a parameter such as a block.", strikes);
        continue;
      }
      goal.params.push_back(spec_param(p.tree.np));
    }
    for (;;) {
      auto c = ask_for(dialogue::SpecQuestion::kGoalCondition);
      if (is_finished(c.tree)) break;
      if (c.tree.form != Form::kTeaching || c.tree.teaching != TeachingKind::kClause) {
        complain("I expected a condition such as the block is in 3.", strikes);
        continue;
      }
      goal.conditions.push_back(spec_condition(c.tree.clauses.front(), goal.params, std::nullopt));
    }
    spec.goals.push_back(std::move(goal));
    auto more = ask_for(dialogue::SpecQuestion::kAnotherGoal);
    if (more.tree.form == Form::kMeta && more.tree.word == "yes") continue;
    break;
  }

  try {
    games::validate(spec);
  } catch (const games::InvalidSpec& e) {
    say(std::string("That problem is not well formed: ") + e.what() + ".");
    finish_segment();
    return;
  }
  cycle(Capability::kTaskAcquisition);
  problem_ = std::move(spec);
  say("I have learned the problem.");
  finish_segment();
}

games::SolveOutcome Agent::solve(int depth_cap, int* explored) const {
  if (!problem_) return games::NoSolution{0};
  return games::solve(*problem_, library(), wm_.world, depth_cap, explored);
}

void Agent::report_solution() {
  if (!problem_) {
    say("I do not know a problem to solve.");
    return;
  }
  cycle(Capability::kTaskExecution);
  auto outcome = solve(solve_depth_);
  if (auto* moves = std::get_if<std::vector<games::Move>>(&outcome)) {
    std::string text = "I found a solution with " + std::to_string(moves->size()) + " moves";
    for (std::size_t i = 0; i < moves->size(); ++i) text += (i ? ", " : ": ") + (*moves)[i].ground.to_string();
    last_solution_ = *moves;
    say(text + ".");
  } else if (std::holds_alternative<games::NoSolution>(outcome)) {
    last_solution_.reset();
    say("I cannot find a solution within " + std::to_string(solve_depth_) + " moves.");
  } else {
    last_solution_.reset();
    say("I do not know how to " + lingo::surface(std::get<games::SpecUsesUncompiledTask>(outcome).verb) + " yet.");
  }
}

}  // namespace itl::learner
