#include "itl/service.h"

#include <chrono>

#include <httplib.h>

namespace itl::service {

namespace {

json box_json(const world::Box& b) { return json::array({b.x0, b.y0, b.z0, b.x1, b.y1, b.z1}); }

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", kind}, {"message", message}}.dump(), "application/json");
}

void send(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

json scene_json(const world::WorldState& state) {
  json objects = json::array();
  for (const auto& o : state.objects()) {
    auto loc = state.location_of(o.id);
    objects.push_back({{"id", o.id},
                       {"color", world::to_string(o.color)},
                       {"shape", world::to_string(o.shape)},
                       {"size", world::to_string(o.size)},
                       {"bounds", box_json(o.bounds)},
                       {"location", loc ? json(*loc) : json(nullptr)}});
  }
  json locations = json::array();
  for (const auto& l : state.locations()) {
    locations.push_back({{"name", l.name},
                         {"region", box_json(l.region)},
                         {"openable", l.openable},
                         {"open", l.open},
                         {"powered", l.powered},
                         {"on", l.on}});
  }
  return {{"objects", objects},
          {"locations", locations},
          {"gripper", state.gripper() ? json(*state.gripper()) : json(nullptr)},
          {"clock", state.clock()}};
}

json message_json(const dialogue::Message& m) {
  return {{"speaker", m.speaker},
          {"text", m.text},
          {"pointing", m.pointing ? json(*m.pointing) : json(nullptr)},
          {"seq", m.seq}};
}

dialogue::Message parse_message(const json& body) {
  if (!body.is_object()) throw MalformedMessage("message must be a JSON object");
  dialogue::Message m;
  if (!body.contains("speaker") || !body["speaker"].is_string()) throw MalformedMessage("speaker must be a string");
  m.speaker = body["speaker"];
  if (m.speaker != "expert") throw MalformedMessage("only the expert may send messages");
  if (!body.contains("text") || !body["text"].is_string()) throw MalformedMessage("text must be a string");
  m.text = body["text"];
  if (m.text.find_first_not_of(" \t\r\n") == std::string::npos) throw MalformedMessage("text is empty");
  if (body.contains("pointing") && !body["pointing"].is_null()) {
    if (!body["pointing"].is_string()) throw MalformedMessage("pointing must be an entity id or null");
    m.pointing = body["pointing"].get<std::string>();
  }
  if (!body.contains("seq") || !body["seq"].is_number_integer()) throw MalformedMessage("seq must be an integer");
  m.seq = body["seq"];
  return m;
}

std::string frame(const json& event) {
  const std::string text = event.dump();
  return std::to_string(text.size()) + "\n" + text + "\n";
}

Session::Session(std::string id, world::WorldState world, learner::Knowledge knowledge, bool location_names)
    : id_(std::move(id)), agent_(std::move(world), std::move(knowledge), {}) {
  if (location_names) agent_.learn_location_names();
  agent_.set_expert([this](const std::string& q) { return next_reply(q); });
  learner::Observer observer;
  observer.on_message = [this](const dialogue::Message& m) {
    json e = message_json(m);
    e["type"] = "message";
    emit(std::move(e));
  };
  observer.on_action = [this](const world::PrimitiveAction& a, const world::WorldState& s) {
    emit({{"type", "action"}, {"action", a.to_string()}, {"scene", scene_json(s)}});
  };
  agent_.set_observer(std::move(observer));
  snapshot();
  thread_ = std::thread([this] { loop(); });
}

Session::~Session() {
  close();
  if (thread_.joinable()) thread_.join();
}

void Session::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

void Session::post(dialogue::Message m) {
  std::lock_guard lock(mu_);
  if (closed_) throw UnknownSession(id_);
  inbox_.push_back(std::move(m));
  cv_.notify_all();
}

std::optional<dialogue::Message> Session::pop() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return closed_ || !inbox_.empty(); });
  if (closed_) return std::nullopt;
  auto m = std::move(inbox_.front());
  inbox_.pop_front();
  busy_ = true;
  pending_question_ = false;
  return m;
}

learner::ExpertReply Session::next_reply(const std::string&) {
  {
    std::lock_guard lock(mu_);
    pending_question_ = true;
    busy_ = false;
    cv_.notify_all();
  }
  emit({{"type", "question"}, {"stack_depth", agent_.stack().depth()}});
  auto m = pop();
  if (!m) throw SessionClosed();
  return {m->text, m->pointing};
}

void Session::loop() {
  for (;;) {
    auto m = pop();
    if (!m) return;
    try {
      auto outcome = agent_.hear(m->text, m->pointing);
      emit({{"type", "done"},
            {"completed", outcome.completed},
            {"aborted", outcome.aborted},
            {"primitives", outcome.primitives.size()},
            {"questions", outcome.questions},
            {"failure", outcome.failure}});
    } catch (const SessionClosed&) {
      return;
    } catch (const std::exception& e) {
      emit({{"type", "error"}, {"message", e.what()}});
    }
    std::lock_guard lock(mu_);
    busy_ = false;
    cv_.notify_all();
  }
}

void Session::snapshot() {
  json transcript = json::array();
  for (const auto& m : agent_.transcript()) transcript.push_back(message_json(m));
  json metrics = json::parse(harness::metrics_json(agent_.metrics()));
  json scene = scene_json(agent_.world());
  std::lock_guard lock(mu_);
  scene_ = std::move(scene);
  metrics_ = std::move(metrics);
  transcript_ = std::move(transcript);
  stack_depth_ = agent_.stack().depth();
}

void Session::emit(json event) {
  snapshot();
  std::lock_guard lock(mu_);
  event["index"] = events_.size();
  events_.push_back(std::move(event));
  cv_.notify_all();
}

json Session::state() const {
  std::lock_guard lock(mu_);
  return {{"id", id_},
          {"scene", scene_},
          {"pending_question", pending_question_},
          {"busy", busy_ || !inbox_.empty()},
          {"stack_depth", stack_depth_},
          {"events", events_.size()}};
}

json Session::metrics() const {
  std::lock_guard lock(mu_);
  return metrics_;
}

json Session::transcript() const {
  std::lock_guard lock(mu_);
  return transcript_;
}

std::vector<json> Session::events(std::size_t since, int wait_ms) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, std::chrono::milliseconds(wait_ms), [&] { return closed_ || events_.size() > since; });
  if (since >= events_.size()) return {};
  return {events_.begin() + static_cast<long>(since), events_.end()};
}

bool Session::wait_idle(int timeout_ms) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                      [&] { return closed_ || (!busy_ && inbox_.empty()); });
}

Service::~Service() {
  std::lock_guard lock(mu_);
  sessions_.clear();
}

std::string Service::create(const std::string& scene, const std::string& preset) {
  auto world = harness::load_scene_named(scene, paths_);
  auto knowledge = harness::load_preset(preset, paths_);
  std::lock_guard lock(mu_);
  const std::string id = "s" + std::to_string(next_id_++);
  sessions_.emplace(id, std::make_shared<Session>(id, std::move(world), std::move(knowledge), preset != "null"));
  return id;
}

std::shared_ptr<Session> Service::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession("no session " + id);
  return it->second;
}

void Service::remove(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSession("no session " + id);
    s = std::move(it->second);
    sessions_.erase(it);
  }
  s->close();
}

std::size_t Service::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void Service::bind(httplib::Server& server) {
  // Every handler maps the two wire errors onto status codes.
  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const UnknownSession& e) {
        send_error(res, 404, "UnknownSession", e.what());
      } catch (const MalformedMessage& e) {
        send_error(res, 400, "MalformedMessage", e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "MalformedMessage", e.what());
      } catch (const std::exception& e) {
        send_error(res, 400, "BadRequest", e.what());
      }
    };
  };

  server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                const json body = json::parse(req.body);
                if (!body.is_object() || !body.contains("scene") || !body["scene"].is_string()) {
                  throw MalformedMessage("scene must be a string");
                }
                const std::string preset = body.value("preset", "null");
                const std::string id = create(body["scene"], preset);
                send(res, {{"id", id}}, 201);
              }));
  server.Get(R"(/sessions/([^/]+)/state)", guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, get(req.matches[1])->state());
             }));
  server.Post(R"(/sessions/([^/]+)/messages)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto session = get(req.matches[1]);
                json body;
                try {
                  body = json::parse(req.body);
                } catch (const json::exception& e) {
                  throw MalformedMessage(std::string("invalid JSON: ") + e.what());
                }
                session->post(parse_message(body));
                send(res, {{"accepted", true}}, 202);
              }));
  server.Get(R"(/sessions/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = get(req.matches[1]);
               const std::size_t since = req.has_param("since") ? std::stoul(req.get_param_value("since")) : 0;
               const int wait = req.has_param("wait") ? std::stoi(req.get_param_value("wait")) : 0;
               std::string body;
               for (const auto& e : session->events(since, wait)) body += frame(e);
               res.set_content(body, "application/x-itl-frames");
             }));
  server.Get(R"(/sessions/([^/]+)/metrics)", guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, get(req.matches[1])->metrics());
             }));
  server.Get(R"(/sessions/([^/]+)/transcript)", guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, get(req.matches[1])->transcript());
             }));
  server.Delete(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  remove(req.matches[1]);
                  send(res, {{"deleted", true}});
                }));
}

}  // namespace itl::service
