#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "itl/agent.h"
#include "itl/harness.h"

namespace httplib {
class Server;
}

namespace itl::service {

using nlohmann::json;

struct UnknownSession : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedMessage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown through the kernel when a session is deleted while it waits.
struct SessionClosed : std::runtime_error {
  SessionClosed() : std::runtime_error("session closed") {}
};

json scene_json(const world::WorldState& state);
json message_json(const dialogue::Message& m);

// {speaker, text, pointing, seq}; throws MalformedMessage.
dialogue::Message parse_message(const json& body);

// One learner with its own thread. Expert messages queue in the inbox and are
// consumed either as new commands or as answers to a pending question.
class Session {
 public:
  Session(std::string id, world::WorldState world, learner::Knowledge knowledge, bool location_names);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  void post(dialogue::Message m);
  void close();

  json state() const;
  json metrics() const;
  json transcript() const;
  // Events with index >= since, waiting up to wait_ms for the first one.
  std::vector<json> events(std::size_t since, int wait_ms) const;
  // Blocks until the inbox is drained and the learner is not working.
  bool wait_idle(int timeout_ms) const;

 private:
  void loop();
  learner::ExpertReply next_reply(const std::string& question);
  std::optional<dialogue::Message> pop();
  void emit(json event);
  void snapshot();

  std::string id_;
  learner::Agent agent_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<dialogue::Message> inbox_;
  bool closed_ = false;
  bool busy_ = false;
  bool pending_question_ = false;
  std::vector<json> events_;
  json scene_;
  json metrics_;
  json transcript_;
  std::size_t stack_depth_ = 1;
  std::thread thread_;
};

class Service {
 public:
  explicit Service(harness::Paths paths) : paths_(std::move(paths)) {}
  ~Service();

  std::string create(const std::string& scene, const std::string& preset);
  std::shared_ptr<Session> get(const std::string& id) const;
  void remove(const std::string& id);
  std::size_t size() const;

  // Installs the HTTP routes on a server.
  void bind(httplib::Server& server);

 private:
  harness::Paths paths_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  int next_id_ = 1;
};

// Length-prefixed event frame: "<bytes>\n<json>\n".
std::string frame(const json& event);

}  // namespace itl::service
