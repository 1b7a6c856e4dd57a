#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/protocol.hpp"
#include "mindchat/sim.hpp"
#include "mindchat/speller.hpp"

namespace mindchat {

struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  unsigned short port = 8765;  // 0 = pick a free port
  SimMode mode = SimMode::kDwg;
  SuggesterSetup suggesters;
  TimeModel time;
  double accuracy_p = 1.0;  // simulated decoder
  std::uint64_t seed = 1;
  std::filesystem::path static_dir;  // empty = built-in landing page only
};

// Suggesters shared by all connections (the LLM cache is shared too).
class ServiceContext {
 public:
  explicit ServiceContext(ServiceConfig cfg);

  const ServiceConfig& config() const noexcept { return cfg_; }
  // Throws Error(kInvalidConfig) if the mode cannot be served.
  std::shared_ptr<const Suggester> SuggesterFor(SimMode mode, const std::string& category,
                                                const std::optional<std::string>& reference) const;

 private:
  ServiceConfig cfg_;
  std::shared_ptr<const Suggester> null_;
  std::shared_ptr<const Suggester> dwg_;
  std::shared_ptr<const Suggester> llm_;
};

// One connection's state machine, independent of the transport.
class ProtocolSession {
 public:
  ProtocolSession(std::shared_ptr<const ServiceContext> ctx, std::uint64_t seed);

  // Replies in order. Never throws; failures become error messages.
  std::vector<nlohmann::json> Handle(const nlohmann::json& message);
  std::vector<nlohmann::json> HandleText(std::string_view text);

  bool closed() const noexcept { return closed_; }
  const SpellerSession* session() const noexcept { return session_.get(); }

 private:
  std::vector<nlohmann::json> Dispatch(const protocol::ClientMessage& m);
  std::vector<nlohmann::json> Trial(KeyId decoded, std::optional<KeyId> intended);
  nlohmann::json StateMessage() const;
  SpellerSession& Require();
  double TrialSeconds() const;

  std::shared_ptr<const ServiceContext> ctx_;
  std::mt19937_64 rng_;
  SimMode mode_;
  double accuracy_p_;
  std::optional<std::string> reference_;
  std::string category_ = "ST-daily";
  std::unique_ptr<SpellerSession> session_;
  long keystrokes_ = 0;
  double elapsed_s_ = 0.0;
  std::optional<int> last_intended_;
  std::optional<int> last_decoded_;
  bool closed_ = false;
};

// WebSocket (any path) plus static files over HTTP on one port. One thread
// per connection.
class Server {
 public:
  explicit Server(ServiceConfig cfg);
  ~Server();

  // Binds immediately so port() is valid before Run().
  unsigned short port() const noexcept { return port_; }

  // Blocks until Stop() or, if handle_signals, SIGINT/SIGTERM.
  void Run(bool handle_signals = false);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  unsigned short port_ = 0;
};

}  // namespace mindchat
