#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace mindchat::testing {

// Local chat-completions endpoint whose behavior each test scripts.
class MockEndpoint {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  MockEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
      ++hits_;
      last_body_ = req.body;
      std::lock_guard lock(mu_);
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockEndpoint() {
    server_.stop();
    thread_.join();
  }

  void Set(Handler h) {
    std::lock_guard lock(mu_);
    handler_ = std::move(h);
  }
  void Reply(const std::string& content) {
    Set([content](const httplib::Request&, httplib::Response& res) {
      const nlohmann::json body = {
          {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.set_content(body.dump(), "application/json");
    });
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int hits() const { return hits_; }
  const std::string& last_body() const { return last_body_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  Handler handler_ = [](const httplib::Request&, httplib::Response& res) { res.status = 500; };
  std::atomic<int> hits_{0};
  std::string last_body_;
};

}  // namespace mindchat::testing
