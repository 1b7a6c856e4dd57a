#include "mindchat/service.hpp"

#include <filesystem>
#include <fstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "mindchat/error.hpp"

namespace mindchat {
namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

const std::string kWords = std::string(MINDCHAT_DATA_DIR) + "/word_freq.tsv";

ServiceConfig TestConfig() {
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.mode = SimMode::kDwg;
  cfg.suggesters.lexicon =
      std::make_shared<const TrieLexicon>(TrieLexicon::Build(LoadWordFrequencyTsv(kWords)));
  return cfg;
}

std::vector<nlohmann::json> OfType(const std::vector<nlohmann::json>& msgs, const std::string& t) {
  std::vector<nlohmann::json> out;
  for (const auto& m : msgs) {
    if (m["type"] == t) out.push_back(m);
  }
  return out;
}

TEST(ProtocolTest, ClientMessagesRoundTrip) {
  const std::vector<protocol::ClientMessage> msgs = {
      protocol::Start{{{"A", "hi"}, {"B", "hello"}}, "MT-daily", "hello there"},
      protocol::Start{},
      protocol::Select{33},
      protocol::SimulateDecode{7},
      protocol::SetMode{"oracle", 0.8, "x"},
      protocol::SetMode{},
      protocol::Quit{},
  };
  for (const auto& m : msgs) {
    const auto j = protocol::ToJson(m);
    EXPECT_EQ(protocol::ParseClient(j), m) << j.dump();
    EXPECT_EQ(protocol::ToJson(protocol::ParseClient(j)), j);
  }
}

TEST(ProtocolTest, ServerMessagesRoundTrip) {
  protocol::State s;
  s.buffer = "hi ";
  s.suggestions.words[0] = "there";
  s.state_hash = 0xfeedfacecafebeefULL;
  s.mode = "dwg";
  s.keystrokes = 3;
  s.elapsed_s = 6.0;
  s.last_decoded = 9;
  const std::vector<protocol::ServerMessage> msgs = {
      protocol::Layout{LayoutToJson(CanonicalLayout())},
      s,
      protocol::Event{{{"seq", 1}, {"kind", "KeyDecoded"}}},
      protocol::ErrorReply{"AlreadyFinalized", "done"},
  };
  for (const auto& m : msgs) {
    const auto j = protocol::ToJson(m);
    EXPECT_EQ(protocol::ParseServer(j), m) << j.dump();
  }
}

TEST(ProtocolTest, RejectsBadMessages) {
  for (auto j : {nlohmann::json::parse(R"({"type":"select"})"),
                 nlohmann::json::parse(R"({"type":"select","key":"a"})"),
                 nlohmann::json::parse(R"({"type":"dance"})"), nlohmann::json::parse("[1]")}) {
    EXPECT_THROW(protocol::ParseClient(j), Error) << j.dump();
  }
}

TEST(ProtocolSessionTest, HandshakeAndSelect) {
  auto ctx = std::make_shared<const ServiceContext>(TestConfig());
  ProtocolSession s(ctx, 1);
  auto replies = s.Handle({{"type", "start"}});
  ASSERT_EQ(OfType(replies, "layout").size(), 1u);
  EXPECT_EQ(OfType(replies, "layout")[0]["keys"].size(), 40u);
  auto state = OfType(replies, "state").at(0);
  EXPECT_EQ(state["buffer"], "");
  EXPECT_EQ(state["words"][0], "the");

  replies = s.Handle({{"type", "select"}, {"key", 1}});
  state = OfType(replies, "state").at(0);
  EXPECT_EQ(state["buffer"], "a");
  EXPECT_EQ(state["keystrokes"], 1);
  EXPECT_EQ(OfType(replies, "event").size(), 3u);
  for (const auto& w : state["words"]) {
    if (!w.get<std::string>().empty()) EXPECT_EQ(w.get<std::string>()[0], 'a');
  }
}

TEST(ProtocolSessionTest, ErrorsKeepSessionIntact) {
  auto ctx = std::make_shared<const ServiceContext>(TestConfig());
  ProtocolSession s(ctx, 1);
  EXPECT_EQ(s.Handle({{"type", "select"}, {"key", 1}})[0]["type"], "error");
  s.Handle({{"type", "start"}});
  s.Handle({{"type", "select"}, {"key", 8}});
  EXPECT_EQ(s.Handle({{"type", "select"}, {"key", 41}})[0]["type"], "error");
  EXPECT_EQ(s.HandleText("{oops")[0]["type"], "error");
  s.Handle({{"type", "select"}, {"key", 40}});
  const auto r = s.Handle({{"type", "select"}, {"key", 1}});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "AlreadyFinalized");
  EXPECT_EQ(s.session()->state().buffer, "h");
  EXPECT_TRUE(s.session()->state().finalized);
}

TEST(ProtocolSessionTest, SetModeSwitchesSuggester) {
  auto ctx = std::make_shared<const ServiceContext>(TestConfig());
  ProtocolSession s(ctx, 1);
  s.Handle({{"type", "start"}, {"reference", "What's up?"}});
  auto r = s.Handle({{"type", "set_mode"}, {"mode", "naive"}});
  EXPECT_EQ(OfType(r, "state").at(0)["words"][0], "");
  r = s.Handle({{"type", "set_mode"}, {"mode", "oracle"}});
  EXPECT_EQ(OfType(r, "state").at(0)["mode"], "oracle");
  r = s.Handle({{"type", "select"}, {"key", 23}});
  EXPECT_EQ(OfType(r, "state").at(0)["words"][0], "What's");
  EXPECT_EQ(s.Handle({{"type", "set_mode"}, {"mode", "llm"}})[0]["type"], "error");
  EXPECT_EQ(s.Handle({{"type", "set_mode"}, {"accuracy_p", 0}})[0]["type"], "error");
}

// Minimal synchronous WebSocket client.
class Client {
 public:
  explicit Client(unsigned short port) : ws_(io_) {
    tcp::resolver resolver(io_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.next_layer().set_option(tcp::no_delay(true));
    ws_.handshake("127.0.0.1", "/");
  }
  // Sends one message and collects replies up to and including the state.
  std::vector<nlohmann::json> Send(const nlohmann::json& msg) {
    ws_.write(net::buffer(msg.dump()));
    std::vector<nlohmann::json> out;
    for (;;) {
      beast::flat_buffer buf;
      ws_.read(buf);
      out.push_back(nlohmann::json::parse(beast::buffers_to_string(buf.data())));
      if (out.back()["type"] == "state" || out.back()["type"] == "error") return out;
    }
  }
  void Quit() {
    ws_.write(net::buffer(std::string(R"({"type":"quit"})")));
    beast::flat_buffer buf;
    beast::error_code ec;
    ws_.read(buf, ec);
    EXPECT_EQ(ec, websocket::error::closed);
  }

 private:
  net::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

class RunningServer {
 public:
  explicit RunningServer(ServiceConfig cfg) : server_(std::move(cfg)) {
    thread_ = std::thread([this] { server_.Run(); });
  }
  ~RunningServer() {
    server_.Stop();
    thread_.join();
  }
  unsigned short port() const { return server_.port(); }

 private:
  Server server_;
  std::thread thread_;
};

TEST(ServerTest, ConcurrentSessionsAreIsolated) {
  RunningServer srv(TestConfig());
  Client a(srv.port());
  Client b(srv.port());
  a.Send({{"type", "start"}});
  b.Send({{"type", "start"}});

  std::thread ta([&] {
    for (int k : {8, 9, 30, 20}) a.Send({{"type", "select"}, {"key", k}});
  });
  std::thread tb([&] {
    for (int k : {2, 25, 5}) b.Send({{"type", "select"}, {"key", k}});
  });
  ta.join();
  tb.join();
  EXPECT_EQ(OfType(a.Send({{"type", "select"}, {"key", 8}}), "state")[0]["buffer"], "hi th");
  EXPECT_EQ(OfType(b.Send({{"type", "select"}, {"key", 31}}), "state")[0]["buffer"], "by");
  a.Quit();
  b.Quit();
}

TEST(ServerTest, HeadlessTranscriptMatchesDirectReplay) {
  const std::vector<int> keys = {23, 8, 1, 20, 29, 19, 30, 21, 16, 28, 31, 28, 40};
  RunningServer srv(TestConfig());
  Client c(srv.port());
  std::vector<std::string> remote;
  c.Send({{"type", "start"}});
  for (int k : keys) remote.push_back(OfType(c.Send({{"type", "select"}, {"key", k}}), "state")[0]["buffer"]);

  const auto ctx = std::make_shared<const ServiceContext>(TestConfig());
  SpellerSession direct(ctx->SuggesterFor(SimMode::kDwg, "ST-daily", std::nullopt), {}, "ST-daily");
  direct.Start();
  std::vector<std::string> local;
  for (int k : keys) {
    direct.RunTrial(KeyId(k));
    local.push_back(direct.state().buffer);
  }
  EXPECT_EQ(remote, local);
  EXPECT_EQ(remote.back(), "what's up?");
}

TEST(ServerTest, SimulatedDecodeErrorRate) {
  auto cfg = TestConfig();
  cfg.mode = SimMode::kNaive;
  cfg.accuracy_p = 0.8;
  RunningServer srv(cfg);
  Client c(srv.port());
  c.Send({{"type", "start"}});
  int errors = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto state = OfType(c.Send({{"type", "simulate_decode"}, {"intended_key", 1 + i % 26}}), "state");
    ASSERT_EQ(state.size(), 1u);
    if (state[0]["last_decoded"] != state[0]["last_intended"]) ++errors;
    if (state[0]["finalized"].get<bool>()) c.Send({{"type", "start"}});
  }
  EXPECT_NEAR(errors / static_cast<double>(n), 0.2, 0.03);
}

std::string HttpGet(unsigned short port, const std::string& target, int* status) {
  net::io_context io;
  tcp::socket sock(io);
  tcp::resolver resolver(io);
  net::connect(sock, resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  req.keep_alive(false);
  http::write(sock, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(sock, buf, res);
  *status = res.result_int();
  return res.body();
}

TEST(ServerTest, ServesStaticFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "mindchat_static_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<h1>speller</h1>";
  auto cfg = TestConfig();
  cfg.static_dir = dir;
  RunningServer srv(cfg);
  int status = 0;
  EXPECT_EQ(HttpGet(srv.port(), "/", &status), "<h1>speller</h1>");
  EXPECT_EQ(status, 200);
  HttpGet(srv.port(), "/missing.js", &status);
  EXPECT_EQ(status, 404);
  HttpGet(srv.port(), "/../etc/passwd", &status);
  EXPECT_EQ(status, 400);
  HttpGet(srv.port(), "/healthz", &status);
  EXPECT_EQ(status, 200);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mindchat
