#include "mindchat/service.hpp"

#include <fstream>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "mindchat/error.hpp"
#include "mindchat/keyboard.hpp"

namespace mindchat {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

ServiceContext::ServiceContext(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  null_ = std::make_shared<const NullSuggester>();
  if (cfg_.suggesters.lexicon) dwg_ = std::make_shared<const TrieSuggester>(cfg_.suggesters.lexicon);
  if (cfg_.suggesters.llm) {
    llm_ = std::make_shared<const LlmSuggester>(*cfg_.suggesters.llm, dwg_ ? dwg_ : null_,
                                                cfg_.suggesters.fixtures);
  }
}

std::shared_ptr<const Suggester> ServiceContext::SuggesterFor(
    SimMode mode, const std::string& category, const std::optional<std::string>& reference) const {
  switch (mode) {
    case SimMode::kNaive: return null_;
    case SimMode::kDwg:
      if (!dwg_) throw Error(ErrorCode::kInvalidConfig, "service has no word list for dwg");
      return dwg_;
    case SimMode::kLlm:
      if (!llm_) throw Error(ErrorCode::kInvalidConfig, "service has no llm configured");
      return llm_;
    case SimMode::kOracle: {
      if (!reference) throw Error(ErrorCode::kInvalidConfig, "oracle mode needs a reference");
      const bool multi = IsMultiTurn(ParseCategory(category));
      return std::make_shared<const OracleSuggester>(
          *reference, multi ? cfg_.suggesters.oracle_multi_turn : cfg_.suggesters.oracle_single_turn);
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown mode");
}

// ---------------------------------------------------------------------------

ProtocolSession::ProtocolSession(std::shared_ptr<const ServiceContext> ctx, std::uint64_t seed)
    : ctx_(std::move(ctx)),
      rng_(seed),
      mode_(ctx_->config().mode),
      accuracy_p_(ctx_->config().accuracy_p) {}

std::vector<nlohmann::json> ProtocolSession::HandleText(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return {protocol::ToJson(protocol::ErrorReply{"SchemaError", "message is not valid JSON"})};
  }
  return Handle(j);
}

std::vector<nlohmann::json> ProtocolSession::Handle(const nlohmann::json& message) {
  try {
    return Dispatch(protocol::ParseClient(message));
  } catch (const Error& e) {
    return {protocol::ToJson(
        protocol::ErrorReply{std::string(ErrorCodeName(e.code())), e.what()})};
  } catch (const std::exception& e) {
    return {protocol::ToJson(protocol::ErrorReply{"Internal", e.what()})};
  }
}

SpellerSession& ProtocolSession::Require() {
  if (!session_) throw Error(ErrorCode::kInvalidConfig, "send start first");
  return *session_;
}

double ProtocolSession::TrialSeconds() const {
  if (mode_ == SimMode::kNaive) return TrialTime(TrialKind::kPlain, ctx_->config().time);
  const bool waits = mode_ == SimMode::kLlm || mode_ == SimMode::kOracle;
  return TrialTime(TrialKind::kAssisted, ctx_->config().time, waits);
}

nlohmann::json ProtocolSession::StateMessage() const {
  protocol::State s;
  s.mode = std::string(SimModeName(mode_));
  s.keystrokes = keystrokes_;
  s.elapsed_s = elapsed_s_;
  s.last_intended = last_intended_;
  s.last_decoded = last_decoded_;
  if (session_) {
    const SpellerState& st = session_->state();
    s.buffer = st.buffer;
    s.suggestions = st.active.set;
    s.degraded = st.active.degraded;
    s.finalized = st.finalized;
    s.state_hash = st.active.state_hash;
  }
  return protocol::ToJson(s);
}

std::vector<nlohmann::json> ProtocolSession::Trial(KeyId decoded, std::optional<KeyId> intended) {
  SpellerSession& session = Require();
  std::vector<SessionEvent> events;
  try {
    events = session.RunTrial(decoded);
  } catch (const Error& e) {
    // A misdecoded selection of an empty slot is a spent trial, not an error.
    if (!(e.code() == ErrorCode::kEmptySlotSelected && intended && *intended != decoded)) throw;
  }
  ++keystrokes_;
  elapsed_s_ += TrialSeconds();
  last_intended_ = intended ? std::optional<int>(intended->index()) : std::nullopt;
  last_decoded_ = decoded.index();

  std::vector<nlohmann::json> out;
  for (const auto& e : events) out.push_back(protocol::ToJson(protocol::Event{EventToJson(e)}));
  out.push_back(StateMessage());
  return out;
}

std::vector<nlohmann::json> ProtocolSession::Dispatch(const protocol::ClientMessage& m) {
  if (const auto* start = std::get_if<protocol::Start>(&m)) {
    ParseCategory(start->category);
    category_ = start->category;
    if (start->reference) reference_ = start->reference;
    session_ = std::make_unique<SpellerSession>(ctx_->SuggesterFor(mode_, category_, reference_),
                                                start->context, category_);
    keystrokes_ = 0;
    elapsed_s_ = 0.0;
    last_intended_.reset();
    last_decoded_.reset();
    std::vector<nlohmann::json> out = {
        protocol::ToJson(protocol::Layout{LayoutToJson(CanonicalLayout())})};
    for (const auto& e : session_->Start()) {
      out.push_back(protocol::ToJson(protocol::Event{EventToJson(e)}));
    }
    out.push_back(StateMessage());
    return out;
  }
  if (const auto* select = std::get_if<protocol::Select>(&m)) {
    return Trial(KeyId(select->key), std::nullopt);
  }
  if (const auto* sim = std::get_if<protocol::SimulateDecode>(&m)) {
    const KeyId intended(sim->intended_key);
    Require();
    KeyId decoded = intended;
    if (accuracy_p_ < 1.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) >= accuracy_p_) {
      int k = std::uniform_int_distribution<int>(1, kNumKeys - 1)(rng_);
      if (k >= intended.index()) ++k;
      decoded = KeyId(k);
    }
    return Trial(decoded, intended);
  }
  if (const auto* set = std::get_if<protocol::SetMode>(&m)) {
    SimMode mode = mode_;
    double p = accuracy_p_;
    if (set->mode) mode = ParseSimMode(*set->mode);
    if (set->accuracy_p) p = *set->accuracy_p;
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "accuracy_p must be in (0, 1]");
    std::optional<std::string> reference = set->reference ? set->reference : reference_;
    std::shared_ptr<const Suggester> suggester;
    if (session_) suggester = ctx_->SuggesterFor(mode, category_, reference);
    mode_ = mode;
    accuracy_p_ = p;
    reference_ = reference;
    if (session_) {
      session_->SetSuggester(std::move(suggester));
      std::vector<nlohmann::json> out;
      for (const auto& e : session_->Refresh()) {
        out.push_back(protocol::ToJson(protocol::Event{EventToJson(e)}));
      }
      out.push_back(StateMessage());
      return out;
    }
    return {StateMessage()};
  }
  closed_ = true;  // quit
  return {};
}

// ---------------------------------------------------------------------------

namespace {

std::string_view MimeType(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

constexpr std::string_view kLandingPage =
    "<!doctype html><title>mindchat</title>"
    "<p>mindchat session service. Open a WebSocket on this port and send "
    "<code>{\"type\":\"start\"}</code>.</p>";

http::response<http::string_body> ServeStatic(const http::request<http::string_body>& req,
                                              const std::filesystem::path& root) {
  auto reply = [&](http::status status, std::string body, std::string_view type) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, std::string(type));
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };
  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    return reply(http::status::method_not_allowed, "method not allowed\n", "text/plain");
  }
  std::string target(req.target());
  if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
  if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
    return reply(http::status::bad_request, "bad path\n", "text/plain");
  }
  if (target == "/healthz") return reply(http::status::ok, "ok\n", "text/plain");
  if (target.back() == '/') target += "index.html";
  if (root.empty()) {
    if (target == "/index.html") return reply(http::status::ok, std::string(kLandingPage), "text/html");
    return reply(http::status::not_found, "not found\n", "text/plain");
  }
  const std::filesystem::path file = root / target.substr(1);
  std::ifstream in(file, std::ios::binary);
  if (!in || std::filesystem::is_directory(file)) {
    return reply(http::status::not_found, "not found\n", "text/plain");
  }
  std::ostringstream body;
  body << in.rdbuf();
  return reply(http::status::ok, body.str(), MimeType(file));
}

}  // namespace

struct Server::Impl {
  explicit Impl(ServiceConfig cfg)
      : ctx(std::make_shared<const ServiceContext>(std::move(cfg))), acceptor(io) {}

  std::shared_ptr<const ServiceContext> ctx;
  net::io_context io;
  tcp::acceptor acceptor;
  std::mutex mu;
  std::vector<std::shared_ptr<tcp::socket>> sockets;
  std::vector<std::thread> workers;
  std::atomic<std::uint64_t> sessions{0};
  bool stopping = false;

  void Accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      auto sock = std::make_shared<tcp::socket>(std::move(socket));
      sock->set_option(tcp::no_delay(true), ec);
      {
        std::lock_guard lock(mu);
        if (stopping) return;
        sockets.push_back(sock);
        workers.emplace_back([this, sock] { Serve(sock); });
      }
      Accept();
    });
  }

  void Serve(const std::shared_ptr<tcp::socket>& sock) {
    try {
      beast::flat_buffer buffer;
      for (;;) {
        http::request<http::string_body> req;
        http::read(*sock, buffer, req);
        if (websocket::is_upgrade(req)) {
          ServeSocket(*sock, req);
          return;
        }
        auto res = ServeStatic(req, ctx->config().static_dir);
        const bool keep = res.keep_alive();
        http::write(*sock, res);
        if (!keep) break;
      }
      beast::error_code ec;
      sock->shutdown(tcp::socket::shutdown_send, ec);
    } catch (const std::exception&) {
      // Connection-scoped failures end only this connection.
    }
  }

  void ServeSocket(tcp::socket& sock, const http::request<http::string_body>& req) {
    websocket::stream<tcp::socket&> ws(sock);
    ws.accept(req);
    ProtocolSession session(ctx, DeriveSeed(ctx->config().seed, 0x5e55, sessions++));
    for (;;) {
      beast::flat_buffer buf;
      ws.read(buf);
      for (const auto& reply : session.HandleText(beast::buffers_to_string(buf.data()))) {
        ws.text(true);
        ws.write(net::buffer(reply.dump()));
      }
      if (session.closed()) {
        ws.close(websocket::close_code::normal);
        return;
      }
    }
  }

  void Shutdown() {
    std::vector<std::thread> pending;
    {
      std::lock_guard lock(mu);
      stopping = true;
      for (auto& s : sockets) {
        beast::error_code ec;
        s->shutdown(tcp::socket::shutdown_both, ec);
        s->close(ec);
      }
      pending.swap(workers);
    }
    for (auto& t : pending) t.join();
  }
};

Server::Server(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
  const auto& c = impl_->ctx->config();
  const tcp::endpoint ep(net::ip::make_address(c.bind_address), c.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  port_ = impl_->acceptor.local_endpoint().port();
}

Server::~Server() {
  Stop();
  impl_->Shutdown();
}

void Server::Run(bool handle_signals) {
  net::signal_set signals(impl_->io);
  if (handle_signals) {
    signals.add(SIGINT);
    signals.add(SIGTERM);
    signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) Stop();
    });
  }
  impl_->Accept();
  impl_->io.run();
  impl_->Shutdown();
}

void Server::Stop() {
  net::post(impl_->io, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    impl_->io.stop();
  });
}

}  // namespace mindchat
