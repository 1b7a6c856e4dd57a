#include "mindchat/protocol.hpp"

#include "mindchat/error.hpp"

namespace mindchat::protocol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kSchemaError, what);
}

template <class T>
T Field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) Bad(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    Bad(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> OptField(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return Field<T>(j, key);
}

template <class T>
void PutOpt(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

ClientMessage ParseClient(const nlohmann::json& j) {
  if (!j.is_object()) Bad("message must be a JSON object");
  const auto type = Field<std::string>(j, "type");
  if (type == "start") {
    Start m;
    if (j.contains("context")) {
      if (!j["context"].is_array()) Bad("context must be a list");
      for (const auto& t : j["context"]) {
        if (!t.is_object()) Bad("context turns must be objects");
        m.context.push_back({Field<std::string>(t, "speaker"), Field<std::string>(t, "utterance")});
      }
    }
    if (auto c = OptField<std::string>(j, "category")) m.category = *c;
    m.reference = OptField<std::string>(j, "reference");
    return m;
  }
  if (type == "select") return Select{Field<int>(j, "key")};
  if (type == "simulate_decode") return SimulateDecode{Field<int>(j, "intended_key")};
  if (type == "set_mode") {
    return SetMode{OptField<std::string>(j, "mode"), OptField<double>(j, "accuracy_p"),
                   OptField<std::string>(j, "reference")};
  }
  if (type == "quit") return Quit{};
  Bad("unknown message type '" + type + "'");
}

nlohmann::json ToJson(const ClientMessage& m) {
  return std::visit(
      Overloaded{
          [](const Start& s) {
            auto ctx = nlohmann::json::array();
            for (const Turn& t : s.context) {
              ctx.push_back({{"speaker", t.speaker}, {"utterance", t.utterance}});
            }
            nlohmann::json j = {{"type", "start"}, {"context", ctx}, {"category", s.category}};
            PutOpt(j, "reference", s.reference);
            return j;
          },
          [](const Select& s) { return nlohmann::json{{"type", "select"}, {"key", s.key}}; },
          [](const SimulateDecode& s) {
            return nlohmann::json{{"type", "simulate_decode"}, {"intended_key", s.intended_key}};
          },
          [](const SetMode& s) {
            nlohmann::json j = {{"type", "set_mode"}};
            PutOpt(j, "mode", s.mode);
            PutOpt(j, "accuracy_p", s.accuracy_p);
            PutOpt(j, "reference", s.reference);
            return j;
          },
          [](const Quit&) { return nlohmann::json{{"type", "quit"}}; },
      },
      m);
}

ServerMessage ParseServer(const nlohmann::json& j) {
  if (!j.is_object()) Bad("message must be a JSON object");
  const auto type = Field<std::string>(j, "type");
  if (type == "layout") return Layout{Field<nlohmann::json>(j, "keys")};
  if (type == "state") {
    State s;
    s.buffer = Field<std::string>(j, "buffer");
    try {
      s.suggestions = SuggestionSetFromJson(j);
    } catch (const nlohmann::json::exception&) {
      Bad("state needs words and sentences");
    }
    s.degraded = Field<bool>(j, "degraded");
    s.finalized = Field<bool>(j, "finalized");
    s.state_hash = Field<std::uint64_t>(j, "state_hash");
    s.mode = Field<std::string>(j, "mode");
    s.keystrokes = Field<long>(j, "keystrokes");
    s.elapsed_s = Field<double>(j, "elapsed_s");
    s.last_intended = OptField<int>(j, "last_intended");
    s.last_decoded = OptField<int>(j, "last_decoded");
    return s;
  }
  if (type == "event") return Event{Field<nlohmann::json>(j, "event")};
  if (type == "error") return ErrorReply{Field<std::string>(j, "code"), Field<std::string>(j, "message")};
  Bad("unknown message type '" + type + "'");
}

nlohmann::json ToJson(const ServerMessage& m) {
  return std::visit(
      Overloaded{
          [](const Layout& l) { return nlohmann::json{{"type", "layout"}, {"keys", l.keys}}; },
          [](const State& s) {
            nlohmann::json j = SuggestionSetToJson(s.suggestions);
            j["type"] = "state";
            j["buffer"] = s.buffer;
            j["degraded"] = s.degraded;
            j["finalized"] = s.finalized;
            j["state_hash"] = s.state_hash;
            j["mode"] = s.mode;
            j["keystrokes"] = s.keystrokes;
            j["elapsed_s"] = s.elapsed_s;
            PutOpt(j, "last_intended", s.last_intended);
            PutOpt(j, "last_decoded", s.last_decoded);
            return j;
          },
          [](const Event& e) { return nlohmann::json{{"type", "event"}, {"event", e.event}}; },
          [](const ErrorReply& e) {
            return nlohmann::json{{"type", "error"}, {"code", e.code}, {"message", e.message}};
          },
      },
      m);
}

}  // namespace mindchat::protocol
