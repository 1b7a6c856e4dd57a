#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindchat/suggest.hpp"

namespace mindchat::protocol {

// client -> server

struct Start {
  std::vector<Turn> context;
  std::string category = "ST-daily";
  std::optional<std::string> reference;  // needed by the oracle suggester

  bool operator==(const Start&) const = default;
};

struct Select {
  int key = 0;
  bool operator==(const Select&) const = default;
};

struct SimulateDecode {
  int intended_key = 0;
  bool operator==(const SimulateDecode&) const = default;
};

struct SetMode {
  std::optional<std::string> mode;  // naive | dwg | llm | oracle
  std::optional<double> accuracy_p;
  std::optional<std::string> reference;

  bool operator==(const SetMode&) const = default;
};

struct Quit {
  bool operator==(const Quit&) const = default;
};

using ClientMessage = std::variant<Start, Select, SimulateDecode, SetMode, Quit>;

// server -> client

struct Layout {
  nlohmann::json keys;
  bool operator==(const Layout&) const = default;
};

struct State {
  std::string buffer;
  SuggestionSet suggestions;
  bool degraded = false;
  bool finalized = false;
  std::uint64_t state_hash = 0;
  std::string mode;
  long keystrokes = 0;
  double elapsed_s = 0.0;  // time-model seconds, not wall clock
  std::optional<int> last_intended;
  std::optional<int> last_decoded;

  bool operator==(const State&) const = default;
};

struct Event {
  nlohmann::json event;  // a SessionEvent as JSON
  bool operator==(const Event&) const = default;
};

struct ErrorReply {
  std::string code;
  std::string message;
  bool operator==(const ErrorReply&) const = default;
};

using ServerMessage = std::variant<Layout, State, Event, ErrorReply>;

// Throw Error(kSchemaError) on anything that does not fit the schema.
ClientMessage ParseClient(const nlohmann::json& j);
ServerMessage ParseServer(const nlohmann::json& j);

nlohmann::json ToJson(const ClientMessage& m);
nlohmann::json ToJson(const ServerMessage& m);

}  // namespace mindchat::protocol
