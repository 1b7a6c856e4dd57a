#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mindchat/cca.hpp"
#include "mindchat/dataset.hpp"
#include "mindchat/error.hpp"
#include "mindchat/keyboard.hpp"
#include "mindchat/sim.hpp"
#include "mindchat/speller.hpp"
#include "mindchat/suggest.hpp"

namespace py = pybind11;
using namespace mindchat;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// wraps these in dict-returning helpers.

std::string ParseDatasetJson(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  const LoadedDataset loaded = ParseDataset(in, source);
  nlohmann::json out{{"items", nlohmann::json::array()}, {"rejected", nlohmann::json::array()}};
  for (const auto& item : loaded.items) out["items"].push_back(ItemToJson(item));
  for (const auto& r : loaded.rejected) {
    out["rejected"].push_back({{"line", r.line}, {"id", r.id}, {"code", ErrorCodeName(r.code)},
                               {"message", r.message}});
  }
  return out.dump();
}

std::vector<DialogueItem> ItemsFromJson(const std::string& items_json) {
  std::vector<DialogueItem> items;
  for (const auto& j : nlohmann::json::parse(items_json)) items.push_back(ItemFromJson(j));
  return items;
}

std::string WriteDatasetText(const std::string& items_json) {
  std::ostringstream out;
  WriteDataset(out, ItemsFromJson(items_json));
  return out.str();
}

std::string StatsJson(const std::string& items_json) {
  const DatasetStats stats = ComputeStats(ItemsFromJson(items_json));
  nlohmann::json out;
  auto row = [](const CategoryStats& c) {
    return nlohmann::json{{"utterances", c.utterances}, {"words", c.words}, {"characters", c.characters}};
  };
  for (Category c : kAllCategories) out[std::string(CategoryName(c))] = row(stats.per_category.at(c));
  out["total"] = row(stats.total());
  return out.dump();
}

std::string SimulateJson(const std::string& items_json, const std::string& mode, double p,
                         int runs, std::uint64_t seed, const std::string& words_path,
                         int oracle_w, int oracle_s, int oracle_s_mt, bool shortcut) {
  SimConfig cfg;
  cfg.mode = ParseSimMode(mode);
  cfg.accuracy_p = p;
  cfg.monte_carlo_runs = runs;
  cfg.seed = seed;
  cfg.record_trace = false;
  cfg.policy.shortcut_enabled = shortcut;
  ValidateSimConfig(cfg);
  SuggesterSetup setup;
  if (!words_path.empty()) {
    setup.lexicon = std::make_shared<const TrieLexicon>(TrieLexicon::Build(LoadWordFrequencyTsv(words_path)));
  }
  setup.oracle_single_turn = {oracle_w, oracle_s};
  setup.oracle_multi_turn = {oracle_w, oracle_s_mt};
  const auto results = RunSimulation(ItemsFromJson(items_json), cfg, MakeSuggesterFactory(cfg.mode, setup));
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : results) out.push_back(ResultToJson(r));
  return out.dump();
}

std::string TypeKeys(const std::vector<int>& keys) {
  SpellerState state;
  for (int k : keys) state = ApplyKey(state, KeyId(k));
  return state.buffer;
}

}  // namespace

PYBIND11_MODULE(_mindchat, m) {
  m.doc() = "Native core of the mindchat package";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code, message)
      const py::tuple args = py::make_tuple(std::string(ErrorCodeName(e.code())), e.what());
      PyErr_SetObject(error.ptr(), args.ptr());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("normalize_utterance", [](const std::string& s) { return NormalizeUtterance(s); });
  m.def("is_supported_char", [](const std::string& s) {
    return s.size() == 1 && IsSupportedChar(s[0]);
  });
  m.def("layout_json", [] { return LayoutToJson(CanonicalLayout()).dump(); });
  m.def("type_keys", &TypeKeys, py::arg("keys"));
  m.def("cca_corr", [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) { return CcaCorr(x, y); },
        py::arg("x"), py::arg("y"));
  m.def("parse_dataset", &ParseDatasetJson, py::arg("text"), py::arg("source") = "<string>");
  m.def("write_dataset", &WriteDatasetText, py::arg("items_json"));
  m.def("dataset_stats", &StatsJson, py::arg("items_json"));
  m.def("simulate", &SimulateJson, py::arg("items_json"), py::arg("mode"), py::arg("p"),
        py::arg("runs"), py::arg("seed"), py::arg("words_path"), py::arg("oracle_w"),
        py::arg("oracle_s"), py::arg("oracle_s_mt"), py::arg("shortcut"));
}
