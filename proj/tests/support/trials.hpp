#pragma once

#include "mindchat/bench.hpp"

namespace mindchat::testing {

inline EegTrial PreprocessedTrial(int key, const SynthConfig& cfg, std::uint64_t seed) {
  return mindchat::PreprocessedTrial(KeyId(key), cfg, seed);
}

using mindchat::LabeledSet;
using mindchat::RandomKeySet;

}  // namespace mindchat::testing
