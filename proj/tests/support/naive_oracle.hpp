#pragma once

// Expected keystrokes for unassisted copy-spelling under the uniform
// wrong-key model, from a level-by-level renewal argument.
//
// Level k = the first k reference characters are on screen. At level k the
// intended key is pressed with probability p; otherwise each of the 39 other
// keys with probability (1-p)/39, and it
//   - pushes one bad state (any other character, or delete once the buffer
//     is nonempty),
//   - drops back to level k-1 (undo, k >= 1),
//   - or changes nothing (empty slots, a refused enter, and a space typed
//     right before ',' / '?' / the end, which the next key absorbs).
// Leaving a bad state is a walk on its depth: undo with probability p, one
// level deeper with q = 31(1-p)/39 (30 characters + delete), so it takes
// E = 1/(p - q) keystrokes on average. Then
//   T_k = (1 + a_k E + u_k T_{k-1}) / p,   total = sum_{k=0..L} T_k,
// where level L presses enter.

#include <string>

namespace mindchat::testing {

inline double ExpectedNaiveKeystrokes(const std::string& ref, double p) {
  const double w = (1.0 - p) / 39.0;
  const double E = 1.0 / (p - 31.0 * w);
  const std::size_t L = ref.size();
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k <= L; ++k) {
    double pushes;
    if (k < L) {
      const char next = ref[k];
      pushes = 29.0 + (k >= 1 ? 1.0 : 0.0);
      const bool space_absorbed =
          k >= 1 && ref[k - 1] != ' ' && (next == ',' || next == '?');
      if (space_absorbed) pushes -= 1.0;
    } else {
      pushes = 29.0 + 1.0;  // every character but space, plus delete
    }
    const double undo = k >= 1 ? w : 0.0;
    const double t = (1.0 + pushes * w * E + undo * prev) / p;
    total += t;
    prev = t;
  }
  return total;
}

}  // namespace mindchat::testing
