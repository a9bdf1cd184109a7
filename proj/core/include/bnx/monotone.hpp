#pragma once

// Monotonicity of binary decision functions and the correspondence between
// MC-explanations and shortest PI-explanations that it implies.

#include <optional>
#include <utility>
#include <vector>

#include "bnx/diagram.hpp"

namespace bnx {

struct MonotonicityReport {
  bool monotone = true;
  /// Pair (lower, upper) with lower below upper in the oriented order yet
  /// f(lower) = 1 and f(upper) = 0. Absent when monotone.
  std::optional<std::pair<Instance, Instance>> witness;
  /// Variables along which f fails to be monotone.
  std::vector<std::size_t> violating;
};

/// Checks f(x*) <= f(x) whenever x* <= x coordinate-wise, where variables
/// flagged in `flip` are ordered with + below -. Empty `flip` means no flips.
/// Throws unsupported error on a non-binary variable.
MonotonicityReport is_monotone(const Diagram& f, const std::vector<bool>& flip = {});

/// True iff the MC-explanation `mc` of a decision with polarity `decision`
/// and the PI-explanation `pi` set the same features to the decision's
/// supporting value: features at `decision` in mc are exactly the set
/// features of pi, and pi sets them to `decision`.
bool match(const Instance& mc, const PartialInstance& pi, bool decision);

/// For monotone f: every MC-explanation of f(x) matches some shortest
/// PI-explanation and vice versa. Throws precondition error when f is not
/// monotone.
bool mc_matches_shortest_pi(const Diagram& f, const Instance& x);

/// Alias of mc_matches_shortest_pi.
inline bool verify_theorem4(const Diagram& f, const Instance& x) { return mc_matches_shortest_pi(f, x); }

}  // namespace bnx
