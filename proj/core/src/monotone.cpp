#include "bnx/monotone.hpp"

#include <algorithm>

#include "bnx/error.hpp"
#include "bnx/explainer.hpp"

namespace bnx {

MonotonicityReport is_monotone(const Diagram& f, const std::vector<bool>& flip) {
  const auto& vars = f.variables();
  if (!vars.all_binary()) throw Error(ErrorKind::unsupported, "monotonicity is defined for binary variables only");
  if (f.mode() != DiagramMode::reduced) throw Error(ErrorKind::mode, "monotonicity needs a reduced diagram");
  if (!flip.empty() && flip.size() != vars.size()) {
    throw Error(ErrorKind::argument, "flip mask does not cover every variable");
  }
  MonotonicityReport report;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const bool flipped = !flip.empty() && flip[j];
    const Value lo = flipped ? 1 : 0;
    const Value hi = flipped ? 0 : 1;
    // Instances where raising X_j turns a positive decision negative.
    const auto bad = combine(restrict(f, j, lo), restrict(f, j, hi), BoolOp::diff);
    if (bad.is_false()) continue;
    report.violating.push_back(j);
    if (!report.witness) {
      auto y = *any_model(bad);
      auto lower = y;
      auto upper = y;
      lower[j] = lo;
      upper[j] = hi;
      report.witness.emplace(std::move(lower), std::move(upper));
    }
  }
  report.monotone = report.violating.empty();
  return report;
}

bool match(const Instance& mc, const PartialInstance& pi, bool decision) {
  if (mc.size() != pi.num_vars()) return false;
  const auto i = static_cast<Value>(decision);
  for (std::size_t j = 0; j < mc.size(); ++j) {
    if (mc[j] == i) {
      if (!pi[j] || *pi[j] != i) return false;
    } else if (pi[j]) {
      return false;
    }
  }
  return true;
}

bool mc_matches_shortest_pi(const Diagram& f, const Instance& x) {
  if (!is_monotone(f).monotone) throw Error(ErrorKind::precondition, "function is not monotone");
  const auto mc = models(mc_explanations(f, x).set);
  const auto pis = shortest_pis(explain_pi(f, x));
  const bool d = evaluate(f, x);
  auto matched_by = [&](const auto& range, auto pred) { return std::any_of(range.begin(), range.end(), pred); };
  for (const auto& m : mc) {
    if (!matched_by(pis, [&](const PartialInstance& z) { return match(m, z, d); })) return false;
  }
  for (const auto& z : pis) {
    if (!matched_by(mc, [&](const Instance& m) { return match(m, z, d); })) return false;
  }
  return !mc.empty() && !pis.empty();
}

}  // namespace bnx
