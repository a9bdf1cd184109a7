#pragma once

// Explanations of individual decisions of a decision function.
//
// MC-explanations: decision-preserving instances obtained from x by flipping
// features that currently support the decision, with the fewest supporting
// features left. PI-explanations: minimal partial instances z of x such that
// every completion of z keeps the decision.
//
// Implicant sets live in complete-mode managers over extended domains: value
// index b_i of variable i stands for "don't care" ('*').

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "bnx/classifier.hpp"
#include "bnx/diagram.hpp"

namespace bnx {

struct McExplanationSet {
  /// Models are exactly the MC-explanations.
  Diagram set;
  Instance instance;
  bool decision;
};

/// Per variable, which values count as "on". Variables in `fixed` must keep
/// their value.
struct OnOffPartition {
  std::vector<std::vector<bool>> on;
  PartialInstance fixed;

  /// on = {1} for every (binary) variable, nothing fixed.
  static OnOffPartition binary(const VariableTable& vars);
};

/// Minimum-cardinality explanations of decision f(x) over binary variables.
/// Throws precondition error on a non-binary variable.
McExplanationSet mc_explanations(const Diagram& f, const Instance& x);

/// Multi-valued generalization. For a positive decision, features currently
/// at off-values are frozen and on-values cost 1; for a negative decision the
/// roles of on- and off-values swap, which reduces to the binary algorithm
/// under the partition on = {1}. Throws argument error when `fixed`
/// disagrees with x or the partition does not fit the variables.
McExplanationSet mc_explanations_general(const Diagram& f, const Instance& x, const OnOffPartition& p);

struct ImplicantSet {
  /// Complete-mode diagram over the extended domains.
  Diagram set;
  /// Explained instance (pi_inst / explain_pi only).
  std::optional<Instance> instance;
  /// Decision the implicants preserve.
  bool decision = true;
};

/// Complete-mode manager over `vars` extended with '*'.
std::shared_ptr<Manager> make_implicant_manager(const VariableTable& vars);

/// Every prime implicant of f. `target` must be a manager made by
/// make_implicant_manager for f's variables; a fresh one is used if null.
ImplicantSet pi_cover(const Diagram& f, std::shared_ptr<Manager> target = nullptr);

/// Prime implicants of f compatible with x. Throws polarity error when
/// f(x) = 0.
ImplicantSet pi_inst(const Diagram& f, const Instance& x, std::shared_ptr<Manager> target = nullptr);

/// PI-explanations of the decision f(x), complementing f when f(x) = 0.
ImplicantSet explain_pi(const Diagram& f, const Instance& x, std::shared_ptr<Manager> target = nullptr);

/// Keeps only implicants compatible with x (every set variable agrees).
ImplicantSet filter_compatible(const ImplicantSet& s, const Instance& x);

/// Partial instances encoded by an implicant set, in enumeration order.
std::vector<PartialInstance> decode(const ImplicantSet& s);

/// Implicants with the fewest set variables.
std::vector<PartialInstance> shortest_pis(const ImplicantSet& s);

std::uint64_t count_explanations(const McExplanationSet& s);
std::uint64_t count_explanations(const ImplicantSet& s);

/// Number of implicants per length (set-variable count); zero buckets are
/// omitted.
std::map<std::size_t, std::uint64_t> length_histogram(const ImplicantSet& s);

/// Direct enumeration of MC-explanations from a decision table, sorted.
/// Binary variables only.
std::vector<Instance> brute_mc_oracle(const DecisionTable& table, const Instance& x);

/// Largest variable count accepted by brute_pi_oracle.
inline constexpr std::size_t kBrutePiMaxVars = 16;

/// PI-explanations of the decision table(x) by subset enumeration, sorted.
/// Throws capacity error past kBrutePiMaxVars variables.
std::vector<PartialInstance> brute_pi_oracle(const DecisionTable& table, const Instance& x);

/// True iff every completion of z has the value `decision` under f.
bool is_implicant(const Diagram& f, const PartialInstance& z, bool decision);

}  // namespace bnx
