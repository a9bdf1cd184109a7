#pragma once

// Compilation of classifier decision functions into reduced ODDs.
//
// Both compilers grow a layered decision graph one feature at a time. Every
// frontier leaf stands for the sub-classifier obtained by observing the
// features on its path; after each expansion, leaves whose sub-classifiers
// have equal merge signatures are merged, and leaves whose decision no longer
// depends on the unobserved features are closed into sinks.
//
// Naive Bayes: the signature is the cut rank of the adjusted threshold in the
// sorted set of achievable log-odds sums of the unobserved features. Two
// leaves share a rank iff they have the same residual decision function.
//
// Latent tree: the signature is the class-by-state message at the lowest
// node whose subtree holds every unobserved feature, together with the
// likelihood factors of observed evidence inside that subtree, each
// normalized by its maximum entry. Proportional messages give identical
// posteriors for every completion, so merging on them is sound; it may miss
// some equivalences, so an exact residual-table pass follows when the
// unobserved space is small enough.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bnx/classifier.hpp"
#include "bnx/diagram.hpp"

namespace bnx {

/// Relative tolerance for comparing log-odds sums and message entries.
inline constexpr double kMergeTolerance = 1e-12;

/// Naive Bayes signature: number of achievable remaining sums strictly below
/// the adjusted threshold.
struct NbCut {
  std::size_t rank;
  bool operator==(const NbCut&) const = default;
};

/// Latent-tree signature: concatenated normalized factors (class-by-state
/// message first). `shape` holds the length of each factor.
struct LtMessages {
  std::vector<double> entries;
  std::vector<std::size_t> shape;
};

/// Exact residual decision function over the unobserved features.
struct ResidualTable {
  std::vector<bool> bits;
  bool operator==(const ResidualTable&) const = default;
};

/// Never merges with anything else (merging disabled or over capacity).
struct Distinct {
  std::uint64_t id;
  bool operator==(const Distinct&) const = default;
};

using MergeSignature = std::variant<NbCut, LtMessages, ResidualTable, Distinct>;

bool signatures_equal(const MergeSignature& a, const MergeSignature& b);
std::size_t signature_hash(const MergeSignature& s);

/// Outcome of classifying a frontier leaf: either its decision is already
/// fixed, or it carries a signature.
using LeafKey = std::variant<bool, MergeSignature>;

/// Sorted, deduplicated sets of achievable log-odds sums for sets of
/// unobserved naive Bayes features.
class NbSignatureTable {
 public:
  explicit NbSignatureTable(const NaiveBayesClassifier& nb);

  /// Achievable sums over the flagged features.
  const std::vector<double>& sums(const std::vector<bool>& unobserved);

  /// Cut rank for a leaf with log-odds `accumulated` (prior included).
  NbCut signature(const std::vector<bool>& unobserved, double accumulated);

 private:
  const NaiveBayesClassifier* nb_;
  std::map<std::vector<bool>, std::vector<double>> cache_;
};

/// Signature of the latent sub-classifier left after observing `evidence`,
/// where exactly the features flagged in `unobserved` are unset. Returns
/// nullopt when the evidence has probability zero.
std::optional<LtMessages> lt_merge_signature(const LatentTreeClassifier& lt,
                                             std::span<const std::optional<Value>> evidence,
                                             const std::vector<bool>& unobserved);

enum class LatentMerge {
  none,          // keep every leaf distinct
  proportional,  // merge on proportional messages only
  exact,         // proportional, then residual decision tables when small
};

struct CompileOptions {
  /// Target manager; its variables must equal the features in compile order.
  std::shared_ptr<Manager> manager;
  LatentMerge latent_merge = LatentMerge::exact;
  /// Largest residual space (instances) enumerated for exact merging.
  std::uint64_t exact_merge_cap = std::uint64_t{1} << 12;
  /// Decision assigned to zero-probability evidence.
  bool impossible_decision = false;
};

/// One frontier leaf: a representative partial instantiation of the
/// classifier's features.
struct FrontierLeaf {
  std::vector<std::optional<Value>> evidence;
  double accumulated = 0.0;  // naive Bayes log-odds so far
};

/// Leaf counts around one expand-then-merge step.
struct FrontierStep {
  std::size_t depth;     // features processed after the step
  std::size_t expanded;  // leaves created by the expansion, before merging
  std::size_t open;      // undecided leaves after merging
};

/// Residual sub-classifier queries used by expand-then-merge.
class MergeStrategy {
 public:
  virtual ~MergeStrategy() = default;
  virtual const VariableTable& features() const = 0;
  /// Leaf with nothing observed.
  virtual FrontierLeaf root() const {
    return FrontierLeaf{std::vector<std::optional<Value>>(features().size()), 0.0};
  }
  virtual FrontierLeaf extend(const FrontierLeaf& leaf, std::size_t feature, Value v) const = 0;
  /// Cheap key used for the first merge pass.
  virtual LeafKey key(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) = 0;
  /// Optional second, finer pass applied to the representatives of the first.
  virtual std::optional<LeafKey> refine(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) {
    (void)leaf;
    (void)unobserved;
    return std::nullopt;
  }
  /// Leaves whose evidence turned out to be impossible.
  std::size_t impossible_leaves() const noexcept { return impossible_; }

 protected:
  std::size_t impossible_ = 0;
};

class NaiveBayesMerger final : public MergeStrategy {
 public:
  NaiveBayesMerger(const NaiveBayesClassifier& nb, const CompileOptions& options);

  const VariableTable& features() const override { return nb_.features(); }
  FrontierLeaf root() const override;
  FrontierLeaf extend(const FrontierLeaf& leaf, std::size_t feature, Value v) const override;
  LeafKey key(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) override;

 private:
  const NaiveBayesClassifier& nb_;
  CompileOptions options_;
  NbSignatureTable table_;
  bool finite_;
  std::uint64_t next_id_ = 0;
};

class LatentTreeMerger final : public MergeStrategy {
 public:
  LatentTreeMerger(const LatentTreeClassifier& lt, const CompileOptions& options);

  const VariableTable& features() const override { return lt_.features(); }
  FrontierLeaf extend(const FrontierLeaf& leaf, std::size_t feature, Value v) const override;
  LeafKey key(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) override;
  std::optional<LeafKey> refine(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) override;

 private:
  std::optional<bool> final_decision(const FrontierLeaf& leaf);

  const LatentTreeClassifier& lt_;
  CompileOptions options_;
  std::uint64_t next_id_ = 0;
};

/// Layered decision graph under construction.
class PartialDecisionGraph {
 public:
  /// Single root leaf with nothing observed.
  explicit PartialDecisionGraph(MergeStrategy& strategy);

  std::size_t depth() const noexcept { return processed_.size(); }
  const std::vector<std::size_t>& processed() const noexcept { return processed_; }
  const std::vector<FrontierLeaf>& frontier() const { return layers_.back(); }
  std::size_t frontier_size() const { return layers_.back().size(); }
  const std::vector<FrontierStep>& trace() const noexcept { return trace_; }

  /// Builds the reduced ODD once every feature has been processed. Level k of
  /// the manager must be feature processed()[k].
  Diagram to_diagram(std::shared_ptr<Manager> mgr) const;

 private:
  friend void expand_then_merge(MergeStrategy&, PartialDecisionGraph&, std::size_t);

  // Edge target: sink value or index into the next layer.
  using Target = std::variant<bool, std::size_t>;

  std::size_t num_features_;
  std::vector<std::size_t> processed_;
  std::vector<bool> unobserved_;
  std::optional<bool> root_constant_;
  std::vector<std::vector<FrontierLeaf>> layers_;
  std::vector<std::vector<std::vector<Target>>> edges_;
  std::vector<FrontierStep> trace_;
};

/// Expands every frontier leaf by `feature`, then merges equivalent children
/// and closes decided ones. Throws sequencing error if `feature` is unknown
/// or already processed.
void expand_then_merge(MergeStrategy& strategy, PartialDecisionGraph& graph, std::size_t feature);

struct CompileResult {
  Diagram odd;
  /// order[k] = classifier feature at diagram level k.
  std::vector<std::size_t> order;
  std::vector<FrontierStep> trace;
  std::size_t impossible_leaves = 0;

  /// Classifier instance rearranged into diagram level order.
  Instance to_levels(std::span<const Value> x) const;
  /// Diagram-level instance rearranged into classifier feature order.
  Instance to_features(std::span<const Value> x) const;
};

/// Identity order when `order` is empty.
CompileResult compile_naive_bayes(const NaiveBayesClassifier& nb, std::vector<std::size_t> order = {},
                                  const CompileOptions& options = {});

/// Feature processing order of the latent-tree compiler: walk down from the
/// root through single unprocessed internal children; otherwise process the
/// unprocessed child with the fewest leaves (ties: smallest pre-order id),
/// taking its leaves in pre-order.
std::vector<std::size_t> latent_tree_order(const LatentTreeClassifier& lt);

CompileResult compile_latent_tree(const LatentTreeClassifier& lt, const CompileOptions& options = {});

/// Dispatches on the classifier kind; `order` applies to naive Bayes only.
CompileResult compile(const Classifier& c, std::vector<std::size_t> order = {},
                      const CompileOptions& options = {});

}  // namespace bnx
