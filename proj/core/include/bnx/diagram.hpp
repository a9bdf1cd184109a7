#pragma once

// Ordered decision diagrams over multi-valued variables.
//
// A Manager owns the node store and the unique table for one variable table.
// Nodes are hash-consed, so within one manager two diagrams denote the same
// function iff their roots are the same NodeId.
//
// Two modes are supported:
//  * reduced:  a node whose children are all equal is never created; a
//              variable skipped along a path accepts every value.
//  * complete: every path to the 1-sink tests every variable. Only nodes
//              whose children are all the 0-sink collapse (to the 0-sink).
//              Used for sets of partial instances over "don't care"
//              extended domains, where skipping a variable would be
//              ambiguous.
//
// A manager is single-writer. Queries that do not intern nodes keep their
// memo tables local to the call and may run concurrently on one manager.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_set>
#include <vector>

#include "bnx/variables.hpp"

namespace bnx {

enum class DiagramMode { reduced, complete };

using NodeId = std::uint32_t;
inline constexpr NodeId kFalseNode = 0;
inline constexpr NodeId kTrueNode = 1;

class Manager {
 public:
  explicit Manager(VariableTable vars, DiagramMode mode = DiagramMode::reduced);

  static std::shared_ptr<Manager> create(VariableTable vars,
                                         DiagramMode mode = DiagramMode::reduced) {
    return std::make_shared<Manager>(std::move(vars), mode);
  }

  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  const VariableTable& variables() const noexcept { return vars_; }
  DiagramMode mode() const noexcept { return mode_; }
  std::size_t num_vars() const noexcept { return vars_.size(); }
  std::size_t domain_size(std::size_t var) const { return vars_.domain_size(var); }

  /// Canonical node for (var, children). Throws structural error on an
  /// ordering violation and arity error on a wrong child count.
  NodeId intern(std::size_t var, std::span<const NodeId> children);

  static bool is_sink(NodeId id) noexcept { return id <= kTrueNode; }

  /// Level of a node; sinks sit at level num_vars().
  std::size_t var_of(NodeId id) const { return nodes_[id].var; }

  /// Children of an internal node. The span is invalidated by intern().
  std::span<const NodeId> children(NodeId id) const {
    const auto& n = nodes_[id];
    return {child_pool_.data() + n.first_child, domain_size(n.var)};
  }

  NodeId child(NodeId id, Value v) const { return child_pool_[nodes_[id].first_child + v]; }

  /// Total number of nodes ever allocated, sinks included.
  std::size_t allocated() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::uint32_t var;
    std::uint32_t first_child;
  };

  struct NodeHash {
    const Manager* mgr;
    std::size_t operator()(NodeId id) const noexcept;
  };
  struct NodeEq {
    const Manager* mgr;
    bool operator()(NodeId a, NodeId b) const noexcept;
  };

  VariableTable vars_;
  DiagramMode mode_;
  std::vector<Node> nodes_;
  std::vector<NodeId> child_pool_;
  std::unordered_set<NodeId, NodeHash, NodeEq> unique_;
};

/// A function represented by a root node inside a shared manager.
class Diagram {
 public:
  Diagram(std::shared_ptr<Manager> mgr, NodeId root) : mgr_(std::move(mgr)), root_(root) {}

  NodeId root() const noexcept { return root_; }
  Manager& manager() const noexcept { return *mgr_; }
  const std::shared_ptr<Manager>& manager_ptr() const noexcept { return mgr_; }
  const VariableTable& variables() const noexcept { return mgr_->variables(); }
  DiagramMode mode() const noexcept { return mgr_->mode(); }

  bool is_false() const noexcept { return root_ == kFalseNode; }
  bool is_true() const noexcept { return root_ == kTrueNode; }

  /// Same manager and same root, i.e. the same function.
  bool operator==(const Diagram& o) const noexcept {
    return mgr_ == o.mgr_ && root_ == o.root_;
  }

 private:
  std::shared_ptr<Manager> mgr_;
  NodeId root_;
};

enum class BoolOp { conj, disj, diff /* f and not g */ };

/// Per-variable, per-value costs used by cardinality minimization.
using CostTable = std::vector<std::vector<std::uint32_t>>;

/// Cost 1 for value `i`, 0 for every other value (binary i-minimization).
CostTable count_costs(const VariableTable& vars, Value i);

Diagram constant(std::shared_ptr<Manager> mgr, bool value);

/// X_var = value. Reduced mode only.
Diagram literal(std::shared_ptr<Manager> mgr, std::size_t var, Value value);

bool evaluate(const Diagram& f, std::span<const Value> x);

Diagram complement(const Diagram& f);

/// Cofactor with `var` fixed to `value`. Reduced mode only.
Diagram restrict(const Diagram& f, std::size_t var, Value value);

Diagram combine(const Diagram& f, const Diagram& g, BoolOp op);

/// f conjoined with the assignment alpha, i.e. f restricted to instances
/// compatible with alpha (variables keep their levels).
Diagram conjoin_assignment(const Diagram& f, const PartialInstance& alpha);

/// Keeps exactly the models of f whose total cost is minimal. Returns the
/// 0-sink when f has no model.
Diagram cardinality_minimize(const Diagram& f, const CostTable& costs);

/// Minimal cost of a model of f, or nullopt when f has none.
std::optional<std::uint64_t> min_cost(const Diagram& f, const CostTable& costs);

/// Exact number of models; throws capacity error on 64-bit overflow.
std::uint64_t model_count(const Diagram& f);

/// Calls `fn` on every model in lexicographic order (variable 0 first, lowest
/// value first). Stops early when `fn` returns false.
void for_each_model(const Diagram& f, const std::function<bool(const Instance&)>& fn);

/// All models, in for_each_model order.
std::vector<Instance> models(const Diagram& f);

/// First model in lexicographic order.
std::optional<Instance> any_model(const Diagram& f);

/// Reachable nodes, sinks included.
std::size_t size(const Diagram& f);

/// Builds the reduced diagram of a function given by its truth table, indexed
/// by instance_rank over the manager's variables.
Diagram from_truth_table(std::shared_ptr<Manager> mgr, const std::vector<bool>& table);

}  // namespace bnx
