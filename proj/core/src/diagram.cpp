#include "bnx/diagram.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "bnx/error.hpp"

namespace bnx {

namespace {

constexpr std::uint64_t kInfinite = std::numeric_limits<std::uint64_t>::max();

void hash_mix(std::size_t& seed, std::size_t v) noexcept {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

std::uint64_t pair_key(NodeId a, NodeId b) noexcept {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void require_same_manager(const Diagram& f, const Diagram& g) {
  if (f.manager_ptr() != g.manager_ptr()) {
    throw Error(ErrorKind::manager, "operands belong to different managers");
  }
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::capacity, "model count overflow");
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::capacity, "model count overflow");
  return r;
}

NodeId cofactor(const Manager& m, NodeId u, std::size_t var, Value v) {
  return m.var_of(u) == var ? m.child(u, v) : u;
}

std::vector<NodeId> children_copy(const Manager& m, NodeId u) {
  auto c = m.children(u);
  return {c.begin(), c.end()};
}

}  // namespace

Manager::Manager(VariableTable vars, DiagramMode mode)
    : vars_(std::move(vars)), mode_(mode), unique_(64, NodeHash{this}, NodeEq{this}) {
  const auto n = static_cast<std::uint32_t>(vars_.size());
  nodes_.push_back({n, 0});
  nodes_.push_back({n, 0});
}

std::size_t Manager::NodeHash::operator()(NodeId id) const noexcept {
  std::size_t seed = mgr->nodes_[id].var;
  for (auto c : mgr->children(id)) hash_mix(seed, c);
  return seed;
}

bool Manager::NodeEq::operator()(NodeId a, NodeId b) const noexcept {
  if (mgr->nodes_[a].var != mgr->nodes_[b].var) return false;
  auto ca = mgr->children(a);
  auto cb = mgr->children(b);
  return std::equal(ca.begin(), ca.end(), cb.begin());
}

NodeId Manager::intern(std::size_t var, std::span<const NodeId> children) {
  if (var >= vars_.size()) {
    throw Error(ErrorKind::structural, "variable index " + std::to_string(var) + " out of range");
  }
  if (children.size() != vars_.domain_size(var)) {
    throw Error(ErrorKind::arity, "node for '" + vars_[var].name + "' needs " +
                                      std::to_string(vars_.domain_size(var)) + " children, got " +
                                      std::to_string(children.size()));
  }
  for (auto c : children) {
    if (c >= nodes_.size()) throw Error(ErrorKind::structural, "unknown child node");
    if (nodes_[c].var <= var) {
      throw Error(ErrorKind::structural, "ordering violation: child of '" + vars_[var].name +
                                             "' is labelled by an earlier or equal variable");
    }
  }

  if (mode_ == DiagramMode::reduced) {
    if (std::all_of(children.begin(), children.end(),
                    [&](NodeId c) { return c == children[0]; })) {
      return children[0];
    }
  } else {
    if (std::all_of(children.begin(), children.end(), [](NodeId c) { return c == kFalseNode; })) {
      return kFalseNode;
    }
    for (auto c : children) {
      if (c != kFalseNode && nodes_[c].var != var + 1) {
        throw Error(ErrorKind::structural,
                    "complete-mode node for '" + vars_[var].name + "' skips a level");
      }
    }
  }

  if (nodes_.size() >= std::numeric_limits<NodeId>::max()) {
    throw Error(ErrorKind::capacity, "node store exhausted");
  }

  // The span may point into child_pool_ itself; copy before growing it.
  std::vector<NodeId> local(children.begin(), children.end());
  const auto first = static_cast<std::uint32_t>(child_pool_.size());
  child_pool_.insert(child_pool_.end(), local.begin(), local.end());
  nodes_.push_back({static_cast<std::uint32_t>(var), first});
  const auto id = static_cast<NodeId>(nodes_.size() - 1);

  auto [it, inserted] = unique_.insert(id);
  if (!inserted) {
    nodes_.pop_back();
    child_pool_.resize(first);
    return *it;
  }
  return id;
}

CostTable count_costs(const VariableTable& vars, Value i) {
  CostTable costs(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    costs[j].assign(vars.domain_size(j), 0);
    if (i < vars.domain_size(j)) costs[j][i] = 1;
  }
  return costs;
}

Diagram constant(std::shared_ptr<Manager> mgr, bool value) {
  return Diagram(std::move(mgr), value ? kTrueNode : kFalseNode);
}

Diagram literal(std::shared_ptr<Manager> mgr, std::size_t var, Value value) {
  if (mgr->mode() != DiagramMode::reduced) {
    throw Error(ErrorKind::mode, "literal diagrams are defined in reduced mode only");
  }
  if (var >= mgr->num_vars()) throw Error(ErrorKind::domain, "variable index out of range");
  if (value >= mgr->domain_size(var)) throw Error(ErrorKind::domain, "value out of domain");
  std::vector<NodeId> ch(mgr->domain_size(var), kFalseNode);
  ch[value] = kTrueNode;
  const auto root = mgr->intern(var, ch);
  return Diagram(std::move(mgr), root);
}

bool evaluate(const Diagram& f, std::span<const Value> x) {
  const auto& m = f.manager();
  m.variables().check_instance(x);
  NodeId u = f.root();
  while (!Manager::is_sink(u)) u = m.child(u, x[m.var_of(u)]);
  return u == kTrueNode;
}

Diagram complement(const Diagram& f) {
  auto& m = f.manager();
  const auto n = m.num_vars();
  std::unordered_map<NodeId, NodeId> memo;

  if (m.mode() == DiagramMode::reduced) {
    std::function<NodeId(NodeId)> rec = [&](NodeId u) -> NodeId {
      if (u == kFalseNode) return kTrueNode;
      if (u == kTrueNode) return kFalseNode;
      if (auto it = memo.find(u); it != memo.end()) return it->second;
      auto ch = children_copy(m, u);
      for (auto& c : ch) c = rec(c);
      const auto r = m.intern(m.var_of(u), ch);
      memo.emplace(u, r);
      return r;
    };
    return Diagram(f.manager_ptr(), rec(f.root()));
  }

  // Complete mode: an edge into the 0-sink at level k stands for every
  // completion of levels k..n-1, so its complement is a full chain.
  std::vector<NodeId> full(n + 1, kTrueNode);
  for (std::size_t k = n; k-- > 0;) {
    std::vector<NodeId> ch(m.domain_size(k), full[k + 1]);
    full[k] = m.intern(k, ch);
  }
  std::function<NodeId(NodeId, std::size_t)> rec = [&](NodeId u, std::size_t level) -> NodeId {
    if (u == kFalseNode) return full[level];
    if (u == kTrueNode) return kFalseNode;
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    const auto var = m.var_of(u);
    auto ch = children_copy(m, u);
    for (auto& c : ch) c = rec(c, var + 1);
    const auto r = m.intern(var, ch);
    memo.emplace(u, r);
    return r;
  };
  return Diagram(f.manager_ptr(), rec(f.root(), 0));
}

Diagram restrict(const Diagram& f, std::size_t var, Value value) {
  auto& m = f.manager();
  if (m.mode() != DiagramMode::reduced) {
    throw Error(ErrorKind::mode, "restrict is defined in reduced mode only");
  }
  if (var >= m.num_vars()) throw Error(ErrorKind::domain, "variable index out of range");
  if (value >= m.domain_size(var)) {
    throw Error(ErrorKind::domain, "value out of domain for '" + m.variables()[var].name + "'");
  }
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rec = [&](NodeId u) -> NodeId {
    const auto uv = m.var_of(u);
    if (uv > var) return u;
    if (uv == var) return m.child(u, value);
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    auto ch = children_copy(m, u);
    for (auto& c : ch) c = rec(c);
    const auto r = m.intern(uv, ch);
    memo.emplace(u, r);
    return r;
  };
  return Diagram(f.manager_ptr(), rec(f.root()));
}

Diagram combine(const Diagram& f, const Diagram& g, BoolOp op) {
  require_same_manager(f, g);
  auto& m = f.manager();
  std::unordered_map<std::uint64_t, NodeId> memo;
  std::unordered_map<NodeId, NodeId> neg_memo;

  std::function<NodeId(NodeId)> negate = [&](NodeId u) -> NodeId {
    if (u == kFalseNode) return kTrueNode;
    if (u == kTrueNode) return kFalseNode;
    if (auto it = neg_memo.find(u); it != neg_memo.end()) return it->second;
    auto ch = children_copy(m, u);
    for (auto& c : ch) c = negate(c);
    const auto r = m.intern(m.var_of(u), ch);
    neg_memo.emplace(u, r);
    return r;
  };

  std::function<NodeId(NodeId, NodeId)> apply = [&](NodeId a, NodeId b) -> NodeId {
    switch (op) {
      case BoolOp::conj:
        if (a == kFalseNode || b == kFalseNode) return kFalseNode;
        if (a == kTrueNode || a == b) return b;
        if (b == kTrueNode) return a;
        if (a > b) std::swap(a, b);
        break;
      case BoolOp::disj:
        if (a == kTrueNode || b == kTrueNode) return kTrueNode;
        if (a == kFalseNode || a == b) return b;
        if (b == kFalseNode) return a;
        if (a > b) std::swap(a, b);
        break;
      case BoolOp::diff:
        if (a == kFalseNode || b == kTrueNode || a == b) return kFalseNode;
        if (b == kFalseNode) return a;
        // Only reachable in reduced mode: in complete mode the 1-sink sits at
        // the last level, where b is necessarily a sink.
        if (a == kTrueNode) return negate(b);
        break;
    }
    const auto key = pair_key(a, b);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const auto top = std::min(m.var_of(a), m.var_of(b));
    std::vector<NodeId> ch(m.domain_size(top));
    for (Value v = 0; v < ch.size(); ++v) {
      ch[v] = apply(cofactor(m, a, top, v), cofactor(m, b, top, v));
    }
    const auto r = m.intern(top, ch);
    memo.emplace(key, r);
    return r;
  };

  return Diagram(f.manager_ptr(), apply(f.root(), g.root()));
}

Diagram conjoin_assignment(const Diagram& f, const PartialInstance& alpha) {
  auto& m = f.manager();
  const auto n = m.num_vars();
  if (alpha.num_vars() != n) {
    throw Error(ErrorKind::domain, "assignment covers " + std::to_string(alpha.num_vars()) +
                                       " variables, expected " + std::to_string(n));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] && *alpha[j] >= m.domain_size(j)) {
      throw Error(ErrorKind::domain, "assignment value out of domain for '" +
                                         m.variables()[j].name + "'");
    }
  }

  // Inserts literal nodes for assigned variables in [from, to) that the
  // original edge skipped.
  auto pad = [&](std::size_t from, std::size_t to, NodeId r) {
    if (r == kFalseNode) return r;
    for (std::size_t j = to; j-- > from;) {
      if (!alpha[j]) continue;
      std::vector<NodeId> ch(m.domain_size(j), kFalseNode);
      ch[*alpha[j]] = r;
      r = m.intern(j, ch);
    }
    return r;
  };

  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rec = [&](NodeId u) -> NodeId {
    if (Manager::is_sink(u)) return u;
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    const auto var = m.var_of(u);
    auto ch = children_copy(m, u);
    for (Value v = 0; v < ch.size(); ++v) {
      if (alpha[var] && *alpha[var] != v) {
        ch[v] = kFalseNode;
      } else {
        const auto c = ch[v];
        ch[v] = pad(var + 1, m.var_of(c), rec(c));
      }
    }
    const auto r = m.intern(var, ch);
    memo.emplace(u, r);
    return r;
  };

  const auto root = f.root();
  return Diagram(f.manager_ptr(), pad(0, m.var_of(root), rec(root)));
}

namespace {

class Minimizer {
 public:
  Minimizer(Manager& m, const CostTable& costs) : m_(m), costs_(costs) {
    const auto n = m.num_vars();
    if (costs.size() != n) throw Error(ErrorKind::argument, "cost table does not cover every variable");
    prefix_.assign(n + 1, 0);
    floor_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (costs[j].size() != m.domain_size(j)) {
        throw Error(ErrorKind::argument, "cost row for '" + m.variables()[j].name +
                                             "' does not cover its domain");
      }
      floor_[j] = *std::min_element(costs[j].begin(), costs[j].end());
      prefix_[j + 1] = prefix_[j] + floor_[j];
    }
  }

  std::uint64_t skip_cost(std::size_t from, std::size_t to) const { return prefix_[to] - prefix_[from]; }

  std::uint64_t cost(NodeId u) {
    if (u == kFalseNode) return kInfinite;
    if (u == kTrueNode) return 0;
    if (auto it = cost_.find(u); it != cost_.end()) return it->second;
    const auto var = m_.var_of(u);
    std::uint64_t best = kInfinite;
    for (Value v = 0; v < m_.domain_size(var); ++v) best = std::min(best, edge_cost(u, var, v));
    cost_.emplace(u, best);
    return best;
  }

  std::uint64_t root_cost(NodeId root) {
    const auto c = cost(root);
    return c == kInfinite ? kInfinite : c + skip_cost(0, m_.var_of(root));
  }

  NodeId prune(NodeId u) {
    if (Manager::is_sink(u)) return u;
    if (auto it = pruned_.find(u); it != pruned_.end()) return it->second;
    const auto var = m_.var_of(u);
    const auto best = cost(u);
    std::vector<NodeId> ch(m_.domain_size(var), kFalseNode);
    for (Value v = 0; v < ch.size(); ++v) {
      if (best != kInfinite && edge_cost(u, var, v) == best) {
        const auto c = m_.child(u, v);
        ch[v] = pad(var + 1, m_.var_of(c), prune(c));
      }
    }
    const auto r = m_.intern(var, ch);
    pruned_.emplace(u, r);
    return r;
  }

  // Skipped variables accept every value; keep only their cheapest ones.
  NodeId pad(std::size_t from, std::size_t to, NodeId r) {
    if (r == kFalseNode) return r;
    for (std::size_t j = to; j-- > from;) {
      const auto& row = costs_[j];
      if (std::all_of(row.begin(), row.end(), [&](auto c) { return c == floor_[j]; })) continue;
      std::vector<NodeId> ch(row.size(), kFalseNode);
      for (Value v = 0; v < row.size(); ++v) {
        if (row[v] == floor_[j]) ch[v] = r;
      }
      r = m_.intern(j, ch);
    }
    return r;
  }

 private:
  std::uint64_t edge_cost(NodeId u, std::size_t var, Value v) {
    const auto c = m_.child(u, v);
    const auto sub = cost(c);
    if (sub == kInfinite) return kInfinite;
    return costs_[var][v] + skip_cost(var + 1, m_.var_of(c)) + sub;
  }

  Manager& m_;
  const CostTable& costs_;
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint32_t> floor_;
  std::unordered_map<NodeId, std::uint64_t> cost_;
  std::unordered_map<NodeId, NodeId> pruned_;
};

}  // namespace

Diagram cardinality_minimize(const Diagram& f, const CostTable& costs) {
  auto& m = f.manager();
  Minimizer mz(m, costs);
  const auto root = f.root();
  if (mz.root_cost(root) == kInfinite) return constant(f.manager_ptr(), false);
  const auto pruned = mz.prune(root);
  return Diagram(f.manager_ptr(), mz.pad(0, m.var_of(root), pruned));
}

std::optional<std::uint64_t> min_cost(const Diagram& f, const CostTable& costs) {
  Minimizer mz(f.manager(), costs);
  const auto c = mz.root_cost(f.root());
  if (c == kInfinite) return std::nullopt;
  return c;
}

std::uint64_t model_count(const Diagram& f) {
  const auto& m = f.manager();
  auto span_product = [&](std::size_t from, std::size_t to) {
    std::uint64_t p = 1;
    for (std::size_t j = from; j < to; ++j) p = checked_mul(p, m.domain_size(j));
    return p;
  };
  std::unordered_map<NodeId, std::uint64_t> memo;
  std::function<std::uint64_t(NodeId)> rec = [&](NodeId u) -> std::uint64_t {
    if (u == kFalseNode) return 0;
    if (u == kTrueNode) return 1;
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    const auto var = m.var_of(u);
    std::uint64_t total = 0;
    for (Value v = 0; v < m.domain_size(var); ++v) {
      const auto c = m.child(u, v);
      const auto sub = rec(c);
      if (sub) total = checked_add(total, checked_mul(sub, span_product(var + 1, m.var_of(c))));
    }
    memo.emplace(u, total);
    return total;
  };
  const auto root = f.root();
  const auto r = rec(root);
  return r ? checked_mul(r, span_product(0, m.var_of(root))) : 0;
}

void for_each_model(const Diagram& f, const std::function<bool(const Instance&)>& fn) {
  const auto& m = f.manager();
  const auto n = m.num_vars();
  Instance x(n, 0);
  std::function<bool(std::size_t, NodeId)> rec = [&](std::size_t level, NodeId u) -> bool {
    if (u == kFalseNode) return true;
    if (level == n) return fn(x);
    const bool tested = m.var_of(u) == level;
    for (Value v = 0; v < m.domain_size(level); ++v) {
      x[level] = v;
      if (!rec(level + 1, tested ? m.child(u, v) : u)) return false;
    }
    return true;
  };
  rec(0, f.root());
}

std::vector<Instance> models(const Diagram& f) {
  std::vector<Instance> out;
  for_each_model(f, [&](const Instance& x) {
    out.push_back(x);
    return true;
  });
  return out;
}

std::optional<Instance> any_model(const Diagram& f) {
  std::optional<Instance> out;
  for_each_model(f, [&](const Instance& x) {
    out = x;
    return false;
  });
  return out;
}

std::size_t size(const Diagram& f) {
  const auto& m = f.manager();
  std::unordered_set<NodeId> seen;
  std::vector<NodeId> stack{f.root()};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second || Manager::is_sink(u)) continue;
    for (auto c : m.children(u)) stack.push_back(c);
  }
  return seen.size();
}

Diagram from_truth_table(std::shared_ptr<Manager> mgr, const std::vector<bool>& table) {
  auto& m = *mgr;
  const auto n = m.num_vars();
  if (table.size() != m.variables().space_size()) {
    throw Error(ErrorKind::argument, "truth table length does not match the instance space");
  }
  std::vector<std::uint64_t> stride(n + 1, 1);
  for (std::size_t j = n; j-- > 0;) stride[j] = stride[j + 1] * m.domain_size(j);

  std::function<NodeId(std::size_t, std::uint64_t)> build = [&](std::size_t level,
                                                                std::uint64_t base) -> NodeId {
    if (level == n) return table[base] ? kTrueNode : kFalseNode;
    std::vector<NodeId> ch(m.domain_size(level));
    for (Value v = 0; v < ch.size(); ++v) ch[v] = build(level + 1, base + v * stride[level + 1]);
    return m.intern(level, ch);
  };
  const auto root = build(0, 0);
  return Diagram(std::move(mgr), root);
}

}  // namespace bnx
