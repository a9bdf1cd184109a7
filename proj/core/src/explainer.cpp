#include "bnx/explainer.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "bnx/error.hpp"

namespace bnx {

namespace {

void check_instance_for(const Diagram& f, const Instance& x) {
  f.variables().check_instance(x);
}

void require_reduced(const Diagram& f) {
  if (f.mode() != DiagramMode::reduced) {
    throw Error(ErrorKind::mode, "explanations need a reduced decision diagram");
  }
}

// Reduced-mode diagram accepting exactly the instances whose value at every
// variable j lies in allowed[j].
Diagram allowed_values(const std::shared_ptr<Manager>& mgr, const std::vector<std::vector<bool>>& allowed) {
  NodeId r = kTrueNode;
  for (std::size_t j = allowed.size(); j-- > 0;) {
    const auto& row = allowed[j];
    if (std::all_of(row.begin(), row.end(), [](bool b) { return b; })) continue;
    std::vector<NodeId> ch(row.size(), kFalseNode);
    for (Value v = 0; v < row.size(); ++v) {
      if (row[v]) ch[v] = r;
    }
    r = mgr->intern(j, ch);
  }
  return Diagram(mgr, r);
}

// Builds prime implicant sets level by level. A term with '*' at the current
// variable is a prime implicant of the conjunction of all cofactors; a term
// with value v there is a prime implicant of the v-cofactor that is not one
// of the conjunction.
class PrimeBuilder {
 public:
  PrimeBuilder(const Diagram& f, std::shared_ptr<Manager> dst, const Instance* x)
      : src_(f.manager_ptr()), dst_(std::move(dst)), x_(x), n_(f.manager().num_vars()) {}

  NodeId run(NodeId u) { return rec(u, 0); }

 private:
  NodeId rec(NodeId u, std::size_t level) {
    if (u == kFalseNode) return kFalseNode;
    if (level == n_) return kTrueNode;
    const auto key = static_cast<std::uint64_t>(u) * (n_ + 1) + level;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const auto b = src_->domain_size(level);
    std::vector<NodeId> ch(b + 1, kFalseNode);
    if (src_->var_of(u) != level) {
      // f does not depend on this variable: only '*' survives.
      ch[b] = rec(u, level + 1);
    } else {
      std::vector<NodeId> cof(b);
      for (Value v = 0; v < b; ++v) cof[v] = src_->child(u, v);
      NodeId meet = cof[0];
      for (Value v = 1; v < b && meet != kFalseNode; ++v) {
        meet = combine(Diagram(src_, meet), Diagram(src_, cof[v]), BoolOp::conj).root();
      }
      const auto star = rec(meet, level + 1);
      for (Value v = 0; v < b; ++v) {
        if (x_ && (*x_)[level] != v) continue;
        if (cof[v] == meet) continue;
        const auto sub = rec(cof[v], level + 1);
        ch[v] = combine(Diagram(dst_, sub), Diagram(dst_, star), BoolOp::diff).root();
      }
      ch[b] = star;
    }
    const auto r = dst_->intern(level, ch);
    memo_.emplace(key, r);
    return r;
  }

  std::shared_ptr<Manager> src_;
  std::shared_ptr<Manager> dst_;
  const Instance* x_;
  std::size_t n_;
  std::unordered_map<std::uint64_t, NodeId> memo_;
};

std::shared_ptr<Manager> implicant_target(const Diagram& f, std::shared_ptr<Manager> target) {
  if (!target) return make_implicant_manager(f.variables());
  if (target->mode() != DiagramMode::complete || target->variables() != f.variables().with_dont_care()) {
    throw Error(ErrorKind::manager, "implicant manager does not match the diagram's variables");
  }
  return target;
}

PartialInstance decode_one(const VariableTable& ext, const Instance& m) {
  PartialInstance z(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] + 1 != ext.domain_size(j)) z.set(j, m[j]);
  }
  return z;
}

}  // namespace

OnOffPartition OnOffPartition::binary(const VariableTable& vars) {
  OnOffPartition p;
  p.fixed = PartialInstance(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    std::vector<bool> row(vars.domain_size(j), false);
    row.back() = true;
    p.on.push_back(std::move(row));
  }
  return p;
}

McExplanationSet mc_explanations(const Diagram& f, const Instance& x) {
  if (!f.variables().all_binary()) {
    throw Error(ErrorKind::precondition, "MC-explanations need binary variables; use the on/off partition form");
  }
  return mc_explanations_general(f, x, OnOffPartition::binary(f.variables()));
}

McExplanationSet mc_explanations_general(const Diagram& f, const Instance& x, const OnOffPartition& p) {
  require_reduced(f);
  check_instance_for(f, x);
  const auto& vars = f.variables();
  const auto n = vars.size();
  if (p.on.size() != n) throw Error(ErrorKind::argument, "partition does not cover every variable");
  const bool has_fixed = p.fixed.num_vars() != 0;
  if (has_fixed && p.fixed.num_vars() != n) {
    throw Error(ErrorKind::argument, "fixed assignment has the wrong number of variables");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (p.on[j].size() != vars.domain_size(j)) {
      throw Error(ErrorKind::argument, "partition row for '" + vars[j].name + "' does not cover its domain");
    }
    if (has_fixed && p.fixed[j] && *p.fixed[j] != x[j]) {
      throw Error(ErrorKind::argument, "fixed value of '" + vars[j].name + "' disagrees with the instance");
    }
  }

  const bool decision = evaluate(f, x);
  // Values that support the decision: on-values for positive, off-values
  // for negative decisions.
  auto supports = [&](std::size_t j, Value v) { return p.on[j][v] == decision; };

  std::vector<std::vector<bool>> allowed(n);
  CostTable costs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto b = vars.domain_size(j);
    allowed[j].assign(b, false);
    costs[j].assign(b, 0);
    for (Value v = 0; v < b; ++v) costs[j][v] = supports(j, v) ? 1 : 0;
    if ((has_fixed && p.fixed[j]) || !supports(j, x[j])) {
      allowed[j][x[j]] = true;
    } else {
      for (Value v = 0; v < b; ++v) allowed[j][v] = v == x[j] || !supports(j, v);
    }
  }

  const auto g = decision ? f : complement(f);
  const auto candidates = combine(g, allowed_values(f.manager_ptr(), allowed), BoolOp::conj);
  return McExplanationSet{cardinality_minimize(candidates, costs), x, decision};
}

std::shared_ptr<Manager> make_implicant_manager(const VariableTable& vars) {
  return Manager::create(vars.with_dont_care(), DiagramMode::complete);
}

ImplicantSet pi_cover(const Diagram& f, std::shared_ptr<Manager> target) {
  require_reduced(f);
  auto dst = implicant_target(f, std::move(target));
  PrimeBuilder builder(f, dst, nullptr);
  const auto root = builder.run(f.root());
  return ImplicantSet{Diagram(dst, root), std::nullopt, true};
}

ImplicantSet pi_inst(const Diagram& f, const Instance& x, std::shared_ptr<Manager> target) {
  require_reduced(f);
  check_instance_for(f, x);
  if (!evaluate(f, x)) throw Error(ErrorKind::polarity, "instance is not a model of the function");
  auto dst = implicant_target(f, std::move(target));
  PrimeBuilder builder(f, dst, &x);
  const auto root = builder.run(f.root());
  return ImplicantSet{Diagram(dst, root), x, true};
}

ImplicantSet explain_pi(const Diagram& f, const Instance& x, std::shared_ptr<Manager> target) {
  require_reduced(f);
  check_instance_for(f, x);
  const bool decision = evaluate(f, x);
  auto s = pi_inst(decision ? f : complement(f), x, std::move(target));
  s.decision = decision;
  return s;
}

ImplicantSet filter_compatible(const ImplicantSet& s, const Instance& x) {
  auto mgr = s.set.manager_ptr();
  const auto& ext = mgr->variables();
  if (x.size() != ext.size()) throw Error(ErrorKind::argument, "instance has the wrong number of variables");
  NodeId r = kTrueNode;
  for (std::size_t j = ext.size(); j-- > 0;) {
    const auto b = ext.domain_size(j);
    if (x[j] + 1 >= b) throw Error(ErrorKind::domain, "value out of range for '" + ext[j].name + "'");
    std::vector<NodeId> ch(b, kFalseNode);
    ch[x[j]] = r;
    ch[b - 1] = r;
    r = mgr->intern(j, ch);
  }
  return ImplicantSet{combine(s.set, Diagram(mgr, r), BoolOp::conj), x, s.decision};
}

std::vector<PartialInstance> decode(const ImplicantSet& s) {
  std::vector<PartialInstance> out;
  const auto& ext = s.set.variables();
  for_each_model(s.set, [&](const Instance& m) {
    out.push_back(decode_one(ext, m));
    return true;
  });
  return out;
}

std::vector<PartialInstance> shortest_pis(const ImplicantSet& s) {
  const auto& ext = s.set.variables();
  CostTable costs(ext.size());
  for (std::size_t j = 0; j < ext.size(); ++j) {
    costs[j].assign(ext.domain_size(j), 1);
    costs[j].back() = 0;
  }
  return decode(ImplicantSet{cardinality_minimize(s.set, costs), s.instance, s.decision});
}

std::uint64_t count_explanations(const McExplanationSet& s) { return model_count(s.set); }

std::uint64_t count_explanations(const ImplicantSet& s) { return model_count(s.set); }

std::map<std::size_t, std::uint64_t> length_histogram(const ImplicantSet& s) {
  const auto& m = s.set.manager();
  if (m.mode() != DiagramMode::complete) throw Error(ErrorKind::mode, "implicant sets are complete-mode diagrams");
  std::unordered_map<NodeId, std::vector<std::uint64_t>> memo;
  auto add = [](std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::capacity, "implicant count overflow");
    return r;
  };
  std::function<const std::vector<std::uint64_t>&(NodeId)> rec =
      [&](NodeId u) -> const std::vector<std::uint64_t>& {
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    std::vector<std::uint64_t> h;
    if (u == kTrueNode) {
      h = {1};
    } else if (u != kFalseNode) {
      const auto var = m.var_of(u);
      const auto b = m.domain_size(var);
      for (Value v = 0; v < b; ++v) {
        const auto c = m.child(u, v);
        if (c == kFalseNode) continue;
        const auto& sub = rec(c);
        const std::size_t shift = v + 1 == b ? 0 : 1;
        if (h.size() < sub.size() + shift) h.resize(sub.size() + shift, 0);
        for (std::size_t k = 0; k < sub.size(); ++k) h[k + shift] = add(h[k + shift], sub[k]);
      }
    }
    return memo.emplace(u, std::move(h)).first->second;
  };
  std::map<std::size_t, std::uint64_t> out;
  const auto& h = rec(s.set.root());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k] != 0) out.emplace(k, h[k]);
  }
  return out;
}

std::vector<Instance> brute_mc_oracle(const DecisionTable& table, const Instance& x) {
  const auto& vars = table.variables();
  if (!vars.all_binary()) throw Error(ErrorKind::precondition, "MC oracle needs binary variables");
  vars.check_instance(x);
  const auto i = static_cast<Value>(table.at(x));
  std::vector<Instance> best;
  std::size_t best_count = std::numeric_limits<std::size_t>::max();
  for (std::uint64_t r = 0; r < table.size(); ++r) {
    if (table.at_rank(r) != static_cast<bool>(i)) continue;
    const auto y = instance_from_rank(vars, r);
    bool below = true;
    std::size_t count = 0;
    for (std::size_t j = 0; j < y.size() && below; ++j) {
      if (x[j] != i && y[j] != x[j]) below = false;
      if (y[j] == i) ++count;
    }
    if (!below || count > best_count) continue;
    if (count < best_count) {
      best.clear();
      best_count = count;
    }
    best.push_back(y);
  }
  return best;
}

std::vector<PartialInstance> brute_pi_oracle(const DecisionTable& table, const Instance& x) {
  const auto& vars = table.variables();
  const auto n = vars.size();
  if (n > kBrutePiMaxVars) {
    throw Error(ErrorKind::capacity, "PI oracle supports at most " + std::to_string(kBrutePiMaxVars) + " variables");
  }
  vars.check_instance(x);
  const bool d = table.at(x);
  const std::size_t subsets = std::size_t{1} << n;
  // bad[S]: some instance agreeing with x on a superset of S has the other
  // decision.
  std::vector<char> bad(subsets, 0);
  for (std::uint64_t r = 0; r < table.size(); ++r) {
    if (table.at_rank(r) == d) continue;
    const auto y = instance_from_rank(vars, r);
    std::size_t mask = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (y[j] == x[j]) mask |= std::size_t{1} << j;
    }
    bad[mask] = 1;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto bit = std::size_t{1} << j;
    for (std::size_t s = 0; s < subsets; ++s) {
      if (!(s & bit)) bad[s] |= bad[s | bit];
    }
  }
  std::vector<PartialInstance> out;
  for (std::size_t s = 0; s < subsets; ++s) {
    if (bad[s]) continue;
    bool prime = true;
    for (std::size_t j = 0; j < n && prime; ++j) {
      const auto bit = std::size_t{1} << j;
      if ((s & bit) && !bad[s ^ bit]) prime = false;
    }
    if (!prime) continue;
    PartialInstance z(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (s & (std::size_t{1} << j)) z.set(j, x[j]);
    }
    out.push_back(std::move(z));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_implicant(const Diagram& f, const PartialInstance& z, bool decision) {
  require_reduced(f);
  if (z.num_vars() != f.variables().size()) throw Error(ErrorKind::argument, "partial instance has the wrong number of variables");
  const auto g = decision ? complement(f) : f;
  return conjoin_assignment(g, z).is_false();
}

}  // namespace bnx
