#include "bnx/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "bnx/error.hpp"

namespace bnx {

namespace {

bool close(double a, double b) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= kMergeTolerance * scale;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

// Product of the domain sizes of the flagged features, or nullopt past `cap`.
std::optional<std::uint64_t> residual_space(const VariableTable& vars, const std::vector<bool>& unobserved,
                                            std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!unobserved[i]) continue;
    total *= vars.domain_size(i);
    if (total > cap) return std::nullopt;
  }
  return total;
}

// Calls fn(full instance) for every completion of `evidence` over the
// unobserved features, in lexicographic order.
template <typename Fn>
void for_each_completion(const VariableTable& vars, std::span<const std::optional<Value>> evidence,
                         const std::vector<bool>& unobserved, Fn&& fn) {
  Instance x(vars.size(), 0);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (unobserved[i]) {
      free.push_back(i);
    } else {
      x[i] = *evidence[i];
    }
  }
  while (true) {
    fn(static_cast<const Instance&>(x));
    std::size_t k = free.size();
    while (k > 0) {
      const auto var = free[k - 1];
      if (++x[var] < vars.domain_size(var)) break;
      x[var] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

// Table of a residual function, or the constant it reduces to.
LeafKey table_key(std::vector<bool> bits) {
  const bool first = bits.front();
  if (std::all_of(bits.begin(), bits.end(), [&](bool b) { return b == first; })) return first;
  return MergeSignature{ResidualTable{std::move(bits)}};
}

// Groups signatures under tolerant equality.
class SignatureIndex {
 public:
  // Existing group id, or a fresh one.
  std::pair<std::size_t, bool> insert(const MergeSignature& s) {
    auto& bucket = buckets_[signature_hash(s)];
    for (auto id : bucket) {
      if (signatures_equal(sigs_[id], s)) return {id, false};
    }
    const auto id = sigs_.size();
    sigs_.push_back(s);
    bucket.push_back(id);
    return {id, true};
  }

 private:
  std::vector<MergeSignature> sigs_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets_;
};

}  // namespace

bool signatures_equal(const MergeSignature& a, const MergeSignature& b) {
  if (a.index() != b.index()) return false;
  if (const auto* la = std::get_if<LtMessages>(&a)) {
    const auto& lb = std::get<LtMessages>(b);
    if (la->shape != lb.shape || la->entries.size() != lb.entries.size()) return false;
    for (std::size_t i = 0; i < la->entries.size(); ++i) {
      if (!close(la->entries[i], lb.entries[i])) return false;
    }
    return true;
  }
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LtMessages>) {
          return false;
        } else {
          return x == std::get<T>(b);
        }
      },
      a);
}

std::size_t signature_hash(const MergeSignature& s) {
  std::size_t h = s.index();
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NbCut>) {
          h = mix(h, x.rank);
        } else if constexpr (std::is_same_v<T, LtMessages>) {
          // Coarse buckets: entries within tolerance usually share a bucket,
          // and a split only costs a missed merge.
          for (auto len : x.shape) h = mix(h, len);
          for (double e : x.entries) h = mix(h, std::hash<long long>{}(std::llround(e * 1e9)));
        } else if constexpr (std::is_same_v<T, ResidualTable>) {
          h = mix(h, std::hash<std::vector<bool>>{}(x.bits));
        } else {
          h = mix(h, x.id);
        }
      },
      s);
  return h;
}

// --- naive Bayes signatures ------------------------------------------------

NbSignatureTable::NbSignatureTable(const NaiveBayesClassifier& nb) : nb_(&nb) {}

const std::vector<double>& NbSignatureTable::sums(const std::vector<bool>& unobserved) {
  if (auto it = cache_.find(unobserved); it != cache_.end()) return it->second;
  const auto& w = nb_->weights().feature;
  std::vector<double> cur{0.0};
  for (std::size_t i = 0; i < unobserved.size(); ++i) {
    if (!unobserved[i]) continue;
    std::vector<double> next;
    next.reserve(cur.size() * w[i].size());
    for (double s : cur) {
      for (double wv : w[i]) next.push_back(s + wv);
    }
    std::sort(next.begin(), next.end());
    std::vector<double> dedup;
    dedup.reserve(next.size());
    for (double s : next) {
      if (dedup.empty() || !close(dedup.back(), s)) dedup.push_back(s);
    }
    cur = std::move(dedup);
  }
  return cache_.emplace(unobserved, std::move(cur)).first->second;
}

NbCut NbSignatureTable::signature(const std::vector<bool>& unobserved, double accumulated) {
  const auto& s = sums(unobserved);
  const double t = nb_->weights().threshold - accumulated;
  return NbCut{static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), t) - s.begin())};
}

NaiveBayesMerger::NaiveBayesMerger(const NaiveBayesClassifier& nb, const CompileOptions& options)
    : nb_(nb), options_(options), table_(nb) {
  finite_ = true;
  for (const auto& row : nb.weights().feature) {
    for (double w : row) finite_ = finite_ && std::isfinite(w);
  }
}

FrontierLeaf NaiveBayesMerger::root() const {
  auto leaf = MergeStrategy::root();
  leaf.accumulated = nb_.weights().prior;
  return leaf;
}

FrontierLeaf NaiveBayesMerger::extend(const FrontierLeaf& leaf, std::size_t feature, Value v) const {
  FrontierLeaf child = leaf;
  child.evidence[feature] = v;
  child.accumulated = leaf.accumulated + nb_.weights().feature[feature][v];
  return child;
}

LeafKey NaiveBayesMerger::key(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) {
  if (finite_) {
    const auto cut = table_.signature(unobserved, leaf.accumulated);
    if (cut.rank == 0) return true;
    if (cut.rank == table_.sums(unobserved).size()) return false;
    return MergeSignature{cut};
  }
  // Zero probabilities: compare residual decision tables directly.
  if (!residual_space(nb_.features(), unobserved, options_.exact_merge_cap)) {
    return MergeSignature{Distinct{next_id_++}};
  }
  std::vector<bool> bits;
  bool impossible = false;
  for_each_completion(nb_.features(), leaf.evidence, unobserved, [&](const Instance& x) {
    try {
      bits.push_back(decide(nb_, x));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::undefined_posterior) throw;
      bits.push_back(options_.impossible_decision);
      impossible = true;
    }
  });
  if (impossible) ++impossible_;
  return table_key(std::move(bits));
}

// --- latent-tree signatures ------------------------------------------------

std::optional<LtMessages> lt_merge_signature(const LatentTreeClassifier& lt,
                                             std::span<const std::optional<Value>> evidence,
                                             const std::vector<bool>& unobserved) {
  const auto n = lt.num_features();
  if (evidence.size() != n || unobserved.size() != n) {
    throw Error(ErrorKind::argument, "evidence and unobserved flags must cover every feature");
  }
  const auto& nodes = lt.nodes();
  const auto num_nodes = nodes.size();

  // Nodes whose subtree holds an unobserved feature.
  std::vector<bool> open(num_nodes, false);
  std::size_t open_features = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (unobserved[i]) {
      ++open_features;
      for (std::optional<std::size_t> u = lt.feature_node(i); u; u = nodes[*u].parent) open[*u] = true;
    } else if (!evidence[i]) {
      throw Error(ErrorKind::argument, "feature " + lt.features()[i].name + " is neither observed nor unobserved");
    }
  }
  if (open_features == 0) throw Error(ErrorKind::argument, "no unobserved feature");

  // Anchor: lowest node whose subtree holds every unobserved feature.
  std::size_t anchor = 0;
  while (true) {
    std::size_t next = anchor;
    std::size_t count = 0;
    for (auto c : lt.children(anchor)) {
      if (open[c]) {
        next = c;
        ++count;
      }
    }
    if (count != 1) break;
    anchor = next;
  }

  // Observed-subtree likelihoods, scaled to unit max. Parents precede
  // children in the node list, so a reverse scan is bottom-up.
  std::vector<std::vector<double>> lambda(num_nodes);
  bool zero = false;
  for (std::size_t u = num_nodes; u-- > 0;) {
    if (open[u]) continue;
    auto& lam = lambda[u];
    if (lt.is_leaf(u)) {
      lam.assign(lt.domain_size(u), 0.0);
      lam[*evidence[lt.node_feature(u)]] = 1.0;
      continue;
    }
    lam.assign(lt.domain_size(u), 1.0);
    for (auto c : lt.children(u)) {
      const auto& cpt = nodes[c].cpt;
      for (std::size_t s = 0; s < lam.size(); ++s) {
        double m = 0.0;
        for (std::size_t t = 0; t < cpt[s].size(); ++t) m += cpt[s][t] * lambda[c][t];
        lam[s] *= m;
      }
    }
    const double mx = *std::max_element(lam.begin(), lam.end());
    if (mx <= 0.0) {
      zero = true;
      break;
    }
    for (auto& v : lam) v /= mx;
  }
  if (zero) return std::nullopt;

  // Product of the messages sent up by observed children of u.
  auto observed_factor = [&](std::size_t u) {
    std::vector<double> f(lt.domain_size(u), 1.0);
    for (auto c : lt.children(u)) {
      if (open[c]) continue;
      const auto& cpt = nodes[c].cpt;
      for (std::size_t s = 0; s < f.size(); ++s) {
        double m = 0.0;
        for (std::size_t t = 0; t < cpt[s].size(); ++t) m += cpt[s][t] * lambda[c][t];
        f[s] *= m;
      }
    }
    return f;
  };

  // Root-to-anchor path.
  std::vector<std::size_t> path;
  for (std::optional<std::size_t> u = anchor; u; u = nodes[*u].parent) path.push_back(*u);
  std::reverse(path.begin(), path.end());

  // F[g][s] = Pr(class = g, evidence hanging off the path so far, node = s).
  std::vector<std::vector<double>> F(2, std::vector<double>(2, 0.0));
  {
    const auto root_f = observed_factor(0);
    for (std::size_t g = 0; g < 2; ++g) F[g][g] = nodes[0].cpt[0][g] * root_f[g];
  }
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto u = path[k];
    const auto& cpt = nodes[u].cpt;
    const auto f = observed_factor(u);
    std::vector<std::vector<double>> G(2, std::vector<double>(lt.domain_size(u), 0.0));
    for (std::size_t g = 0; g < 2; ++g) {
      for (std::size_t s = 0; s < F[g].size(); ++s) {
        if (F[g][s] == 0.0) continue;
        for (std::size_t t = 0; t < G[g].size(); ++t) G[g][t] += F[g][s] * cpt[s][t];
      }
      for (std::size_t t = 0; t < G[g].size(); ++t) G[g][t] *= f[t];
    }
    // Rescale to keep entries away from underflow.
    double mx = 0.0;
    for (const auto& row : G) mx = std::max(mx, *std::max_element(row.begin(), row.end()));
    if (mx <= 0.0) return std::nullopt;
    for (auto& row : G) {
      for (auto& v : row) v /= mx;
    }
    F = std::move(G);
  }

  LtMessages sig;
  auto append = [&](std::vector<double> values) {
    const double mx = *std::max_element(values.begin(), values.end());
    if (mx <= 0.0) return false;
    for (double v : values) sig.entries.push_back(v / mx);
    sig.shape.push_back(values.size());
    return true;
  };
  std::vector<double> flat;
  for (const auto& row : F) flat.insert(flat.end(), row.begin(), row.end());
  if (!append(std::move(flat))) return std::nullopt;

  // Evidence inside the anchor's subtree, attached to open internal nodes.
  std::function<bool(std::size_t)> inside = [&](std::size_t u) {
    for (auto c : lt.children(u)) {
      if (!open[c] || lt.is_leaf(c)) continue;
      if (!append(observed_factor(c))) return false;
      if (!inside(c)) return false;
    }
    return true;
  };
  if (!inside(anchor)) return std::nullopt;
  return sig;
}

LatentTreeMerger::LatentTreeMerger(const LatentTreeClassifier& lt, const CompileOptions& options)
    : lt_(lt), options_(options) {}

FrontierLeaf LatentTreeMerger::extend(const FrontierLeaf& leaf, std::size_t feature, Value v) const {
  FrontierLeaf child = leaf;
  child.evidence[feature] = v;
  return child;
}

std::optional<bool> LatentTreeMerger::final_decision(const FrontierLeaf& leaf) {
  Instance x(leaf.evidence.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = *leaf.evidence[i];
  try {
    return decide(lt_, x);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::undefined_posterior) throw;
    ++impossible_;
    return options_.impossible_decision;
  }
}

LeafKey LatentTreeMerger::key(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) {
  if (std::none_of(unobserved.begin(), unobserved.end(), [](bool b) { return b; })) {
    return *final_decision(leaf);
  }
  if (options_.latent_merge == LatentMerge::none) return MergeSignature{Distinct{next_id_++}};
  auto sig = lt_merge_signature(lt_, leaf.evidence, unobserved);
  if (!sig) {
    ++impossible_;
    return options_.impossible_decision;
  }
  return MergeSignature{std::move(*sig)};
}

std::optional<LeafKey> LatentTreeMerger::refine(const FrontierLeaf& leaf, const std::vector<bool>& unobserved) {
  if (options_.latent_merge != LatentMerge::exact) return std::nullopt;
  if (!residual_space(lt_.features(), unobserved, options_.exact_merge_cap)) return std::nullopt;
  std::vector<bool> bits;
  for_each_completion(lt_.features(), leaf.evidence, unobserved, [&](const Instance& x) {
    try {
      bits.push_back(decide(lt_, x));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::undefined_posterior) throw;
      bits.push_back(options_.impossible_decision);
    }
  });
  return table_key(std::move(bits));
}

// --- expand-then-merge -----------------------------------------------------

PartialDecisionGraph::PartialDecisionGraph(MergeStrategy& strategy)
    : num_features_(strategy.features().size()), unobserved_(num_features_, true) {
  FrontierLeaf root = strategy.root();
  layers_.emplace_back();
  if (num_features_ == 0) throw Error(ErrorKind::argument, "classifier has no features");
  auto key = strategy.key(root, unobserved_);
  if (auto* b = std::get_if<bool>(&key)) {
    root_constant_ = *b;
    return;
  }
  if (auto refined = strategy.refine(root, unobserved_)) {
    if (auto* b = std::get_if<bool>(&*refined)) {
      root_constant_ = *b;
      return;
    }
  }
  layers_.back().push_back(std::move(root));
}

void expand_then_merge(MergeStrategy& strategy, PartialDecisionGraph& graph, std::size_t feature) {
  if (feature >= graph.num_features_) {
    throw Error(ErrorKind::sequencing, "unknown feature index " + std::to_string(feature));
  }
  if (!graph.unobserved_[feature]) {
    throw Error(ErrorKind::sequencing, "feature " + strategy.features()[feature].name + " already processed");
  }
  graph.unobserved_[feature] = false;
  graph.processed_.push_back(feature);

  using Target = PartialDecisionGraph::Target;
  const auto& parents = graph.layers_.back();
  const auto b = strategy.features().domain_size(feature);

  // First pass: children grouped on the cheap key.
  std::vector<std::vector<Target>> edges(parents.size(), std::vector<Target>(b, false));
  std::vector<FrontierLeaf> reps;
  SignatureIndex first;
  std::size_t expanded = 0;
  for (std::size_t p = 0; p < parents.size(); ++p) {
    for (Value v = 0; v < b; ++v) {
      FrontierLeaf child = strategy.extend(parents[p], feature, v);
      ++expanded;
      auto key = strategy.key(child, graph.unobserved_);
      if (auto* decided = std::get_if<bool>(&key)) {
        edges[p][v] = *decided;
        continue;
      }
      auto [id, fresh] = first.insert(std::get<MergeSignature>(key));
      if (fresh) reps.push_back(std::move(child));
      edges[p][v] = id;
    }
  }

  // Second pass over the representatives.
  std::vector<Target> remap(reps.size());
  std::vector<FrontierLeaf> layer;
  SignatureIndex second;
  std::vector<std::size_t> slot_of;  // refined group id -> layer index
  for (std::size_t g = 0; g < reps.size(); ++g) {
    auto refined = strategy.refine(reps[g], graph.unobserved_);
    if (refined) {
      if (auto* decided = std::get_if<bool>(&*refined)) {
        remap[g] = *decided;
        continue;
      }
      auto [id, fresh] = second.insert(std::get<MergeSignature>(*refined));
      if (!fresh) {
        remap[g] = slot_of[id];
        continue;
      }
      slot_of.push_back(layer.size());
    }
    remap[g] = layer.size();
    layer.push_back(std::move(reps[g]));
  }

  for (auto& row : edges) {
    for (auto& t : row) {
      if (auto* id = std::get_if<std::size_t>(&t)) t = remap[*id];
    }
  }
  graph.edges_.push_back(std::move(edges));
  graph.trace_.push_back({graph.processed_.size(), expanded, layer.size()});
  graph.layers_.push_back(std::move(layer));
}

Diagram PartialDecisionGraph::to_diagram(std::shared_ptr<Manager> mgr) const {
  if (processed_.size() != num_features_) {
    throw Error(ErrorKind::sequencing, "decision graph still has unprocessed features");
  }
  if (mgr->num_vars() != num_features_) {
    throw Error(ErrorKind::argument, "manager does not match the decision graph");
  }
  if (root_constant_) return constant(mgr, *root_constant_);
  auto resolve = [](const Target& t, const std::vector<NodeId>& below) {
    if (const auto* b = std::get_if<bool>(&t)) return *b ? kTrueNode : kFalseNode;
    return below[std::get<std::size_t>(t)];
  };
  std::vector<NodeId> below;
  std::vector<NodeId> kids;
  for (std::size_t level = edges_.size(); level-- > 0;) {
    std::vector<NodeId> here(edges_[level].size());
    for (std::size_t p = 0; p < here.size(); ++p) {
      kids.clear();
      for (const auto& t : edges_[level][p]) kids.push_back(resolve(t, below));
      here[p] = mgr->intern(level, kids);
    }
    below = std::move(here);
  }
  return Diagram(mgr, below.at(0));
}

// --- drivers ----------------------------------------------------------------

Instance CompileResult::to_levels(std::span<const Value> x) const {
  Instance y(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) y[k] = x[order[k]];
  return y;
}

Instance CompileResult::to_features(std::span<const Value> x) const {
  Instance y(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) y[order[k]] = x[k];
  return y;
}

namespace {

void check_order(std::size_t n, const std::vector<std::size_t>& order) {
  if (order.size() != n) throw Error(ErrorKind::argument, "order must list every feature exactly once");
  std::vector<bool> seen(n, false);
  for (auto i : order) {
    if (i >= n || seen[i]) throw Error(ErrorKind::argument, "order must list every feature exactly once");
    seen[i] = true;
  }
}

CompileResult run(MergeStrategy& strategy, std::vector<std::size_t> order, const CompileOptions& options) {
  const auto& features = strategy.features();
  check_order(features.size(), order);
  auto level_vars = features.permuted(order);
  auto mgr = options.manager;
  if (mgr) {
    if (mgr->mode() != DiagramMode::reduced || mgr->variables() != level_vars) {
      throw Error(ErrorKind::manager, "target manager variables differ from the compile order");
    }
  } else {
    mgr = Manager::create(std::move(level_vars));
  }
  PartialDecisionGraph graph(strategy);
  for (auto f : order) expand_then_merge(strategy, graph, f);
  return CompileResult{graph.to_diagram(mgr), std::move(order), graph.trace(), strategy.impossible_leaves()};
}

}  // namespace

CompileResult compile_naive_bayes(const NaiveBayesClassifier& nb, std::vector<std::size_t> order,
                                  const CompileOptions& options) {
  if (order.empty()) {
    order.resize(nb.num_features());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  NaiveBayesMerger strategy(nb, options);
  return run(strategy, std::move(order), options);
}

std::vector<std::size_t> latent_tree_order(const LatentTreeClassifier& lt) {
  std::vector<std::size_t> order;
  std::vector<bool> done(lt.nodes().size(), false);
  std::size_t r = 0;
  while (true) {
    std::vector<std::size_t> pending;
    for (auto c : lt.children(r)) {
      if (!done[c]) pending.push_back(c);
    }
    if (pending.empty()) break;
    if (pending.size() == 1 && !lt.is_leaf(pending[0])) {
      r = pending[0];
      continue;
    }
    const auto best = *std::min_element(pending.begin(), pending.end(), [&](std::size_t a, std::size_t b) {
      const auto la = lt.leaves_under(a).size();
      const auto lb = lt.leaves_under(b).size();
      return la != lb ? la < lb : lt.preorder_id(a) < lt.preorder_id(b);
    });
    const auto& leaves = lt.leaves_under(best);
    order.insert(order.end(), leaves.begin(), leaves.end());
    done[best] = true;
  }
  return order;
}

CompileResult compile_latent_tree(const LatentTreeClassifier& lt, const CompileOptions& options) {
  LatentTreeMerger strategy(lt, options);
  return run(strategy, latent_tree_order(lt), options);
}

CompileResult compile(const Classifier& c, std::vector<std::size_t> order, const CompileOptions& options) {
  if (const auto* nb = std::get_if<NaiveBayesClassifier>(&c)) {
    return compile_naive_bayes(*nb, std::move(order), options);
  }
  if (!order.empty()) throw Error(ErrorKind::argument, "latent-tree compilation derives its own order");
  return compile_latent_tree(std::get<LatentTreeClassifier>(c), options);
}

}  // namespace bnx
