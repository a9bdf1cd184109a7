#include "bnx/classifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "bnx/error.hpp"

namespace bnx {

namespace {

std::string describe_row(const std::vector<double>& row) {
  std::string s = "[";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(row[i]);
  }
  return s + "]";
}

void check_distribution(const std::vector<double>& row, std::size_t expected,
                        const std::string& where) {
  if (row.size() != expected) {
    throw Error(ErrorKind::arity, where + " has " + std::to_string(row.size()) +
                                      " entries, expected " + std::to_string(expected));
  }
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::normalization, where + " has an entry outside [0,1]: " + describe_row(row));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorKind::normalization,
                where + " sums to " + std::to_string(sum) + ", not 1: " + describe_row(row));
  }
}

double threshold_weight(double t) {
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  if (t >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(t) - std::log1p(-t);
}

[[noreturn]] void throw_zero_evidence() {
  throw Error(ErrorKind::undefined_posterior, "instance has probability zero");
}

}  // namespace

// --- naive Bayes -----------------------------------------------------------

NaiveBayesClassifier::NaiveBayesClassifier(VariableTable features, double prior, double threshold,
                                           std::vector<std::vector<double>> pos,
                                           std::vector<std::vector<double>> neg,
                                           std::string class_name)
    : features_(std::move(features)),
      class_name_(std::move(class_name)),
      prior_(prior),
      threshold_(threshold),
      pos_(std::move(pos)),
      neg_(std::move(neg)) {
  if (!(prior_ > 0.0 && prior_ < 1.0)) {
    throw Error(ErrorKind::range, "class prior must lie in (0,1)");
  }
  if (!(threshold_ >= 0.0 && threshold_ <= 1.0)) {
    throw Error(ErrorKind::range, "threshold must lie in [0,1]");
  }
  if (pos_.size() != features_.size() || neg_.size() != features_.size()) {
    throw Error(ErrorKind::arity, "one probability table per feature is required");
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& name = features_[i].name;
    check_distribution(pos_[i], features_.domain_size(i), "feature '" + name + "' row Pr(.|c)");
    check_distribution(neg_[i], features_.domain_size(i), "feature '" + name + "' row Pr(.|~c)");
  }
  weights_.prior = std::log(prior_) - std::log1p(-prior_);
  weights_.threshold = threshold_weight(threshold_);
  weights_.feature.resize(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    auto& row = weights_.feature[i];
    row.resize(pos_[i].size());
    for (std::size_t v = 0; v < row.size(); ++v) row[v] = std::log(pos_[i][v]) - std::log(neg_[i][v]);
  }
}

NaiveBayesClassifier NaiveBayesClassifier::from_rates(double prior, double threshold,
                                                      const std::vector<ErrorRates>& rates,
                                                      std::string class_name) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> pos, neg;
  for (const auto& r : rates) {
    names.push_back(r.name);
    // value 0 = "-", value 1 = "+"
    pos.push_back({r.fn, 1.0 - r.fn});
    neg.push_back({1.0 - r.fp, r.fp});
  }
  return NaiveBayesClassifier(VariableTable::binary(names), prior, threshold, std::move(pos),
                              std::move(neg), std::move(class_name));
}

NaiveBayesClassifier NaiveBayesClassifier::with_threshold(double t) const {
  return NaiveBayesClassifier(features_, prior_, t, pos_, neg_, class_name_);
}

LogOddsWeights decision_weights(const NaiveBayesClassifier& nb) { return nb.weights(); }

LogOddsWeights log_odds_weights(const NaiveBayesClassifier& nb) {
  if (nb.threshold() <= 0.0 || nb.threshold() >= 1.0) {
    throw Error(ErrorKind::range, "threshold weight is undefined for T in {0,1}");
  }
  return decision_weights(nb);
}

double accumulate_log_odds(const LogOddsWeights& w, std::span<const Value> x) {
  double acc = w.prior;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w.feature[i][x[i]];
  return acc;
}

double posterior(const NaiveBayesClassifier& nb, std::span<const Value> x) {
  nb.features().check_instance(x);
  double a = std::log(nb.prior());
  double b = std::log1p(-nb.prior());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a += std::log(nb.positive_cpt()[i][x[i]]);
    b += std::log(nb.negative_cpt()[i][x[i]]);
  }
  if (std::isinf(a) && std::isinf(b)) throw_zero_evidence();
  if (std::isinf(a)) return 0.0;
  if (std::isinf(b)) return 1.0;
  return 1.0 / (1.0 + std::exp(b - a));
}

bool decide(const NaiveBayesClassifier& nb, std::span<const Value> x) {
  nb.features().check_instance(x);
  const auto& w = nb.weights();
  const double acc = accumulate_log_odds(w, x);
  if (std::isnan(acc)) throw_zero_evidence();
  return acc >= w.threshold;
}

bool decide_partial(const NaiveBayesClassifier& nb, std::span<const std::optional<Value>> x) {
  const auto& w = nb.weights();
  double acc = w.prior;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) acc += w.feature[i].at(*x[i]);
  }
  if (std::isnan(acc)) throw_zero_evidence();
  return acc >= w.threshold;
}

// --- latent tree -----------------------------------------------------------

LatentTreeClassifier::LatentTreeClassifier(std::vector<TreeNode> nodes, double threshold)
    : nodes_(std::move(nodes)), threshold_(threshold) {
  if (nodes_.empty()) throw Error(ErrorKind::structural, "latent tree has no nodes");
  if (!(threshold_ >= 0.0 && threshold_ <= 1.0)) {
    throw Error(ErrorKind::range, "threshold must lie in [0,1]");
  }
  const auto n = nodes_.size();
  children_.assign(n, {});
  std::set<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = nodes_[i];
    if (!names.insert(node.name).second) {
      throw Error(ErrorKind::structural, "duplicate node name '" + node.name + "'");
    }
    if (node.labels.size() < 2) {
      throw Error(ErrorKind::domain, "node '" + node.name + "' needs at least two values");
    }
    if (i == 0) {
      if (node.parent) throw Error(ErrorKind::structural, "the class root cannot have a parent");
      if (node.labels.size() != 2) throw Error(ErrorKind::structural, "the class variable must be binary");
      if (node.cpt.size() != 1) throw Error(ErrorKind::arity, "the class prior must be a single row");
      check_distribution(node.cpt[0], 2, "class prior");
      continue;
    }
    if (!node.parent) {
      throw Error(ErrorKind::structural, "node '" + node.name + "' has no parent (multiple roots)");
    }
    if (*node.parent >= i) {
      throw Error(ErrorKind::structural, "node '" + node.name + "' must follow its parent");
    }
    const auto p = *node.parent;
    children_[p].push_back(i);
    if (node.cpt.size() != nodes_[p].labels.size()) {
      throw Error(ErrorKind::arity, "node '" + node.name + "' needs one CPT row per parent value");
    }
    for (std::size_t r = 0; r < node.cpt.size(); ++r) {
      check_distribution(node.cpt[r], node.labels.size(),
                         "node '" + node.name + "' row " + std::to_string(r));
    }
  }
  if (children_[0].empty()) throw Error(ErrorKind::structural, "the class root has no children");

  node_feature_.assign(n, std::nullopt);
  std::vector<Variable> feats;
  for (std::size_t i = 1; i < n; ++i) {
    if (!children_[i].empty()) continue;
    node_feature_[i] = feature_node_.size();
    feature_node_.push_back(i);
    feats.push_back({nodes_[i].name, nodes_[i].labels});
  }
  features_ = VariableTable(std::move(feats));

  preorder_.assign(n, 0);
  leaves_.assign(n, {});
  std::size_t counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    preorder_[u] = counter++;
    if (children_[u].empty()) {
      leaves_[u].push_back(*node_feature_[u]);
      return;
    }
    for (auto c : children_[u]) {
      visit(c);
      leaves_[u].insert(leaves_[u].end(), leaves_[c].begin(), leaves_[c].end());
    }
  };
  visit(0);
}

LatentTreeClassifier LatentTreeClassifier::with_threshold(double t) const {
  return LatentTreeClassifier(nodes_, t);
}

double log_odds(const LatentTreeClassifier& lt, std::span<const Value> x) {
  lt.features().check_instance(x);
  const auto& nodes = lt.nodes();
  const auto n = nodes.size();
  // lambda[u][s] = Pr(evidence below u | u = s), up to a per-node scale.
  std::vector<std::vector<double>> lambda(n);
  for (std::size_t u = n; u-- > 0;) {
    auto& lam = lambda[u];
    if (lt.is_leaf(u)) {
      lam.assign(nodes[u].labels.size(), 0.0);
      lam[x[lt.node_feature(u)]] = 1.0;
    } else {
      lam.assign(nodes[u].labels.size(), 1.0);
      for (auto c : lt.children(u)) {
        const auto& cpt = nodes[c].cpt;
        for (std::size_t s = 0; s < lam.size(); ++s) {
          double m = 0.0;
          for (std::size_t t = 0; t < cpt[s].size(); ++t) m += cpt[s][t] * lambda[c][t];
          lam[s] *= m;
        }
      }
    }
    const double mx = *std::max_element(lam.begin(), lam.end());
    if (mx <= 0.0) throw_zero_evidence();
    for (auto& v : lam) v /= mx;
  }
  const double pos = nodes[0].cpt[0][1] * lambda[0][1];
  const double neg = nodes[0].cpt[0][0] * lambda[0][0];
  if (pos <= 0.0 && neg <= 0.0) throw_zero_evidence();
  return std::log(pos) - std::log(neg);
}

double posterior(const LatentTreeClassifier& lt, std::span<const Value> x) {
  const double lo = log_odds(lt, x);
  if (lo == std::numeric_limits<double>::infinity()) return 1.0;
  if (lo == -std::numeric_limits<double>::infinity()) return 0.0;
  return 1.0 / (1.0 + std::exp(-lo));
}

bool decide(const LatentTreeClassifier& lt, std::span<const Value> x) {
  return log_odds(lt, x) >= threshold_weight(lt.threshold());
}

// --- dispatch --------------------------------------------------------------

const VariableTable& features_of(const Classifier& c) {
  return std::visit([](const auto& m) -> const VariableTable& { return m.features(); }, c);
}

double threshold_of(const Classifier& c) {
  return std::visit([](const auto& m) { return m.threshold(); }, c);
}

double posterior(const Classifier& c, std::span<const Value> x) {
  return std::visit([&](const auto& m) { return posterior(m, x); }, c);
}

bool decide(const Classifier& c, std::span<const Value> x) {
  return std::visit([&](const auto& m) { return decide(m, x); }, c);
}

std::uint64_t brute_force_cap() {
  if (const char* env = std::getenv("BNX_BRUTE_FORCE_CAP")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultBruteForceCap;
}

DecisionTable::DecisionTable(VariableTable vars, std::vector<bool> bits)
    : vars_(std::move(vars)), bits_(std::move(bits)) {
  if (bits_.size() != vars_.space_size()) {
    throw Error(ErrorKind::argument, "decision table length does not match the feature space");
  }
}

std::uint64_t DecisionTable::positives() const {
  return static_cast<std::uint64_t>(std::count(bits_.begin(), bits_.end(), true));
}

DecisionTable decision_table_oracle(const Classifier& c, std::uint64_t cap) {
  const auto& vars = features_of(c);
  const auto total = vars.space_size();
  if (total > cap) {
    throw Error(ErrorKind::capacity, "feature space of " + std::to_string(total) +
                                         " instances exceeds the brute-force cap of " +
                                         std::to_string(cap));
  }
  std::vector<bool> bits(total);
  Instance x(vars.size(), 0);
  for (std::uint64_t r = 0; r < total; ++r) {
    bits[r] = decide(c, x);
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++x[i] < vars.domain_size(i)) break;
      x[i] = 0;
    }
  }
  return DecisionTable(vars, std::move(bits));
}

// --- training --------------------------------------------------------------

TrainingResult train_naive_bayes(const VariableTable& features, std::span<const TrainingRow> rows,
                                 double pseudo_count, double threshold, std::string class_name) {
  if (pseudo_count < 0.0) throw Error(ErrorKind::range, "smoothing must be non-negative");
  if (rows.empty()) throw Error(ErrorKind::training, "empty dataset");
  const auto n = features.size();
  std::size_t class_count[2] = {0, 0};
  // counts[i][v][label]
  std::vector<std::vector<std::array<double, 2>>> counts(n);
  std::vector<std::array<double, 2>> observed(n, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) counts[i].assign(features.domain_size(i), {0.0, 0.0});

  for (const auto& row : rows) {
    if (row.features.size() != n) {
      throw Error(ErrorKind::training, "row arity " + std::to_string(row.features.size()) +
                                           " differs from " + std::to_string(n) + " features");
    }
    const int y = row.label ? 1 : 0;
    ++class_count[y];
    for (std::size_t i = 0; i < n; ++i) {
      if (!row.features[i]) continue;
      const auto v = *row.features[i];
      if (v >= features.domain_size(i)) throw Error(ErrorKind::domain, "training value out of domain");
      counts[i][v][y] += 1.0;
      observed[i][y] += 1.0;
    }
  }
  if (class_count[0] == 0 || class_count[1] == 0) {
    throw Error(ErrorKind::training, "dataset contains a single class");
  }

  const double total = static_cast<double>(rows.size());
  const double prior = (static_cast<double>(class_count[1]) + pseudo_count) / (total + 2.0 * pseudo_count);
  std::vector<std::vector<double>> pos(n), neg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = static_cast<double>(features.domain_size(i));
    for (int y = 0; y < 2; ++y) {
      const double denom = observed[i][y] + pseudo_count * b;
      if (denom <= 0.0) {
        throw Error(ErrorKind::training, "feature '" + features[i].name +
                                             "' is never observed for one class and smoothing is 0");
      }
      auto& row = y ? pos[i] : neg[i];
      for (std::size_t v = 0; v < counts[i].size(); ++v) {
        row.push_back((counts[i][v][y] + pseudo_count) / denom);
      }
    }
  }
  NaiveBayesClassifier nb(features, prior, threshold, std::move(pos), std::move(neg),
                          std::move(class_name));
  std::size_t correct = 0;
  for (const auto& row : rows) {
    if (decide_partial(nb, row.features) == row.label) ++correct;
  }
  return {std::move(nb), static_cast<double>(correct) / total};
}

}  // namespace bnx
