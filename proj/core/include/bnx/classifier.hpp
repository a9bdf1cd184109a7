#pragma once

// Bayesian network classifiers with a binary class variable: naive Bayes and
// latent-tree models. An instance is classified positively iff
// Pr(c | x) >= T (non-strict).
//
// Class value 1 is the positive class c, value 0 is c-bar.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bnx/variables.hpp"

namespace bnx {

/// Tolerance used when checking that a probability table sums to one.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Binary feature given by its false-positive and false-negative rates:
/// fp = Pr(X = + | c-bar), fn = Pr(X = - | c).
struct ErrorRates {
  std::string name;
  double fp;
  double fn;
};

/// Log-odds form of a naive Bayes classifier:
/// decide(x) = 1 iff prior + sum_i feature[i][x_i] >= threshold.
/// Zero probabilities give +/-infinity.
struct LogOddsWeights {
  double prior;
  double threshold;
  std::vector<std::vector<double>> feature;
};

class NaiveBayesClassifier {
 public:
  /// `pos[i][v]` = Pr(X_i = v | c), `neg[i][v]` = Pr(X_i = v | c-bar).
  NaiveBayesClassifier(VariableTable features, double prior, double threshold,
                       std::vector<std::vector<double>> pos, std::vector<std::vector<double>> neg,
                       std::string class_name = "C");

  static NaiveBayesClassifier from_rates(double prior, double threshold,
                                         const std::vector<ErrorRates>& rates,
                                         std::string class_name = "C");

  const VariableTable& features() const noexcept { return features_; }
  std::size_t num_features() const noexcept { return features_.size(); }
  const std::string& class_name() const noexcept { return class_name_; }
  double prior() const noexcept { return prior_; }
  double threshold() const noexcept { return threshold_; }
  const std::vector<std::vector<double>>& positive_cpt() const noexcept { return pos_; }
  const std::vector<std::vector<double>>& negative_cpt() const noexcept { return neg_; }

  /// Same parameters with a different threshold.
  NaiveBayesClassifier with_threshold(double t) const;

  /// Log-odds weights, precomputed at construction.
  const LogOddsWeights& weights() const noexcept { return weights_; }

 private:
  VariableTable features_;
  std::string class_name_;
  double prior_;
  double threshold_;
  std::vector<std::vector<double>> pos_;
  std::vector<std::vector<double>> neg_;
  LogOddsWeights weights_;
};

/// Throws range error when the threshold is 0 or 1.
LogOddsWeights log_odds_weights(const NaiveBayesClassifier& nb);

/// The weights decide() uses; the threshold weight may be +/-infinity.
LogOddsWeights decision_weights(const NaiveBayesClassifier& nb);

/// Sum prior + w_0(x_0) + w_1(x_1) + ... accumulated left to right.
double accumulate_log_odds(const LogOddsWeights& w, std::span<const Value> x);

struct TreeNode {
  std::string name;
  std::vector<std::string> labels;
  /// Parent index, absent for the class root.
  std::optional<std::size_t> parent;
  /// cpt[p][s] = Pr(node = s | parent = p). The root has a single row.
  std::vector<std::vector<double>> cpt;
};

/// Tree-structured network whose root is the binary class variable and whose
/// leaves are exactly the features. Node 0 is the root; every parent index
/// precedes its child. Features are numbered by the order their leaves appear
/// in the node list.
class LatentTreeClassifier {
 public:
  LatentTreeClassifier(std::vector<TreeNode> nodes, double threshold);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  double threshold() const noexcept { return threshold_; }
  const VariableTable& features() const noexcept { return features_; }
  std::size_t num_features() const noexcept { return features_.size(); }

  const std::vector<std::size_t>& children(std::size_t node) const { return children_[node]; }
  bool is_leaf(std::size_t node) const { return children_[node].empty(); }
  /// Tree node of feature `i`.
  std::size_t feature_node(std::size_t i) const { return feature_node_[i]; }
  /// Feature index of a leaf node.
  std::size_t node_feature(std::size_t node) const { return *node_feature_[node]; }
  std::size_t domain_size(std::size_t node) const { return nodes_[node].labels.size(); }
  /// Features under `node` in pre-order.
  const std::vector<std::size_t>& leaves_under(std::size_t node) const { return leaves_[node]; }
  /// Pre-order position of a node (the root is 0).
  std::size_t preorder_id(std::size_t node) const { return preorder_[node]; }

  LatentTreeClassifier with_threshold(double t) const;

 private:
  std::vector<TreeNode> nodes_;
  double threshold_;
  VariableTable features_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> feature_node_;
  std::vector<std::optional<std::size_t>> node_feature_;
  std::vector<std::vector<std::size_t>> leaves_;
  std::vector<std::size_t> preorder_;
};

using Classifier = std::variant<NaiveBayesClassifier, LatentTreeClassifier>;

const VariableTable& features_of(const Classifier& c);
double threshold_of(const Classifier& c);

/// Pr(c | x); throws undefined-posterior error when Pr(x) = 0.
double posterior(const NaiveBayesClassifier& nb, std::span<const Value> x);
double posterior(const LatentTreeClassifier& lt, std::span<const Value> x);
double posterior(const Classifier& c, std::span<const Value> x);

/// Natural log of Pr(c, x) / Pr(c-bar, x), computed with scaled messages.
double log_odds(const LatentTreeClassifier& lt, std::span<const Value> x);

/// Decision function: 1 iff Pr(c | x) >= T. Comparisons are done in log-odds
/// with a fixed left-to-right accumulation order, so ties are reproducible.
bool decide(const NaiveBayesClassifier& nb, std::span<const Value> x);
bool decide(const LatentTreeClassifier& lt, std::span<const Value> x);
bool decide(const Classifier& c, std::span<const Value> x);

/// Default bound on brute-force enumeration (instances).
inline constexpr std::uint64_t kDefaultBruteForceCap = std::uint64_t{1} << 22;

/// Reads BNX_BRUTE_FORCE_CAP, falling back to kDefaultBruteForceCap.
std::uint64_t brute_force_cap();

/// Ground-truth decision function as a dense bit vector indexed by
/// instance_rank over the classifier's features.
class DecisionTable {
 public:
  DecisionTable(VariableTable vars, std::vector<bool> bits);

  const VariableTable& variables() const noexcept { return vars_; }
  std::uint64_t size() const noexcept { return bits_.size(); }
  bool at(std::span<const Value> x) const { return bits_[instance_rank(vars_, x)]; }
  bool at_rank(std::uint64_t r) const { return bits_[r]; }
  const std::vector<bool>& bits() const noexcept { return bits_; }
  std::uint64_t positives() const;

 private:
  VariableTable vars_;
  std::vector<bool> bits_;
};

/// Exhaustive decide() over every instance; throws capacity error past `cap`.
DecisionTable decision_table_oracle(const Classifier& c, std::uint64_t cap = brute_force_cap());

/// Labelled training row; missing feature values are nullopt.
struct TrainingRow {
  std::vector<std::optional<Value>> features;
  bool label;
};

struct TrainingResult {
  NaiveBayesClassifier classifier;
  /// Fraction of training rows classified correctly (missing values are
  /// marginalized out).
  double accuracy;
};

/// Maximum-likelihood naive Bayes with additive smoothing `pseudo_count`.
TrainingResult train_naive_bayes(const VariableTable& features, std::span<const TrainingRow> rows,
                                 double pseudo_count, double threshold = 0.5,
                                 std::string class_name = "C");

/// decide() with unobserved features dropped from the product.
bool decide_partial(const NaiveBayesClassifier& nb, std::span<const std::optional<Value>> x);

}  // namespace bnx
