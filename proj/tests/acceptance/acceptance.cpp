// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// Usage: bnx_acceptance [votes.csv]
// With a CSV argument, criterion 8 trains from it (first column = party,
// positive label "democrat"); otherwise it uses the vendored classifier.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "bnx/compiler.hpp"
#include "bnx/error.hpp"
#include "bnx/explainer.hpp"
#include "bnx/io.hpp"
#include "bnx/monotone.hpp"
#include "generators.hpp"

namespace {

using namespace bnx;
using bnx::testing::Rng;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects the first failure message of a criterion.
struct Check {
  std::string failure;
  void require(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
  bool ok() const { return failure.empty(); }
};

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<PartialInstance> sorted(std::vector<PartialInstance> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::shared_ptr<Manager> binary_manager(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n; ++j) names.push_back("X" + std::to_string(j));
  return Manager::create(VariableTable::binary(names));
}

std::shared_ptr<Manager> mixed_manager(Rng& rng, std::size_t n, std::size_t max_domain) {
  std::vector<Variable> vars;
  for (std::size_t j = 0; j < n; ++j) {
    const auto b = std::uniform_int_distribution<std::size_t>(2, max_domain)(rng);
    Variable v{"V" + std::to_string(j), {}};
    for (std::size_t k = 0; k < b; ++k) v.labels.push_back(std::to_string(k));
    vars.push_back(std::move(v));
  }
  return Manager::create(VariableTable(std::move(vars)));
}

std::optional<Instance> instance_with(const Diagram& f, bool value) {
  return any_model(value ? f : complement(f));
}

Check admissions_mc() {
  Check c;
  const auto t0 = Clock::now();
  const auto nb = bnx::testing::admissions();
  const auto f = compile_naive_bayes(nb).odd;
  for (const auto& row : bnx::testing::admissions_table()) {
    const auto label = format_instance(f.variables(), row.x);
    c.require(std::abs(posterior(nb, row.x) - row.posterior) <= 5e-5, "posterior of " + label);
    c.require(decide(nb, row.x) == row.decision, "decision of " + label);
    std::vector<std::string> got;
    for (const auto& m : models(mc_explanations(f, row.x).set)) got.push_back(format_instance(f.variables(), m));
    c.require(sorted(got) == sorted(row.mc), "MC-explanations of " + label);
  }
  c.require(seconds_since(t0) < 1.0, "runtime over 1 s");
  return c;
}

Check admissions_pi() {
  Check c;
  const auto t0 = Clock::now();
  const auto f = compile_naive_bayes(bnx::testing::admissions()).odd;
  for (const auto& row : bnx::testing::admissions_table()) {
    const auto label = format_instance(f.variables(), row.x);
    std::vector<std::string> got;
    for (const auto& z : decode(explain_pi(f, row.x))) got.push_back(format_partial(f.variables(), z));
    c.require(sorted(got) == sorted(row.pi), "PI-explanations of " + label);
  }
  std::vector<std::size_t> lengths;
  for (const auto& z : decode(explain_pi(f, {1, 1, 1, 1}))) lengths.push_back(z.length());
  std::sort(lengths.begin(), lengths.end());
  c.require(lengths == std::vector<std::size_t>{2, 3, 3}, "lengths for + + + +");
  c.require(seconds_since(t0) < 1.0, "runtime over 1 s");
  return c;
}

bool matches_oracle(const Classifier& cls, const CompileResult& r) {
  const auto table = decision_table_oracle(cls);
  const auto& vars = features_of(cls);
  for (std::uint64_t k = 0; k < table.size(); ++k) {
    const auto x = instance_from_rank(vars, k);
    if (evaluate(r.odd, r.to_levels(x)) != table.at_rank(k)) return false;
  }
  return true;
}

Check compiler_oracle() {
  Check c;
  const auto t0 = Clock::now();
  Rng rng(3);
  std::uniform_int_distribution<std::size_t> n(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const Classifier nb = bnx::testing::random_naive_bayes(rng, n(rng), 3);
    c.require(matches_oracle(nb, compile(nb)), "naive Bayes trial " + std::to_string(trial));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const Classifier lt = bnx::testing::random_latent_tree(rng, n(rng), 3, 3);
    c.require(matches_oracle(lt, compile(lt)), "latent tree trial " + std::to_string(trial));
  }
  c.require(seconds_since(t0) < 60.0, "runtime over 60 s");
  return c;
}

Check explanation_oracle() {
  Check c;
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    auto mgr = binary_manager(n);
    const auto f = bnx::testing::random_function(mgr, rng);
    const DecisionTable table(mgr->variables(), bnx::testing::truth_table(f));
    for (bool polarity : {true, false}) {
      const auto x = instance_with(f, polarity);
      if (!x) continue;
      const auto tag = "trial " + std::to_string(trial) + (polarity ? " positive" : " negative");
      c.require(models(mc_explanations(f, *x).set) == brute_mc_oracle(table, *x), "MC " + tag);
      const auto g = polarity ? f : complement(f);
      c.require(sorted(decode(pi_inst(g, *x))) == brute_pi_oracle(table, *x), "PI " + tag);
    }
  }
  return c;
}

Check inst_vs_cover() {
  Check c;
  Rng rng(5);
  int trials = 0;
  while (trials < 100) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    auto mgr = mixed_manager(rng, n, 3);
    const auto f = bnx::testing::random_function(mgr, rng);
    const auto x = bnx::testing::random_instance(mgr->variables(), rng);
    if (!evaluate(f, x)) continue;
    ++trials;
    auto target = make_implicant_manager(mgr->variables());
    const auto inst = pi_inst(f, x, target);
    const auto cover = pi_cover(f, target);
    std::vector<PartialInstance> expected;
    for (const auto& z : decode(cover)) {
      if (z.compatible_with(x)) expected.push_back(z);
    }
    const auto tag = "trial " + std::to_string(trials);
    c.require(sorted(decode(inst)) == sorted(expected), "implicant sets differ, " + tag);
    c.require(size(inst.set) <= size(filter_compatible(cover, x).set), "instance set larger, " + tag);
  }
  return c;
}

Check leaf_invariants() {
  Check c;
  Rng rng(6);
  std::uniform_int_distribution<std::size_t> n_dist(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lt = bnx::testing::random_latent_tree(rng, n_dist(rng), 3, 3);
    const auto r = compile_latent_tree(lt);
    const double b = static_cast<double>(lt.features().max_domain_size());
    const double n = static_cast<double>(lt.num_features());
    for (const auto& step : r.trace) {
      c.require(static_cast<double>(step.open) <= std::pow(b, 0.75 * n) + 1e-9,
                "latent tree trial " + std::to_string(trial));
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const auto nb = bnx::testing::random_naive_bayes(rng, n_dist(rng), 3);
    const auto r = compile_naive_bayes(nb);
    const double b = static_cast<double>(nb.features().max_domain_size());
    const double n = static_cast<double>(nb.num_features());
    for (const auto& step : r.trace) {
      const double i = static_cast<double>(step.depth);
      c.require(static_cast<double>(step.open) <= std::min(std::pow(b, i), std::pow(b, n - i)) + 1e-9,
                "naive Bayes trial " + std::to_string(trial));
    }
  }
  return c;
}

bool brute_monotone(const Diagram& f) {
  const auto& vars = f.variables();
  for (std::uint64_t r = 0; r < vars.space_size(); ++r) {
    const auto y = instance_from_rank(vars, r);
    if (!evaluate(f, y)) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] == 1) continue;
      auto up = y;
      up[j] = 1;
      if (!evaluate(f, up)) return false;
    }
  }
  return true;
}

Check mc_pi_correspondence() {
  Check c;
  const auto f = compile_naive_bayes(bnx::testing::admissions()).odd;
  for (const auto& row : bnx::testing::admissions_table()) {
    c.require(mc_matches_shortest_pi(f, row.x), "admissions " + format_instance(f.variables(), row.x));
  }
  Rng rng(7);
  std::uniform_int_distribution<std::size_t> n(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    auto mgr = binary_manager(n(rng));
    const auto g = bnx::testing::random_monotone_function(mgr, rng);
    c.require(mc_matches_shortest_pi(g, bnx::testing::random_instance(mgr->variables(), rng)),
              "monotone trial " + std::to_string(trial));
  }
  for (int trial = 0; trial < 200; ++trial) {
    auto mgr = binary_manager(n(rng));
    const auto g = bnx::testing::random_function(mgr, rng, trial % 2 ? 0.5 : 0.8);
    c.require(is_monotone(g).monotone == brute_monotone(g), "monotonicity trial " + std::to_string(trial));
  }
  return c;
}

Check votes_scale(const std::string& csv, std::string& detail) {
  Check c;
  NaiveBayesClassifier nb = [&] {
    if (csv.empty()) {
      return std::get<NaiveBayesClassifier>(load_classifier(std::string(BNX_DATA_DIR) + "/votes_synthetic.json"));
    }
    CsvOptions opts;
    opts.positive_label = "democrat";
    const auto ds = load_csv(csv, opts);
    return train_naive_bayes(ds.features, ds.rows, 1.0, 0.5, ds.class_name).classifier;
  }();
  c.require(nb.num_features() == 16 && nb.features().all_binary(), "expected 16 binary features");
  if (!c.ok()) return c;
  const auto r = compile_naive_bayes(nb);
  const auto& f = r.odd;
  const auto table = decision_table_oracle(nb);
  Rng rng(8);
  double worst = 0.0;
  std::uint64_t total_pis = 0;
  for (int s = 0; s < 20; ++s) {
    const auto x = bnx::testing::random_instance(f.variables(), rng);
    const auto tag = format_instance(f.variables(), x);
    const auto t0 = Clock::now();
    const auto mc = mc_explanations(f, x);
    const auto pis = explain_pi(f, x);
    const auto listed = decode(pis);
    const auto shortest = shortest_pis(pis);
    const auto hist = length_histogram(pis);
    worst = std::max(worst, seconds_since(t0));

    std::uint64_t hist_total = 0;
    for (const auto& [len, k] : hist) hist_total += k;
    c.require(hist_total == count_explanations(pis) && hist_total == listed.size(), "histogram total at " + tag);
    c.require(!shortest.empty() && shortest.front().length() == hist.begin()->first, "shortest length at " + tag);
    for (const auto& z : listed) c.require(is_implicant(f, z, pis.decision), "PI not an implicant at " + tag);
    c.require(models(mc.set) == brute_mc_oracle(table, x), "MC differs from oracle at " + tag);
    total_pis += listed.size();
  }
  c.require(worst < 5.0, "an explain run took over 5 s");
  std::ostringstream d;
  d << "ODD size " << size(f) << ", slowest explain " << worst << " s, " << total_pis << " PIs over 20 instances";
  detail = d.str();
  return c;
}

double median_seconds(const std::function<void()>& fn, int reps) {
  std::vector<double> times;
  for (int k = 0; k < 7; ++k) {
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    times.push_back(seconds_since(t0) / reps);
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

Check mc_scaling(std::string& detail) {
  Check c;
  Rng rng(9);
  struct Point {
    std::size_t size;
    double per_node;
  };
  std::vector<Point> points;
  std::size_t smallest = 0;
  for (std::size_t n = 8; n <= 28; n += 2) {
    // Binary naive Bayes with a threshold near the median keeps the diagram
    // from collapsing.
    auto nb = bnx::testing::random_naive_bayes(rng, n, 2);
    const auto f = compile_naive_bayes(nb.with_threshold(0.5)).odd;
    const auto s = size(f);
    if (s < 50) continue;
    if (smallest == 0) smallest = s;
    const auto x = bnx::testing::random_instance(f.variables(), rng);
    const int reps = std::max<int>(1, static_cast<int>(200000 / s));
    const auto t = median_seconds([&] { (void)mc_explanations(f, x); }, reps);
    points.push_back({s, t / static_cast<double>(s)});
    if (s >= 20 * smallest && points.size() >= 4) break;
  }
  c.require(points.size() >= 2 && points.back().size >= 10 * points.front().size, "size range below 10x");
  if (!c.ok()) return c;
  // Per-node cost of the largest diagram relative to the cheapest smaller one.
  double best_small = points.front().per_node;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) best_small = std::min(best_small, points[k].per_node);
  const double ratio = points.back().per_node / best_small;
  c.require(ratio <= 4.0, "per-node cost ratio above 4");
  std::ostringstream d;
  d << "sizes " << points.front().size << ".." << points.back().size << ", per-node cost ratio " << ratio;
  detail = d.str();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string csv = argc > 1 ? argv[1] : "";
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Check(std::string&)>& fn) {
    std::string detail;
    Check c;
    const auto t0 = Clock::now();
    try {
      c = fn(detail);
    } catch (const std::exception& e) {
      c.failure = std::string("exception: ") + e.what();
    }
    const auto secs = seconds_since(t0);
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << id << ": " << title;
    if (!c.ok()) std::cout << " (" << c.failure << ")";
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << " " << secs << " s" << std::endl;
    failures += !c.ok();
  };
  report(1, "admissions posteriors, decisions and MC-explanations", [](std::string&) { return admissions_mc(); });
  report(2, "admissions PI-explanations", [](std::string&) { return admissions_pi(); });
  report(3, "compiled diagrams equal the decision-table oracle", [](std::string&) { return compiler_oracle(); });
  report(4, "MC and PI explanations equal brute-force oracles", [](std::string&) { return explanation_oracle(); });
  report(5, "instance implicants equal the filtered cover", [](std::string&) { return inst_vs_cover(); });
  report(6, "frontier leaf bounds during compilation", [](std::string&) { return leaf_invariants(); });
  report(7, "MC/shortest-PI correspondence and monotonicity check", [](std::string&) { return mc_pi_correspondence(); });
  report(8, "16-feature classifier explain runs", [&](std::string& d) { return votes_scale(csv, d); });
  report(9, "MC-explanation time linear in diagram size", [](std::string& d) { return mc_scaling(d); });
  return failures == 0 ? 0 : 1;
}
