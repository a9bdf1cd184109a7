#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "bnx/compiler.hpp"
#include "bnx/error.hpp"
#include "bnx/explainer.hpp"
#include "bnx/io.hpp"
#include "bnx/monotone.hpp"

namespace bnx::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::capacity:
      return kCapacity;
    case ErrorKind::parse:
    case ErrorKind::normalization:
    case ErrorKind::structural:
    case ErrorKind::arity:
    case ErrorKind::domain:
    case ErrorKind::range:
    case ErrorKind::training:
      return kParse;
    case ErrorKind::argument:
    case ErrorKind::manager:
    case ErrorKind::sequencing:
    case ErrorKind::precondition:
    case ErrorKind::unsupported:
    case ErrorKind::polarity:
    case ErrorKind::mode:
      return kUsage;
    default:
      return kFailure;
  }
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::size_t> resolve_names(const VariableTable& vars, const std::string& text) {
  std::vector<std::size_t> idx;
  for (const auto& name : split_names(text)) {
    auto i = vars.index_of(name);
    if (!i) throw UsageError("unknown feature '" + name + "'");
    idx.push_back(*i);
  }
  return idx;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// Level k of the diagram holds classifier feature order[k].
std::vector<std::size_t> match_variables(const VariableTable& levels, const VariableTable& features) {
  if (levels.size() != features.size()) throw UsageError("diagram and model have different feature counts");
  std::vector<std::size_t> order;
  for (const auto& v : levels) {
    auto i = features.index_of(v.name);
    if (!i || features[*i] != v) throw UsageError("diagram variable '" + v.name + "' does not match the model");
    order.push_back(*i);
  }
  return order;
}

Instance to_levels(const std::vector<std::size_t>& order, const Instance& x) {
  Instance y(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) y[k] = x[order[k]];
  return y;
}

struct CompileArgs {
  std::string model, order, out, dot, merge = "exact";
};

int do_compile(const CompileArgs& a, std::ostream& out) {
  const auto c = load_classifier(a.model);
  CompileOptions opts;
  opts.latent_merge = a.merge == "none" ? LatentMerge::none
                      : a.merge == "proportional" ? LatentMerge::proportional
                                                  : LatentMerge::exact;
  std::vector<std::size_t> order;
  if (!a.order.empty()) {
    if (!std::holds_alternative<NaiveBayesClassifier>(c)) {
      throw UsageError("--order applies to naive Bayes models only");
    }
    order = resolve_names(features_of(c), a.order);
  }
  const auto r = compile(c, order, opts);
  save_odd(r.odd, a.out);
  if (!a.dot.empty()) write_text_file(a.dot, to_dot(r.odd));
  std::vector<std::string> names;
  for (const auto& v : r.odd.variables()) names.push_back(v.name);
  out << "order " << join(names, ",") << "\n";
  out << "size " << size(r.odd) << "\n";
  out << "models " << model_count(r.odd) << "\n";
  return kSuccess;
}

struct ExplainArgs {
  std::string odd, instance, kind;
  bool shortest = false, histogram = false;
};

int do_explain(const ExplainArgs& a, std::ostream& out) {
  if (a.kind == "mc" && (a.shortest || a.histogram)) {
    throw UsageError("--shortest and --histogram apply to --kind pi only");
  }
  const auto f = load_odd(a.odd);
  const auto& vars = f.variables();
  const auto x = parse_instance(vars, a.instance);
  if (a.kind == "mc") {
    const auto s = mc_explanations(f, x);
    for (const auto& m : models(s.set)) out << format_instance(vars, m) << "\n";
    out << "count " << count_explanations(s) << "\n";
    return kSuccess;
  }
  const auto s = explain_pi(f, x);
  const auto listed = a.shortest ? shortest_pis(s) : decode(s);
  for (const auto& z : listed) out << format_partial(vars, z) << "\n";
  out << "count " << listed.size() << "\n";
  if (a.histogram) {
    out << "length count\n";
    for (const auto& [len, n] : length_histogram(s)) out << len << " " << n << "\n";
  }
  return kSuccess;
}

int do_check_monotone(const std::string& odd, const std::string& flip, std::ostream& out) {
  const auto f = load_odd(odd);
  const auto& vars = f.variables();
  std::vector<bool> mask;
  if (!flip.empty()) {
    mask.assign(vars.size(), false);
    for (auto i : resolve_names(vars, flip)) mask[i] = true;
  }
  const auto r = is_monotone(f, mask);
  if (r.monotone) {
    out << "monotone\n";
    return kSuccess;
  }
  std::vector<std::string> names;
  for (auto j : r.violating) names.push_back(vars[j].name);
  out << "not monotone\n";
  out << "violating " << join(names, ",") << "\n";
  out << "lower " << format_instance(vars, r.witness->first) << "\n";
  out << "upper " << format_instance(vars, r.witness->second) << "\n";
  return kSuccess;
}

int do_stats(const std::string& odd, const std::string& model, std::ostream& out) {
  if (odd.empty() == model.empty()) throw UsageError("give exactly one of --odd and --model");
  if (!model.empty()) {
    const auto c = load_classifier(model);
    const auto& vars = features_of(c);
    out << "kind " << (std::holds_alternative<NaiveBayesClassifier>(c) ? "naive_bayes" : "latent_tree") << "\n";
    out << "features " << vars.size() << "\n";
    out << "max_domain " << vars.max_domain_size() << "\n";
    out << "threshold " << threshold_of(c) << "\n";
    out << "instances " << vars.space_size() << "\n";
    return kSuccess;
  }
  const auto f = load_odd(odd);
  const auto& m = f.manager();
  out << "mode " << (f.mode() == DiagramMode::reduced ? "reduced" : "complete") << "\n";
  out << "variables " << m.num_vars() << "\n";
  out << "size " << size(f) << "\n";
  out << "models " << model_count(f) << "\n";
  return kSuccess;
}

struct TrainArgs {
  std::string csv, out, label_column, positive;
  double smoothing = 1.0, threshold = 0.5;
  bool missing_as_value = false, no_header = false;
};

int do_train(const TrainArgs& a, std::ostream& out) {
  CsvOptions opts;
  opts.header = !a.no_header;
  opts.label_column = a.label_column;
  opts.positive_label = a.positive;
  opts.missing_as_value = a.missing_as_value;
  const auto ds = load_csv(a.csv, opts);
  const auto r = train_naive_bayes(ds.features, ds.rows, a.smoothing, a.threshold, ds.class_name);
  save_classifier(r.classifier, a.out);
  out << "rows " << ds.rows.size() << "\n";
  out << "accuracy " << fixed(r.accuracy, 4) << "\n";
  return kSuccess;
}

struct VerifyArgs {
  std::string model, order, odd;
  std::size_t samples = 20;
  std::uint64_t seed = 1;
};

int do_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto c = load_classifier(a.model);
  const auto& feats = features_of(c);
  const auto table = decision_table_oracle(c);

  std::optional<Diagram> f;
  std::vector<std::size_t> order;
  if (!a.odd.empty()) {
    if (!a.order.empty()) throw UsageError("--order and --odd are exclusive");
    f = load_odd(a.odd);
    order = match_variables(f->variables(), feats);
  } else {
    if (!a.order.empty()) order = resolve_names(feats, a.order);
    auto r = compile(c, order);
    order = r.order;
    f = r.odd;
  }
  const auto& levels = f->variables();

  std::vector<bool> level_bits(table.size());
  for (std::uint64_t k = 0; k < table.size(); ++k) {
    const auto x = instance_from_rank(feats, k);
    const auto y = to_levels(order, x);
    const bool want = table.at_rank(k);
    if (evaluate(*f, y) != want) {
      out << "pointwise mismatch at " << format_instance(feats, x) << "\n";
      err << "diagram disagrees with the model\n";
      return kMismatch;
    }
    level_bits[instance_rank(levels, y)] = want;
  }
  out << "pointwise ok " << table.size() << " instances\n";

  const DecisionTable level_table(levels, std::move(level_bits));
  std::mt19937_64 rng(a.seed);
  std::vector<Instance> picks;
  const auto n = std::min<std::uint64_t>(a.samples, table.size());
  std::uniform_int_distribution<std::uint64_t> pick(0, table.size() - 1);
  for (std::uint64_t s = 0; s < n; ++s) picks.push_back(instance_from_rank(levels, pick(rng)));

  if (levels.all_binary()) {
    for (const auto& y : picks) {
      if (models(mc_explanations(*f, y).set) != brute_mc_oracle(level_table, y)) {
        out << "mc mismatch at " << format_instance(levels, y) << "\n";
        return kMismatch;
      }
    }
    out << "mc ok " << picks.size() << " instances\n";
  } else {
    out << "mc skipped (non-binary features)\n";
  }

  if (levels.size() <= kBrutePiMaxVars) {
    for (const auto& y : picks) {
      auto got = decode(explain_pi(*f, y));
      std::sort(got.begin(), got.end());
      if (got != brute_pi_oracle(level_table, y)) {
        out << "pi mismatch at " << format_instance(levels, y) << "\n";
        return kMismatch;
      }
    }
    out << "pi ok " << picks.size() << " instances\n";
  } else {
    out << "pi skipped (more than " << kBrutePiMaxVars << " features)\n";
  }
  return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile Bayesian network classifiers into decision diagrams and explain their decisions", "bnx"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a classifier into a decision diagram file");
  compile_cmd->add_option("--model", ca.model, "Classifier document")->required();
  compile_cmd->add_option("--order", ca.order, "Comma-separated feature order (naive Bayes)");
  compile_cmd->add_option("--out", ca.out, "Output diagram file")->required();
  compile_cmd->add_option("--dot", ca.dot, "Also write a Graphviz rendering");
  compile_cmd->add_option("--merge", ca.merge, "Latent-tree merging")
      ->check(CLI::IsMember({"none", "proportional", "exact"}));

  ExplainArgs ea;
  auto* explain_cmd = app.add_subcommand("explain", "Explain the decision on one instance");
  explain_cmd->add_option("--odd", ea.odd, "Diagram file")->required();
  explain_cmd->add_option("--instance", ea.instance, "Space-separated value labels")->required();
  explain_cmd->add_option("--kind", ea.kind, "Explanation kind")->required()->check(CLI::IsMember({"mc", "pi"}));
  explain_cmd->add_flag("--shortest", ea.shortest, "Only the shortest PI-explanations");
  explain_cmd->add_flag("--histogram", ea.histogram, "Print the PI length histogram");

  std::string mono_odd, mono_flip;
  auto* mono_cmd = app.add_subcommand("check-monotone", "Check whether a binary diagram is monotone");
  mono_cmd->add_option("--odd", mono_odd, "Diagram file")->required();
  mono_cmd->add_option("--flip", mono_flip, "Comma-separated features ordered with + below -");

  std::string stats_odd, stats_model;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a diagram file or a classifier");
  stats_cmd->add_option("--odd", stats_odd, "Diagram file");
  stats_cmd->add_option("--model", stats_model, "Classifier document");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train naive Bayes from a labelled CSV file");
  train_cmd->add_option("--csv", ta.csv, "Dataset")->required();
  train_cmd->add_option("--smoothing", ta.smoothing, "Additive smoothing pseudo-count")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--out", ta.out, "Output classifier document")->required();
  train_cmd->add_option("--threshold", ta.threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--label-column", ta.label_column, "Class column (default: first)");
  train_cmd->add_option("--positive", ta.positive, "Positive class label (default: first seen)");
  train_cmd->add_flag("--missing-as-value", ta.missing_as_value, "Treat '?' as a value of its own");
  train_cmd->add_flag("--no-header", ta.no_header, "The file has no header row");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Check a compiled diagram and its explanations against brute force");
  verify_cmd->add_option("--model", va.model, "Classifier document")->required();
  verify_cmd->add_option("--order", va.order, "Comma-separated feature order (naive Bayes)");
  verify_cmd->add_option("--odd", va.odd, "Verify this diagram file instead of compiling");
  verify_cmd->add_option("--samples", va.samples, "Instances checked against the explanation oracles");
  verify_cmd->add_option("--seed", va.seed, "Sampling seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (compile_cmd->parsed()) return do_compile(ca, out);
    if (explain_cmd->parsed()) return do_explain(ea, out);
    if (mono_cmd->parsed()) return do_check_monotone(mono_odd, mono_flip, out);
    if (stats_cmd->parsed()) return do_stats(stats_odd, stats_model, out);
    if (train_cmd->parsed()) return do_train(ta, out);
    if (verify_cmd->parsed()) return do_verify(va, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace bnx::cli
