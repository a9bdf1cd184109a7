#include "bnx/variables.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "bnx/error.hpp"

namespace bnx {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::arity: return "arity";
    case ErrorKind::domain: return "domain";
    case ErrorKind::manager: return "manager";
    case ErrorKind::mode: return "mode";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::parse: return "parse";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::undefined_posterior: return "undefined-posterior";
    case ErrorKind::range: return "range";
    case ErrorKind::sequencing: return "sequencing";
    case ErrorKind::argument: return "argument";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::polarity: return "polarity";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::training: return "training";
  }
  return "unknown";
}

VariableTable::VariableTable(std::vector<Variable> vars) : vars_(std::move(vars)) {
  std::set<std::string> names;
  for (const auto& v : vars_) {
    if (v.labels.size() < 2) {
      throw Error(ErrorKind::domain, "variable '" + v.name + "' needs at least two values");
    }
    std::set<std::string> seen(v.labels.begin(), v.labels.end());
    if (seen.size() != v.labels.size()) {
      throw Error(ErrorKind::domain, "variable '" + v.name + "' has duplicate value labels");
    }
    if (!names.insert(v.name).second) {
      throw Error(ErrorKind::argument, "duplicate variable name '" + v.name + "'");
    }
  }
}

VariableTable VariableTable::binary(const std::vector<std::string>& names) {
  std::vector<Variable> vars;
  vars.reserve(names.size());
  for (const auto& n : names) vars.push_back({n, {"-", "+"}});
  return VariableTable(std::move(vars));
}

std::size_t VariableTable::max_domain_size() const noexcept {
  std::size_t b = 0;
  for (const auto& v : vars_) b = std::max(b, v.labels.size());
  return b;
}

bool VariableTable::all_binary() const noexcept {
  return std::all_of(vars_.begin(), vars_.end(),
                     [](const Variable& v) { return v.labels.size() == 2; });
}

std::optional<std::size_t> VariableTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<Value> VariableTable::value_of(std::size_t var, std::string_view label) const {
  const auto& labels = vars_.at(var).labels;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == label) return static_cast<Value>(v);
  }
  if (labels.size() == 2) {
    if (label == "+" || label == "1") return Value{1};
    if (label == "-" || label == "0") return Value{0};
  }
  return std::nullopt;
}

std::uint64_t VariableTable::space_size() const {
  std::uint64_t total = 1;
  for (const auto& v : vars_) {
    const auto b = static_cast<std::uint64_t>(v.labels.size());
    if (total > (std::numeric_limits<std::uint64_t>::max() >> 1) / b) {
      throw Error(ErrorKind::capacity, "instance space exceeds 2^63");
    }
    total *= b;
  }
  return total;
}

VariableTable VariableTable::with_dont_care() const {
  std::vector<Variable> ext = vars_;
  for (auto& v : ext) v.labels.emplace_back("*");
  return VariableTable(std::move(ext));
}

VariableTable VariableTable::permuted(std::span<const std::size_t> order) const {
  if (order.size() != vars_.size()) {
    throw Error(ErrorKind::argument, "order does not cover every variable");
  }
  std::vector<bool> used(vars_.size(), false);
  std::vector<Variable> out;
  out.reserve(order.size());
  for (auto i : order) {
    if (i >= vars_.size() || used[i]) {
      throw Error(ErrorKind::argument, "order is not a permutation");
    }
    used[i] = true;
    out.push_back(vars_[i]);
  }
  return VariableTable(std::move(out));
}

void VariableTable::check_instance(std::span<const Value> x) const {
  if (x.size() != vars_.size()) {
    throw Error(ErrorKind::domain, "instance has " + std::to_string(x.size()) +
                                       " values, expected " + std::to_string(vars_.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= vars_[i].labels.size()) {
      throw Error(ErrorKind::domain, "value " + std::to_string(x[i]) +
                                         " out of domain for '" + vars_[i].name + "'");
    }
  }
}

PartialInstance PartialInstance::project(std::span<const Value> x, const std::vector<bool>& keep) {
  PartialInstance z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (keep[i]) z.set(i, x[i]);
  }
  return z;
}

std::size_t PartialInstance::length() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

bool PartialInstance::compatible_with(std::span<const Value> x) const {
  if (x.size() != values_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (values_[i] && *values_[i] != x[i]) return false;
  }
  return true;
}

bool PartialInstance::subset_of(const PartialInstance& other) const {
  if (other.values_.size() != values_.size()) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] && values_[i] != other.values_[i]) return false;
  }
  return true;
}

std::string format_instance(const VariableTable& vars, std::span<const Value> x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += vars[i].labels.at(x[i]);
  }
  return out;
}

std::string format_partial(const VariableTable& vars, const PartialInstance& z) {
  std::string out;
  for (std::size_t i = 0; i < z.num_vars(); ++i) {
    if (i) out += ' ';
    out += z[i] ? vars[i].labels.at(*z[i]) : std::string("*");
  }
  return out;
}

Instance parse_instance(const VariableTable& vars, std::string_view text) {
  std::istringstream in{std::string(text)};
  Instance x;
  std::string tok;
  while (in >> tok) {
    const auto i = x.size();
    if (i >= vars.size()) {
      throw Error(ErrorKind::parse, "instance has more than " + std::to_string(vars.size()) +
                                        " values");
    }
    auto v = vars.value_of(i, tok);
    if (!v) {
      throw Error(ErrorKind::parse, "unknown value '" + tok + "' for variable '" +
                                        vars[i].name + "'");
    }
    x.push_back(*v);
  }
  if (x.size() != vars.size()) {
    throw Error(ErrorKind::parse, "instance has " + std::to_string(x.size()) + " values, expected " +
                                      std::to_string(vars.size()));
  }
  return x;
}

std::uint64_t instance_rank(const VariableTable& vars, std::span<const Value> x) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r = r * vars.domain_size(i) + x[i];
  return r;
}

Instance instance_from_rank(const VariableTable& vars, std::uint64_t rank) {
  Instance x(vars.size());
  for (std::size_t i = vars.size(); i-- > 0;) {
    const auto b = vars.domain_size(i);
    x[i] = static_cast<Value>(rank % b);
    rank /= b;
  }
  return x;
}

}  // namespace bnx
