#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bnx {

/// Index of a value within a variable's domain.
using Value = std::uint32_t;

/// A complete assignment, one value index per variable.
using Instance = std::vector<Value>;

struct Variable {
  std::string name;
  std::vector<std::string> labels;

  std::size_t domain_size() const noexcept { return labels.size(); }
  bool operator==(const Variable&) const = default;
};

/// Ordered list of discrete variables. The position of a variable in the
/// table is its level in every diagram built over the table.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<Variable> vars);

  /// Binary variables labelled "-" (value 0) and "+" (value 1).
  static VariableTable binary(const std::vector<std::string>& names);

  std::size_t size() const noexcept { return vars_.size(); }
  bool empty() const noexcept { return vars_.empty(); }
  const Variable& operator[](std::size_t i) const { return vars_[i]; }
  std::size_t domain_size(std::size_t i) const { return vars_[i].labels.size(); }
  std::size_t max_domain_size() const noexcept;
  bool all_binary() const noexcept;

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Value index of `label` for variable `var`; "+"/"-" alias 1/0 on binary
  /// variables whose labels do not already contain them.
  std::optional<Value> value_of(std::size_t var, std::string_view label) const;

  /// Number of complete instances; throws capacity error past 2^63.
  std::uint64_t space_size() const;

  /// Same variables with one extra trailing "*" value each.
  VariableTable with_dont_care() const;

  /// Variables reordered so that level k holds variable order[k].
  VariableTable permuted(std::span<const std::size_t> order) const;

  void check_instance(std::span<const Value> x) const;

  auto begin() const noexcept { return vars_.begin(); }
  auto end() const noexcept { return vars_.end(); }

  bool operator==(const VariableTable&) const = default;

 private:
  std::vector<Variable> vars_;
};

/// Assignment to a subset of the variables; unset entries are unconstrained.
class PartialInstance {
 public:
  PartialInstance() = default;
  explicit PartialInstance(std::size_t num_vars) : values_(num_vars) {}
  explicit PartialInstance(std::vector<std::optional<Value>> values)
      : values_(std::move(values)) {}

  /// Restriction of `x` to the variables flagged in `keep`.
  static PartialInstance project(std::span<const Value> x, const std::vector<bool>& keep);

  std::size_t num_vars() const noexcept { return values_.size(); }
  const std::optional<Value>& operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t var, Value v) { values_[var] = v; }
  void unset(std::size_t var) { values_[var].reset(); }

  /// Number of assigned variables.
  std::size_t length() const noexcept;

  /// True iff every assigned variable agrees with `x`.
  bool compatible_with(std::span<const Value> x) const;

  /// True iff every assignment here also appears in `other`.
  bool subset_of(const PartialInstance& other) const;

  const std::vector<std::optional<Value>>& values() const noexcept { return values_; }

  bool operator==(const PartialInstance&) const = default;
  auto operator<=>(const PartialInstance&) const = default;

 private:
  std::vector<std::optional<Value>> values_;
};

/// Instance rendered as space-separated labels.
std::string format_instance(const VariableTable& vars, std::span<const Value> x);

/// Partial instance rendered with "*" for unset variables.
std::string format_partial(const VariableTable& vars, const PartialInstance& z);

/// Parses whitespace-separated labels into an instance; throws parse error.
Instance parse_instance(const VariableTable& vars, std::string_view text);

/// Mixed-radix rank with variable 0 most significant (lexicographic order).
std::uint64_t instance_rank(const VariableTable& vars, std::span<const Value> x);
Instance instance_from_rank(const VariableTable& vars, std::uint64_t rank);

}  // namespace bnx
