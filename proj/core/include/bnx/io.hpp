#pragma once

// Text formats: classifier documents (JSON), decision diagram files, DOT
// export and CSV datasets.

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "bnx/classifier.hpp"
#include "bnx/diagram.hpp"

namespace bnx {

/// Parses a classifier document. Malformed JSON gives a parse error with
/// line and column; invalid parameters give the classifier's own errors.
Classifier parse_classifier(std::string_view text);

/// Canonical document: fixed key order, two-space indentation, numbers with
/// 12 significant digits. Binary features labelled "-"/"+" use the fp/fn
/// shorthand.
std::string dump_classifier(const Classifier& c);

Classifier load_classifier(const std::filesystem::path& path);
void save_classifier(const Classifier& c, const std::filesystem::path& path);

/// Diagram file: header, then one line per reachable node with children
/// listed before their parents. Node ids follow a post-order walk from the
/// root, so equal functions over equal variables serialize identically.
std::string serialize_odd(const Diagram& d);

/// Reads a diagram file into `mgr` (a fresh manager when null). Throws parse
/// error on malformed lines and structural error on dangling references or
/// ordering violations.
Diagram deserialize_odd(std::string_view text, std::shared_ptr<Manager> mgr = nullptr);

Diagram load_odd(const std::filesystem::path& path, std::shared_ptr<Manager> mgr = nullptr);
void save_odd(const Diagram& d, const std::filesystem::path& path);

/// Graphviz rendering with value-labelled edges and yes/no sinks.
std::string to_dot(const Diagram& d);

struct CsvOptions {
  bool header = true;
  /// Column holding the class label; the first column when empty.
  std::string label_column;
  /// Label of the positive class; the first label in the file when empty.
  std::string positive_label;
  /// Raw cell text to value label.
  std::map<std::string, std::string> value_map{{"y", "+"}, {"n", "-"}};
  std::string missing = "?";
  /// Keep missing cells as a value of their own instead of skipping them.
  bool missing_as_value = false;
};

struct Dataset {
  VariableTable features;
  std::string class_name;
  std::vector<TrainingRow> rows;
};

/// Feature domains are the mapped values seen in each column, sorted; a
/// column whose values are within {-, +} is binary with "-" as value 0.
Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Whole file as a string; throws argument error when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace bnx
