#include "bnx/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "bnx/error.hpp"

namespace bnx {

namespace {

using nlohmann::json;

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

template <typename Range, typename Fn>
std::string joined(const Range& r, Fn fmt) {
  std::string out = "[";
  bool first = true;
  for (const auto& e : r) {
    if (!first) out += ", ";
    first = false;
    out += fmt(e);
  }
  return out + "]";
}

std::string number_row(const std::vector<double>& row) { return joined(row, number); }

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void bad_field(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::parse, where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) bad_field(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad_field(where, std::string("missing field '") + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) bad_field(where, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) bad_field(where, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_row(const json& v, const std::string& where) {
  if (!v.is_array()) bad_field(where, "expected an array of numbers");
  std::vector<double> row;
  for (std::size_t i = 0; i < v.size(); ++i) row.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  return row;
}

std::vector<std::string> as_labels(const json& v, const std::string& where) {
  if (!v.is_array()) bad_field(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const json& array_member(const json& obj, const char* key, const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_array()) bad_field(where + "." + key, "expected an array");
  return v;
}

NaiveBayesClassifier parse_naive_bayes(const json& doc) {
  const double threshold = as_number(member(doc, "threshold", "document"), "threshold");
  const auto& cls = member(doc, "class", "document");
  const auto class_name = as_string(member(cls, "name", "class"), "class.name");
  const double prior = as_number(member(cls, "prior", "class"), "class.prior");
  const auto& feats = array_member(doc, "features", "document");
  std::vector<Variable> vars;
  std::vector<std::vector<double>> pos, neg;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const auto where = "features[" + std::to_string(i) + "]";
    const auto& f = feats[i];
    Variable var{as_string(member(f, "name", where), where + ".name"), {"-", "+"}};
    if (f.contains("values")) var.labels = as_labels(f["values"], where + ".values");
    if (f.contains("fp") || f.contains("fn")) {
      if (var.labels.size() != 2) bad_field(where, "fp/fn shorthand needs a binary feature");
      const double fp = as_number(member(f, "fp", where), where + ".fp");
      const double fn = as_number(member(f, "fn", where), where + ".fn");
      pos.push_back({fn, 1.0 - fn});
      neg.push_back({1.0 - fp, fp});
    } else {
      pos.push_back(as_row(member(f, "pos", where), where + ".pos"));
      neg.push_back(as_row(member(f, "neg", where), where + ".neg"));
    }
    vars.push_back(std::move(var));
  }
  return NaiveBayesClassifier(VariableTable(std::move(vars)), prior, threshold, std::move(pos), std::move(neg),
                              class_name);
}

LatentTreeClassifier parse_latent_tree(const json& doc) {
  const double threshold = as_number(member(doc, "threshold", "document"), "threshold");
  const auto& list = array_member(doc, "nodes", "document");
  std::vector<TreeNode> nodes;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto where = "nodes[" + std::to_string(i) + "]";
    const auto& n = list[i];
    TreeNode node;
    node.name = as_string(member(n, "name", where), where + ".name");
    node.labels = as_labels(member(n, "values", where), where + ".values");
    if (n.contains("parent")) {
      const auto p = as_string(n["parent"], where + ".parent");
      auto it = index.find(p);
      if (it == index.end()) {
        throw Error(ErrorKind::structural, where + ": parent '" + p + "' is not declared before its child");
      }
      node.parent = it->second;
    }
    const auto& cpt = array_member(n, "cpt", where);
    for (std::size_t r = 0; r < cpt.size(); ++r) {
      node.cpt.push_back(as_row(cpt[r], where + ".cpt[" + std::to_string(r) + "]"));
    }
    index.emplace(node.name, i);
    nodes.push_back(std::move(node));
  }
  return LatentTreeClassifier(std::move(nodes), threshold);
}

std::string dump_naive_bayes(const NaiveBayesClassifier& nb) {
  std::string out = "{\n  \"kind\": \"naive_bayes\",\n";
  out += "  \"threshold\": " + number(nb.threshold()) + ",\n";
  out += "  \"class\": {\"name\": " + quoted(nb.class_name()) + ", \"prior\": " + number(nb.prior()) + "},\n";
  out += "  \"features\": [";
  const auto& vars = nb.features();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& pos = nb.positive_cpt()[i];
    const auto& neg = nb.negative_cpt()[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"name\": " + quoted(vars[i].name) + ", \"values\": " + joined(vars[i].labels, quoted);
    // Compared at written precision so that reloading keeps the same form.
    const bool shorthand = vars[i].labels == std::vector<std::string>{"-", "+"} &&
                           number(pos[1]) == number(1.0 - pos[0]) && number(neg[0]) == number(1.0 - neg[1]);
    if (shorthand) {
      out += ", \"fp\": " + number(neg[1]) + ", \"fn\": " + number(pos[0]) + "}";
    } else {
      out += ", \"pos\": " + number_row(pos) + ", \"neg\": " + number_row(neg) + "}";
    }
  }
  out += vars.size() ? "\n  ]\n}\n" : "]\n}\n";
  return out;
}

std::string dump_latent_tree(const LatentTreeClassifier& lt) {
  std::string out = "{\n  \"kind\": \"latent_tree\",\n";
  out += "  \"threshold\": " + number(lt.threshold()) + ",\n";
  out += "  \"nodes\": [";
  const auto& nodes = lt.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"name\": " + quoted(n.name) + ", \"values\": " + joined(n.labels, quoted);
    if (n.parent) out += ", \"parent\": " + quoted(nodes[*n.parent].name);
    out += ", \"cpt\": " + joined(n.cpt, number_row) + "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

void require_token(const std::string& s, const std::string& what) {
  if (s.empty() || std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorKind::argument, what + " '" + s + "' cannot be written to a diagram file");
  }
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::size_t parse_index(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || tok.empty() || tok[0] == '-' || tok[0] == '+') {
    throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected a non-negative integer, got '" +
                                      tok + "'");
  }
  return static_cast<std::size_t>(v);
}

// Post-order ids over the reachable nodes.
std::vector<NodeId> post_order(const Manager& m, NodeId root) {
  std::vector<NodeId> order;
  std::unordered_map<NodeId, bool> seen;
  std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
  seen[root] = true;
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    if (Manager::is_sink(u) || next == m.domain_size(m.var_of(u))) {
      order.push_back(u);
      stack.pop_back();
      continue;
    }
    const auto c = m.child(u, static_cast<Value>(next++));
    if (!seen[c]) {
      seen[c] = true;
      stack.emplace_back(c, 0);
    }
  }
  return order;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted_cell = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted_cell) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted_cell = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted_cell = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  for (auto& c : cells) {
    const auto b = c.find_first_not_of(" \t");
    const auto e = c.find_last_not_of(" \t");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return cells;
}

}  // namespace

Classifier parse_classifier(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                      ": malformed classifier document");
  }
  const auto kind = as_string(member(doc, "kind", "document"), "kind");
  if (kind == "naive_bayes") return parse_naive_bayes(doc);
  if (kind == "latent_tree") return parse_latent_tree(doc);
  throw Error(ErrorKind::parse, "kind: unknown classifier kind '" + kind + "'");
}

std::string dump_classifier(const Classifier& c) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, NaiveBayesClassifier>) {
          return dump_naive_bayes(m);
        } else {
          return dump_latent_tree(m);
        }
      },
      c);
}

Classifier load_classifier(const std::filesystem::path& path) { return parse_classifier(read_text_file(path)); }

void save_classifier(const Classifier& c, const std::filesystem::path& path) {
  write_text_file(path, dump_classifier(c));
}

std::string serialize_odd(const Diagram& d) {
  const auto& m = d.manager();
  const auto& vars = m.variables();
  std::string out = "bnx-odd 1\nmode ";
  out += m.mode() == DiagramMode::reduced ? "reduced" : "complete";
  out += '\n';
  for (const auto& v : vars) {
    require_token(v.name, "variable name");
    out += "var " + v.name;
    for (const auto& l : v.labels) {
      require_token(l, "value label");
      out += ' ' + l;
    }
    out += '\n';
  }
  const auto order = post_order(m, d.root());
  std::unordered_map<NodeId, std::size_t> id;
  for (std::size_t k = 0; k < order.size(); ++k) id.emplace(order[k], k);
  out += "root " + std::to_string(id.at(d.root())) + "\n";
  out += "nodes " + std::to_string(order.size()) + "\n";
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto u = order[k];
    out += std::to_string(k);
    if (Manager::is_sink(u)) {
      out += u == kTrueNode ? " T" : " F";
    } else {
      out += ' ' + std::to_string(m.var_of(u));
      for (auto c : m.children(u)) out += ' ' + std::to_string(id.at(c));
    }
    out += '\n';
  }
  return out;
}

Diagram deserialize_odd(std::string_view text, std::shared_ptr<Manager> mgr) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::optional<std::vector<std::string>> {
    while (std::getline(in, line)) {
      ++line_no;
      auto toks = split_ws(line);
      if (!toks.empty() && toks[0][0] != '#') return toks;
    }
    return std::nullopt;
  };
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + what);
  };

  auto toks = next();
  if (!toks || *toks != std::vector<std::string>{"bnx-odd", "1"}) throw fail("expected header 'bnx-odd 1'");
  toks = next();
  if (!toks || toks->size() != 2 || (*toks)[0] != "mode") throw fail("expected 'mode reduced|complete'");
  DiagramMode mode;
  if ((*toks)[1] == "reduced") {
    mode = DiagramMode::reduced;
  } else if ((*toks)[1] == "complete") {
    mode = DiagramMode::complete;
  } else {
    throw fail("unknown mode '" + (*toks)[1] + "'");
  }

  std::vector<Variable> vars;
  while ((toks = next()) && (*toks)[0] == "var") {
    if (toks->size() < 4) throw fail("a variable needs a name and at least two values");
    vars.push_back(Variable{(*toks)[1], {toks->begin() + 2, toks->end()}});
  }
  VariableTable table(std::move(vars));
  if (mgr) {
    if (mgr->variables() != table || mgr->mode() != mode) {
      throw Error(ErrorKind::manager, "diagram file does not match the target manager");
    }
  } else {
    mgr = Manager::create(table, mode);
  }

  if (!toks || toks->size() != 2 || (*toks)[0] != "root") throw fail("expected 'root <id>'");
  const auto root_id = parse_index((*toks)[1], line_no);
  toks = next();
  if (!toks || toks->size() != 2 || (*toks)[0] != "nodes") throw fail("expected 'nodes <count>'");
  const auto count = parse_index((*toks)[1], line_no);

  std::unordered_map<std::size_t, NodeId> nodes;
  for (std::size_t k = 0; k < count; ++k) {
    toks = next();
    if (!toks) throw fail("expected " + std::to_string(count) + " node lines, found " + std::to_string(k));
    if (toks->size() < 2) throw fail("malformed node line");
    const auto id = parse_index((*toks)[0], line_no);
    if (nodes.count(id)) throw fail("duplicate node id " + std::to_string(id));
    NodeId u;
    if (toks->size() == 2 && ((*toks)[1] == "T" || (*toks)[1] == "F")) {
      u = (*toks)[1] == "T" ? kTrueNode : kFalseNode;
    } else {
      const auto var = parse_index((*toks)[1], line_no);
      if (var >= table.size()) throw fail("variable index " + std::to_string(var) + " out of range");
      if (toks->size() - 2 != table.domain_size(var)) {
        throw Error(ErrorKind::arity, "line " + std::to_string(line_no) + ": node has " +
                                          std::to_string(toks->size() - 2) + " children, expected " +
                                          std::to_string(table.domain_size(var)));
      }
      std::vector<NodeId> ch;
      for (std::size_t j = 2; j < toks->size(); ++j) {
        const auto c = parse_index((*toks)[j], line_no);
        auto it = nodes.find(c);
        if (it == nodes.end()) {
          throw Error(ErrorKind::structural, "line " + std::to_string(line_no) + ": child " + std::to_string(c) +
                                                 " is not defined before its parent");
        }
        ch.push_back(it->second);
      }
      try {
        u = mgr->intern(var, ch);
      } catch (const Error& e) {
        throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    nodes.emplace(id, u);
  }
  if (next()) throw fail("unexpected content after the node list");
  auto it = nodes.find(root_id);
  if (it == nodes.end()) throw Error(ErrorKind::structural, "root " + std::to_string(root_id) + " is not defined");
  return Diagram(mgr, it->second);
}

Diagram load_odd(const std::filesystem::path& path, std::shared_ptr<Manager> mgr) {
  return deserialize_odd(read_text_file(path), std::move(mgr));
}

void save_odd(const Diagram& d, const std::filesystem::path& path) { write_text_file(path, serialize_odd(d)); }

std::string to_dot(const Diagram& d) {
  const auto& m = d.manager();
  const auto& vars = m.variables();
  const auto order = post_order(m, d.root());
  std::unordered_map<NodeId, std::size_t> id;
  for (std::size_t k = 0; k < order.size(); ++k) id.emplace(order[k], k);
  std::string out = "digraph odd {\n";
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto u = *it;
    const auto name = "n" + std::to_string(id.at(u));
    if (Manager::is_sink(u)) {
      out += "  " + name + " [shape=box, label=\"" + (u == kTrueNode ? "yes" : "no") + "\"];\n";
      continue;
    }
    const auto var = m.var_of(u);
    out += "  " + name + " [shape=ellipse, label=" + quoted(vars[var].name) + "];\n";
    // One edge per distinct child, labelled with every value leading there.
    std::vector<std::pair<NodeId, std::string>> edges;
    for (Value v = 0; v < m.domain_size(var); ++v) {
      const auto c = m.child(u, v);
      auto e = std::find_if(edges.begin(), edges.end(), [&](const auto& p) { return p.first == c; });
      if (e == edges.end()) {
        edges.emplace_back(c, vars[var].labels[v]);
      } else {
        e->second += "," + vars[var].labels[v];
      }
    }
    for (const auto& [c, label] : edges) {
      out += "  " + name + " -> n" + std::to_string(id.at(c)) + " [label=" + quoted(label) + "];\n";
    }
  }
  return out + "}\n";
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv_line(line);
    if (options.header && header.empty()) {
      header = std::move(cells);
      continue;
    }
    const auto width = header.empty() ? (rows.empty() ? cells.size() : rows.front().size()) : header.size();
    if (cells.size() != width) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                        " cells, found " + std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw Error(ErrorKind::training, "dataset has no rows");
  const auto width = rows.front().size();
  if (width < 2) throw Error(ErrorKind::parse, "dataset needs a label column and at least one feature");
  if (header.empty()) {
    for (std::size_t c = 0; c < width; ++c) header.push_back(c == 0 ? "class" : "X" + std::to_string(c));
  }

  std::size_t label_col = 0;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) throw Error(ErrorKind::argument, "no column named '" + options.label_column + "'");
    label_col = static_cast<std::size_t>(it - header.begin());
  }
  const auto positive = options.positive_label.empty() ? rows.front()[label_col] : options.positive_label;

  auto mapped = [&](const std::string& cell) -> std::optional<std::string> {
    if (cell == options.missing && !options.missing_as_value) return std::nullopt;
    auto it = options.value_map.find(cell);
    return it == options.value_map.end() ? cell : it->second;
  };

  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (c != label_col) cols.push_back(c);
  }
  std::vector<Variable> vars;
  for (auto c : cols) {
    std::set<std::string> seen;
    for (const auto& r : rows) {
      if (auto v = mapped(r[c])) seen.insert(*v);
    }
    Variable var{header[c], {}};
    if (std::all_of(seen.begin(), seen.end(), [](const auto& s) { return s == "-" || s == "+"; })) {
      var.labels = {"-", "+"};
    } else {
      var.labels.assign(seen.begin(), seen.end());
      if (var.labels.size() < 2) {
        throw Error(ErrorKind::training, "column '" + header[c] + "' takes fewer than two values");
      }
    }
    vars.push_back(std::move(var));
  }

  Dataset ds{VariableTable(std::move(vars)), header[label_col], {}};
  bool has_positive = false;
  for (const auto& r : rows) {
    TrainingRow tr;
    tr.label = r[label_col] == positive;
    has_positive |= tr.label;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto v = mapped(r[cols[k]]);
      tr.features.push_back(v ? ds.features.value_of(k, *v) : std::nullopt);
    }
    ds.rows.push_back(std::move(tr));
  }
  if (!has_positive) throw Error(ErrorKind::argument, "positive label '" + positive + "' does not occur");
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::istringstream in(read_text_file(path));
  return read_csv(in, options);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::argument, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::argument, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::argument, "failed writing '" + path.string() + "'");
}

}  // namespace bnx
