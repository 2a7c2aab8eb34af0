#include "pcm/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

// Line-oriented tokenizer that tracks line numbers and skips `c` comments
// and blank lines.
struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  bool next(std::vector<std::string_view>& tokens, std::size_t& out_line) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + (end < text.size() ? 1 : 0);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

      tokens.clear();
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
      }
      if (tokens.empty()) continue;
      if (tokens[0] == "c") continue;
      out_line = line_no;
      return true;
    }
    return false;
  }
};

long long parse_int(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected integer, got '" + std::string(tok) + "'", line);
  return v;
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected number, got '" + std::string(tok) + "'", line);
  return v;
}

// Shortest decimal that round-trips to the same double.
std::string render_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::shared_ptr<const Vtree> parse_vtree(std::string_view text) {
  LineReader reader{text};
  std::vector<std::string_view> tok;
  std::size_t line = 0;

  if (!reader.next(tok, line) || tok.size() != 2 || tok[0] != "vtree")
    throw ParseError("expected header 'vtree <node-count>'", line);
  long long declared = parse_int(tok[1], line);

  struct Raw {
    bool leaf;
    long long a, b;
    std::size_t line;
  };
  std::unordered_map<long long, Raw> raw;
  std::vector<long long> order;
  while (reader.next(tok, line)) {
    if (tok[0] == "L") {
      if (tok.size() != 3) throw ParseError("leaf line needs 'L <id> <var>'", line);
      long long id = parse_int(tok[1], line);
      if (raw.count(id)) throw ParseError("duplicate id " + std::to_string(id), line);
      raw[id] = {true, parse_int(tok[2], line), 0, line};
      order.push_back(id);
    } else if (tok[0] == "I") {
      if (tok.size() != 4) throw ParseError("internal line needs 'I <id> <left> <right>'", line);
      long long id = parse_int(tok[1], line);
      if (raw.count(id)) throw ParseError("duplicate id " + std::to_string(id), line);
      raw[id] = {false, parse_int(tok[2], line), parse_int(tok[3], line), line};
      order.push_back(id);
    } else {
      throw ParseError("unknown vtree line '" + std::string(tok[0]) + "'", line);
    }
  }
  if (static_cast<long long>(order.size()) != declared)
    throw ParseError("header declares " + std::to_string(declared) + " nodes but file has " +
                     std::to_string(order.size()));

  // Remap file ids (in file order) to dense construction ids. The last line
  // is the root; children must already be defined.
  std::unordered_map<long long, NodeId> remap;
  std::vector<Vtree::Node> nodes;
  for (long long id : order) {
    const Raw& r = raw[id];
    Vtree::Node n;
    n.leaf = r.leaf;
    if (r.leaf) {
      if (r.a <= 0) throw ParseError("variable ids are positive", r.line);
      n.var = static_cast<VarId>(r.a);
    } else {
      auto l = remap.find(r.a);
      auto rr = remap.find(r.b);
      if (l == remap.end() || rr == remap.end())
        throw ParseError("dangling child reference", r.line);
      if (r.a == r.b) throw ParseError("child reused", r.line);
      n.left = l->second;
      n.right = rr->second;
    }
    remap[id] = static_cast<NodeId>(nodes.size());
    nodes.push_back(n);
  }
  return Vtree::build(std::move(nodes));
}

std::string serialize_vtree(const Vtree& vtree) {
  std::ostringstream os;
  os << "vtree " << vtree.node_count() << "\n";
  for (NodeId id = 0; id < vtree.node_count(); ++id) {
    const Vtree::Node& n = vtree.node(id);
    if (n.leaf)
      os << "L " << id << " " << n.var << "\n";
    else
      os << "I " << id << " " << n.left << " " << n.right << "\n";
  }
  return os.str();
}

Circuit parse_circuit(std::string_view text, std::shared_ptr<const Vtree> vtree) {
  if (!vtree) throw ParseError("circuit parsing requires a vtree");
  LineReader reader{text};
  std::vector<std::string_view> tok;
  std::size_t line = 0;

  if (!reader.next(tok, line) || tok.size() != 3 || tok[1] != "v1" ||
      (tok[0] != "pc" && tok[0] != "rc"))
    throw ParseError("expected header 'pc v1 <vtree-file>' or 'rc v1 <vtree-file>'", line);
  CircuitRole role = tok[0] == "pc" ? CircuitRole::Generative : CircuitRole::Discriminative;
  std::string hint(tok[2]);

  std::unordered_map<long long, NodeId> remap;
  std::vector<CircuitNode> nodes;
  double bias = 0.0;
  bool saw_bias = false;

  auto map_vtree = [&](std::string_view t) {
    long long v = parse_int(t, line);
    if (v < 0 || v >= static_cast<long long>(vtree->node_count()))
      throw ParseError("unknown vtree id " + std::to_string(v), line);
    return static_cast<NodeId>(v);
  };
  auto map_child = [&](std::string_view t) {
    long long c = parse_int(t, line);
    auto it = remap.find(c);
    if (it == remap.end()) throw ParseError("dangling child reference " + std::to_string(c), line);
    return it->second;
  };
  auto define = [&](std::string_view t, CircuitNode n) {
    long long id = parse_int(t, line);
    if (remap.count(id)) throw ParseError("duplicate id " + std::to_string(id), line);
    remap[id] = static_cast<NodeId>(nodes.size());
    nodes.push_back(std::move(n));
  };

  while (reader.next(tok, line)) {
    if (tok[0] == "T") {
      if (tok.size() != 4) throw ParseError("literal line needs 'T <id> <vtree-id> <lit>'", line);
      CircuitNode n;
      n.kind = NodeKind::Literal;
      n.vtree_node = map_vtree(tok[2]);
      long long lit = parse_int(tok[3], line);
      if (lit == 0) throw ParseError("literal 0 is not a variable", line);
      n.positive = lit > 0;
      n.var = static_cast<VarId>(lit > 0 ? lit : -lit);
      define(tok[1], std::move(n));
    } else if (tok[0] == "A") {
      if (tok.size() != 5) throw ParseError("AND line needs 'A <id> <vtree-id> <left> <right>'", line);
      CircuitNode n;
      n.kind = NodeKind::And;
      n.vtree_node = map_vtree(tok[2]);
      n.left = map_child(tok[3]);
      n.right = map_child(tok[4]);
      define(tok[1], std::move(n));
    } else if (tok[0] == "O") {
      if (tok.size() < 4) throw ParseError("OR line needs 'O <id> <vtree-id> <k> ...'", line);
      CircuitNode n;
      n.kind = NodeKind::Or;
      n.vtree_node = map_vtree(tok[2]);
      long long k = parse_int(tok[3], line);
      if (k < 1) throw ParseError("OR gate needs at least one child", line);
      if (tok.size() != 4 + 2 * static_cast<std::size_t>(k))
        throw ParseError("OR line has wrong number of child/weight pairs", line);
      for (long long i = 0; i < k; ++i) {
        n.children.push_back(map_child(tok[4 + 2 * i]));
        n.weights.push_back(parse_double(tok[5 + 2 * i], line));
      }
      define(tok[1], std::move(n));
    } else if (tok[0] == "B") {
      if (role != CircuitRole::Discriminative)
        throw ParseError("bias line is only valid in rc files", line);
      if (tok.size() != 2 || saw_bias) throw ParseError("bad bias line", line);
      bias = parse_double(tok[1], line);
      saw_bias = true;
    } else {
      throw ParseError("unknown circuit line '" + std::string(tok[0]) + "'", line);
    }
  }
  if (nodes.empty()) throw ParseError("circuit file defines no nodes");

  NodeId root = static_cast<NodeId>(nodes.size() - 1);
  Circuit out(std::move(vtree), std::move(nodes), root, role, bias);
  out.set_vtree_hint(hint);
  return out;
}

std::string serialize_circuit(const Circuit& circuit) {
  return serialize_circuit(circuit, circuit.vtree_hint());
}

std::string serialize_circuit(const Circuit& circuit, const std::string& vtree_hint) {
  std::ostringstream os;
  os << (circuit.role() == CircuitRole::Generative ? "pc" : "rc") << " v1 "
     << (vtree_hint.empty() ? "-" : vtree_hint) << "\n";
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const CircuitNode& n = circuit.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        os << "T " << id << " " << n.vtree_node << " "
           << (n.positive ? static_cast<long long>(n.var) : -static_cast<long long>(n.var))
           << "\n";
        break;
      case NodeKind::And:
        os << "A " << id << " " << n.vtree_node << " " << n.left << " " << n.right << "\n";
        break;
      case NodeKind::Or:
        os << "O " << id << " " << n.vtree_node << " " << n.children.size();
        for (std::size_t i = 0; i < n.children.size(); ++i)
          os << " " << n.children[i] << " " << render_double(n.weights[i]);
        os << "\n";
        break;
    }
  }
  if (circuit.role() == CircuitRole::Discriminative && circuit.bias() != 0.0)
    os << "B " << render_double(circuit.bias()) << "\n";
  return os.str();
}

DatasetTable load_dataset(std::string_view csv, const std::string& target_column,
                          const std::string& class_column,
                          const std::vector<std::string>& drop) {
  auto split_commas = [](std::string_view s) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = s.find(',', start);
      if (comma == std::string_view::npos) {
        cells.emplace_back(s.substr(start));
        break;
      }
      cells.emplace_back(s.substr(start, comma - start));
      start = comma + 1;
    }
    return cells;
  };

  std::size_t pos = 0, line = 0;
  auto next_line = [&](std::string_view& out) {
    while (pos < csv.size()) {
      std::size_t end = csv.find('\n', pos);
      if (end == std::string_view::npos) end = csv.size();
      std::string_view l = csv.substr(pos, end - pos);
      pos = end + (end < csv.size() ? 1 : 0);
      ++line;
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      if (l.empty()) continue;
      // comment lines: start with `c` and contain no cells
      if (l[0] == 'c' && (l.size() == 1 || l[1] == ' ') && l.find(',') == std::string_view::npos)
        continue;
      out = l;
      return true;
    }
    return false;
  };

  std::string_view header;
  if (!next_line(header)) throw ParseError("dataset is empty");
  std::vector<std::string> names = split_commas(header);

  long long target_index = -1, class_index = -1;
  std::vector<bool> dropped(names.size(), false);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!target_column.empty() && names[i] == target_column) target_index = i;
    if (!class_column.empty() && names[i] == class_column) class_index = i;
    for (const std::string& d : drop)
      if (names[i] == d) dropped[i] = true;
  }
  if (!target_column.empty() && target_index < 0)
    throw ParseError("target column '" + target_column + "' not in header");
  if (!class_column.empty() && class_index < 0)
    throw ParseError("class column '" + class_column + "' not in header");

  DatasetTable table;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (static_cast<long long>(i) != target_index && static_cast<long long>(i) != class_index &&
        !dropped[i])
      table.columns.push_back(names[i]);

  std::string_view row_text;
  while (next_line(row_text)) {
    std::vector<std::string> cells = split_commas(row_text);
    if (cells.size() != names.size())
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(names.size()),
                       line);
    std::vector<std::uint8_t> features;
    features.reserve(table.columns.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (static_cast<long long>(i) == target_index) {
        table.targets.push_back(parse_double(cells[i], line));
      } else if (static_cast<long long>(i) == class_index) {
        if (cells[i] != "0" && cells[i] != "1")
          throw ParseError("class column '" + names[i] + "' must be 0/1, got '" + cells[i] + "'",
                           line);
        table.labels.push_back(cells[i] == "1");
      } else if (!dropped[i]) {
        if (cells[i] != "0" && cells[i] != "1")
          throw ParseError("column '" + names[i] + "' must be 0/1, got '" + cells[i] + "'", line);
        features.push_back(cells[i] == "1");
      }
    }
    table.rows.push_back(std::move(features));
  }
  return table;
}

NaiveBayesModel parse_nb_model(std::string_view text) {
  LineReader reader{text};
  std::vector<std::string_view> tok;
  std::size_t line = 0;
  if (!reader.next(tok, line) || tok.size() != 2 || tok[0] != "nb-model" || tok[1] != "v1")
    throw ParseError("expected header 'nb-model v1'", line);
  NaiveBayesModel out;
  bool saw_prior = false;
  while (reader.next(tok, line)) {
    if (tok[0] == "prior") {
      if (tok.size() != 2 || saw_prior) throw ParseError("bad prior line", line);
      out.class_prior = parse_double(tok[1], line);
      saw_prior = true;
    } else {
      if (tok.size() != 3)
        throw ParseError("expected '<feature> <theta|c> <theta|!c>'", line);
      out.theta_given_c.push_back(parse_double(tok[1], line));
      out.theta_given_not_c.push_back(parse_double(tok[2], line));
    }
  }
  if (!saw_prior) throw ParseError("nb-model file lacks a prior line");
  return out;
}

std::string serialize_nb_model(const NaiveBayesModel& model) {
  std::ostringstream os;
  os << "nb-model v1\n";
  os << "prior " << render_double(model.class_prior) << "\n";
  for (std::size_t i = 0; i < model.feature_count(); ++i)
    os << "x" << (i + 1) << " " << render_double(model.theta_given_c[i]) << " "
       << render_double(model.theta_given_not_c[i]) << "\n";
  return os.str();
}

LinearModel parse_linear_model(std::string_view text) {
  LineReader reader{text};
  std::vector<std::string_view> tok;
  std::size_t line = 0;
  if (!reader.next(tok, line) || tok.size() != 2 || tok[0] != "linear-model" || tok[1] != "v1")
    throw ParseError("expected header 'linear-model v1'", line);
  LinearModel out;
  while (reader.next(tok, line)) {
    if (tok[0] == "bias") {
      if (tok.size() != 2) throw ParseError("bad bias line", line);
      out.bias = parse_double(tok[1], line);
    } else {
      if (tok.size() != 2) throw ParseError("expected '<feature> <weight>'", line);
      out.weights.push_back(parse_double(tok[1], line));
    }
  }
  return out;
}

std::string serialize_linear_model(const LinearModel& model) {
  std::ostringstream os;
  os << "linear-model v1\n";
  os << "bias " << render_double(model.bias) << "\n";
  for (std::size_t i = 0; i < model.feature_count(); ++i)
    os << "x" << (i + 1) << " " << render_double(model.weights[i]) << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ParseError("failed while writing '" + path + "'");
}

Circuit load_circuit_file(const std::string& path, std::shared_ptr<const Vtree> vtree) {
  std::string text = read_file(path);
  if (!vtree) {
    // Resolve the header's vtree token relative to the circuit file.
    LineReader reader{text};
    std::vector<std::string_view> tok;
    std::size_t line = 0;
    if (!reader.next(tok, line) || tok.size() != 3)
      throw ParseError("expected header 'pc v1 <vtree-file>' or 'rc v1 <vtree-file>'", line);
    std::filesystem::path vt_path = std::filesystem::path(path).parent_path() / std::string(tok[2]);
    vtree = parse_vtree(read_file(vt_path.string()));
  }
  return parse_circuit(text, std::move(vtree));
}

}  // namespace pcm
