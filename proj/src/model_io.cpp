#include "grf/model_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>
#include <vector>

#include "grf/error.hpp"

namespace grf {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError, "not a real number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (c <= ' ' || c == '%' || c >= 0x7f) {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out.empty() ? "%" : out;
}

std::string unescape(const std::string& s) {
  if (s == "%") return {};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

void write_trees(std::ostream& os, const Forest& forest) {
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const Tree& tree = forest.trees[t];
    os << "tree " << t << " seed " << tree.seed << " n_bootstrap " << tree.n_bootstrap_rows
       << " n_nodes " << tree.nodes.size() << '\n';
    // Storage order is already pre-order (left child immediately follows).
    std::function<void(std::size_t)> emit = [&](std::size_t i) {
      const TreeNode& node = tree.nodes[i];
      if (node.is_leaf()) {
        os << 'L';
      } else {
        os << "I " << node.split->feature << ' ' << format_double(node.split->threshold) << ' '
           << format_double(node.gain);
      }
      for (Count c : node.counts.counts()) os << ' ' << c;
      os << '\n';
      if (!node.is_leaf()) {
        emit(static_cast<std::size_t>(node.left));
        emit(static_cast<std::size_t>(node.right));
      }
    };
    emit(0);
  }
  os << "end\n";
}

[[noreturn]] void format_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kModelFormat, "line " + std::to_string(line) + ": " + what);
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::vector<std::string> next() {
    std::string line;
    if (!std::getline(in_, line)) format_error(line_no_ + 1, "unexpected end of model");
    ++line_no_;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) format_error(line_no_, "empty line");
    return tokens;
  }

  std::vector<std::string> expect(std::string_view key, std::size_t min_tokens = 2) {
    auto tokens = next();
    if (tokens[0] != key || tokens.size() < min_tokens) {
      format_error(line_no_, "expected '" + std::string(key) + "'");
    }
    return tokens;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;
};

std::uint64_t to_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) format_error(line, "bad integer '" + s + "'");
  return v;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    return parse_double(s);
  } catch (const Error&) {
    format_error(line, "bad real '" + s + "'");
  }
}

}  // namespace

std::string serialize_trees(const Forest& forest) {
  std::ostringstream os;
  write_trees(os, forest);
  return os.str();
}

std::string serialize_forest(const Forest& forest) {
  const ForestConfig& c = forest.config;
  std::ostringstream os;
  os << "grf-model 1\n";
  os << "mode " << mode_name(c.mode) << '\n';
  os << "master_seed " << c.master_seed << '\n';
  os << "gamma " << format_double(c.resolved_gamma()) << '\n';
  os << "n_trees " << forest.trees.size() << '\n';
  os << "n_features " << forest.n_features << '\n';
  os << "n_classes " << forest.n_classes << '\n';
  os << "mtry " << c.mtry << '\n';
  os << "min_leaf_size " << c.min_leaf_size << '\n';
  os << "max_depth " << (c.max_depth ? std::to_string(*c.max_depth) : std::string("none")) << '\n';
  os << "bootstrap " << (c.bootstrap ? 1 : 0) << '\n';
  os << "rrf_lambda " << format_double(c.rrf_lambda) << '\n';
  os << "classes";
  for (int k = 0; k < forest.n_classes; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    os << ' ' << escape(idx < forest.class_names.size() ? forest.class_names[idx] : std::to_string(k));
  }
  os << '\n';
  os << "lambda";
  for (double l : forest.weights_used.lambda) os << ' ' << format_double(l);
  os << '\n';
  write_trees(os, forest);
  return os.str();
}

Forest parse_forest(const std::string& text) {
  LineReader in(text);
  auto magic = in.expect("grf-model");
  if (magic[1] != "1") format_error(in.line(), "unsupported model version " + magic[1]);

  Forest forest;
  ForestConfig& c = forest.config;
  try {
    c.mode = parse_mode(in.expect("mode")[1]);
  } catch (const Error& e) {
    format_error(in.line(), e.what());
  }
  c.master_seed = to_u64(in.expect("master_seed")[1], in.line());
  c.gamma = to_double(in.expect("gamma")[1], in.line());
  c.n_trees = to_u64(in.expect("n_trees")[1], in.line());
  forest.n_features = to_u64(in.expect("n_features")[1], in.line());
  forest.n_classes = static_cast<int>(to_u64(in.expect("n_classes")[1], in.line()));
  c.mtry = to_u64(in.expect("mtry")[1], in.line());
  c.min_leaf_size = to_u64(in.expect("min_leaf_size")[1], in.line());
  const auto depth = in.expect("max_depth")[1];
  if (depth != "none") c.max_depth = static_cast<int>(to_u64(depth, in.line()));
  c.bootstrap = to_u64(in.expect("bootstrap")[1], in.line()) != 0;
  c.rrf_lambda = to_double(in.expect("rrf_lambda")[1], in.line());
  c.workers = 0;

  auto classes = in.expect("classes", 1);
  if (classes.size() != static_cast<std::size_t>(forest.n_classes) + 1) {
    format_error(in.line(), "class name count does not match n_classes");
  }
  for (std::size_t i = 1; i < classes.size(); ++i) forest.class_names.push_back(unescape(classes[i]));

  auto lambda = in.expect("lambda", 1);
  if (lambda.size() != forest.n_features + 1) format_error(in.line(), "lambda count does not match n_features");
  forest.weights_used.gamma = c.resolved_gamma();
  for (std::size_t i = 1; i < lambda.size(); ++i) forest.weights_used.lambda.push_back(to_double(lambda[i], in.line()));

  const std::size_t n_classes = static_cast<std::size_t>(forest.n_classes);
  for (std::size_t t = 0; t < c.n_trees; ++t) {
    auto header = in.expect("tree", 8);
    if (to_u64(header[1], in.line()) != t || header[2] != "seed" || header[4] != "n_bootstrap" ||
        header[6] != "n_nodes") {
      format_error(in.line(), "malformed tree header");
    }
    Tree tree;
    tree.n_features = forest.n_features;
    tree.n_classes = forest.n_classes;
    tree.seed = to_u64(header[3], in.line());
    tree.n_bootstrap_rows = to_u64(header[5], in.line());
    const auto n_nodes = to_u64(header[7], in.line());

    std::function<std::int32_t()> read_node = [&]() -> std::int32_t {
      if (tree.nodes.size() >= n_nodes) format_error(in.line(), "more nodes than declared");
      auto tok = in.next();
      const bool leaf = tok[0] == "L";
      if (!leaf && tok[0] != "I") format_error(in.line(), "unknown node kind '" + tok[0] + "'");
      const std::size_t first_count = leaf ? 1 : 4;
      if (tok.size() != first_count + n_classes) format_error(in.line(), "wrong field count in node record");
      std::vector<Count> counts;
      for (std::size_t i = first_count; i < tok.size(); ++i) {
        counts.push_back(static_cast<Count>(to_u64(tok[i], in.line())));
      }
      const auto index = static_cast<std::int32_t>(tree.nodes.size());
      TreeNode node;
      node.counts = ClassCounts(std::move(counts));
      node.n_node = node.counts.total();
      node.predicted_class = node.counts.majority_class();
      if (!leaf) {
        const auto feature = to_u64(tok[1], in.line());
        if (feature >= forest.n_features) format_error(in.line(), "split feature out of range");
        node.split = SplitSpec{feature, to_double(tok[2], in.line())};
        node.gain = to_double(tok[3], in.line());
      }
      tree.nodes.push_back(std::move(node));
      if (!leaf) {
        const auto left = read_node();
        const auto right = read_node();
        tree.nodes[static_cast<std::size_t>(index)].left = left;
        tree.nodes[static_cast<std::size_t>(index)].right = right;
      }
      return index;
    };
    read_node();
    if (tree.nodes.size() != n_nodes) format_error(in.line(), "fewer nodes than declared");
    forest.trees.push_back(std::move(tree));
  }
  in.expect("end", 1);
  return forest;
}

void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << serialize_forest(forest);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path + "'");
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_forest(ss.str());
}

}  // namespace grf
