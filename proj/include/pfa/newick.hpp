#pragma once

// Newick parser for rooted bifurcating trees with branch lengths.
//
// Accepted grammar (whitespace allowed between tokens):
//   tree    := subtree ";"
//   subtree := "(" subtree "," subtree ")" [label] [":" length]
//            | label [":" length]
// Every non-root edge must carry a branch length. A branch length on the root
// is parsed and ignored. Internal labels are allowed and ignored. More or
// fewer than two children of an internal node is an error: the model's
// factor sampler assumes a strictly bifurcating topology.

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include "pfa/errors.hpp"
#include "pfa/tree.hpp"

namespace pfa {

namespace detail {

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  Phylogeny parse() {
    skip_ws();
    const int root = parse_subtree(/*is_root=*/true);
    skip_ws();
    if (!consume(';')) throw ValidationError(err("expected ';' at end of tree"));
    skip_ws();
    if (pos_ != text_.size()) throw ValidationError(err("trailing characters after ';'"));
    return Phylogeny(std::move(nodes_), root);
  }

 private:
  int parse_subtree(bool is_root) {
    skip_ws();
    int id;
    if (peek() == '(') {
      ++pos_;
      const int left = parse_subtree(false);
      skip_ws();
      if (peek() == ')')
        throw ValidationError(err("internal node with one child; tree must be bifurcating"));
      if (!consume(',')) throw ValidationError(err("expected ','"));
      const int right = parse_subtree(false);
      skip_ws();
      if (peek() == ',')
        throw ValidationError(err("multifurcation: internal nodes must have exactly two children"));
      if (!consume(')')) throw ValidationError(err("expected ')'"));
      id = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      nodes_[id].children = {left, right};
      nodes_[left].parent = id;
      nodes_[right].parent = id;
      parse_label();  // internal labels ignored
    } else {
      id = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      nodes_[id].label = parse_label();
      if (nodes_[id].label.empty()) throw ValidationError(err("expected a taxon label"));
    }
    skip_ws();
    if (peek() == ':') {
      ++pos_;
      nodes_[id].branch = parse_number();
    } else if (!is_root) {
      throw ValidationError(err("missing branch length"));
    }
    return id;
  }

  std::string parse_label() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ',' || c == ';' || c == ':' || c == '(' || c == ')' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double parse_number() {
    skip_ws();
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) throw ValidationError(err("malformed branch length"));
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string err(const std::string& what) const {
    return "newick parse error at position " + std::to_string(pos_) + ": " + what;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

inline Phylogeny parse_newick(std::string_view text) { return detail::NewickParser(text).parse(); }

inline std::string to_newick(const Phylogeny& tree) {
  std::string out;
  auto emit = [&](auto&& self, int id) -> void {
    const TreeNode& n = tree.node(id);
    if (n.is_tip()) {
      out += n.label;
    } else {
      out += '(';
      self(self, n.children[0]);
      out += ',';
      self(self, n.children[1]);
      out += ')';
    }
    if (id != tree.root()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, ":%.17g", n.branch);
      out += buf;
    }
  };
  emit(emit, tree.root());
  out += ';';
  return out;
}

}  // namespace pfa
