#include "gpdr/tree.hpp"

#include "gpdr/sim.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace gpdr {

ExprNode ExprNode::make_leaf(Term t, double ephemeral) {
  ExprNode n;
  n.leaf = true;
  n.term = t;
  n.value = ephemeral;
  return n;
}

ExprNode ExprNode::make_func(Op op, std::vector<ExprNode> ch) {
  assert(static_cast<int>(ch.size()) == function_def(op).arity);
  ExprNode n;
  n.leaf = false;
  n.op = op;
  n.children = std::move(ch);
  return n;
}

int ExprNode::size() const {
  int s = 1;
  for (const auto& c : children) s += c.size();
  return s;
}

int ExprNode::depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

double evaluate(const ExprNode& n, const EvalContext& ctx) {
  if (n.leaf) {
    switch (n.term) {
      case Term::P: return ctx.P;
      case Term::I: return ctx.i;
      case Term::M: return ctx.M;
      case Term::V: return ctx.V;
      case Term::PN: return ctx.PN;
      case Term::PW: return ctx.PW;
      case Term::CR: return ctx.CR;
      case Term::Alpha:
      case Term::Beta: return n.value;
    }
  }
  switch (n.op) {
    case Op::Add: return evaluate(n.children[0], ctx) + evaluate(n.children[1], ctx);
    case Op::Sub: return evaluate(n.children[0], ctx) - evaluate(n.children[1], ctx);
    case Op::Mul: return evaluate(n.children[0], ctx) * evaluate(n.children[1], ctx);
    case Op::Div: {
      double num = evaluate(n.children[0], ctx);
      double den = evaluate(n.children[1], ctx);
      return std::abs(den) < kDivEpsilon ? kDivFallback : num / den;
    }
    case Op::Max: return std::max(evaluate(n.children[0], ctx), evaluate(n.children[1], ctx));
    case Op::Min: return std::min(evaluate(n.children[0], ctx), evaluate(n.children[1], ctx));
    case Op::Sq: {
      double x = evaluate(n.children[0], ctx);
      return x * x;
    }
    case Op::Sqrt: return std::sqrt(std::abs(evaluate(n.children[0], ctx)));
    case Op::IfThenElse:
      return evaluate(n.children[0], ctx) > 0.0 ? evaluate(n.children[1], ctx)
                                                : evaluate(n.children[2], ctx);
  }
  return 0.0;  // unreachable
}

namespace {

template <typename Node>
Node* node_at_impl(Node& root, int& index) {
  if (index == 0) return &root;
  --index;
  for (auto& c : root.children) {
    Node* found = node_at_impl(c, index);
    if (found) return found;
  }
  return nullptr;
}

}  // namespace

const ExprNode* node_at(const ExprNode& root, int preorder_index) {
  return node_at_impl(root, preorder_index);
}

ExprNode* node_at(ExprNode& root, int preorder_index) {
  return node_at_impl(root, preorder_index);
}

std::vector<double> clamp_schedule(std::vector<double> raw, double session_length) {
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double prev = i > 0 ? out[i - 1] : 0.0;
    double a = raw[i];
    if (a < 0.0) a = 0.0;
    if (a < prev) a = prev;
    if (a > session_length) a = prev;
    out[i] = a;
  }
  return out;
}

std::vector<double> compute_schedule(const Individual& ind, const ClinicConfig& clinic) {
  std::vector<double> raw(clinic.P);
  for (int i = 0; i < clinic.P; ++i) {
    const EvalContext ctx{static_cast<double>(clinic.P), static_cast<double>(i),
                          clinic.M, clinic.V, clinic.PN, clinic.PW, clinic.CR};
    raw[i] = evaluate(ind.tree1, ctx) * clinic.M + evaluate(ind.tree2, ctx);
  }
  return clamp_schedule(std::move(raw), clinic.L);
}

namespace {

ExprNode random_leaf(Rng& rng) {
  const auto& terms = terminal_set();
  const auto& def = terms[static_cast<std::size_t>(rng.uniform_int(0, kNumTerminals - 1))];
  double value = 0.0;
  if (def.kind == TermKind::EphemeralInt) value = static_cast<double>(rng.uniform_int(0, 2));
  if (def.kind == TermKind::EphemeralReal) value = rng.uniform();
  return ExprNode::make_leaf(def.term, value);
}

ExprNode random_func_node(int depth, int min_depth, int max_depth, GrowMethod method, Rng& rng);

ExprNode random_node(int depth, int min_depth, int max_depth, GrowMethod method, Rng& rng) {
  if (depth >= max_depth) return random_leaf(rng);
  if (method == GrowMethod::Full || depth < min_depth)
    return random_func_node(depth, min_depth, max_depth, method, rng);
  // grow: one uniform draw over the combined symbol set
  const auto ops = generation_ops();
  const std::int64_t pick = rng.uniform_int(0, kNumTerminals + static_cast<int>(ops.size()) - 1);
  if (pick < kNumTerminals) {
    const auto& def = terminal_set()[static_cast<std::size_t>(pick)];
    double value = 0.0;
    if (def.kind == TermKind::EphemeralInt) value = static_cast<double>(rng.uniform_int(0, 2));
    if (def.kind == TermKind::EphemeralReal) value = rng.uniform();
    return ExprNode::make_leaf(def.term, value);
  }
  const Op op = ops[static_cast<std::size_t>(pick - kNumTerminals)];
  std::vector<ExprNode> ch;
  ch.reserve(function_def(op).arity);
  for (int a = 0; a < function_def(op).arity; ++a)
    ch.push_back(random_node(depth + 1, min_depth, max_depth, method, rng));
  return ExprNode::make_func(op, std::move(ch));
}

ExprNode random_func_node(int depth, int min_depth, int max_depth, GrowMethod method, Rng& rng) {
  const auto ops = generation_ops();
  const Op op = ops[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(ops.size()) - 1))];
  std::vector<ExprNode> ch;
  ch.reserve(function_def(op).arity);
  for (int a = 0; a < function_def(op).arity; ++a)
    ch.push_back(random_node(depth + 1, min_depth, max_depth, method, rng));
  return ExprNode::make_func(op, std::move(ch));
}

void truncate_to_depth(ExprNode& n, int depth, int max_depth, Rng& rng) {
  if (!n.leaf && depth >= max_depth) {
    n = random_leaf(rng);
    return;
  }
  for (auto& c : n.children) truncate_to_depth(c, depth + 1, max_depth, rng);
}

}  // namespace

ExprTree random_tree(int min_depth, int max_depth, GrowMethod method, Rng& rng) {
  if (max_depth <= 1) return random_leaf(rng);
  return random_node(1, min_depth, max_depth, method, rng);
}

std::vector<Individual> ramped_init(int count, Rng& rng) {
  std::vector<Individual> pop;
  pop.reserve(count);
  auto draw_tree = [&rng] {
    const int depth = static_cast<int>(rng.uniform_int(2, 6));
    const GrowMethod method = rng.uniform_int(0, 1) == 0 ? GrowMethod::Grow : GrowMethod::Full;
    return random_tree(2, depth, method, rng);
  };
  for (int k = 0; k < count; ++k) {
    Individual ind;
    ind.tree1 = draw_tree();
    ind.tree2 = draw_tree();
    pop.push_back(std::move(ind));
  }
  return pop;
}

void mutate_tree(ExprTree& tree, Rng& rng) {
  constexpr int kRetries = 10;
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    const int idx = static_cast<int>(rng.uniform_int(0, tree.size() - 1));
    ExprTree replacement = random_tree(1, 4, GrowMethod::Grow, rng);
    ExprTree candidate = tree;
    *node_at(candidate, idx) = std::move(replacement);
    if (candidate.depth() <= kMaxTreeDepth) {
      tree = std::move(candidate);
      return;
    }
    if (attempt == kRetries) {
      truncate_to_depth(candidate, 1, kMaxTreeDepth, rng);
      tree = std::move(candidate);
      return;
    }
  }
}

void subtree_mutation(Individual& ind, Rng& rng) {
  if (rng.uniform_int(0, 1) == 0)
    mutate_tree(ind.tree1, rng);
  else
    mutate_tree(ind.tree2, rng);
  ind.fitness.reset();
}

std::pair<Individual, Individual> cs_crossover(const Individual& a, const Individual& b, Rng& rng) {
  constexpr int kRetries = 10;
  const bool cross_first = rng.uniform_int(0, 1) == 0;
  const ExprTree& ta = cross_first ? a.tree1 : a.tree2;
  const ExprTree& tb = cross_first ? b.tree1 : b.tree2;

  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    const int ia = static_cast<int>(rng.uniform_int(0, ta.size() - 1));
    const int ib = static_cast<int>(rng.uniform_int(0, tb.size() - 1));
    ExprTree ca = ta;
    ExprTree cb = tb;
    ExprNode* na = node_at(ca, ia);
    ExprNode* nb = node_at(cb, ib);
    std::swap(*na, *nb);
    if (ca.depth() > kMaxTreeDepth || cb.depth() > kMaxTreeDepth) continue;

    Individual o1, o2;
    if (cross_first) {
      o1.tree1 = std::move(ca);
      o1.tree2 = b.tree2;
      o2.tree1 = std::move(cb);
      o2.tree2 = a.tree2;
    } else {
      o1.tree1 = b.tree1;
      o1.tree2 = std::move(ca);
      o2.tree1 = a.tree1;
      o2.tree2 = std::move(cb);
    }
    return {std::move(o1), std::move(o2)};
  }
  // parent copy-through
  Individual o1 = a, o2 = b;
  o1.fitness.reset();
  o2.fitness.reset();
  return {std::move(o1), std::move(o2)};
}

ParseError::ParseError(const std::string& what, int pos)
    : std::runtime_error(what + " (at offset " + std::to_string(pos) + ")"), position(pos) {}

namespace {

std::string format_ephemeral(Term term, double value) {
  if (term == Term::Alpha) return std::to_string(static_cast<long long>(value));
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  // keep real-valued ephemerals distinguishable from integer ones
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

void to_prefix_impl(const ExprNode& n, std::string& out) {
  if (n.leaf) {
    const auto& def = terminal_def(n.term);
    if (def.kind == TermKind::Variable)
      out += def.name;
    else
      out += format_ephemeral(n.term, n.value);
    return;
  }
  out += '(';
  out += function_def(n.op).name;
  for (const auto& c : n.children) {
    out += ' ';
    to_prefix_impl(c, out);
  }
  out += ')';
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos, msg); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw ParseError(msg, static_cast<int>(at));
  }

  std::string_view token() {
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != '(' &&
           text[pos] != ')')
      ++pos;
    if (pos == start) fail("expected a symbol");
    return text.substr(start, pos - start);
  }

  ExprNode parse_node() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    if (text[pos] == '(') {
      ++pos;
      skip_ws();
      const std::size_t name_pos = pos;
      std::string_view name = token();
      auto op = op_from_name(name);
      if (!op) fail_at(name_pos, "unknown operator '" + std::string(name) + "'");
      std::vector<ExprNode> ch;
      const int arity = function_def(*op).arity;
      for (int a = 0; a < arity; ++a) ch.push_back(parse_node());
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
      ++pos;
      return ExprNode::make_func(*op, std::move(ch));
    }
    if (text[pos] == ')') fail("unexpected ')'");
    const std::size_t name_pos = pos;
    std::string_view name = token();
    if (auto term = terminal_from_name(name)) {
      if (terminal_def(*term).kind != TermKind::Variable)
        fail_at(name_pos, "ephemeral terminals are written as literals");
      return ExprNode::make_leaf(*term);
    }
    // numeric literal: real-valued -> beta, integer -> alpha
    const std::string s(name);
    const bool real = s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
                      s.find('E') != std::string::npos;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) fail_at(name_pos, "unknown symbol '" + s + "'");
    return ExprNode::make_leaf(real ? Term::Beta : Term::Alpha, v);
  }

  ExprNode parse_whole() {
    ExprNode n = parse_node();
    skip_ws();
    if (pos != text.size()) fail("trailing input");
    return n;
  }
};

}  // namespace

std::string to_prefix(const ExprNode& n) {
  std::string out;
  to_prefix_impl(n, out);
  return out;
}

std::string to_string(const Individual& ind) {
  return to_prefix(ind.tree1) + " | " + to_prefix(ind.tree2);
}

ExprTree parse_tree(std::string_view text) {
  Parser p{text};
  return p.parse_whole();
}

Individual parse_individual(std::string_view text) {
  const std::size_t bar = text.find('|');
  if (bar == std::string_view::npos)
    throw ParseError("expected 'tree1 | tree2'", static_cast<int>(text.size()));
  Individual ind;
  ind.tree1 = parse_tree(text.substr(0, bar));
  ind.tree2 = parse_tree(text.substr(bar + 1));
  return ind;
}

}  // namespace gpdr
