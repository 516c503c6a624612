#include "gpdr/dimension.hpp"

#include "gpdr/tree.hpp"

#include <stdexcept>

namespace gpdr {

const std::array<TerminalDef, kNumTerminals>& terminal_set() {
  static const std::array<TerminalDef, kNumTerminals> defs = {{
      {Term::P, "P", DimExp(0), TermKind::Variable},
      {Term::I, "i", DimExp(0), TermKind::Variable},
      {Term::M, "M", DimExp(1), TermKind::Variable},
      {Term::V, "V", DimExp(1), TermKind::Variable},
      {Term::PN, "PN", DimExp(0), TermKind::Variable},
      {Term::PW, "PW", DimExp(0), TermKind::Variable},
      {Term::CR, "CR", DimExp(0), TermKind::Variable},
      {Term::Alpha, "alpha", DimExp(0), TermKind::EphemeralInt},
      {Term::Beta, "beta", DimExp(0), TermKind::EphemeralReal},
  }};
  return defs;
}

const TerminalDef& terminal_def(Term t) {
  return terminal_set()[static_cast<std::size_t>(t)];
}

std::optional<Term> terminal_from_name(std::string_view name) {
  for (const auto& d : terminal_set())
    if (d.name == name) return d.term;
  return std::nullopt;
}

std::vector<Term> terminals_with_dim(const DimExp& dim) {
  std::vector<Term> out;
  for (const auto& d : terminal_set())
    if (d.dim == dim) out.push_back(d.term);
  return out;
}

const std::array<FunctionDef, kNumOps>& function_table() {
  static const std::array<FunctionDef, kNumOps> defs = {{
      {Op::Add, "add", 2, 1},
      {Op::Sub, "sub", 2, 1},
      {Op::Mul, "mul", 2, 2},
      {Op::Div, "div", 2, 3},
      {Op::Max, "max", 2, 1},
      {Op::Min, "min", 2, 1},
      {Op::Sq, "sq", 1, 4},
      {Op::Sqrt, "sqrt", 1, 5},
      {Op::IfThenElse, "if", 3, 6},
  }};
  return defs;
}

const FunctionDef& function_def(Op op) {
  return function_table()[static_cast<std::size_t>(op)];
}

std::optional<Op> op_from_name(std::string_view name) {
  for (const auto& d : function_table())
    if (d.name == name) return d.op;
  return std::nullopt;
}

std::span<const Op> generation_ops() {
  static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div,
                           Op::Max, Op::Min, Op::Sqrt, Op::IfThenElse};
  return ops;
}

int class_arity(int func_class) {
  switch (func_class) {
    case 1: case 2: case 3: return 2;
    case 4: case 5: return 1;
    case 6: return 3;
  }
  throw std::invalid_argument("unknown function class");
}

std::span<const int> replacement_classes(int func_class) {
  static const int binary[] = {1, 2, 3};
  static const int unary[] = {4, 5};
  static const int ternary[] = {6};
  switch (func_class) {
    case 1: case 2: case 3: return binary;
    case 4: case 5: return unary;
    case 6: return ternary;
  }
  throw std::invalid_argument("unknown function class");
}

std::variant<DimExp, DimMismatch> output_dim(int func_class, std::span<const DimExp> d) {
  switch (func_class) {
    case 1:
      if (d[0] == d[1]) return d[0];
      return DimMismatch{d[0], d[1]};
    case 2: return d[0] + d[1];
    case 3: return d[0] - d[1];
    case 4: return d[0].twice();
    case 5: return d[0].half();
    case 6:
      if (d[1] == d[2]) return d[1];
      return DimMismatch{d[1], d[2]};
  }
  throw std::invalid_argument("unknown function class");
}

namespace {

TreeDim annotate(const ExprNode& n) {
  if (n.leaf) return {terminal_def(n.term).dim, Rational(0)};

  Rational gap(0);
  std::vector<DimExp> dims;
  dims.reserve(n.children.size());
  for (const auto& c : n.children) {
    TreeDim td = annotate(c);
    gap += td.gap;
    dims.push_back(td.root_dim);
  }

  const int fc = function_def(n.op).func_class;
  DimExp dim(0);
  switch (fc) {
    case 1:
      if (dims[0] == dims[1]) {
        dim = dims[0];
      } else {
        dim = (dims[0] + dims[1]).half();
        gap += abs(dims[0] - dims[1]);
      }
      break;
    case 2: dim = dims[0] + dims[1]; break;
    case 3: dim = dims[0] - dims[1]; break;
    case 4: dim = dims[0].twice(); break;
    case 5: dim = dims[0].half(); break;
    case 6:
      if (dims[1] == dims[2]) {
        dim = dims[1];
      } else {
        dim = (dims[1] + dims[2]).half();
        gap += abs(dims[1] - dims[2]);
      }
      break;
  }
  return {dim, gap};
}

}  // namespace

TreeDim tree_dim_gap(const ExprNode& root, const DimExp& target) {
  TreeDim td = annotate(root);
  td.gap += abs(td.root_dim - target);
  return td;
}

Rational individual_dim_gap(const Individual& ind) {
  return tree_dim_gap(ind.tree1, DimExp(0)).gap + tree_dim_gap(ind.tree2, DimExp(1)).gap;
}

bool is_consistent(const Individual& ind) {
  return individual_dim_gap(ind) == Rational(0);
}

}  // namespace gpdr
