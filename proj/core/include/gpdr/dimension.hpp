#pragma once

#include "gpdr/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace gpdr {

// Exponent of the time unit carried by a value: minutes^d with rational d.
using DimExp = Rational;

enum class Term : std::uint8_t { P, I, M, V, PN, PW, CR, Alpha, Beta };
inline constexpr int kNumTerminals = 9;

enum class TermKind : std::uint8_t { Variable, EphemeralInt, EphemeralReal };

struct TerminalDef {
  Term term;
  std::string_view name;
  DimExp dim;
  TermKind kind;
};

const std::array<TerminalDef, kNumTerminals>& terminal_set();
const TerminalDef& terminal_def(Term t);
std::optional<Term> terminal_from_name(std::string_view name);
// Terminal class = all terminals sharing a unit exponent (ephemerals are
// dimensionless members).
std::vector<Term> terminals_with_dim(const DimExp& dim);

enum class Op : std::uint8_t { Add, Sub, Mul, Div, Max, Min, Sq, Sqrt, IfThenElse };
inline constexpr int kNumOps = 9;

struct FunctionDef {
  Op op;
  std::string_view name;
  int arity;
  // 1: needs equal child units, keeps them; 2: adds exponents; 3: subtracts;
  // 4: doubles; 5: halves; 6: needs equal branch units, passes them through
  int func_class;
};

const std::array<FunctionDef, kNumOps>& function_table();
const FunctionDef& function_def(Op op);
std::optional<Op> op_from_name(std::string_view name);

// Square is evaluable and a legal repair substitute, but never generated.
std::span<const Op> generation_ops();

int class_arity(int func_class);
// Classes an operator of the given class may be retyped to without changing
// arity or breaking more than its unit constraint.
std::span<const int> replacement_classes(int func_class);

struct DimMismatch {
  DimExp a, b;  // the two child units that disagree
};

// Strict typing: the unit a node produces, or the violating pair.
std::variant<DimExp, DimMismatch> output_dim(int func_class, std::span<const DimExp> child_dims);

struct ExprNode;
struct Individual;

struct TreeDim {
  DimExp root_dim;  // midpoint-propagated at inconsistent nodes
  Rational gap;     // summed child mismatches plus |root_dim - target|
};

// Soft typing: an inconsistent node contributes |d1 - d2| to the gap and
// propagates the midpoint, so partial repairs reduce the gap smoothly.
TreeDim tree_dim_gap(const ExprNode& root, const DimExp& target);
// tree1 measured against exponent 0 (multiplier on M), tree2 against 1 (minutes).
Rational individual_dim_gap(const Individual& ind);
bool is_consistent(const Individual& ind);

}  // namespace gpdr
