#pragma once

#include "gpdr/dimension.hpp"
#include "gpdr/rng.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpdr {

inline constexpr int kMaxTreeDepth = 8;  // root counts as depth 1

// Division guard: |denominator| below the threshold evaluates to the fallback.
inline constexpr double kDivEpsilon = 1e-12;
inline constexpr double kDivFallback = 1e6;

struct EvalContext {
  double P, i, M, V, PN, PW, CR;
};

struct ExprNode {
  bool leaf = true;
  Term term = Term::I;
  double value = 0.0;  // payload of alpha/beta leaves
  Op op = Op::Add;
  std::vector<ExprNode> children;

  static ExprNode make_leaf(Term t, double ephemeral = 0.0);
  static ExprNode make_func(Op op, std::vector<ExprNode> ch);

  int size() const;
  int depth() const;  // deepest node, root at 1
};

using ExprTree = ExprNode;

double evaluate(const ExprNode& n, const EvalContext& ctx);

// Preorder addressing shared by the genetic operators and the repair solver.
const ExprNode* node_at(const ExprNode& root, int preorder_index);
ExprNode* node_at(ExprNode& root, int preorder_index);

struct Individual {
  ExprTree tree1;  // dimensionless multiplier on M
  ExprTree tree2;  // additive term in minutes
  std::optional<double> fitness;

  int size() const { return tree1.size() + tree2.size(); }
  int max_depth() const { return std::max(tree1.depth(), tree2.depth()); }
};

struct ClinicConfig;

// A_i = tree1(i)·M + tree2(i), then feasibility clamping.
std::vector<double> clamp_schedule(std::vector<double> raw, double session_length);
std::vector<double> compute_schedule(const Individual& ind, const ClinicConfig& clinic);

enum class GrowMethod { Grow, Full };
ExprTree random_tree(int min_depth, int max_depth, GrowMethod method, Rng& rng);
// Ramped half-and-half: depth uniform on [2,6] and method uniform, drawn
// independently for each of the two trees.
std::vector<Individual> ramped_init(int count, Rng& rng);

// Subtree replacement with a fresh grow tree of depth <= 4; depth-bound
// violations retry up to 10 times, then deep branches truncate to terminals.
void mutate_tree(ExprTree& tree, Rng& rng);
void subtree_mutation(Individual& ind, Rng& rng);
// One tree (index drawn once per pair) undergoes subtree crossover; the other
// is swapped whole. Depth violations retry up to 10 times, then the offspring
// fall back to parent copies.
std::pair<Individual, Individual> cs_crossover(const Individual& a, const Individual& b, Rng& rng);

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int position);
  int position;
};

std::string to_prefix(const ExprNode& n);
std::string to_string(const Individual& ind);  // "tree1 | tree2"
ExprTree parse_tree(std::string_view text);
Individual parse_individual(std::string_view text);

}  // namespace gpdr
