#pragma once

#include "gpdr/dimension.hpp"
#include "gpdr/tree.hpp"

#include <array>
#include <optional>
#include <vector>

namespace gpdr {

// Minimal-change retyping problem over one tree: choose a class per node
// (terminal class = unit exponent; function class per the dimensional-operation
// grouping) minimizing the depth-weighted count of changed nodes subject to
// strict unit consistency with the target exponent at the root.
struct RepairNode {
  bool is_terminal = false;
  int depth = 1;          // root = 1
  Rational weight;        // 1/depth
  DimExp terminal_dim;    // original terminal class
  int func_class = 0;     // original function class
  std::vector<int> children;
};

struct RepairProblem {
  std::vector<RepairNode> nodes;  // preorder; node 0 is the root
  DimExp target;
};

RepairProblem build_problem(const ExprTree& tree, const DimExp& target);

struct NodeAssignment {
  int node = 0;
  bool is_terminal = false;
  DimExp dim;          // assigned terminal class
  int func_class = 0;  // assigned function class
  bool changed = false;
};

struct RepairSolution {
  Rational objective;
  int changed_count = 0;
  std::vector<NodeAssignment> assignment;  // one per node, preorder
};

// Exact bottom-up dynamic program: per node, the best (cost, changed count)
// for every achievable unit exponent. Returns nullopt when no class
// assignment can reach the target.
std::optional<RepairSolution> solve_repair(const RepairProblem& problem);

using TerminalFreqs = std::array<int, kNumTerminals>;

// Rewrites changed nodes: functions take their class's unique member (class 1
// keeps the original operator when possible, else addition for products and
// subtraction for quotients); terminals are drawn from the target class,
// uniformly or roulette-weighted by archive frequencies; chosen ephemerals
// sample fresh values. Unchanged nodes are untouched.
ExprTree apply_solution(const ExprTree& tree, const RepairSolution& solution,
                        const TerminalFreqs* freqs, Rng& rng);

struct RepairStats {
  int solver_calls = 0;
  int infeasible_mutations = 0;
  int fallbacks = 0;
  bool shape_preserved = true;  // no mutation or fallback fired
  bool changed = false;
};

// Repairs tree1 to exponent 0 and tree2 to exponent 1. Infeasible solves
// mutate the tree and retry; the loop is bounded at 50 iterations per tree,
// after which the tree is replaced by a fresh consistent one.
Individual repair_individual(const Individual& ind, const TerminalFreqs* freqs, Rng& rng,
                             RepairStats* stats = nullptr);

}  // namespace gpdr
