#include "gpdr/repair.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

namespace gpdr {

namespace {

void build_nodes(const ExprNode& n, int depth, std::vector<RepairNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  RepairNode rn;
  rn.depth = depth;
  rn.weight = Rational(1, depth);
  rn.is_terminal = n.leaf;
  if (n.leaf)
    rn.terminal_dim = terminal_def(n.term).dim;
  else
    rn.func_class = function_def(n.op).func_class;
  nodes.push_back(std::move(rn));
  for (const auto& c : n.children) {
    nodes[index].children.push_back(static_cast<int>(nodes.size()));
    build_nodes(c, depth + 1, nodes);
  }
}

}  // namespace

RepairProblem build_problem(const ExprTree& tree, const DimExp& target) {
  RepairProblem p;
  p.target = target;
  p.nodes.reserve(tree.size());
  build_nodes(tree, 1, p.nodes);
  return p;
}

namespace {

// Lexicographic (cost, changed-count); both are additive over independent
// subtrees, so keeping one best entry per achievable unit is exact.
struct Choice {
  Rational cost;
  int changed = 0;
  int chosen_class = 0;            // 0 for terminals
  std::vector<DimExp> child_dims;  // lookup keys into the children's tables
};

using DimTable = std::map<DimExp, Choice>;

bool better(const Choice& a, const Choice& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.changed < b.changed;
}

void offer(DimTable& table, const DimExp& dim, Choice cand) {
  auto it = table.find(dim);
  if (it == table.end())
    table.emplace(dim, std::move(cand));
  else if (better(cand, it->second))
    it->second = std::move(cand);
}

// The two terminal classes: dimensionless and minutes.
const DimExp kTerminalDims[] = {DimExp(0), DimExp(1)};

DimTable solve_node(const RepairProblem& p, int index, std::vector<DimTable>& tables) {
  const RepairNode& node = p.nodes[index];
  DimTable table;

  if (node.is_terminal) {
    for (const DimExp& d : kTerminalDims) {
      const bool changed = d != node.terminal_dim;
      offer(table, d, {changed ? node.weight : Rational(0), changed ? 1 : 0, 0, {}});
    }
    return table;
  }

  std::vector<const DimTable*> child(node.children.size());
  for (std::size_t c = 0; c < node.children.size(); ++c)
    child[c] = &tables[node.children[c]];

  for (int cls : replacement_classes(node.func_class)) {
    const bool retyped = cls != node.func_class;
    const Rational base_cost = retyped ? node.weight : Rational(0);
    const int base_changed = retyped ? 1 : 0;

    switch (cls) {
      case 1:
        for (const auto& [d, e1] : *child[0]) {
          auto it = child[1]->find(d);
          if (it == child[1]->end()) continue;
          offer(table, d,
                {base_cost + e1.cost + it->second.cost,
                 base_changed + e1.changed + it->second.changed, cls, {d, d}});
        }
        break;
      case 2:
      case 3:
        for (const auto& [d1, e1] : *child[0])
          for (const auto& [d2, e2] : *child[1]) {
            const DimExp d = cls == 2 ? d1 + d2 : d1 - d2;
            offer(table, d,
                  {base_cost + e1.cost + e2.cost, base_changed + e1.changed + e2.changed,
                   cls, {d1, d2}});
          }
        break;
      case 4:
      case 5:
        for (const auto& [d1, e1] : *child[0]) {
          const DimExp d = cls == 4 ? d1.twice() : d1.half();
          offer(table, d, {base_cost + e1.cost, base_changed + e1.changed, cls, {d1}});
        }
        break;
      case 6: {
        // the condition branch is unconstrained: take its cheapest option
        const DimExp* best_dim = nullptr;
        const Choice* best = nullptr;
        for (const auto& [d1, e1] : *child[0])
          if (!best || better(e1, *best)) {
            best = &e1;
            best_dim = &d1;
          }
        if (!best) break;
        for (const auto& [d, e2] : *child[1]) {
          auto it = child[2]->find(d);
          if (it == child[2]->end()) continue;
          offer(table, d,
                {base_cost + best->cost + e2.cost + it->second.cost,
                 base_changed + best->changed + e2.changed + it->second.changed, cls,
                 {*best_dim, d, d}});
        }
        break;
      }
    }
  }
  return table;
}

void reconstruct(const RepairProblem& p, const std::vector<DimTable>& tables, int index,
                 const DimExp& dim, RepairSolution& sol) {
  const RepairNode& node = p.nodes[index];
  const Choice& choice = tables[index].at(dim);
  NodeAssignment a;
  a.node = index;
  a.is_terminal = node.is_terminal;
  if (node.is_terminal) {
    a.dim = dim;
    a.changed = dim != node.terminal_dim;
  } else {
    a.func_class = choice.chosen_class;
    a.changed = choice.chosen_class != node.func_class;
  }
  if (a.changed) ++sol.changed_count;
  sol.assignment[index] = a;
  for (std::size_t c = 0; c < node.children.size(); ++c)
    reconstruct(p, tables, node.children[c], choice.child_dims[c], sol);
}

}  // namespace

std::optional<RepairSolution> solve_repair(const RepairProblem& p) {
  std::vector<DimTable> tables(p.nodes.size());
  // children precede nothing in preorder, so fill bottom-up by index descent
  for (int i = static_cast<int>(p.nodes.size()) - 1; i >= 0; --i)
    tables[i] = solve_node(p, i, tables);

  const auto it = tables[0].find(p.target);
  if (it == tables[0].end()) return std::nullopt;

  RepairSolution sol;
  sol.objective = it->second.cost;
  sol.assignment.resize(p.nodes.size());
  reconstruct(p, tables, 0, p.target, sol);
  return sol;
}

namespace {

Term roulette_terminal(const std::vector<Term>& members, const TerminalFreqs* freqs, Rng& rng) {
  std::vector<double> weights(members.size(), 1.0);
  if (freqs) {
    double total = 0.0;
    for (std::size_t m = 0; m < members.size(); ++m) {
      weights[m] = (*freqs)[static_cast<std::size_t>(members[m])];
      total += weights[m];
    }
    if (total <= 0.0) weights.assign(members.size(), 1.0);  // empty archive: uniform
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t m = 0; m < members.size(); ++m) {
    u -= weights[m];
    if (u < 0.0) return members[m];
  }
  return members.back();
}

ExprNode replacement_leaf(const DimExp& dim, const TerminalFreqs* freqs, Rng& rng) {
  const std::vector<Term> members = terminals_with_dim(dim);
  const Term t = roulette_terminal(members, freqs, rng);
  double value = 0.0;
  if (terminal_def(t).kind == TermKind::EphemeralInt)
    value = static_cast<double>(rng.uniform_int(0, 2));
  if (terminal_def(t).kind == TermKind::EphemeralReal) value = rng.uniform();
  return ExprNode::make_leaf(t, value);
}

Op replacement_op(int new_class, Op original) {
  switch (new_class) {
    case 1:
      // class 1 has several members: products retype to addition, quotients
      // to subtraction; operators already in class 1 keep their symbol
      switch (function_def(original).func_class) {
        case 1: return original;
        case 2: return Op::Add;
        case 3: return Op::Sub;
      }
      break;
    case 2: return Op::Mul;
    case 3: return Op::Div;
    case 4: return Op::Sq;
    case 5: return Op::Sqrt;
    case 6: return Op::IfThenElse;
  }
  throw std::invalid_argument("invalid class replacement");
}

void apply_impl(ExprNode& n, const RepairSolution& sol, int& index, const TerminalFreqs* freqs,
                Rng& rng) {
  const NodeAssignment& a = sol.assignment[index];
  ++index;
  if (a.changed) {
    if (a.is_terminal)
      n = replacement_leaf(a.dim, freqs, rng);
    else
      n.op = replacement_op(a.func_class, n.op);
  }
  for (auto& c : n.children) apply_impl(c, sol, index, freqs, rng);
}

}  // namespace

ExprTree apply_solution(const ExprTree& tree, const RepairSolution& solution,
                        const TerminalFreqs* freqs, Rng& rng) {
  ExprTree out = tree;
  int index = 0;
  apply_impl(out, solution, index, freqs, rng);
  return out;
}

namespace {

// Guaranteed-consistent replacement for the rare repair dead end.
ExprTree fresh_consistent_tree(const DimExp& target, Rng& rng) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    ExprTree t = random_tree(2, 4, GrowMethod::Grow, rng);
    if (tree_dim_gap(t, target).gap == Rational(0)) return t;
    auto sol = solve_repair(build_problem(t, target));
    if (sol) return apply_solution(t, *sol, nullptr, rng);
  }
  return ExprNode::make_leaf(target == DimExp(0) ? Term::I : Term::M);
}

}  // namespace

Individual repair_individual(const Individual& ind, const TerminalFreqs* freqs, Rng& rng,
                             RepairStats* stats) {
  constexpr int kMaxIterations = 50;
  RepairStats local;
  RepairStats& st = stats ? *stats : local;

  Individual out = ind;
  auto fix = [&](ExprTree& tree, const DimExp& target) {
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      if (tree_dim_gap(tree, target).gap == Rational(0)) return;
      auto sol = solve_repair(build_problem(tree, target));
      ++st.solver_calls;
      st.changed = true;
      if (sol) {
        tree = apply_solution(tree, *sol, freqs, rng);
      } else {
        mutate_tree(tree, rng);
        ++st.infeasible_mutations;
        st.shape_preserved = false;
      }
    }
    if (tree_dim_gap(tree, target).gap != Rational(0)) {
      tree = fresh_consistent_tree(target, rng);
      ++st.fallbacks;
      st.shape_preserved = false;
    }
  };
  fix(out.tree1, DimExp(0));
  fix(out.tree2, DimExp(1));
  if (st.changed) out.fitness.reset();
  return out;
}

}  // namespace gpdr
