#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "enumeration_oracle.hpp"
#include "gpdr/repair.hpp"

#include <map>
#include <string>
#include <vector>

using namespace gpdr;

namespace {

// re-derives the objective and consistency of a claimed solution from scratch
void check_solution_sound(const RepairProblem& p, const RepairSolution& sol,
                          const DimExp& target) {
  REQUIRE(sol.assignment.size() == p.nodes.size());
  Rational cost(0);
  int changed = 0;
  std::vector<DimExp> dim(p.nodes.size());
  for (int i = static_cast<int>(p.nodes.size()) - 1; i >= 0; --i) {
    const RepairNode& node = p.nodes[i];
    const NodeAssignment& a = sol.assignment[i];
    CHECK(a.node == i);
    CHECK(a.is_terminal == node.is_terminal);
    if (node.is_terminal) {
      CHECK(a.changed == (a.dim != node.terminal_dim));
      dim[i] = a.dim;
    } else {
      CHECK(a.changed == (a.func_class != node.func_class));
      bool in_class = false;
      for (int c : replacement_classes(node.func_class)) in_class |= c == a.func_class;
      CHECK(in_class);
      const auto& ch = node.children;
      switch (a.func_class) {
        case 1:
          REQUIRE(dim[ch[0]] == dim[ch[1]]);
          dim[i] = dim[ch[0]];
          break;
        case 2: dim[i] = dim[ch[0]] + dim[ch[1]]; break;
        case 3: dim[i] = dim[ch[0]] - dim[ch[1]]; break;
        case 4: dim[i] = dim[ch[0]].twice(); break;
        case 5: dim[i] = dim[ch[0]].half(); break;
        case 6:
          REQUIRE(dim[ch[1]] == dim[ch[2]]);
          dim[i] = dim[ch[1]];
          break;
        default: FAIL("bad class");
      }
    }
    if (a.changed) {
      cost += node.weight;
      ++changed;
    }
  }
  CHECK(dim[0] == target);
  CHECK(cost == sol.objective);
  CHECK(changed == sol.changed_count);
}

bool same_shape(const ExprNode& a, const ExprNode& b) {
  if (a.leaf != b.leaf || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_shape(a.children[i], b.children[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("problem construction: preorder, depths, weights") {
  const RepairProblem p = build_problem(parse_tree("(add (mul i M) V)"), DimExp(1));
  REQUIRE(p.nodes.size() == 5);
  CHECK(p.target == DimExp(1));

  CHECK_FALSE(p.nodes[0].is_terminal);
  CHECK(p.nodes[0].func_class == 1);
  CHECK(p.nodes[0].children == std::vector<int>{1, 4});
  CHECK_FALSE(p.nodes[1].is_terminal);
  CHECK(p.nodes[1].func_class == 2);
  CHECK(p.nodes[1].children == std::vector<int>{2, 3});
  CHECK(p.nodes[2].is_terminal);
  CHECK(p.nodes[2].terminal_dim == DimExp(0));
  CHECK(p.nodes[3].is_terminal);
  CHECK(p.nodes[3].terminal_dim == DimExp(1));
  CHECK(p.nodes[4].is_terminal);
  CHECK(p.nodes[4].terminal_dim == DimExp(1));

  const int depths[] = {1, 2, 3, 3, 2};
  for (int i = 0; i < 5; ++i) {
    CHECK(p.nodes[i].depth == depths[i]);
    CHECK(p.nodes[i].weight == Rational(1, depths[i]));
  }
}

TEST_CASE("two-leaf sum: cheapest fix retypes the deeper mismatched leaf") {
  const RepairProblem p = build_problem(parse_tree("(add i M)"), DimExp(1));
  const auto sol = solve_repair(p);
  REQUIRE(sol.has_value());
  CHECK(sol->objective == Rational(1, 2));
  CHECK(sol->changed_count == 1);
  CHECK_FALSE(sol->assignment[0].changed);  // the addition survives
  CHECK(sol->assignment[1].changed);        // i joins the minutes class
  CHECK(sol->assignment[1].dim == DimExp(1));
  CHECK_FALSE(sol->assignment[2].changed);
  check_solution_sound(p, *sol, DimExp(1));

  // toward exponent zero the other leaf is the one to move
  const auto sol0 = solve_repair(build_problem(parse_tree("(add i M)"), DimExp(0)));
  REQUIRE(sol0.has_value());
  CHECK(sol0->objective == Rational(1, 2));
  CHECK(sol0->assignment[2].changed);
  CHECK(sol0->assignment[2].dim == DimExp(0));
}

TEST_CASE("depth weighting prefers two deep fixes over one shallow") {
  // (add (add i i) M) at exponent 1: moving both inner leaves costs 1/3+1/3,
  // cheaper than retyping the root for 1
  const auto sol = solve_repair(build_problem(parse_tree("(add (add i i) M)"), DimExp(1)));
  REQUIRE(sol.has_value());
  CHECK(sol->objective == Rational(2, 3));
  CHECK(sol->changed_count == 2);
  CHECK(sol->assignment[2].changed);
  CHECK(sol->assignment[3].changed);
  CHECK_FALSE(sol->assignment[0].changed);
  CHECK_FALSE(sol->assignment[1].changed);
}

TEST_CASE("root retype to the squaring class") {
  const RepairProblem p = build_problem(parse_tree("(sqrt M)"), DimExp(2));
  const auto sol = solve_repair(p);
  REQUIRE(sol.has_value());
  CHECK(sol->objective == Rational(1));
  CHECK(sol->changed_count == 1);
  CHECK(sol->assignment[0].changed);
  CHECK(sol->assignment[0].func_class == 4);
  check_solution_sound(p, *sol, DimExp(2));

  Rng rng(1);
  const ExprTree repaired = apply_solution(parse_tree("(sqrt M)"), *sol, nullptr, rng);
  CHECK(to_prefix(repaired) == "(sq M)");
  CHECK(tree_dim_gap(repaired, DimExp(2)).gap == Rational(0));
}

TEST_CASE("already consistent trees solve at zero cost") {
  for (const char* text : {"i", "(mul PN PW)", "(sqrt (mul M V))", "(if P M V)"}) {
    const auto sol = solve_repair(build_problem(parse_tree(text), DimExp(1)));
    if (tree_dim_gap(parse_tree(text), DimExp(1)).gap == Rational(0)) {
      REQUIRE(sol.has_value());
      CHECK(sol->objective == Rational(0));
      CHECK(sol->changed_count == 0);
    }
  }
  const auto sol = solve_repair(build_problem(parse_tree("(sqrt (mul M V))"), DimExp(1)));
  REQUIRE(sol.has_value());
  CHECK(sol->objective == Rational(0));
}

TEST_CASE("infeasible targets are reported, not faked") {
  // a lone square root reaches exponents 0, 1/2 and 2 but never 1
  CHECK_FALSE(solve_repair(build_problem(parse_tree("(sqrt i)"), DimExp(1))).has_value());
  CHECK(solve_repair(build_problem(parse_tree("(sqrt i)"), DimExp(0))).has_value());
  CHECK(solve_repair(build_problem(parse_tree("(sqrt i)"), DimExp(1, 2))).has_value());
  CHECK(solve_repair(build_problem(parse_tree("(sqrt i)"), DimExp(2))).has_value());
  // a bare leaf can only be a terminal class
  CHECK_FALSE(solve_repair(build_problem(parse_tree("M"), DimExp(1, 2))).has_value());
  CHECK(solve_repair(build_problem(parse_tree("M"), DimExp(0))).has_value());
}

TEST_CASE("solver equals brute-force enumeration on random trees") {
  Rng rng(20250101);
  int done = 0, feasible_seen = 0, infeasible_seen = 0, changed_total = 0;
  while (done < 120) {
    const int depth = 2 + static_cast<int>(rng.uniform_int(0, 3));
    const ExprTree t = random_tree(1, depth, GrowMethod::Grow, rng);
    if (t.size() > 25) continue;
    const DimExp target = done % 2 == 0 ? DimExp(0) : DimExp(1);
    const RepairProblem p = build_problem(t, target);
    if (enum_oracle::work_estimate(p) > 500000.0) continue;

    const auto oracle = enum_oracle::enumerate(p, 100000000LL);
    REQUIRE_FALSE(oracle.overflow);
    const auto sol = solve_repair(p);
    REQUIRE(sol.has_value() == oracle.feasible);
    if (sol) {
      CHECK(sol->objective == oracle.cost);
      CHECK(sol->changed_count == oracle.changed);
      check_solution_sound(p, *sol, target);
      ++feasible_seen;
      changed_total += sol->changed_count;
    } else {
      ++infeasible_seen;
    }
    ++done;
  }
  CHECK(feasible_seen > 60);   // the sample exercises real repairs
  CHECK(infeasible_seen > 0);  // and the infeasible path
  CHECK(changed_total > 50);
}

TEST_CASE("retyped operators take their class's replacement symbol") {
  Rng rng(3);
  auto forced = [&](const char* text, int node, int cls) {
    const ExprTree t = parse_tree(text);
    const RepairProblem p = build_problem(t, DimExp(0));
    RepairSolution sol;
    sol.assignment.resize(p.nodes.size());
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      sol.assignment[i].node = static_cast<int>(i);
      sol.assignment[i].is_terminal = p.nodes[i].is_terminal;
      if (p.nodes[i].is_terminal)
        sol.assignment[i].dim = p.nodes[i].terminal_dim;
      else
        sol.assignment[i].func_class = p.nodes[i].func_class;
    }
    sol.assignment[node].changed = true;
    sol.assignment[node].func_class = cls;
    return to_prefix(apply_solution(t, sol, nullptr, rng));
  };

  CHECK(forced("(mul i i)", 0, 1) == "(add i i)");   // products soften to sums
  CHECK(forced("(div i i)", 0, 1) == "(sub i i)");   // quotients to differences
  CHECK(forced("(max i i)", 0, 1) == "(max i i)");   // class members keep their symbol
  CHECK(forced("(add i i)", 0, 2) == "(mul i i)");
  CHECK(forced("(add i i)", 0, 3) == "(div i i)");
  CHECK(forced("(sq i)", 0, 5) == "(sqrt i)");
  CHECK(forced("(sqrt i)", 0, 4) == "(sq i)");
}

TEST_CASE("replacement terminals come from the assigned class") {
  Rng rng(8);
  const ExprTree t = parse_tree("(max i M)");
  const RepairProblem p = build_problem(t, DimExp(1));
  const auto sol = solve_repair(p);
  REQUIRE(sol.has_value());
  CHECK(sol->assignment[1].changed);

  std::map<Term, int> seen;
  for (int k = 0; k < 600; ++k) {
    const ExprTree repaired = apply_solution(t, *sol, nullptr, rng);
    REQUIRE_FALSE(repaired.children[0].leaf == false);
    const Term leaf = repaired.children[0].term;
    ++seen[leaf];
    CHECK(terminal_def(leaf).dim == DimExp(1));
    CHECK(repaired.op == Op::Max);
    CHECK(to_prefix(repaired.children[1]) == "M");
    CHECK(tree_dim_gap(repaired, DimExp(1)).gap == Rational(0));
  }
  // uniform over the two members of the minutes class
  CHECK(seen[Term::M] > 200);
  CHECK(seen[Term::V] > 200);
}

TEST_CASE("ephemeral replacements sample fresh values") {
  Rng rng(14);
  const ExprTree t = parse_tree("(max M i)");  // toward 0 the left leaf must move
  const auto sol = solve_repair(build_problem(t, DimExp(0)));
  REQUIRE(sol.has_value());
  CHECK(sol->changed_count == 1);

  int alpha_vals = 0, beta_in_range = 0, alphas = 0, betas = 0;
  for (int k = 0; k < 2000; ++k) {
    const ExprTree repaired = apply_solution(t, *sol, nullptr, rng);
    for (const auto& c : repaired.children) {
      REQUIRE(c.leaf);
      CHECK(terminal_def(c.term).dim == DimExp(0));
      if (c.term == Term::Alpha) {
        ++alphas;
        if (c.value == 0.0 || c.value == 1.0 || c.value == 2.0) ++alpha_vals;
      } else if (c.term == Term::Beta) {
        ++betas;
        if (c.value >= 0.0 && c.value < 1.0) ++beta_in_range;
      } else {
        CHECK(c.value == 0.0);
      }
    }
  }
  CHECK(alphas > 100);
  CHECK(alphas == alpha_vals);
  CHECK(betas > 100);
  CHECK(betas == beta_in_range);
}

TEST_CASE("archive frequencies steer the terminal roulette") {
  const ExprTree t = parse_tree("(max i M)");
  const auto sol = solve_repair(build_problem(t, DimExp(1)));
  REQUIRE(sol.has_value());

  TerminalFreqs freqs{};
  freqs[static_cast<int>(Term::M)] = 9;
  freqs[static_cast<int>(Term::V)] = 1;
  Rng rng(21);
  int m_count = 0;
  const int n = 4000;
  for (int k = 0; k < n; ++k)
    if (apply_solution(t, *sol, &freqs, rng).children[0].term == Term::M) ++m_count;
  const double share = static_cast<double>(m_count) / n;
  CHECK(share == doctest::Approx(0.9).epsilon(0.03));

  // an all-zero table falls back to uniform
  TerminalFreqs zero{};
  int m_uniform = 0;
  for (int k = 0; k < n; ++k)
    if (apply_solution(t, *sol, &zero, rng).children[0].term == Term::M) ++m_uniform;
  CHECK(static_cast<double>(m_uniform) / n == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("individual repair: consistent input is returned untouched") {
  Individual ind = parse_individual("(div M V) | (mul i M)");
  ind.fitness = 4.5;
  Rng rng(33);
  RepairStats stats;
  const Individual out = repair_individual(ind, nullptr, rng, &stats);
  CHECK(to_string(out) == to_string(ind));
  CHECK(out.fitness == 4.5);
  CHECK(stats.solver_calls == 0);
  CHECK_FALSE(stats.changed);
  CHECK(stats.shape_preserved);
}

TEST_CASE("individual repair: solvable mismatch keeps the shape") {
  Individual ind = parse_individual("(add i M) | (add i M)");
  ind.fitness = 4.5;
  Rng rng(34);
  RepairStats stats;
  const Individual out = repair_individual(ind, nullptr, rng, &stats);
  CHECK(individual_dim_gap(out) == Rational(0));
  CHECK_FALSE(out.fitness.has_value());
  CHECK(stats.changed);
  CHECK(stats.shape_preserved);
  CHECK(stats.solver_calls == 2);
  CHECK(stats.infeasible_mutations == 0);
  CHECK(stats.fallbacks == 0);
  CHECK(same_shape(out.tree1, ind.tree1));
  CHECK(same_shape(out.tree2, ind.tree2));
}

TEST_CASE("individual repair: infeasible tree mutates until fixable") {
  Individual ind;
  ind.tree1 = parse_tree("i");
  ind.tree2 = parse_tree("(sqrt i)");  // can never reach exponent 1 unmutated
  Rng rng(35);
  RepairStats stats;
  const Individual out = repair_individual(ind, nullptr, rng, &stats);
  CHECK(individual_dim_gap(out) == Rational(0));
  CHECK(stats.infeasible_mutations >= 1);
  CHECK_FALSE(stats.shape_preserved);
}

TEST_CASE("repair soundness sweep over ramped individuals") {
  Rng init(derive_seed(404, stream::init));
  const auto pop = ramped_init(1500, init);
  int preserved = 0, changed = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    Rng rng(derive_seed(404, stream::repair, kTestGeneration, i));
    RepairStats stats;
    const Individual out = repair_individual(pop[i], nullptr, rng, &stats);
    CHECK(individual_dim_gap(out) == Rational(0));
    CHECK(out.max_depth() <= kMaxTreeDepth);
    if (stats.shape_preserved) {
      CHECK(same_shape(out.tree1, pop[i].tree1));
      CHECK(same_shape(out.tree2, pop[i].tree2));
      ++preserved;
    }
    changed += stats.changed;
  }
  CHECK(preserved > 1000);  // mutation is the exception, not the rule
  CHECK(changed > 1000);    // random individuals rarely start consistent
}

TEST_CASE("repair is deterministic for a fixed seed") {
  Rng init(derive_seed(55, stream::init));
  const auto pop = ramped_init(40, init);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    Rng a(derive_seed(9, stream::repair, 0, i)), b(derive_seed(9, stream::repair, 0, i));
    CHECK(to_string(repair_individual(pop[i], nullptr, a)) ==
          to_string(repair_individual(pop[i], nullptr, b)));
  }
}
