#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdr/sim.hpp"
#include "gpdr/tree.hpp"

#include <cmath>
#include <set>
#include <string>

using namespace gpdr;

namespace {

const EvalContext kCtx{10.0, 3.0, 21.0, 8.4, 0.15, 0.15, 0.1};

}  // namespace

TEST_CASE("evaluation matches direct arithmetic") {
  CHECK(evaluate(parse_tree("(add (mul 2 M) (min i V))"), kCtx) == doctest::Approx(45.0));
  CHECK(evaluate(parse_tree("(min (add (mul i M) (sqrt V)) (div P PN))"), kCtx) ==
        doctest::Approx(std::min(3.0 * 21.0 + std::sqrt(8.4), 10.0 / 0.15)));
  CHECK(evaluate(parse_tree("(sub (max P i) CR)"), kCtx) == doctest::Approx(9.9));
  CHECK(evaluate(parse_tree("(sq PW)"), kCtx) == doctest::Approx(0.0225));
  CHECK(evaluate(parse_tree("0.75"), kCtx) == doctest::Approx(0.75));
  CHECK(evaluate(parse_tree("2"), kCtx) == doctest::Approx(2.0));
}

TEST_CASE("protected operators") {
  // division by (near-)zero returns the fixed fallback
  CHECK(evaluate(parse_tree("(div i 0.0)"), kCtx) == doctest::Approx(1e6));
  CHECK(evaluate(parse_tree("(div M (sub V V))"), kCtx) == doctest::Approx(1e6));
  CHECK(evaluate(parse_tree("(div 1.0 1e-13)"), kCtx) == doctest::Approx(1e6));
  CHECK(evaluate(parse_tree("(div 1.0 1e-11)"), kCtx) == doctest::Approx(1e11));
  // square root acts on the magnitude
  CHECK(evaluate(parse_tree("(sqrt (sub i P))"), kCtx) == doctest::Approx(std::sqrt(7.0)));
  // branch picks "then" only for strictly positive conditions
  CHECK(evaluate(parse_tree("(if i M V)"), kCtx) == doctest::Approx(21.0));
  CHECK(evaluate(parse_tree("(if 0.0 M V)"), kCtx) == doctest::Approx(8.4));
  CHECK(evaluate(parse_tree("(if (sub i P) M V)"), kCtx) == doctest::Approx(8.4));
}

TEST_CASE("size, depth and preorder addressing") {
  const ExprTree t = parse_tree("(add (mul i M) V)");
  CHECK(t.size() == 5);
  CHECK(t.depth() == 3);
  CHECK(to_prefix(*node_at(t, 0)) == "(add (mul i M) V)");
  CHECK(to_prefix(*node_at(t, 1)) == "(mul i M)");
  CHECK(to_prefix(*node_at(t, 2)) == "i");
  CHECK(to_prefix(*node_at(t, 3)) == "M");
  CHECK(to_prefix(*node_at(t, 4)) == "V");
  CHECK(node_at(t, 5) == nullptr);

  ExprTree m = t;
  *node_at(m, 1) = ExprNode::make_leaf(Term::P);
  CHECK(to_prefix(m) == "(add P V)");
}

TEST_CASE("schedule clamping: frozen sequence") {
  const auto out = clamp_schedule({-5.0, 3.0, 2.0, 250.0, 7.0}, 210.0);
  CHECK(out == std::vector<double>{0.0, 3.0, 3.0, 3.0, 7.0});
  // a value exactly at the session end is kept
  CHECK(clamp_schedule({0.0, 210.0}, 210.0) == std::vector<double>{0.0, 210.0});
}

TEST_CASE("schedule clamping: invariants on random input") {
  Rng rng(42);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> raw(20);
    for (auto& v : raw) v = (rng.uniform() - 0.3) * 400.0;
    const auto out = clamp_schedule(raw, 210.0);
    double prev = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] >= 0.0);
      CHECK(out[i] <= 210.0);
      CHECK(out[i] >= prev);
      // untouched whenever the raw value was already feasible
      if (raw[i] >= prev && raw[i] <= 210.0 && raw[i] >= 0.0) CHECK(out[i] == raw[i]);
      prev = out[i];
    }
  }
}

TEST_CASE("appointment times combine both trees") {
  const ClinicConfig clinic = ClinicConfig::make(4, 0.4, 0.0, 0.0);
  CHECK(clinic.M == doctest::Approx(52.5));

  CHECK(compute_schedule(parse_individual("i | 0.0"), clinic) ==
        std::vector<double>{0.0, 52.5, 105.0, 157.5});
  CHECK(compute_schedule(parse_individual("(sub i 2) | 0.0"), clinic) ==
        std::vector<double>{0.0, 0.0, 0.0, 52.5});
  CHECK(compute_schedule(parse_individual("(mul i i) | 0.0"), clinic) ==
        std::vector<double>{0.0, 52.5, 210.0, 210.0});
  // additive tree contributes raw minutes
  CHECK(compute_schedule(parse_individual("i | (mul 2 M)"), clinic) ==
        std::vector<double>{105.0, 157.5, 210.0, 210.0});
}

TEST_CASE("random trees respect depth bounds") {
  Rng rng(7);
  for (int k = 0; k < 400; ++k) {
    const ExprTree grow = random_tree(2, 5, GrowMethod::Grow, rng);
    CHECK(grow.depth() >= 2);
    CHECK(grow.depth() <= 5);
    const ExprTree full = random_tree(2, 5, GrowMethod::Full, rng);
    CHECK(full.depth() == 5);  // full fills every path to the limit
  }
  CHECK(random_tree(1, 1, GrowMethod::Grow, rng).size() == 1);
}

TEST_CASE("generated trees never contain the square operator") {
  Rng rng(99);
  auto has_sq = [](const ExprNode& n, auto&& self) -> bool {
    if (!n.leaf && n.op == Op::Sq) return true;
    for (const auto& c : n.children)
      if (self(c, self)) return true;
    return false;
  };
  for (int k = 0; k < 300; ++k) {
    CHECK_FALSE(has_sq(random_tree(2, 6, GrowMethod::Grow, rng), has_sq));
    CHECK_FALSE(has_sq(random_tree(2, 6, GrowMethod::Full, rng), has_sq));
  }
}

TEST_CASE("ramped initialization: bounds, variety, unset fitness") {
  Rng rng(derive_seed(11, stream::init));
  const auto pop = ramped_init(128, rng);
  CHECK(pop.size() == 128);
  std::set<int> depths1;
  std::set<std::string> shapes;
  for (const auto& ind : pop) {
    CHECK_FALSE(ind.fitness.has_value());
    for (const ExprTree* t : {&ind.tree1, &ind.tree2}) {
      CHECK(t->depth() >= 2);
      CHECK(t->depth() <= 6);
    }
    depths1.insert(ind.tree1.depth());
    shapes.insert(to_string(ind));
  }
  CHECK(depths1.size() >= 4);    // the ramp actually spans several depths
  CHECK(shapes.size() >= 100);   // individuals are not clones
}

TEST_CASE("mutation keeps the depth budget and changes one tree") {
  Rng rng(2024);
  int changed1 = 0, changed2 = 0;
  for (int k = 0; k < 300; ++k) {
    Individual ind;
    ind.tree1 = random_tree(2, 6, GrowMethod::Grow, rng);
    ind.tree2 = random_tree(2, 6, GrowMethod::Grow, rng);
    ind.fitness = 1.0;
    const std::string before1 = to_prefix(ind.tree1);
    const std::string before2 = to_prefix(ind.tree2);
    subtree_mutation(ind, rng);
    CHECK(ind.tree1.depth() <= kMaxTreeDepth);
    CHECK(ind.tree2.depth() <= kMaxTreeDepth);
    CHECK_FALSE(ind.fitness.has_value());
    const bool c1 = to_prefix(ind.tree1) != before1;
    const bool c2 = to_prefix(ind.tree2) != before2;
    CHECK_FALSE((c1 && c2));  // at most one tree is touched
    changed1 += c1;
    changed2 += c2;
  }
  CHECK(changed1 > 50);
  CHECK(changed2 > 50);
}

TEST_CASE("mutation near the depth limit still terminates within bounds") {
  Rng rng(31337);
  for (int k = 0; k < 100; ++k) {
    ExprTree t = random_tree(8, 8, GrowMethod::Full, rng);
    REQUIRE(t.depth() == 8);
    mutate_tree(t, rng);
    CHECK(t.depth() <= kMaxTreeDepth);
  }
}

TEST_CASE("crossover swaps one slot whole and recombines the other") {
  Rng rng(5150);
  int recombined_first = 0, recombined_second = 0;
  for (int k = 0; k < 300; ++k) {
    Individual a, b;
    a.tree1 = random_tree(2, 5, GrowMethod::Grow, rng);
    a.tree2 = random_tree(2, 5, GrowMethod::Grow, rng);
    b.tree1 = random_tree(2, 5, GrowMethod::Grow, rng);
    b.tree2 = random_tree(2, 5, GrowMethod::Grow, rng);
    a.fitness = 1.0;
    b.fitness = 2.0;
    const auto [o1, o2] = cs_crossover(a, b, rng);

    CHECK_FALSE(o1.fitness.has_value());
    CHECK_FALSE(o2.fitness.has_value());
    CHECK(o1.max_depth() <= kMaxTreeDepth);
    CHECK(o2.max_depth() <= kMaxTreeDepth);
    // node material is conserved by subtree exchange
    CHECK(o1.size() + o2.size() == a.size() + b.size());

    const bool second_swapped_whole =
        to_prefix(o1.tree2) == to_prefix(b.tree2) && to_prefix(o2.tree2) == to_prefix(a.tree2);
    const bool first_swapped_whole =
        to_prefix(o1.tree1) == to_prefix(b.tree1) && to_prefix(o2.tree1) == to_prefix(a.tree1);
    CHECK((second_swapped_whole || first_swapped_whole));
    recombined_first += second_swapped_whole;
    recombined_second += first_swapped_whole;
  }
  CHECK(recombined_first > 50);   // both slots get selected for recombination
  CHECK(recombined_second > 50);
}

TEST_CASE("printing and parsing round-trip") {
  Rng rng(606);
  for (int k = 0; k < 300; ++k) {
    const ExprTree t = random_tree(2, 6, GrowMethod::Grow, rng);
    const std::string s = to_prefix(t);
    CHECK(to_prefix(parse_tree(s)) == s);
  }
  for (int k = 0; k < 100; ++k) {
    Individual ind;
    ind.tree1 = random_tree(2, 5, GrowMethod::Grow, rng);
    ind.tree2 = random_tree(2, 5, GrowMethod::Grow, rng);
    const std::string s = to_string(ind);
    CHECK(to_string(parse_individual(s)) == s);
  }
}

TEST_CASE("literal formatting distinguishes the two ephemeral kinds") {
  CHECK(to_prefix(ExprNode::make_leaf(Term::Alpha, 2.0)) == "2");
  CHECK(to_prefix(ExprNode::make_leaf(Term::Beta, 0.5)) == "0.5");
  CHECK(to_prefix(ExprNode::make_leaf(Term::Beta, 1.0)) == "1.0");

  const ExprTree a = parse_tree("2");
  CHECK(a.term == Term::Alpha);
  CHECK(a.value == 2.0);
  const ExprTree b = parse_tree("1.0");
  CHECK(b.term == Term::Beta);
  CHECK(b.value == 1.0);
  // round-trip keeps full double precision
  const ExprNode beta = ExprNode::make_leaf(Term::Beta, 0.123456789012345678);
  CHECK(parse_tree(to_prefix(beta)).value == beta.value);
}

TEST_CASE("parser tolerates extra whitespace") {
  CHECK(to_prefix(parse_tree("  ( add\t i   M )  ")) == "(add i M)");
  CHECK(to_string(parse_individual(" i |  ( mul PN V ) ")) == "i | (mul PN V)");
}

TEST_CASE("parser rejects malformed input with positions") {
  CHECK_THROWS_AS(parse_tree("(add i)"), ParseError);
  CHECK_THROWS_AS(parse_tree("(foo i M)"), ParseError);
  CHECK_THROWS_AS(parse_tree("i M"), ParseError);
  CHECK_THROWS_AS(parse_tree(""), ParseError);
  CHECK_THROWS_AS(parse_tree("(add i M"), ParseError);
  CHECK_THROWS_AS(parse_tree("(add i M))"), ParseError);
  CHECK_THROWS_AS(parse_tree("qq"), ParseError);
  CHECK_THROWS_AS(parse_individual("(add i M)"), ParseError);  // missing '|'
  try {
    parse_tree("(add i bogus)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position == 7);
    CHECK(std::string(e.what()).find("offset 7") != std::string::npos);
  }
}

TEST_CASE("identical seeds reproduce identical trees") {
  Rng a(derive_seed(123, stream::init)), b(derive_seed(123, stream::init));
  for (int k = 0; k < 50; ++k)
    CHECK(to_prefix(random_tree(2, 6, GrowMethod::Grow, a)) ==
          to_prefix(random_tree(2, 6, GrowMethod::Grow, b)));
  Rng c(derive_seed(124, stream::init));
  int diff = 0;
  for (int k = 0; k < 50; ++k)
    diff += to_prefix(random_tree(2, 6, GrowMethod::Grow, a)) !=
            to_prefix(random_tree(2, 6, GrowMethod::Grow, c));
  CHECK(diff > 25);
}
