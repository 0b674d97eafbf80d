#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nntc/formula.hpp"
#include "support/corpus.hpp"

using namespace nntc;

namespace {
Scalar q(long long n, long long d = 1) { return Scalar::exact(n, d); }
}

TEST_CASE("parses the two constraint forms") {
    EtrInvFormula f = parse_etr_inv("x + y = z\nx * y = 1\n");
    REQUIRE(f.constraints.size() == 2);
    CHECK(f.variables.size() == 3);
    CHECK(std::get<Addition>(f.constraints[0]) == Addition{0, 1, 2});
    CHECK(std::get<Inversion>(f.constraints[1]) == Inversion{0, 1});
}

TEST_CASE("variables may coincide within one constraint") {
    EtrInvFormula f = parse_etr_inv("x * x = 1\n");
    CHECK(std::get<Inversion>(f.constraints[0]) == Inversion{0, 0});
    CHECK(f.var_count() == 1);
}

TEST_CASE("variable ids are dense and in first-occurrence order") {
    EtrInvFormula f = parse_etr_inv("b + a = c\na + a = d\n");
    REQUIRE(f.variables.size() == 4);
    CHECK(f.variables[0].name == "b");
    CHECK(f.variables[1].name == "a");
    CHECK(f.variables[2].name == "c");
    CHECK(f.variables[3].name == "d");
    for (int i = 0; i < 4; ++i) CHECK(f.variables[i].index == i);
}

TEST_CASE("comments and blank lines are skipped") {
    EtrInvFormula f = parse_etr_inv("# header\n\nx + y = z # trailing\n");
    CHECK(f.constraints.size() == 1);
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_etr_inv("x + y = z\nx +\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
        CHECK(e.column > 0);
    }
}

TEST_CASE("inversion right-hand sides other than 1 are unsupported") {
    CHECK_THROWS_AS(parse_etr_inv("x * y = 2\n"), UnsupportedConstraint);
    CHECK_THROWS_AS(parse_etr_inv("x * y = z\n"), UnsupportedConstraint);
}

TEST_CASE("addition right-hand side must be a variable") {
    CHECK_THROWS_AS(parse_etr_inv("x + y = 1\n"), SyntaxError);
}

TEST_CASE("print and re-parse is the identity") {
    for (const auto& entry : corpus::entries()) {
        EtrInvFormula f = parse_etr_inv(entry.text);
        CHECK(parse_etr_inv(print_etr_inv(f)) == f);
    }
}

TEST_CASE("evaluation computes per-constraint residuals") {
    EtrInvFormula f = parse_etr_inv("x + y = z\n");
    SatisfactionReport r = evaluate_formula(f, {{q(1), q(2), q(3)}});
    CHECK(r.satisfied);
    CHECK(r.residuals[0] == q(0));

    f = parse_etr_inv("x * y = 1\n");
    CHECK(evaluate_formula(f, {{q(2), q(1, 2)}}).satisfied);
}

TEST_CASE("rational approximation of an irrational solution misses exactly") {
    EtrInvFormula f = parse_etr_inv("x + x = y\nx * y = 1\n");
    SatisfactionReport r =
        evaluate_formula(f, {{q(7071, 10000), q(7071, 5000)}});
    CHECK(!r.satisfied);
    CHECK(r.residuals[0] == q(0));
    CHECK(r.residuals[1] == q(49999041, 50000000) - q(1));  // (7071/10000)*(7071/5000) - 1
}

TEST_CASE("float evaluation honors the tolerance") {
    EtrInvFormula f = parse_etr_inv("x + x = y\nx * y = 1\n");
    double x = 0.7071067811865476;
    Assignment a{{Scalar::floating(x), Scalar::floating(2 * x)}};
    CHECK(evaluate_formula(f, a, Scalar::floating(1e-12)).satisfied);
    CHECK(!evaluate_formula(f, a, Scalar::floating(1e-18)).satisfied);
}

TEST_CASE("missing variables are rejected") {
    EtrInvFormula f = parse_etr_inv("x + y = z\n");
    CHECK_THROWS_AS(evaluate_formula(f, {{q(1), q(2)}}), MissingVariable);
}

TEST_CASE("brute force finds the forced and the first solution") {
    std::vector<Scalar> grid = {q(-1), q(0), q(1)};
    auto r = brute_force_search(parse_etr_inv("x + x = x\n"), grid);
    REQUIRE(r);
    CHECK(r->values[0] == q(0));

    std::vector<Scalar> g6 = {q(-2), q(-1), q(-1, 2), q(1, 2), q(1), q(2)};
    r = brute_force_search(parse_etr_inv("x * y = 1\n"), g6);
    REQUIRE(r);
    CHECK(r->values[0] == q(-2));
    CHECK(r->values[1] == q(-1, 2));
}

TEST_CASE("brute force result always satisfies the formula") {
    std::vector<Scalar> grid = {q(-2), q(-1), q(1), q(2), q(3)};
    for (const auto& entry : corpus::entries()) {
        EtrInvFormula f = parse_etr_inv(entry.text);
        if (f.var_count() > 5) continue;
        try {
            auto r = brute_force_search(f, grid);
            if (r) CHECK(evaluate_formula(f, *r).satisfied);
        } catch (const BudgetExceeded&) {
        }
    }
}

TEST_CASE("unsatisfiable formula yields no grid hit") {
    std::vector<Scalar> grid = {q(-2), q(-1), q(0), q(1), q(2)};
    CHECK(!brute_force_search(parse_etr_inv("x + x = x\nx * y = 1\n"), grid));
}

TEST_CASE("budget is enforced") {
    // products on the grid {0,2} are 0 or 4, so a*b=1 never holds and the
    // search must visit all 2^24 assignments
    std::vector<Scalar> grid = {q(0), q(2)};
    EtrInvFormula f = parse_etr_inv(
        "a + b = c\nd + e = g\nh + i = j\nk + l = m\nn + o = p\nr + s = t\n"
        "u + v = w\nx + y = z\na * b = 1\n");
    CHECK_THROWS_AS(brute_force_search(f, grid, 1000), BudgetExceeded);
}

TEST_CASE("assignment files round trip") {
    EtrInvFormula f = parse_etr_inv("x + y = z\n");
    Assignment a{{q(1), q(-2, 3), q(1, 3)}};
    Assignment b = parse_assignment(f, print_assignment(f, a));
    CHECK(b.values == a.values);
    CHECK_THROWS_AS(parse_assignment(f, R"({"x":"1","y":"2"})"), MissingVariable);
    CHECK_THROWS_AS(parse_assignment(f, "not json"), SchemaError);
}

TEST_CASE("corpus solutions satisfy their formulas") {
    int with_solution = 0;
    for (const auto& entry : corpus::entries()) {
        EtrInvFormula f = parse_etr_inv(entry.text);
        if (!entry.solution) continue;
        ++with_solution;
        Assignment a = parse_assignment(f, entry.solution);
        CHECK_MESSAGE(evaluate_formula(f, a).satisfied, entry.name);
        for (const auto& v : a.values) CHECK(!v.is_zero());
    }
    CHECK(with_solution >= 20);
    CHECK(corpus::entries().size() == 25);
}
