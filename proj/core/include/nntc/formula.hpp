#ifndef NNTC_FORMULA_HPP
#define NNTC_FORMULA_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nntc/scalar.hpp"

namespace nntc {

// Dense variable handle. Index is the position in the owning formula's
// variable list; the name is the surface identifier.
struct VarId {
    int index = -1;
    std::string name;

    bool operator==(const VarId& o) const {
        return index == o.index && name == o.name;
    }
};

// x + y = z
struct Addition {
    int x, y, z;
    bool operator==(const Addition&) const = default;
};

// x * y = 1
struct Inversion {
    int x, y;
    bool operator==(const Inversion&) const = default;
};

using Constraint = std::variant<Addition, Inversion>;

// Conjunction of addition and inversion constraints over named real
// variables. Variables may repeat within a constraint.
struct EtrInvFormula {
    std::vector<VarId> variables;
    std::vector<Constraint> constraints;

    int var_count() const { return static_cast<int>(variables.size()); }

    // Returns the index of an existing variable, or adds a new one.
    int intern(const std::string& name);

    bool operator==(const EtrInvFormula& o) const;
};

// Total map variable index -> value; all values share one scalar mode.
struct Assignment {
    std::vector<Scalar> values;

    Scalar::Mode mode() const {
        return values.empty() ? Scalar::Mode::exact : values.front().mode();
    }
};

struct SatisfactionReport {
    bool satisfied = false;
    std::vector<Scalar> residuals;  // one per constraint, in order
};

// Parses the line-oriented surface syntax: one constraint per line,
// '#' starts a comment, blank lines ignored.
//   ident '+' ident '=' ident     addition
//   ident '*' ident '=' '1'      inversion
// Throws SyntaxError / UnsupportedConstraint with line and column.
EtrInvFormula parse_etr_inv(std::istream& in);
EtrInvFormula parse_etr_inv(const std::string& text);

// Inverse of parse_etr_inv up to whitespace; parse(print(f)) == f.
std::string print_etr_inv(const EtrInvFormula& f);

// Residual of Addition(x,y,z) is x+y-z, of Inversion(x,y) is x*y-1.
// Exact mode: satisfied iff every residual is zero. Float mode:
// satisfied iff every |residual| <= tolerance.
SatisfactionReport evaluate_formula(const EtrInvFormula& f, const Assignment& a,
                                    std::optional<Scalar> tolerance = {});

// Exhaustively tries all |grid|^n assignments in lexicographic order and
// returns the first satisfying one. A nullopt result does NOT prove
// unsatisfiability over the reals; it only rules out the grid. Visiting
// more than `budget` assignments raises BudgetExceeded.
std::optional<Assignment> brute_force_search(const EtrInvFormula& f,
                                             const std::vector<Scalar>& grid,
                                             std::uint64_t budget = 10'000'000);

// Assignment file: JSON object mapping variable name to scalar string.
Assignment parse_assignment(const EtrInvFormula& f, const std::string& json_text);
std::string print_assignment(const EtrInvFormula& f, const Assignment& a);

} // namespace nntc

#endif
