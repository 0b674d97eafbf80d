#ifndef NNTC_COMBINED_HPP
#define NNTC_COMBINED_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nntc/formula.hpp"

namespace nntc {

// One signed power term s * v^e with s in {+1,-1} and e in {+1,-1}.
struct SignedTerm {
    int var = -1;
    int sign = +1;
    int exponent = +1;

    bool operator==(const SignedTerm&) const = default;
};

// The four first-layer weight slots of a variable gadget. A term maps to
// the slot carrying its value: +v -> value, -v -> negated, +1/v -> inverse,
// -1/v -> negated_inverse.
enum class SlotForm { value, negated, inverse, negated_inverse };

SlotForm slot_form(const SignedTerm& t);

// t1 + t2 - t3 = 0 in canonical sign order (+, +, -).
struct CombinedConstraint {
    std::array<SignedTerm, 3> terms;

    bool operator==(const CombinedConstraint&) const = default;
};

// Original variable -> surviving combined variable raised to +/-1.
struct BackmapEntry {
    int combined_var = -1;
    int exponent = +1;

    bool operator==(const BackmapEntry&) const = default;
};

// Defining expression for a fresh combined variable: the signed-term sum
// over earlier variables that yields its value in any satisfying solution.
struct FreshDef {
    int var = -1;
    std::vector<SignedTerm> terms;

    bool operator==(const FreshDef&) const = default;
};

struct CombinedFormula {
    std::vector<VarId> variables;
    std::vector<CombinedConstraint> constraints;
    std::vector<BackmapEntry> backmap;   // indexed by original variable index
    std::vector<FreshDef> fresh_defs;    // in evaluation order

    int var_count() const { return static_cast<int>(variables.size()); }
    int intern(const std::string& name);

    bool operator==(const CombinedFormula& o) const;
};

// Rewrites an addition/inversion formula into combined constraints only.
// Inversion partners are deduplicated with a union-find closure, then the
// higher-indexed partner of each pair is substituted by the inverse of the
// lower-indexed one. Self-inversions (x*x = 1) and duplicate slot uses
// inside one constraint are expanded with fresh tied variables; variables
// left without any constraint get a coverage constraint v + 1/v = s.
// The result is equisatisfiable with the input over assignments in which
// every combined variable is nonzero, which the downstream gadget layer
// requires anyway.
CombinedFormula lower_to_combined(const EtrInvFormula& f);

// The cleanup half of the lowering (duplicate-slot splitting + coverage),
// applicable to standalone combined formulas. Idempotent.
void normalize_combined(CombinedFormula& cf);

// Residual per constraint: s1*v1^e1 + s2*v2^e2 + s3*v3^e3. Throws
// DivisionByZero when an inverted variable is zero.
SatisfactionReport check_combined(const CombinedFormula& cf, const Assignment& a,
                                  std::optional<Scalar> tolerance = {});

// Line format: `[+|-]ident[^-1] [+|-]ident[^-1] [+|-]ident[^-1] = 0`.
std::string print_combined(const CombinedFormula& cf);
CombinedFormula parse_combined(const std::string& text);

// Maps a satisfying assignment of the source formula to one of the
// combined formula (resolving fresh-variable definitions), and back.
Assignment push_forward(const CombinedFormula& cf, const Assignment& original);
Assignment pull_back(const CombinedFormula& cf, const Assignment& combined);

} // namespace nntc

#endif
