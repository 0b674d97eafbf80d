#include "nntc/formula.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <sstream>

namespace nntc {

int EtrInvFormula::intern(const std::string& name) {
    for (const auto& v : variables)
        if (v.name == name) return v.index;
    int idx = static_cast<int>(variables.size());
    variables.push_back({idx, name});
    return idx;
}

bool EtrInvFormula::operator==(const EtrInvFormula& o) const {
    return variables == o.variables && constraints == o.constraints;
}

namespace {

struct LineScanner {
    const std::string& s;
    int line;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    int col() const { return static_cast<int>(pos) + 1; }
    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        if (done() || !(std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            throw SyntaxError("expected identifier", line, col());
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(start, pos - start);
    }
    void expect(char c) {
        skip_ws();
        if (peek() != c)
            throw SyntaxError(std::string("expected '") + c + "'", line, col());
        ++pos;
    }
};

} // namespace

EtrInvFormula parse_etr_inv(std::istream& in) {
    EtrInvFormula f;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        LineScanner sc{line, lineno};
        sc.skip_ws();
        if (sc.done()) continue;

        std::string lhs1 = sc.ident();
        sc.skip_ws();
        char op = sc.peek();
        if (op != '+' && op != '*')
            throw SyntaxError("expected '+' or '*'", lineno, sc.col());
        ++sc.pos;
        std::string lhs2 = sc.ident();
        sc.expect('=');
        sc.skip_ws();
        if (op == '+') {
            if (sc.done() || !(std::isalpha(static_cast<unsigned char>(sc.peek())) || sc.peek() == '_'))
                throw UnsupportedConstraint(
                    "right-hand side of an addition must be a variable", lineno, sc.col());
            std::string rhs = sc.ident();
            sc.skip_ws();
            if (!sc.done())
                throw SyntaxError("trailing input after constraint", lineno, sc.col());
            int x = f.intern(lhs1), y = f.intern(lhs2), z = f.intern(rhs);
            f.constraints.push_back(Addition{x, y, z});
        } else {
            int at = sc.col();
            if (sc.peek() != '1')
                throw UnsupportedConstraint(
                    "right-hand side of an inversion must be the literal 1", lineno, at);
            ++sc.pos;
            sc.skip_ws();
            if (!sc.done())
                throw UnsupportedConstraint(
                    "right-hand side of an inversion must be the literal 1", lineno, at);
            int x = f.intern(lhs1), y = f.intern(lhs2);
            f.constraints.push_back(Inversion{x, y});
        }
    }
    return f;
}

EtrInvFormula parse_etr_inv(const std::string& text) {
    std::istringstream in(text);
    return parse_etr_inv(in);
}

std::string print_etr_inv(const EtrInvFormula& f) {
    std::ostringstream out;
    for (const auto& c : f.constraints) {
        if (const auto* add = std::get_if<Addition>(&c)) {
            out << f.variables[add->x].name << " + " << f.variables[add->y].name
                << " = " << f.variables[add->z].name << "\n";
        } else {
            const auto& inv = std::get<Inversion>(c);
            out << f.variables[inv.x].name << " * " << f.variables[inv.y].name
                << " = 1\n";
        }
    }
    return out.str();
}

SatisfactionReport evaluate_formula(const EtrInvFormula& f, const Assignment& a,
                                    std::optional<Scalar> tolerance) {
    if (a.values.size() != f.variables.size())
        throw MissingVariable("assignment does not cover all variables");
    SatisfactionReport rep;
    rep.satisfied = true;
    Scalar::Mode mode = a.mode();
    Scalar one = Scalar::one(mode);
    for (const auto& c : f.constraints) {
        Scalar r = Scalar::zero(mode);
        if (const auto* add = std::get_if<Addition>(&c)) {
            r = a.values[add->x] + a.values[add->y] - a.values[add->z];
        } else {
            const auto& inv = std::get<Inversion>(c);
            r = a.values[inv.x] * a.values[inv.y] - one;
        }
        bool ok = tolerance ? (r.abs() <= *tolerance) : r.is_zero();
        if (!ok) rep.satisfied = false;
        rep.residuals.push_back(std::move(r));
    }
    return rep;
}

std::optional<Assignment> brute_force_search(const EtrInvFormula& f,
                                             const std::vector<Scalar>& grid,
                                             std::uint64_t budget) {
    if (grid.empty()) throw Error("empty grid");
    const int n = f.var_count();
    std::vector<size_t> idx(n, 0);
    std::uint64_t visited = 0;
    while (true) {
        if (++visited > budget) throw BudgetExceeded("grid budget exhausted");
        Assignment a;
        a.values.reserve(n);
        for (int i = 0; i < n; ++i) a.values.push_back(grid[idx[i]]);
        if (evaluate_formula(f, a).satisfied) return a;
        int i = n - 1;
        for (; i >= 0; --i) {
            if (++idx[i] < grid.size()) break;
            idx[i] = 0;
        }
        if (i < 0) return std::nullopt;
    }
}

Assignment parse_assignment(const EtrInvFormula& f, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("assignment: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("assignment: expected a JSON object");
    Assignment a;
    a.values.resize(f.variables.size());
    std::vector<bool> seen(f.variables.size(), false);
    for (auto& [name, val] : j.items()) {
        int idx = -1;
        for (const auto& v : f.variables)
            if (v.name == name) idx = v.index;
        if (idx < 0) throw SchemaError("assignment: unknown variable '" + name + "'");
        if (val.is_string())
            a.values[idx] = Scalar::parse_exact(val.get<std::string>());
        else if (val.is_number())
            a.values[idx] = Scalar::floating(val.get<double>());
        else
            throw SchemaError("assignment: value for '" + name + "' must be a string or number");
        seen[idx] = true;
    }
    for (size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw MissingVariable("assignment: missing '" + f.variables[i].name + "'");
    for (size_t i = 1; i < a.values.size(); ++i)
        if (a.values[i].mode() != a.values[0].mode())
            throw ModeMismatch("assignment mixes exact and float values");
    return a;
}

std::string print_assignment(const EtrInvFormula& f, const Assignment& a) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& v : f.variables) {
        const Scalar& s = a.values.at(v.index);
        if (s.is_exact())
            j[v.name] = s.str();
        else
            j[v.name] = s.flt();
    }
    return j.dump(2) + "\n";
}

} // namespace nntc
