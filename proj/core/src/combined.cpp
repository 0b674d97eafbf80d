#include "nntc/combined.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace nntc {

SlotForm slot_form(const SignedTerm& t) {
    if (t.sign > 0)
        return t.exponent > 0 ? SlotForm::value : SlotForm::inverse;
    return t.exponent > 0 ? SlotForm::negated : SlotForm::negated_inverse;
}

int CombinedFormula::intern(const std::string& name) {
    for (const auto& v : variables)
        if (v.name == name) return v.index;
    int idx = static_cast<int>(variables.size());
    variables.push_back({idx, name});
    return idx;
}

bool CombinedFormula::operator==(const CombinedFormula& o) const {
    return variables == o.variables && constraints == o.constraints &&
           backmap == o.backmap && fresh_defs == o.fresh_defs;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);  // lowest index is the root
        return true;
    }
};

int fresh_counter(const CombinedFormula& cf, const std::string& prefix) {
    int next = 0;
    for (const auto& v : cf.variables)
        if (v.name.rfind(prefix, 0) == 0)
            next = std::max(next, std::atoi(v.name.c_str() + prefix.size()) + 1);
    return next;
}

// Appends the four constraints forcing u == x over nonzero reals:
//   x + 1/u = p,  u + 1/x = p   (=> x = u or x*u = -1)
//   x + 1/x = r,  u + 1/u = r   (=> x = u or x*u = +1)
void tie_equal(CombinedFormula& cf, int x, int u, int& aux_counter) {
    int p = cf.intern("__aux" + std::to_string(aux_counter++));
    int r = cf.intern("__aux" + std::to_string(aux_counter++));
    cf.constraints.push_back({{{{x, +1, +1}, {u, +1, -1}, {p, -1, +1}}}});
    cf.constraints.push_back({{{{u, +1, +1}, {x, +1, -1}, {p, -1, +1}}}});
    cf.constraints.push_back({{{{x, +1, +1}, {x, +1, -1}, {r, -1, +1}}}});
    cf.constraints.push_back({{{{u, +1, +1}, {u, +1, -1}, {r, -1, +1}}}});
    cf.fresh_defs.push_back({p, {{x, +1, +1}, {x, +1, -1}}});
    cf.fresh_defs.push_back({r, {{x, +1, +1}, {x, +1, -1}}});
}

} // namespace

void normalize_combined(CombinedFormula& cf) {
    int alias_counter = fresh_counter(cf, "__alias");
    int aux_counter = fresh_counter(cf, "__aux");
    int cov_counter = fresh_counter(cf, "__cov");

    // Split duplicate slot uses within one constraint: the second of two
    // identical terms is re-pointed at a fresh alias tied to the original.
    for (size_t i = 0; i < cf.constraints.size(); ++i) {
        bool changed = true;
        while (changed) {
            changed = false;
            auto& terms = cf.constraints[i].terms;
            for (int a = 0; a < 3 && !changed; ++a)
                for (int b = a + 1; b < 3 && !changed; ++b)
                    if (slot_form(terms[a]) == slot_form(terms[b]) &&
                        terms[a].var == terms[b].var) {
                        int x = terms[b].var;
                        int u = cf.intern("__alias" + std::to_string(alias_counter++));
                        cf.constraints[i].terms[b].var = u;
                        cf.fresh_defs.push_back({u, {{x, +1, +1}}});
                        tie_equal(cf, x, u, aux_counter);
                        changed = true;
                    }
        }
    }

    // Coverage: every variable must occur in at least one constraint.
    for (int v = 0; v < cf.var_count(); ++v) {
        bool occurs = false;
        for (const auto& c : cf.constraints)
            for (const auto& t : c.terms)
                if (t.var == v) occurs = true;
        if (occurs) continue;
        int s = cf.intern("__cov" + std::to_string(cov_counter++));
        cf.constraints.push_back({{{{v, +1, +1}, {v, +1, -1}, {s, -1, +1}}}});
        cf.fresh_defs.push_back({s, {{v, +1, +1}, {v, +1, -1}}});
    }
}

CombinedFormula lower_to_combined(const EtrInvFormula& f) {
    const int n = f.var_count();
    UnionFind uf(n);

    // Two inversion partners of the same variable must be equal; close the
    // implied equalities until stable.
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<int, int> partner;  // class root -> partner class root
        for (const auto& c : f.constraints) {
            const auto* inv = std::get_if<Inversion>(&c);
            if (!inv) continue;
            int px = uf.find(inv->x), py = uf.find(inv->y);
            for (auto [a, b] : {std::pair{px, py}, std::pair{py, px}}) {
                auto it = partner.find(a);
                if (it == partner.end()) {
                    partner[a] = b;
                } else if (uf.find(it->second) != uf.find(b)) {
                    uf.unite(it->second, b);
                    changed = true;
                }
            }
            if (changed) break;
        }
    }

    // Distinct inversion pairs over class roots.
    std::set<std::pair<int, int>> pairs;
    for (const auto& c : f.constraints)
        if (const auto* inv = std::get_if<Inversion>(&c)) {
            int a = uf.find(inv->x), b = uf.find(inv->y);
            pairs.insert({std::min(a, b), std::max(a, b)});
        }

    // The higher-indexed side of each proper pair is eliminated in favor of
    // the inverse of the lower-indexed side.
    std::vector<int> elim_partner(n, -1);  // root -> root it is the inverse of
    std::vector<bool> self_inverted(n, false);
    for (auto [a, b] : pairs) {
        if (a == b)
            self_inverted[a] = true;
        else
            elim_partner[b] = a;
    }

    CombinedFormula cf;
    std::vector<int> new_index(n, -1);
    for (int v = 0; v < n; ++v)
        if (uf.find(v) == v && elim_partner[v] < 0)
            new_index[v] = cf.intern(f.variables[v].name);

    cf.backmap.resize(n);
    for (int v = 0; v < n; ++v) {
        int root = uf.find(v);
        if (elim_partner[root] < 0)
            cf.backmap[v] = {new_index[root], +1};
        else
            cf.backmap[v] = {new_index[elim_partner[root]], -1};
    }

    for (const auto& c : f.constraints) {
        const auto* add = std::get_if<Addition>(&c);
        if (!add) continue;
        auto term = [&](int v, int sign) {
            const auto& bm = cf.backmap[v];
            return SignedTerm{bm.combined_var, sign, bm.exponent};
        };
        cf.constraints.push_back(
            {{term(add->x, +1), term(add->y, +1), term(add->z, -1)}});
    }

    // x*x = 1 has no substitution form; expand it to x = u plus u = 1/x:
    //   x + u = s, x + 1/x = s, u + 1/u = s  and the x==u tie pair.
    int alias_counter = fresh_counter(cf, "__alias");
    int aux_counter = fresh_counter(cf, "__aux");
    for (int root = 0; root < n; ++root) {
        if (!self_inverted[root]) continue;
        int x = new_index[root];
        int u = cf.intern("__alias" + std::to_string(alias_counter++));
        int s = cf.intern("__aux" + std::to_string(aux_counter++));
        cf.constraints.push_back({{{{x, +1, +1}, {u, +1, +1}, {s, -1, +1}}}});
        cf.constraints.push_back({{{{x, +1, +1}, {x, +1, -1}, {s, -1, +1}}}});
        cf.constraints.push_back({{{{u, +1, +1}, {u, +1, -1}, {s, -1, +1}}}});
        cf.fresh_defs.push_back({u, {{x, +1, +1}}});
        cf.fresh_defs.push_back({s, {{x, +1, +1}, {x, +1, -1}}});
        tie_equal(cf, x, u, aux_counter);
    }

    normalize_combined(cf);
    return cf;
}

SatisfactionReport check_combined(const CombinedFormula& cf, const Assignment& a,
                                  std::optional<Scalar> tolerance) {
    if (a.values.size() != cf.variables.size())
        throw MissingVariable("assignment does not cover all combined variables");
    SatisfactionReport rep;
    rep.satisfied = true;
    Scalar::Mode mode = a.mode();
    for (const auto& c : cf.constraints) {
        Scalar r = Scalar::zero(mode);
        for (const auto& t : c.terms) {
            Scalar v = a.values[t.var];
            if (t.exponent < 0) {
                if (v.is_zero())
                    throw DivisionByZero("inverted variable '" +
                                         cf.variables[t.var].name + "' is zero");
                v = v.inverse();
            }
            r = t.sign > 0 ? r + v : r - v;
        }
        bool ok = tolerance ? (r.abs() <= *tolerance) : r.is_zero();
        if (!ok) rep.satisfied = false;
        rep.residuals.push_back(std::move(r));
    }
    return rep;
}

std::string print_combined(const CombinedFormula& cf) {
    std::ostringstream out;
    for (const auto& c : cf.constraints) {
        for (int i = 0; i < 3; ++i) {
            const auto& t = c.terms[i];
            if (i) out << ' ';
            out << (t.sign > 0 ? '+' : '-') << cf.variables[t.var].name;
            if (t.exponent < 0) out << "^-1";
        }
        out << " = 0\n";
    }
    return out.str();
}

CombinedFormula parse_combined(const std::string& text) {
    CombinedFormula cf;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        size_t pos = 0;
        auto skip_ws = [&] {
            while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
        };
        skip_ws();
        if (pos >= raw.size()) continue;
        CombinedConstraint c;
        for (int i = 0; i < 3; ++i) {
            skip_ws();
            if (pos >= raw.size() || (raw[pos] != '+' && raw[pos] != '-'))
                throw SyntaxError("expected '+' or '-'", lineno, static_cast<int>(pos) + 1);
            int sign = raw[pos] == '+' ? +1 : -1;
            ++pos;
            size_t start = pos;
            while (pos < raw.size() &&
                   (std::isalnum(static_cast<unsigned char>(raw[pos])) || raw[pos] == '_'))
                ++pos;
            if (start == pos)
                throw SyntaxError("expected identifier", lineno, static_cast<int>(pos) + 1);
            size_t id_end = pos;
            int exponent = +1;
            if (raw.compare(pos, 3, "^-1") == 0) {
                exponent = -1;
                pos += 3;
            }
            c.terms[i] = {cf.intern(raw.substr(start, id_end - start)), sign, exponent};
        }
        skip_ws();
        if (raw.compare(pos, 1, "=") != 0)
            throw SyntaxError("expected '= 0'", lineno, static_cast<int>(pos) + 1);
        ++pos;
        skip_ws();
        if (raw.compare(pos, 1, "0") != 0)
            throw SyntaxError("expected '= 0'", lineno, static_cast<int>(pos) + 1);
        ++pos;
        skip_ws();
        if (pos < raw.size())
            throw SyntaxError("trailing input", lineno, static_cast<int>(pos) + 1);
        if (c.terms[0].sign != +1 || c.terms[1].sign != +1 || c.terms[2].sign != -1)
            throw SyntaxError("combined constraints use sign pattern (+, +, -)",
                              lineno, 1);
        cf.constraints.push_back(c);
    }
    cf.backmap.resize(cf.var_count());
    for (int v = 0; v < cf.var_count(); ++v) cf.backmap[v] = {v, +1};
    return cf;
}

Assignment push_forward(const CombinedFormula& cf, const Assignment& original) {
    if (original.values.size() != cf.backmap.size())
        throw MissingVariable("assignment does not cover the source formula");
    Scalar::Mode mode = original.mode();
    Assignment out;
    out.values.assign(cf.var_count(), Scalar::zero(mode));
    std::vector<bool> set(cf.var_count(), false);
    for (size_t v = 0; v < cf.backmap.size(); ++v) {
        const auto& bm = cf.backmap[v];
        if (bm.exponent != +1 || set[bm.combined_var]) continue;
        out.values[bm.combined_var] = original.values[v];
        set[bm.combined_var] = true;
    }
    for (const auto& def : cf.fresh_defs) {
        Scalar v = Scalar::zero(mode);
        for (const auto& t : def.terms) {
            Scalar x = out.values[t.var];
            if (t.exponent < 0) {
                if (x.is_zero())
                    throw ZeroInverse("zero value for inverted variable '" +
                                      cf.variables[t.var].name + "'");
                x = x.inverse();
            }
            v = t.sign > 0 ? v + x : v - x;
        }
        out.values[def.var] = v;
        set[def.var] = true;
    }
    for (int v = 0; v < cf.var_count(); ++v)
        if (!set[v])
            throw MissingVariable("no push-forward value for '" +
                                  cf.variables[v].name + "'");
    return out;
}

Assignment pull_back(const CombinedFormula& cf, const Assignment& combined) {
    if (combined.values.size() != cf.variables.size())
        throw MissingVariable("assignment does not cover the combined formula");
    Assignment out;
    out.values.reserve(cf.backmap.size());
    for (const auto& bm : cf.backmap) {
        Scalar v = combined.values[bm.combined_var];
        if (bm.exponent < 0) {
            if (v.is_zero())
                throw ZeroInverse("cannot pull back through a zero value");
            v = v.inverse();
        }
        out.values.push_back(v);
    }
    return out;
}

} // namespace nntc
