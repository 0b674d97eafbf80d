#include "nntc/scalar.hpp"

#include <charconv>
#include <cstdio>

namespace nntc {

std::string Scalar::str() const {
    if (mode_ == Mode::exact) {
        std::string num = numerator(rat_).str();
        if (denominator(rat_) == 1) return num;
        return num + "/" + denominator(rat_).str();
    }
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), flt_);
    (void)ec;
    return std::string(buf, p);
}

Scalar Scalar::parse_exact(const std::string& text) {
    auto bad = [&] { throw SchemaError("malformed rational '" + text + "'"); };
    if (text.empty()) bad();
    auto slash = text.find('/');
    auto digits = [&](size_t from, size_t to) {
        if (from >= to) bad();
        size_t i = from;
        if (text[i] == '-') ++i;
        if (i >= to) bad();
        for (; i < to; ++i)
            if (text[i] < '0' || text[i] > '9') bad();
    };
    try {
        if (slash == std::string::npos) {
            digits(0, text.size());
            return exact(Rational(boost::multiprecision::cpp_int(text)));
        }
        digits(0, slash);
        digits(slash + 1, text.size());
        boost::multiprecision::cpp_int num(text.substr(0, slash));
        boost::multiprecision::cpp_int den(text.substr(slash + 1));
        if (den == 0) throw SchemaError("zero denominator in '" + text + "'");
        if (den < 0) {  // keep q > 0
            num = -num;
            den = -den;
        }
        return exact(Rational(num, den));
    } catch (const std::runtime_error& e) {
        throw SchemaError(std::string("malformed rational '") + text + "': " + e.what());
    }
}

} // namespace nntc
