#include "critspde/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace critspde {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(long e) {
    cpp_int r = 1;
    for (long i = 0; i < e; ++i) r *= 10;
    return r;
}

Q parse_decimal(const std::string& s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    cpp_int mant = 0;
    long frac_digits = 0;
    bool any_digit = false;
    bool in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mant = mant * 10 + (c - '0');
            any_digit = true;
            if (in_frac) ++frac_digits;
        } else if (c == '.' && !in_frac) {
            in_frac = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw std::runtime_error("rational.parse_q: no digits in '" + s + "'");
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        std::size_t used = 0;
        try {
            exp10 = std::stol(s.substr(i), &used);
        } catch (const std::exception&) {
            throw std::runtime_error("rational.parse_q: bad exponent in '" + s + "'");
        }
        if (exp10 > 4000 || exp10 < -4000)
            throw std::runtime_error("rational.parse_q: exponent out of range in '" + s + "'");
        i += used;
    }
    if (i != s.size()) throw std::runtime_error("rational.parse_q: trailing characters in '" + s + "'");
    long e = exp10 - frac_digits;
    Q out = e >= 0 ? Q(mant * pow10(e)) : Q(mant, pow10(-e));
    return neg ? Q(-out) : out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

Q parse_q(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) throw std::runtime_error("rational.parse_q: empty string");
    auto slash = s.find('/');
    if (slash == std::string::npos) return parse_decimal(s);
    Q num = parse_decimal(trim(s.substr(0, slash)));
    Q den = parse_decimal(trim(s.substr(slash + 1)));
    if (den == 0) throw std::runtime_error("rational.parse_q: zero denominator in '" + s + "'");
    return num / den;
}

Q q_from_double(double x) {
    if (!std::isfinite(x)) throw std::runtime_error("rational.q_from_double: non-finite value");
    int exp = 0;
    double m = std::frexp(x, &exp);
    // 53 bits of mantissa make m * 2^53 an exact integer.
    auto mi = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    cpp_int num = mi;
    cpp_int den = 1;
    if (exp >= 0) num <<= exp;
    else den <<= -exp;
    return Q(num, den);
}

double to_double(const Q& q) { return q.convert_to<double>(); }

std::string to_string(const Q& q) {
    auto n = boost::multiprecision::numerator(q);
    auto d = boost::multiprecision::denominator(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

Q q_min(const Q& a, const Q& b) { return a < b ? a : b; }
Q q_max(const Q& a, const Q& b) { return a < b ? b : a; }

}  // namespace critspde
