#include "bifiber/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace bifiber {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

mpz_class pow10(long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
    return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string original(text);
    auto fail = [&]() -> Rational { throw std::invalid_argument("not a number: '" + original + "'"); };

    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) return fail();

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return fail();
        mpz_class d{std::string(den), 10};
        if (d == 0) return fail();
        Rational r{mpz_class{std::string(num), 10}, d};
        r.canonicalize();
        return negative ? Rational(-r) : r;
    }

    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 6) return fail();
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
        text = text.substr(0, e);
    }

    std::string_view int_part = text;
    std::string_view frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        int_part = text.substr(0, dot);
        frac_part = text.substr(dot + 1);
        if (!frac_part.empty() && !all_digits(frac_part)) return fail();
    }
    if (!int_part.empty() && !all_digits(int_part)) return fail();
    if (int_part.empty() && frac_part.empty()) return fail();

    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
    exponent -= static_cast<long>(frac_part.size());
    Rational r;
    if (exponent >= 0)
        r = Rational(mantissa * pow10(exponent));
    else
        r = Rational(mantissa, pow10(-exponent));
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

std::string to_fraction_string(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_short_string(const Rational& value) {
    if (value.get_den() == 1) return value.get_num().get_str();
    return to_fraction_string(value);
}

Rational rational_from_int(long value) { return Rational(value); }

std::ostream& operator<<(std::ostream& os, const Bigrade& g) {
    return os << '(' << to_short_string(g.x) << ", " << to_short_string(g.y) << ')';
}

}  // namespace bifiber
