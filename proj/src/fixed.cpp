#include "peermarket/fixed.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace peermarket {

std::string format_energy(Energy e) {
    const bool neg = e.milli < 0;
    const std::int64_t abs = neg ? -e.milli : e.milli;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", neg ? "-" : "",
                  static_cast<long long>(abs / 1000), static_cast<long long>(abs % 1000));
    return buf;
}

std::optional<Energy> parse_energy(const std::string& text) {
    if (text.empty())
        return std::nullopt;
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '-') {
        neg = true;
        ++pos;
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        return std::nullopt;
    std::int64_t whole = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        whole = whole * 10 + (text[pos] - '0');
        ++pos;
    }
    std::int64_t frac = 0;
    if (pos < text.size()) {
        if (text[pos] != '.')
            return std::nullopt;
        ++pos;
        int digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            frac = frac * 10 + (text[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0 || digits > 3 || pos != text.size())
            return std::nullopt;
        for (; digits < 3; ++digits)
            frac *= 10;
    }
    if (pos != text.size())
        return std::nullopt;
    std::int64_t milli = whole * 1000 + frac;
    return Energy{neg ? -milli : milli};
}

Price midpoint_price(const PriceRatio& a, const PriceRatio& b) {
    // (a + b) / 2 = (a.num*b.den + b.num*a.den) / (2*a.den*b.den)
    const __int128 num =
        static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
    const __int128 den = static_cast<__int128>(2) * a.den * b.den;
    // round half-up: floor((2*num + den) / (2*den)) for non-negative num
    const __int128 rounded = (2 * num + den) / (2 * den);
    return static_cast<Price>(rounded);
}

std::int64_t tokens_for(Price price, Energy e) {
    const __int128 raw = static_cast<__int128>(price) * e.milli;
    return static_cast<std::int64_t>((raw + 500) / 1000);
}

std::string format_price_ratio(const PriceRatio& r) {
    if (r.den == 1)
        return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

} // namespace peermarket
