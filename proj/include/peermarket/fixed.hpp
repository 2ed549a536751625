#pragma once

// Exact arithmetic primitives for the market: energy is fixed-point kWh with
// three decimals, prices are integer Gwei per kWh, coalition average prices
// are small rationals. No floating point touches settlement or conservation
// accounting.

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace peermarket {

/// Energy quantity in kWh, stored as integer milli-kWh.
struct Energy {
    std::int64_t milli{0};

    constexpr Energy() = default;
    constexpr explicit Energy(std::int64_t milli_kwh) : milli(milli_kwh) {}

    static constexpr Energy from_milli(std::int64_t m) { return Energy{m}; }
    static constexpr Energy from_whole_kwh(std::int64_t kwh) { return Energy{kwh * 1000}; }

    constexpr auto operator<=>(const Energy&) const = default;

    constexpr Energy operator+(Energy other) const { return Energy{milli + other.milli}; }
    constexpr Energy operator-(Energy other) const { return Energy{milli - other.milli}; }
    constexpr Energy& operator+=(Energy other) {
        milli += other.milli;
        return *this;
    }
    constexpr Energy& operator-=(Energy other) {
        milli -= other.milli;
        return *this;
    }

    constexpr bool is_zero() const { return milli == 0; }
    double as_double() const { return static_cast<double>(milli) / 1000.0; }
};

constexpr Energy min(Energy a, Energy b) { return a.milli < b.milli ? a : b; }

/// Formats as "<int>.<3 digits>", e.g. 12.345, the canonical on-disk form.
std::string format_energy(Energy e);

/// Parses "<int>[.<1-3 digits>]". Returns nullopt on malformed input or more
/// than three decimals.
std::optional<Energy> parse_energy(const std::string& text);

/// Price in Gwei per kWh.
using Price = std::int64_t;

/// Non-negative rational used for coalition average prices. Kept reduced so
/// equal values serialize to identical bytes.
struct PriceRatio {
    std::int64_t num{0};
    std::int64_t den{1};

    constexpr PriceRatio() = default;
    PriceRatio(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den <= 0)
            throw std::invalid_argument("PriceRatio: non-positive denominator");
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const PriceRatio& a, const PriceRatio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend std::strong_ordering operator<=>(const PriceRatio& a, const PriceRatio& b) {
        const __int128 lhs = static_cast<__int128>(a.num) * b.den;
        const __int128 rhs = static_cast<__int128>(b.num) * a.den;
        return lhs < rhs ? std::strong_ordering::less
               : lhs > rhs ? std::strong_ordering::greater
                           : std::strong_ordering::equal;
    }
};

inline bool operator>(const PriceRatio& a, Price p) {
    return static_cast<__int128>(a.num) > static_cast<__int128>(p) * a.den;
}
inline bool operator<(const PriceRatio& a, Price p) {
    return static_cast<__int128>(a.num) < static_cast<__int128>(p) * a.den;
}

/// Midpoint of two average prices, rounded half-up to integer Gwei.
Price midpoint_price(const PriceRatio& a, const PriceRatio& b);

/// Tokens owed for `e` at `price`: price * kWh, rounded half-up to integer
/// Gwei. `e` must be non-negative.
std::int64_t tokens_for(Price price, Energy e);

/// "num/den" reduced form; integer values print without the denominator.
std::string format_price_ratio(const PriceRatio& r);

} // namespace peermarket
