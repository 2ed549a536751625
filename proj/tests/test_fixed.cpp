#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "peermarket/fixed.hpp"
#include "peermarket/rng.hpp"

using namespace peermarket;

TEST_CASE("energy formatting is canonical three-decimal") {
    CHECK(format_energy(Energy::from_milli(12345)) == "12.345");
    CHECK(format_energy(Energy::from_milli(0)) == "0.000");
    CHECK(format_energy(Energy::from_milli(5)) == "0.005");
    CHECK(format_energy(Energy::from_whole_kwh(7)) == "7.000");
    CHECK(format_energy(Energy::from_milli(-1500)) == "-1.500");
}

TEST_CASE("energy parsing accepts up to three decimals") {
    CHECK(parse_energy("12.345")->milli == 12345);
    CHECK(parse_energy("12")->milli == 12000);
    CHECK(parse_energy("12.3")->milli == 12300);
    CHECK(parse_energy("0.005")->milli == 5);
    CHECK(!parse_energy("12.3456").has_value());
    CHECK(!parse_energy("").has_value());
    CHECK(!parse_energy("abc").has_value());
    CHECK(!parse_energy("1.").has_value());
    CHECK(!parse_energy("1.2.3").has_value());
}

TEST_CASE("energy round-trips through its text form") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const Energy e = Energy::from_milli(rng.range(0, 50'000'000));
        CHECK(parse_energy(format_energy(e)) == e);
    }
}

TEST_CASE("price ratio comparisons are exact") {
    const PriceRatio avg(15, 2); // 7.5
    CHECK(avg > Price{7});
    CHECK(avg < Price{8});
    CHECK(PriceRatio(14, 2) == PriceRatio(7, 1));
    CHECK(PriceRatio(1, 3) < PriceRatio(1, 2));
}

TEST_CASE("midpoint price rounds half-up") {
    CHECK(midpoint_price(PriceRatio(5, 1), PriceRatio(9, 1)) == 7);
    CHECK(midpoint_price(PriceRatio(5, 1), PriceRatio(6, 1)) == 6);  // 5.5 -> 6
    CHECK(midpoint_price(PriceRatio(5, 1), PriceRatio(5, 1)) == 5);
    CHECK(midpoint_price(PriceRatio(7, 2), PriceRatio(9, 2)) == 4);  // (3.5 + 4.5)/2
    CHECK(midpoint_price(PriceRatio(10, 3), PriceRatio(5, 1)) == 4); // 4.1666 -> 4
}

TEST_CASE("token amounts round half-up per member") {
    CHECK(tokens_for(7, Energy::from_whole_kwh(3)) == 21);
    CHECK(tokens_for(7, Energy::from_milli(3500)) == 25); // 24.5 -> 25
    CHECK(tokens_for(7, Energy::from_milli(3499)) == 24);
    CHECK(tokens_for(0, Energy::from_whole_kwh(10)) == 0);
}

TEST_CASE("rng bounded draws are reproducible and in range") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + i % 17;
        const std::size_t x = a.below(n);
        CHECK(x == b.below(n));
        CHECK(x < n);
    }
    CHECK(Rng(7).below(1) == 0);
}

TEST_CASE("rng unit stays in [0,1)") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("shuffle is a permutation") {
    Rng rng(11);
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7};
    auto sorted = v;
    rng.shuffle(v);
    auto resorted = v;
    std::sort(resorted.begin(), resorted.end());
    CHECK(resorted == sorted);
}

TEST_CASE("sample_without_replacement yields distinct indices") {
    Rng rng(13);
    const auto s = rng.sample_without_replacement(10, 7);
    CHECK(s.size() == 7);
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (std::size_t idx : s)
        CHECK(idx < 10);
}

TEST_CASE("derived seeds differ per salt and are stable") {
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) == derive_seed(1, 1));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
}
