#include <set>
#include <stdexcept>

#include "doctest.h"
#include "prefkit/util.hpp"

using namespace prefkit;

TEST_CASE("trim and lowercase") {
    CHECK(trim("  hello \t\n") == "hello");
    CHECK(trim("") == "");
    CHECK(trim("   ") == "");
    CHECK(to_lower("MiXeD Case") == "mixed case");
}

TEST_CASE("split_words lowercases and splits on whitespace runs") {
    CHECK(split_words("a  b\tc") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_words("  Leading and Trailing  ") ==
          std::vector<std::string>{"leading", "and", "trailing"});
    CHECK(split_words("").empty());
    // U+00A0 no-break space separates words too
    CHECK(split_words("one\xc2\xa0two") == std::vector<std::string>{"one", "two"});
}

TEST_CASE("utf8_length counts scalars not bytes") {
    CHECK(utf8_length("abc") == 3);
    CHECK(utf8_length("caf\xc3\xa9") == 4);
    CHECK(utf8_length("\xF0\x9F\x98\x80") == 1);  // one emoji
}

TEST_CASE("uniform_index stays in range and covers the support") {
    std::mt19937_64 rng(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t v = uniform_index(rng, 7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(uniform_index(rng, 0), std::invalid_argument);
}

TEST_CASE("sample_without_replacement returns k distinct indices") {
    std::mt19937_64 rng(2);
    const auto picks = sample_without_replacement(rng, 50, 20);
    CHECK(picks.size() == 20);
    std::set<std::size_t> distinct(picks.begin(), picks.end());
    CHECK(distinct.size() == 20);
    for (std::size_t p : picks) CHECK(p < 50);
    CHECK_THROWS_AS(sample_without_replacement(rng, 3, 4), std::invalid_argument);
}

TEST_CASE("hash01 lands in [0,1) and separates its parts") {
    const double a = hash01({"ab", "c"});
    const double b = hash01({"a", "bc"});
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
    CHECK(a != b);
    CHECK(hash01({"ab", "c"}) == a);
}
