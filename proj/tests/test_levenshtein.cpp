#include "hallucheck/matcher.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace hallucheck;

TEST_CASE("dp oracle agrees with edit-script search on short strings")
{
    std::mt19937_64 rng(7);
    const std::u32string alphabet = U"abc";
    for (int i = 0; i < 300; ++i) {
        auto a = oracle::random_string(rng, alphabet, 5);
        auto b = oracle::random_string(rng, alphabet, 5);
        REQUIRE(oracle::edit_distance(a, b) == oracle::edit_script_search(a, b, alphabet));
    }
    CHECK(oracle::edit_script_search(U"kitten", U"sitting", U"eiknstg") == 3);
}

TEST_CASE("bit-parallel distance matches the dp oracle")
{
    std::mt19937_64 rng(11);
    for (const std::u32string alphabet : {std::u32string(U"abcde"), std::u32string(U"ab"), std::u32string(U"aé中z")}) {
        for (int i = 0; i < 1500; ++i) {
            auto a = oracle::random_string(rng, alphabet, 200);
            auto b = oracle::random_string(rng, alphabet, 200);
            REQUIRE(levenshtein(a, b) == oracle::edit_distance(a, b));
            CachedLevenshtein cached(a);
            REQUIRE(cached.distance(b) == oracle::edit_distance(a, b));
        }
    }
}

TEST_CASE("distance at block boundaries")
{
    std::mt19937_64 rng(3);
    for (std::size_t n : {63u, 64u, 65u, 127u, 128u, 129u}) {
        for (int i = 0; i < 40; ++i) {
            auto a = oracle::random_string(rng, U"abcd", n, n);
            auto b = oracle::random_string(rng, U"abcd", n + 3, n > 3 ? n - 3 : 0);
            REQUIRE(CachedLevenshtein(a).distance(b) == oracle::edit_distance(a, b));
            REQUIRE(CachedLevenshtein(b).distance(a) == oracle::edit_distance(a, b));
        }
    }
}

TEST_CASE("similarity values")
{
    CHECK(similarity(U"abc", U"abc") == 1.0);
    CHECK(similarity(U"", U"abc") == 0.0);
    CHECK(similarity(U"", U"") == 1.0);
    CHECK(similarity(U"kitten", U"sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
    CHECK(similarity(U"abc", U"abd") == doctest::Approx(1.0 - 1.0 / 3.0));
}

TEST_CASE("threshold arithmetic")
{
    CHECK(meets_threshold(1.0 - 4.0 / 40.0, 0.9));
    CHECK_FALSE(meets_threshold(1.0 - 5.0 / 40.0, 0.9));
    for (std::size_t len = 1; len < 300; ++len) {
        std::size_t k = max_distance_for(len, 0.9);
        CHECK(meets_threshold(similarity_from_distance(k, len, len), 0.9));
        CHECK_FALSE(meets_threshold(similarity_from_distance(k + 1, len, len), 0.9));
    }
}
