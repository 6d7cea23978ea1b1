#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "textanchor/locator.hpp"

using namespace textanchor;

namespace {

std::vector<MatchPair> sorted(std::vector<MatchPair> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::string random_symbols(std::mt19937& rng, std::size_t lo, std::size_t hi,
                           int alphabet = 26) {
    std::string s;
    const std::size_t len = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    for (std::size_t k = 0; k < len; ++k)
        s.push_back(static_cast<char>('A' + std::uniform_int_distribution<int>(0, alphabet - 1)(rng)));
    return s;
}

}  // namespace

TEST_CASE("close matches of LOVE over ILOVEYOU") {
    const auto pairs =
        find_close_matches(make_symbol_seq("LOVE"), make_symbol_seq("ILOVEYOU"));
    const std::vector<MatchPair> expected{{0, 0}, {0, 1}, {1, 6}, {1, 2},
                                          {2, 7}, {2, 3}, {3, 4}};
    CHECK(sorted(pairs) == sorted(expected));
    // and the shared-index route equals the brute-force concatenation route
    CHECK(sorted(pairs) == sorted(oracles::brute_close_matches(
                               make_symbol_seq("LOVE"), make_symbol_seq("ILOVEYOU"), 1)));
}

TEST_CASE("identical sequences pair every position with itself") {
    const auto pairs = find_close_matches(make_symbol_seq("ABC"), make_symbol_seq("ABC"));
    for (std::uint32_t i = 0; i < 3; ++i) {
        const bool self_present = std::any_of(pairs.begin(), pairs.end(), [&](const MatchPair& p) {
            return p.i == i && p.j == i;
        });
        CHECK(self_present);
    }
}

TEST_CASE("single symbol against a uniform target") {
    const auto pairs = find_close_matches(make_symbol_seq("Z"), make_symbol_seq("AAAA"));
    CHECK(pairs.size() >= 1);
    CHECK(pairs.size() <= 2);
    for (const MatchPair& p : pairs) {
        CHECK(p.i == 0);
        CHECK(p.j < 4);
    }
    CHECK(sorted(pairs) ==
          sorted(oracles::brute_close_matches(make_symbol_seq("Z"), make_symbol_seq("AAAA"), 1)));
}

TEST_CASE("close matches match the brute-force oracle on random inputs") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 120; ++trial) {
        const int alphabet = trial % 3 == 0 ? 3 : 26;  // narrow alphabets stress ties
        const SymbolSeq q = make_symbol_seq(random_symbols(rng, 1, 60, alphabet));
        const SymbolSeq t = make_symbol_seq(random_symbols(rng, 1, 200, alphabet));
        const int per_side = trial % 4 == 0 ? 2 : 1;
        CHECK(sorted(find_close_matches(q, t, per_side)) ==
              sorted(oracles::brute_close_matches(q, t, per_side)));
    }
}

TEST_CASE("per-side contract") {
    CHECK_THROWS_AS(find_close_matches(make_symbol_seq("A"), make_symbol_seq("B"), 0),
                    ContractError);
    CHECK_THROWS_AS(find_close_matches(make_symbol_seq(""), make_symbol_seq("B")),
                    ContractError);
}

TEST_CASE("longest chain on the documented pair set") {
    const std::vector<MatchPair> pairs{{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}};
    const AnchorChain chain = longest_chain(pairs);
    const std::vector<MatchPair> expected{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    CHECK(chain.pairs == expected);
}

TEST_CASE("empty and strictly decreasing input") {
    CHECK(longest_chain({}).empty());
    const AnchorChain one = longest_chain({{0, 5}, {1, 4}, {2, 3}});
    CHECK(one.size() == 1);
}

TEST_CASE("duplicates do not lengthen a chain") {
    const AnchorChain chain = longest_chain({{1, 1}, {1, 1}, {1, 1}, {2, 2}});
    CHECK(chain.size() == 2);
}

TEST_CASE("chain length equals exhaustive search on random pair sets") {
    std::mt19937 rng(2025);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MatchPair> pairs;
        const int n = std::uniform_int_distribution<int>(0, 15)(rng);
        for (int k = 0; k < n; ++k)
            pairs.push_back({std::uniform_int_distribution<std::uint32_t>(0, 11)(rng),
                             std::uniform_int_distribution<std::uint32_t>(0, 11)(rng)});
        CHECK(longest_chain(pairs).size() == oracles::exhaustive_longest_chain(pairs));
    }
}

TEST_CASE("chains returned are always valid") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<MatchPair> pairs;
        const int n = std::uniform_int_distribution<int>(1, 200)(rng);
        for (int k = 0; k < n; ++k)
            pairs.push_back({std::uniform_int_distribution<std::uint32_t>(0, 50)(rng),
                             std::uniform_int_distribution<std::uint32_t>(0, 50)(rng)});
        const AnchorChain chain = longest_chain(pairs);
        for (std::size_t k = 0; k + 1 < chain.pairs.size(); ++k) {
            CHECK(chain.pairs[k].i < chain.pairs[k + 1].i);
            CHECK(chain.pairs[k].j <= chain.pairs[k + 1].j);
        }
        for (const MatchPair& p : chain.pairs)
            CHECK(std::find(pairs.begin(), pairs.end(), p) != pairs.end());
    }
}

TEST_CASE("an exact substring locates itself") {
    std::mt19937 rng(31337);
    int done = 0;
    while (done < 25) {
        const std::string target = random_symbols(rng, 200, 400);
        const std::size_t qlen = std::uniform_int_distribution<std::size_t>(20, 50)(rng);
        const std::size_t at =
            std::uniform_int_distribution<std::size_t>(0, target.size() - qlen)(rng);
        const std::string query = target.substr(at, qlen);
        if (target.find(query) != at || target.find(query, at + 1) != std::string::npos)
            continue;  // only unique occurrences make the offsets unambiguous
        ++done;
        const auto pairs = find_close_matches(make_symbol_seq(query), make_symbol_seq(target));
        const AnchorChain chain = longest_chain(pairs);
        REQUIRE(chain.size() == qlen);
        for (std::size_t k = 0; k < qlen; ++k) {
            CHECK(chain.pairs[k].i == k);
            CHECK(chain.pairs[k].j == at + k);
        }
    }
}

TEST_CASE("locate_region from tight anchors") {
    AnchorChain chain;
    chain.pairs = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    const Region r = locate_region(chain, 8, 4, 0);
    CHECK(r.begin == 1);
    CHECK(r.end == 5);
}

TEST_CASE("locate_region from a single anchor with margin") {
    AnchorChain chain;
    chain.pairs = {{0, 100}};
    const Region r = locate_region(chain, 10000, 50, 10);
    CHECK(r.begin == 90);
    CHECK(r.end == 160);
}

TEST_CASE("locate_region clamps to the target and rejects empty chains") {
    AnchorChain chain;
    chain.pairs = {{5, 2}};
    const Region r = locate_region(chain, 20, 50, 10);
    CHECK(r.begin == 0);
    CHECK(r.end == 20);
    CHECK_THROWS_AS(locate_region(AnchorChain{}, 100, 10, 0), LocateError);
}

TEST_CASE("default margin grows with the query") {
    CHECK(default_region_margin(100) == 64);
    CHECK(default_region_margin(50000) == 500);
}
