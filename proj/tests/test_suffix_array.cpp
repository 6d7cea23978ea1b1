#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "textanchor/suffix_array.hpp"

using namespace textanchor;

namespace {

SymbolSeq random_seq(std::mt19937& rng, std::size_t max_len, std::uint32_t alphabet) {
    SymbolSeq s;
    s.alphabet_size = alphabet + 1;  // plus the sentinel value
    const std::size_t len = std::uniform_int_distribution<std::size_t>(1, max_len)(rng);
    s.data.reserve(len + 1);
    for (std::size_t k = 0; k < len; ++k)
        s.data.push_back(std::uniform_int_distribution<std::uint32_t>(1, alphabet)(rng));
    s.data.push_back(kSentinel);
    return s;
}

bool suffix_less(const std::vector<std::uint32_t>& d, std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(d.begin() + a, d.end(), d.begin() + b, d.end());
}

}  // namespace

TEST_CASE("banana") {
    const SuffixArray sa = build_suffix_array(make_symbol_seq("BANANA"));
    const std::vector<std::uint32_t> expected{6, 5, 3, 1, 0, 4, 2};
    CHECK(sa.sa == expected);
    for (std::size_t k = 0; k < sa.sa.size(); ++k) CHECK(sa.rank[sa.sa[k]] == k);
}

TEST_CASE("two symbols") {
    const SuffixArray sa = build_suffix_array(make_symbol_seq("A"));
    CHECK(sa.sa == std::vector<std::uint32_t>{1, 0});
}

TEST_CASE("sentinel only") {
    const SuffixArray sa = build_suffix_array(make_symbol_seq(""));
    CHECK(sa.sa == std::vector<std::uint32_t>{0});
}

TEST_CASE("query suffix sorts before its continuation in the book") {
    // positions 3 and 8 of LOVEILOVEYOU start with E; the suffix at 3
    // continues EILOVEYOU and must come first
    const SuffixArray sa = build_suffix_array(make_symbol_seq("LOVEILOVEYOU"));
    CHECK(sa.rank[3] < sa.rank[8]);
    const auto naive = oracles::naive_suffix_array(make_symbol_seq("LOVEILOVEYOU").data);
    CHECK(sa.sa == naive);
}

TEST_CASE("input contract violations") {
    SymbolSeq missing;
    missing.data = {5, 4, 3};
    CHECK_THROWS_AS(build_suffix_array(missing), ContractError);
    SymbolSeq dup;
    dup.data = {5, 0, 3, 0};
    CHECK_THROWS_AS(build_suffix_array(dup), ContractError);
    SymbolSeq oob;
    oob.data = {99, 0};
    oob.alphabet_size = 38;
    CHECK_THROWS_AS(build_suffix_array(oob), ContractError);
    SymbolSeq empty;
    CHECK_THROWS_AS(build_suffix_array(empty), ContractError);
}

TEST_CASE("matches a naive sort on random sequences, both constructions") {
    std::mt19937 rng(1234);
    const std::uint32_t alphabets[] = {2, 4, 26, 256};
    for (int trial = 0; trial < 80; ++trial) {
        const SymbolSeq s = random_seq(rng, 512, alphabets[trial % 4]);
        const auto naive = oracles::naive_suffix_array(s.data);
        CHECK(build_suffix_array(s, SaConstruction::linear_skew).sa == naive);
        CHECK(build_suffix_array(s, SaConstruction::doubling).sa == naive);
    }
}

TEST_CASE("permutation and neighbor ordering on random sequences") {
    std::mt19937 rng(555);
    for (int trial = 0; trial < 40; ++trial) {
        const SymbolSeq s = random_seq(rng, 300, trial % 2 ? 3 : 26);
        const SuffixArray sa = build_suffix_array(s);
        std::vector<bool> seen(s.data.size(), false);
        for (std::uint32_t p : sa.sa) {
            REQUIRE(p < s.data.size());
            CHECK(!seen[p]);
            seen[p] = true;
        }
        for (std::size_t k = 0; k + 1 < sa.sa.size(); ++k)
            CHECK(suffix_less(s.data, sa.sa[k], sa.sa[k + 1]));
    }
}
