#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "textanchor/normalize.hpp"

using namespace textanchor;

TEST_CASE("plain sentence keeps letters, drops punctuation") {
    const TextSource ts = normalize_text("I love you.", "book.txt");
    CHECK(ts.symbols == "I LOVE YOU");
    REQUIRE(ts.byte_of_symbol.size() == ts.symbols.size());
    CHECK(ts.byte_of_symbol[2] == 2);  // 'L' came from the 'l' at offset 2
    CHECK(ts.text_path == "book.txt");
}

TEST_CASE("empty input gives empty symbols and map") {
    const TextSource ts = normalize_text("", "empty");
    CHECK(ts.symbols.empty());
    CHECK(ts.byte_of_symbol.empty());
}

TEST_CASE("whitespace runs and commas collapse to one space") {
    const TextSource ts = normalize_text("A\n\n  b,c", "t");
    CHECK(ts.symbols == "A B C");
    REQUIRE(ts.byte_of_symbol.size() == 5);
    // word symbols point at their original bytes
    CHECK(ts.byte_of_symbol[0] == 0);
    CHECK(ts.byte_of_symbol[2] == 5);
    CHECK(ts.byte_of_symbol[4] == 7);
    // collapsed spaces point at the first byte of their separator run
    CHECK(ts.byte_of_symbol[1] == 1);
    CHECK(ts.byte_of_symbol[3] == 6);
}

TEST_CASE("apostrophes vanish, digits stay, non-ASCII is dropped") {
    CHECK(normalize_text("it's 42", "t").symbols == "ITS 42");
    CHECK(normalize_text("fianc\xC3\xA9" "e", "t").symbols == "FIANCE");
    CHECK(normalize_text("\xE6\xBC\xA2 x", "t").symbols == "X");
}

TEST_CASE("invalid UTF-8 reports the byte offset") {
    try {
        normalize_text(std::string("ab\xFF") + "cd", "t");
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(e.byte_offset == 2);
    }
    try {
        normalize_text("a\xC3", "t");  // truncated two-byte sequence
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(e.byte_offset == 1);
    }
    CHECK_THROWS_AS(normalize_text("\xED\xA0\x80", "t"), DecodeError);   // surrogate
    CHECK_THROWS_AS(normalize_text("\xC0\xAF", "t"), DecodeError);       // overlong
    CHECK_THROWS_AS(normalize_text("\x80", "t"), DecodeError);           // stray continuation
}

TEST_CASE("transcript normalization maps symbols to words") {
    TimedTranscript t;
    t.recording_id = "r";
    t.words = {{"Hello", 0.0, 0.5}, {"world", 0.6, 1.1}};
    const NormalizedQuery q = normalize_transcript(t);
    CHECK(q.symbols == "HELLO WORLD");
    const std::vector<std::uint32_t> expected{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(q.word_of_symbol == expected);
}

TEST_CASE("apostrophe and trailing period inside transcript words") {
    TimedTranscript t;
    t.recording_id = "r";
    t.words = {{"it's", 0.0, 0.4}, {"Mr.", 0.5, 0.8}};
    const NormalizedQuery q = normalize_transcript(t);
    CHECK(q.symbols == "ITS MR");
    const std::vector<std::uint32_t> expected{0, 0, 0, 0, 1, 1};
    CHECK(q.word_of_symbol == expected);
    // agreement with the character-walk oracle on the joined text
    CHECK(oracles::walk_normalize("it's Mr.").first == "ITS MR");
}

TEST_CASE("punctuation-only transcript is an empty-query error") {
    TimedTranscript t;
    t.recording_id = "r";
    t.words = {{"...", 0.0, 0.3}};
    CHECK_THROWS_AS(normalize_transcript(t), EmptyQueryError);
}

TEST_CASE("transcript contract checks") {
    TimedTranscript t;
    t.recording_id = "r";
    CHECK_THROWS_AS(normalize_transcript(t), ContractError);  // no words
    t.words = {{"hi", -0.1, 0.2}};
    CHECK_THROWS_AS(normalize_transcript(t), ContractError);  // negative start
    t.words = {{"hi", 0.5, 0.2}};
    CHECK_THROWS_AS(normalize_transcript(t), ContractError);  // end < start
    // a word that normalizes to empty is skipped, not fatal
    t.words = {{"hi", 0.0, 0.2}, {"...", 0.3, 0.4}, {"there", 0.5, 0.9}};
    const NormalizedQuery q = normalize_transcript(t);
    CHECK(q.symbols == "HI THERE");
    CHECK(q.word_of_symbol[2] == 0);  // the joining space maps to the earlier word
}

namespace {

std::string random_text(std::mt19937& rng, std::size_t pieces) {
    static const std::vector<std::string> pool = {
        "word", "Time", "42",   "x",     " ",    "  ",     "\n",  "\t",  ",", ".",
        "!",    "?",    "'",    "don't", "-",    "(",      ")",   ";",   ":", "\"",
        "\xC3\xA9",     "\xE6\xBC\xA2",  "\xF0\x9F\x98\x80", "Mr.", "end"};
    std::string out;
    for (std::size_t k = 0; k < pieces; ++k)
        out += pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    return out;
}

}  // namespace

TEST_CASE("random texts agree with the character-walk oracle") {
    std::mt19937 rng(20240811);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string raw =
            random_text(rng, std::uniform_int_distribution<std::size_t>(0, 40)(rng));
        const TextSource ts = normalize_text(raw, "t");
        const auto [sym, bytes] = oracles::walk_normalize(raw);
        INFO("raw: " << raw);
        CHECK(ts.symbols == sym);
        CHECK(ts.byte_of_symbol == bytes);
    }
}

TEST_CASE("normalization properties hold on random texts") {
    std::mt19937 rng(977);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string raw =
            random_text(rng, std::uniform_int_distribution<std::size_t>(1, 40)(rng));
        const TextSource ts = normalize_text(raw, "t");

        // idempotence
        CHECK(normalize_text(ts.symbols, "t").symbols == ts.symbols);

        REQUIRE(ts.byte_of_symbol.size() == ts.symbols.size());
        for (std::size_t s = 0; s < ts.symbols.size(); ++s) {
            // anchor: the mapped byte case-folds to the symbol
            if (ts.symbols[s] != ' ') {
                const char orig = ts.raw[ts.byte_of_symbol[s]];
                const char folded = orig >= 'a' && orig <= 'z'
                                        ? static_cast<char>(orig - 'a' + 'A')
                                        : orig;
                CHECK(folded == ts.symbols[s]);
            }
            // strict monotonicity and no double spaces
            if (s > 0) {
                CHECK(ts.byte_of_symbol[s] > ts.byte_of_symbol[s - 1]);
                CHECK(!(ts.symbols[s] == ' ' && ts.symbols[s - 1] == ' '));
            }
            CHECK(ts.byte_of_symbol[s] < ts.raw.size());
        }
        if (!ts.symbols.empty()) {
            CHECK(ts.symbols.front() != ' ');
            CHECK(ts.symbols.back() != ' ');
        }
    }
}
