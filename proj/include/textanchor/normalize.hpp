#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textanchor/error.hpp"
#include "textanchor/transcript.hpp"

namespace textanchor {

/// A reference document together with its normalized symbol sequence.
///
/// `symbols` holds only uppercase ASCII letters, digits and single spaces.
/// `byte_of_symbol[s]` is the offset of the first raw byte that produced
/// symbol `s`; for a space that is the first byte of the separator run it
/// collapses.
struct TextSource {
    std::string text_path;
    std::string raw;
    std::string symbols;
    std::vector<std::size_t> byte_of_symbol;
};

/// Normalized transcript symbols with a map back to the source word list.
/// The space joining two words maps to the earlier word.
struct NormalizedQuery {
    std::string symbols;
    std::vector<std::uint32_t> word_of_symbol;
};

namespace detail {

struct DecodedChar {
    char32_t cp;
    unsigned len;
};

/// Decodes the UTF-8 sequence starting at `pos`. Rejects overlong forms,
/// surrogates, values above U+10FFFF and truncated sequences.
inline DecodedChar decode_utf8(std::string_view s, std::size_t pos) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(pos);
    if (b0 < 0x80) return {b0, 1};
    unsigned len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07u;
    } else {
        throw DecodeError(pos, "invalid lead byte");
    }
    if (pos + len > s.size()) throw DecodeError(pos, "truncated sequence");
    for (unsigned k = 1; k < len; ++k) {
        const unsigned char bk = byte(pos + k);
        if ((bk & 0xC0) != 0x80) throw DecodeError(pos + k, "invalid continuation byte");
        cp = (cp << 6) | (bk & 0x3Fu);
    }
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinByLen[len]) throw DecodeError(pos, "overlong encoding");
    if (cp >= 0xD800 && cp <= 0xDFFF) throw DecodeError(pos, "surrogate code point");
    if (cp > 0x10FFFF) throw DecodeError(pos, "code point out of range");
    return {cp, len};
}

enum class SymClass { keep, separator, deleted };

/// ASCII alphanumerics are kept (upper-cased), apostrophes vanish without a
/// trace, every other ASCII character separates words. Non-ASCII characters
/// are dropped entirely; case folding never brings them back into ASCII.
inline SymClass classify(char32_t cp, char& out) {
    if (cp >= 0x80) return SymClass::deleted;
    const char c = static_cast<char>(cp);
    if (c >= 'a' && c <= 'z') {
        out = static_cast<char>(c - 'a' + 'A');
        return SymClass::keep;
    }
    if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
        out = c;
        return SymClass::keep;
    }
    if (c == '\'') return SymClass::deleted;
    return SymClass::separator;
}

}  // namespace detail

/// Normalizes a raw UTF-8 document, keeping a per-symbol byte map.
/// Throws DecodeError (with byte offset) on invalid UTF-8.
inline TextSource normalize_text(std::string raw, std::string path) {
    TextSource out;
    out.text_path = std::move(path);
    out.raw = std::move(raw);
    bool sep_pending = false;
    std::size_t sep_offset = 0;
    for (std::size_t pos = 0; pos < out.raw.size();) {
        const auto [cp, len] = detail::decode_utf8(out.raw, pos);
        char c = 0;
        switch (detail::classify(cp, c)) {
            case detail::SymClass::keep:
                if (sep_pending && !out.symbols.empty()) {
                    out.symbols.push_back(' ');
                    out.byte_of_symbol.push_back(sep_offset);
                }
                sep_pending = false;
                out.symbols.push_back(c);
                out.byte_of_symbol.push_back(pos);
                break;
            case detail::SymClass::separator:
                if (!sep_pending) {
                    sep_pending = true;
                    sep_offset = pos;
                }
                break;
            case detail::SymClass::deleted:
                break;
        }
        pos += len;
    }
    return out;
}

/// Normalizes transcript words into one symbol string, single spaces at word
/// boundaries. Throws EmptyQueryError if nothing survives normalization.
inline NormalizedQuery normalize_transcript(const TimedTranscript& t) {
    if (t.words.empty()) throw ContractError("transcript '" + t.recording_id + "' has no words");
    NormalizedQuery q;
    bool sep_pending = false;
    std::uint32_t sep_word = 0;
    for (std::uint32_t wi = 0; wi < t.words.size(); ++wi) {
        const TimedWord& w = t.words[wi];
        if (w.start_s < 0.0 || w.end_s < w.start_s)
            throw ContractError("transcript '" + t.recording_id + "': bad times for word " +
                                std::to_string(wi));
        if (!q.symbols.empty() && !sep_pending) {
            sep_pending = true;
            sep_word = q.word_of_symbol.back();
        }
        for (std::size_t pos = 0; pos < w.word.size();) {
            const auto [cp, len] = detail::decode_utf8(w.word, pos);
            char c = 0;
            switch (detail::classify(cp, c)) {
                case detail::SymClass::keep:
                    if (sep_pending && !q.symbols.empty()) {
                        q.symbols.push_back(' ');
                        q.word_of_symbol.push_back(sep_word);
                    }
                    sep_pending = false;
                    q.symbols.push_back(c);
                    q.word_of_symbol.push_back(wi);
                    break;
                case detail::SymClass::separator:
                    if (!sep_pending) {
                        sep_pending = true;
                        sep_word = wi;
                    }
                    break;
                case detail::SymClass::deleted:
                    break;
            }
            pos += len;
        }
    }
    if (q.symbols.empty())
        throw EmptyQueryError("transcript '" + t.recording_id +
                              "': every word normalized to empty");
    return q;
}

}  // namespace textanchor
