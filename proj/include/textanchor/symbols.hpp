#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "textanchor/error.hpp"

namespace textanchor {

/// Code 0 is the sentinel; it sorts below every real symbol.
inline constexpr std::uint32_t kSentinel = 0;

/// Dense codes for the normalized alphabet: space, digits, letters.
/// 38 values including the sentinel.
inline constexpr std::uint32_t kTextAlphabetSize = 38;

inline std::uint32_t code_of(char c) {
    if (c == ' ') return 1;
    if (c >= '0' && c <= '9') return 2 + static_cast<std::uint32_t>(c - '0');
    if (c >= 'A' && c <= 'Z') return 12 + static_cast<std::uint32_t>(c - 'A');
    throw ContractError(std::string("symbol not in normalized alphabet: '") + c + "'");
}

inline char char_of(std::uint32_t code) {
    if (code == 1) return ' ';
    if (code >= 2 && code <= 11) return static_cast<char>('0' + code - 2);
    if (code >= 12 && code <= 37) return static_cast<char>('A' + code - 12);
    throw ContractError("symbol code out of range: " + std::to_string(code));
}

/// Alphabet-coded symbol sequence with a single trailing sentinel.
struct SymbolSeq {
    std::vector<std::uint32_t> data;
    std::uint32_t alphabet_size = kTextAlphabetSize;

    /// Number of payload symbols, excluding the sentinel.
    std::size_t payload_size() const { return data.empty() ? 0 : data.size() - 1; }
};

/// Encodes normalized symbols and appends the sentinel.
inline SymbolSeq make_symbol_seq(std::string_view symbols) {
    SymbolSeq s;
    s.data.reserve(symbols.size() + 1);
    for (char c : symbols) s.data.push_back(code_of(c));
    s.data.push_back(kSentinel);
    return s;
}

/// Encodes normalized symbols without a sentinel (for alignment slices).
inline std::vector<std::uint32_t> encode_symbols(std::string_view symbols) {
    std::vector<std::uint32_t> out;
    out.reserve(symbols.size());
    for (char c : symbols) out.push_back(code_of(c));
    return out;
}

}  // namespace textanchor
