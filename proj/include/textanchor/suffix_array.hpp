#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "textanchor/error.hpp"
#include "textanchor/symbols.hpp"

namespace textanchor {

/// Suffix array and its inverse permutation over one SymbolSeq.
/// Immutable once built; safe to share across threads.
struct SuffixArray {
    std::vector<std::uint32_t> sa;
    std::vector<std::uint32_t> rank;

    std::size_t size() const { return sa.size(); }
};

enum class SaConstruction {
    linear_skew,  ///< worst-case linear difference-cover construction
    doubling,     ///< O(n log n) prefix-doubling, kept for cross-checking
};

namespace detail {

inline bool leq2(std::uint32_t a1, std::uint32_t a2, std::uint32_t b1, std::uint32_t b2) {
    return a1 < b1 || (a1 == b1 && a2 <= b2);
}

inline bool leq3(std::uint32_t a1, std::uint32_t a2, std::uint32_t a3, std::uint32_t b1,
                 std::uint32_t b2, std::uint32_t b3) {
    return a1 < b1 || (a1 == b1 && leq2(a2, a3, b2, b3));
}

/// Stable counting sort of a[0..n) into b, keyed by r[a[i]], keys < k.
inline void radix_pass(const std::uint32_t* a, std::uint32_t* b, const std::uint32_t* r,
                       std::size_t n, std::uint32_t k) {
    std::vector<std::uint32_t> count(static_cast<std::size_t>(k) + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++count[r[a[i]]];
    for (std::uint32_t key = 0, sum = 0; key <= k; ++key) {
        const std::uint32_t c = count[key];
        count[key] = sum;
        sum += c;
    }
    for (std::size_t i = 0; i < n; ++i) b[count[r[a[i]]]++] = a[i];
}

/// Difference-cover (skew/DC3) recursion. `s` holds n values in 1..k with
/// s[n] = s[n+1] = s[n+2] = 0; fills sa[0..n).
inline void skew_rec(const std::uint32_t* s, std::uint32_t* sa, std::size_t n,
                     std::uint32_t k) {
    if (n == 1) {
        sa[0] = 0;
        return;
    }
    if (n == 2) {
        // values are >= 1, so on a tie the shorter suffix is smaller
        const bool zero_first = s[0] < s[1];
        sa[0] = zero_first ? 0 : 1;
        sa[1] = zero_first ? 1 : 0;
        return;
    }

    const std::size_t n0 = (n + 2) / 3, n1 = (n + 1) / 3, n2 = n / 3;
    const std::size_t n02 = n0 + n2;
    std::vector<std::uint32_t> s12(n02 + 3, 0), sa12(n02 + 3, 0);
    std::vector<std::uint32_t> s0(n0), sa0(n0);

    // positions of mod-1 and mod-2 suffixes; "+(n0-n1)" adds a dummy mod-1
    // suffix when n % 3 == 1
    for (std::size_t i = 0, j = 0; i < n + (n0 - n1); ++i)
        if (i % 3 != 0) s12[j++] = static_cast<std::uint32_t>(i);

    // LSB-first radix sort of the mod-1/2 triples
    radix_pass(s12.data(), sa12.data(), s + 2, n02, k);
    radix_pass(sa12.data(), s12.data(), s + 1, n02, k);
    radix_pass(s12.data(), sa12.data(), s, n02, k);

    // lexicographic names for the triples
    std::uint32_t name = 0;
    std::uint32_t c0 = 0, c1 = 0, c2 = 0;
    bool seen = false;
    for (std::size_t i = 0; i < n02; ++i) {
        const std::uint32_t p = sa12[i];
        if (!seen || s[p] != c0 || s[p + 1] != c1 || s[p + 2] != c2) {
            ++name;
            c0 = s[p];
            c1 = s[p + 1];
            c2 = s[p + 2];
            seen = true;
        }
        if (p % 3 == 1)
            s12[p / 3] = name;  // left half
        else
            s12[p / 3 + n0] = name;  // right half
    }

    if (name < n02) {
        skew_rec(s12.data(), sa12.data(), n02, name);
        for (std::size_t i = 0; i < n02; ++i) s12[sa12[i]] = static_cast<std::uint32_t>(i) + 1;
    } else {
        for (std::size_t i = 0; i < n02; ++i) sa12[s12[i] - 1] = static_cast<std::uint32_t>(i);
    }

    // sort mod-0 suffixes by (first char, rank of following mod-1 suffix)
    for (std::size_t i = 0, j = 0; i < n02; ++i)
        if (sa12[i] < n0) s0[j++] = 3 * sa12[i];
    radix_pass(s0.data(), sa0.data(), s, n0, k);

    // merge the two sorted halves
    const auto sa12_pos = [&](std::size_t t) {
        return sa12[t] < n0 ? sa12[t] * 3 + 1 : (sa12[t] - n0) * 3 + 2;
    };
    std::size_t p = 0, t = n0 - n1, out = 0;
    while (out < n) {
        const std::uint32_t i = sa12_pos(t);  // current mod-1/2 suffix
        const std::uint32_t j = sa0[p];       // current mod-0 suffix
        const bool from12 =
            sa12[t] < n0 ? leq2(s[i], s12[sa12[t] + n0], s[j], s12[j / 3])
                         : leq3(s[i], s[i + 1], s12[sa12[t] - n0 + 1], s[j], s[j + 1],
                                s12[j / 3 + n0]);
        if (from12) {
            sa[out++] = i;
            if (++t == n02) {
                while (p < n0) sa[out++] = sa0[p++];
            }
        } else {
            sa[out++] = j;
            if (++p == n0) {
                while (t < n02) sa[out++] = sa12_pos(t++);
            }
        }
    }
}

inline std::vector<std::uint32_t> doubling_sa(const std::vector<std::uint32_t>& s,
                                              std::uint32_t alphabet_size) {
    const std::size_t n = s.size();
    std::vector<std::uint32_t> sa(n), rank(n), tmp(n), order(n);

    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    radix_pass(order.data(), sa.data(), s.data(), n, alphabet_size);
    rank[sa[0]] = 0;
    for (std::size_t i = 1; i < n; ++i)
        rank[sa[i]] = rank[sa[i - 1]] + (s[sa[i]] != s[sa[i - 1]] ? 1 : 0);

    for (std::size_t k = 1; k < n; k <<= 1) {
        if (rank[sa[n - 1]] == n - 1) break;  // all ranks distinct
        // order by second key: suffixes too short first, then shift the
        // current order left by k
        std::size_t idx = 0;
        for (std::size_t i = n - k; i < n; ++i) order[idx++] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < n; ++i)
            if (sa[i] >= k) order[idx++] = sa[i] - static_cast<std::uint32_t>(k);
        // stable sort by first key
        radix_pass(order.data(), sa.data(), rank.data(), n, static_cast<std::uint32_t>(n));
        // recompute ranks for 2k-prefixes
        const auto key2 = [&](std::uint32_t p) {
            return p + k < n ? rank[p + k] + 1 : 0u;
        };
        tmp[sa[0]] = 0;
        for (std::size_t i = 1; i < n; ++i) {
            const bool differs =
                rank[sa[i]] != rank[sa[i - 1]] || key2(sa[i]) != key2(sa[i - 1]);
            tmp[sa[i]] = tmp[sa[i - 1]] + (differs ? 1 : 0);
        }
        rank.swap(tmp);
    }
    return sa;
}

}  // namespace detail

/// Builds the suffix array of `s`. The sentinel must appear exactly once, at
/// the last position; every value must be below `alphabet_size`.
inline SuffixArray build_suffix_array(const SymbolSeq& s,
                                      SaConstruction algo = SaConstruction::linear_skew) {
    const std::size_t n = s.data.size();
    if (n == 0) throw ContractError("suffix array input is empty");
    if (n >= std::numeric_limits<std::uint32_t>::max() - 3)
        throw ContractError("suffix array input too large");
    if (s.data.back() != kSentinel)
        throw ContractError("sentinel missing at the last position");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (s.data[i] == kSentinel)
            throw ContractError("duplicate sentinel at position " + std::to_string(i));
        if (s.data[i] >= s.alphabet_size)
            throw ContractError("symbol value " + std::to_string(s.data[i]) +
                                " outside alphabet at position " + std::to_string(i));
    }

    SuffixArray out;
    out.sa.assign(n, 0);
    if (algo == SaConstruction::doubling) {
        out.sa = detail::doubling_sa(s.data, s.alphabet_size);
    } else {
        // shift values by one so the padding zeros sort below everything
        std::vector<std::uint32_t> shifted(n + 3, 0);
        for (std::size_t i = 0; i < n; ++i) shifted[i] = s.data[i] + 1;
        detail::skew_rec(shifted.data(), out.sa.data(), n, s.alphabet_size + 1);
    }
    out.rank.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) out.rank[out.sa[i]] = static_cast<std::uint32_t>(i);
    return out;
}

}  // namespace textanchor
