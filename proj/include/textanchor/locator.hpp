#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "textanchor/error.hpp"
#include "textanchor/suffix_array.hpp"
#include "textanchor/symbols.hpp"

namespace textanchor {

/// One close match: query position i paired with target position j.
struct MatchPair {
    std::uint32_t i = 0;
    std::uint32_t j = 0;

    friend auto operator<=>(const MatchPair&, const MatchPair&) = default;
};

/// Longest chain of pairs: query indices strictly increasing, target indices
/// non-decreasing.
struct AnchorChain {
    std::vector<MatchPair> pairs;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
};

/// Half-open span of target symbol positions.
struct Region {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
};

namespace detail {

/// Compares target suffix j against the query suffix at i, both read as
/// suffixes of the virtual concatenation query + target + sentinel. The query
/// suffix continues through the whole target, so it is strictly longer than
/// any target suffix and ties cannot happen.
inline bool target_suffix_less(const SymbolSeq& query, const SymbolSeq& target,
                               std::size_t j, std::size_t i) {
    const std::size_t m = query.payload_size();
    const std::size_t n = target.payload_size();
    for (std::size_t z = 0;; ++z) {
        const std::size_t a_idx = i + z;
        const std::uint32_t a = a_idx < m ? query.data[a_idx]
                                          : (a_idx - m < n ? target.data[a_idx - m] : kSentinel);
        const std::uint32_t b = j + z < n ? target.data[j + z] : kSentinel;
        if (a != b) return b < a;
        if (b == kSentinel) return false;  // unreachable: lengths always differ
    }
}

}  // namespace detail

/// For every query position, emits the target positions whose suffixes are
/// the nearest neighbors, in suffix order of the concatenated sequence, of
/// the suffix starting at that query position. Up to `matches_per_side`
/// neighbors per direction; fewer at the extremes of the order.
///
/// `target_sa` must be the suffix array of `target`, which makes the index
/// reusable across many queries against the same document.
inline std::vector<MatchPair> find_close_matches(const SymbolSeq& query,
                                                 const SymbolSeq& target,
                                                 const SuffixArray& target_sa,
                                                 int matches_per_side = 1) {
    const std::size_t m = query.payload_size();
    const std::size_t n = target.payload_size();
    if (m == 0 || n == 0) throw ContractError("close matches need non-empty query and target");
    if (target_sa.size() != target.data.size())
        throw ContractError("suffix array does not match the target sequence");
    if (matches_per_side < 1) throw ContractError("matches_per_side must be >= 1");

    std::vector<MatchPair> out;
    out.reserve(m * static_cast<std::size_t>(2 * matches_per_side));
    for (std::size_t i = 0; i < m; ++i) {
        // sa[0] is always the sentinel suffix; real target positions occupy
        // sa[1..n]. Find the first entry whose suffix sorts above the query
        // suffix at i.
        std::size_t lo = 1, hi = n + 1;
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (detail::target_suffix_less(query, target, target_sa.sa[mid], i))
                lo = mid + 1;
            else
                hi = mid;
        }
        for (int k = 1; k <= matches_per_side && lo >= static_cast<std::size_t>(k) + 1; ++k)
            out.push_back({static_cast<std::uint32_t>(i), target_sa.sa[lo - k]});
        for (int k = 0; k < matches_per_side && lo + k <= n; ++k)
            out.push_back({static_cast<std::uint32_t>(i), target_sa.sa[lo + k]});
    }
    return out;
}

/// Convenience overload that builds the target index on the fly.
inline std::vector<MatchPair> find_close_matches(const SymbolSeq& query,
                                                 const SymbolSeq& target,
                                                 int matches_per_side = 1) {
    return find_close_matches(query, target, build_suffix_array(target), matches_per_side);
}

/// Maximum-length chain of pairs: strictly increasing query indices (one
/// anchor per query position), non-decreasing target indices. Input may be
/// unsorted and contain duplicates. O(n log n): sort by (i asc, j desc), then
/// longest non-decreasing subsequence on j — the descending j within one i
/// keeps two pairs of the same query index out of a single chain. Ties
/// prefer smaller j, so the earliest region wins.
inline AnchorChain longest_chain(std::vector<MatchPair> pairs) {
    AnchorChain chain;
    if (pairs.empty()) return chain;
    std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
        if (a.i != b.i) return a.i < b.i;
        return a.j > b.j;
    });
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    const std::size_t p = pairs.size();
    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
    std::vector<std::uint32_t> tails;  // pair index ending the best chain per length
    std::vector<std::uint32_t> parent(p, kNone);
    tails.reserve(p);
    for (std::uint32_t k = 0; k < p; ++k) {
        const std::uint32_t j = pairs[k].j;
        auto it = std::upper_bound(tails.begin(), tails.end(), j,
                                   [&](std::uint32_t value, std::uint32_t idx) {
                                       return value < pairs[idx].j;
                                   });
        if (it != tails.begin()) parent[k] = *(it - 1);
        if (it == tails.end())
            tails.push_back(k);
        else
            *it = k;
    }

    chain.pairs.resize(tails.size());
    std::uint32_t at = tails.back();
    for (std::size_t slot = tails.size(); slot-- > 0;) {
        chain.pairs[slot] = pairs[at];
        at = parent[at];
    }
    return chain;
}

/// Target span implied by a chain: from the first anchor back over the
/// not-yet-matched query prefix, to the last anchor plus the remaining query
/// length, padded by `margin` on both sides and clamped to the target.
inline Region locate_region(const AnchorChain& chain, std::size_t target_len,
                            std::size_t query_len, std::size_t margin) {
    if (chain.empty()) throw LocateError("empty anchor chain: query cannot be located");
    const MatchPair first = chain.pairs.front();
    const MatchPair last = chain.pairs.back();
    const std::size_t lead = first.i + margin;
    Region r;
    r.begin = first.j > lead ? first.j - lead : 0;
    r.end = std::min(target_len, static_cast<std::size_t>(last.j) + (query_len - last.i) + margin);
    return r;
}

/// Default slack around the located region.
inline std::size_t default_region_margin(std::size_t query_len) {
    return std::max<std::size_t>(64, query_len / 100);
}

}  // namespace textanchor
