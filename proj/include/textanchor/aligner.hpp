#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <span>
#include <vector>

#include "textanchor/error.hpp"
#include "textanchor/locator.hpp"

namespace textanchor {

enum class EditKind : std::uint8_t { match, substitute, insert, del };

inline char edit_kind_char(EditKind k) {
    switch (k) {
        case EditKind::match: return 'M';
        case EditKind::substitute: return 'S';
        case EditKind::insert: return 'I';
        case EditKind::del: return 'D';
    }
    return '?';
}

/// One edit operation. `qi` is -1 for inserts, `tj` is -1 for deletes.
struct EditOp {
    EditKind kind = EditKind::match;
    std::int64_t qi = -1;
    std::int64_t tj = -1;

    bool consumes_query() const { return qi >= 0; }
    bool consumes_target() const { return tj >= 0; }
};

/// Edit script over a query slice and a target window. The query span covers
/// the ops that consume query symbols, consecutively; likewise the target
/// span. `cost` counts the non-match ops.
struct Alignment {
    std::vector<EditOp> ops;
    std::size_t q_begin = 0;
    std::size_t q_end = 0;
    std::size_t t_begin = 0;
    std::size_t t_end = 0;
    std::size_t cost = 0;
};

/// Instrumentation for the anchored aligner.
struct AlignStats {
    std::size_t dp_cells = 0;
    std::size_t anchors_used = 0;
    std::size_t anchors_filtered = 0;
    bool fallback = false;
    std::vector<MatchPair> used_anchors;
};

struct AlignConfig {
    std::uint32_t anchor_spacing = 32;  ///< keep at most one anchor per this many query symbols
    std::uint32_t slack = 8;            ///< border added around each anchor block
};

enum class AlignMode {
    global,  ///< both sequences fully consumed
    infix,   ///< query fully consumed, target start/end free
};

/// Shifts all target indices by `offset` (e.g. from region-local to document
/// coordinates).
inline void shift_alignment_target(Alignment& a, std::size_t offset) {
    a.t_begin += offset;
    a.t_end += offset;
    for (EditOp& op : a.ops)
        if (op.tj >= 0) op.tj += static_cast<std::int64_t>(offset);
}

namespace detail {

inline constexpr std::uint32_t kInfCost = std::numeric_limits<std::uint32_t>::max() / 2;

/// Shared traceback over a row-banded cost table. `lo[i]` is the first column
/// stored for row i, `cost(i, j)` reads a cell (infinite outside the band).
/// Tie order: match > substitute > delete > insert.
template <typename CostFn>
inline void traceback_banded(std::span<const std::uint32_t> q, std::span<const std::uint32_t> t,
                             CostFn cost, bool free_start, std::size_t end_i, std::size_t end_j,
                             Alignment& out) {
    std::size_t i = end_i, j = end_j;
    while (i > 0 || (!free_start && j > 0)) {
        const std::uint32_t here = cost(i, j);
        if (i > 0 && j > 0) {
            const std::uint32_t diag = cost(i - 1, j - 1);
            const bool is_match = q[i - 1] == t[j - 1];
            if (is_match && diag == here) {
                out.ops.push_back({EditKind::match, static_cast<std::int64_t>(i - 1),
                                   static_cast<std::int64_t>(j - 1)});
                --i;
                --j;
                continue;
            }
            if (!is_match && diag + 1 == here) {
                out.ops.push_back({EditKind::substitute, static_cast<std::int64_t>(i - 1),
                                   static_cast<std::int64_t>(j - 1)});
                --i;
                --j;
                continue;
            }
        }
        if (i > 0 && cost(i - 1, j) + 1 == here) {
            out.ops.push_back({EditKind::del, static_cast<std::int64_t>(i - 1), -1});
            --i;
            continue;
        }
        if (j > 0 && cost(i, j - 1) + 1 == here) {
            out.ops.push_back({EditKind::insert, -1, static_cast<std::int64_t>(j - 1)});
            --j;
            continue;
        }
        throw Error("alignment traceback lost its path");  // indicates a DP bug
    }
    out.t_begin = j;
    std::reverse(out.ops.begin(), out.ops.end());
}

}  // namespace detail

/// Minimum-cost Levenshtein alignment with unit costs and full traceback.
/// Quadratic time and memory; intended for moderate slices and as the
/// fallback of align_with_anchors.
inline Alignment levenshtein_align(std::span<const std::uint32_t> query,
                                   std::span<const std::uint32_t> target, AlignMode mode,
                                   AlignStats* stats = nullptr) {
    const std::size_t m = query.size();
    const std::size_t n = target.size();
    std::vector<std::uint32_t> dp((m + 1) * (n + 1));
    const auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
        return dp[i * (n + 1) + j];
    };
    for (std::size_t j = 0; j <= n; ++j)
        at(0, j) = mode == AlignMode::global ? static_cast<std::uint32_t>(j) : 0;
    for (std::size_t i = 1; i <= m; ++i) {
        at(i, 0) = static_cast<std::uint32_t>(i);
        for (std::size_t j = 1; j <= n; ++j) {
            const std::uint32_t sub = query[i - 1] == target[j - 1] ? 0 : 1;
            at(i, j) = std::min({at(i - 1, j - 1) + sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
        }
    }

    std::size_t end_j = n;
    if (mode == AlignMode::infix) {
        end_j = 0;
        for (std::size_t j = 1; j <= n; ++j)  // ties keep the earliest window
            if (at(m, j) < at(m, end_j)) end_j = j;
    }

    Alignment out;
    out.q_end = m;
    out.t_end = end_j;
    out.cost = at(m, end_j);
    detail::traceback_banded(
        query, target, [&](std::size_t i, std::size_t j) { return at(i, j); },
        mode == AlignMode::infix, m, end_j, out);
    if (mode == AlignMode::global) out.t_begin = 0;
    if (stats) stats->dp_cells = (m + 1) * (n + 1);
    return out;
}

/// Alignment of the whole query against a located target region, restricted
/// to blocks along the anchor backbone. Mismatching anchors are dropped, the
/// rest are thinned to one per `anchor_spacing` query symbols, and each block
/// rectangle grows a `slack` border clipped at the neighboring anchors. The
/// target start and end stay free, as in infix mode. With no usable anchors
/// the whole region is aligned directly (slow path, warns on stderr).
inline Alignment align_with_anchors(std::span<const std::uint32_t> query,
                                    std::span<const std::uint32_t> region,
                                    const AnchorChain& chain, AlignConfig cfg = {},
                                    AlignStats* stats = nullptr) {
    const std::size_t m = query.size();
    const std::size_t n = region.size();
    if (cfg.anchor_spacing == 0) throw ContractError("anchor_spacing must be positive");

    // keep anchors that really match, strictly increasing in both coordinates
    // and at least anchor_spacing apart on the query
    std::vector<MatchPair> anchors;
    std::size_t filtered = 0;
    for (const MatchPair& p : chain.pairs) {
        if (p.i >= m || p.j >= n || query[p.i] != region[p.j]) {
            ++filtered;
            continue;
        }
        if (!anchors.empty() &&
            (p.i < anchors.back().i + cfg.anchor_spacing || p.j <= anchors.back().j))
            continue;
        anchors.push_back(p);
    }
    if (stats) {
        stats->anchors_used = anchors.size();
        stats->anchors_filtered = filtered;
        stats->used_anchors = anchors;
        stats->fallback = anchors.empty();
    }
    if (anchors.empty()) {
        if (!chain.empty())
            std::cerr << "textanchor: all " << chain.size()
                      << " anchors filtered, falling back to full alignment of "
                      << m << " x " << n << " symbols\n";
        return levenshtein_align(query, region, AlignMode::infix, stats);
    }

    // per-row column bounds over cell space (m+1 rows, n+1 cols), from the
    // union of slack-expanded blocks between consecutive anchors
    const std::size_t num_anchors = anchors.size();
    std::vector<std::size_t> lo(m + 1, n + 1), hi(m + 1, 0);
    const auto anchor_i = [&](std::size_t k) -> std::size_t {
        if (k == 0) return 0;
        if (k > num_anchors) return m;
        return anchors[k - 1].i;
    };
    const auto anchor_j = [&](std::size_t k) -> std::size_t {
        if (k == 0) return 0;
        if (k > num_anchors) return n;
        return anchors[k - 1].j;
    };
    for (std::size_t k = 0; k <= num_anchors; ++k) {
        // block k runs from backbone point k to point k+1
        const std::size_t row_first = anchor_i(k);
        const std::size_t row_last = k == num_anchors ? m : anchor_i(k + 1);
        const std::size_t prev_j = k == 0 ? 0 : anchor_j(k - 1);
        const std::size_t next_j = k + 2 > num_anchors ? n : anchor_j(k + 2);
        const std::size_t col_lo =
            std::max(prev_j, anchor_j(k) > cfg.slack ? anchor_j(k) - cfg.slack : 0);
        const std::size_t col_hi = std::min(next_j, anchor_j(k + 1) + cfg.slack);
        for (std::size_t r = row_first; r <= row_last; ++r) {
            lo[r] = std::min(lo[r], col_lo);
            hi[r] = std::max(hi[r], col_hi);
        }
    }

    // banded DP over ragged rows
    std::vector<std::size_t> offset(m + 2, 0);
    for (std::size_t i = 0; i <= m; ++i) offset[i + 1] = offset[i] + (hi[i] - lo[i] + 1);
    std::vector<std::uint32_t> dp(offset[m + 1], detail::kInfCost);
    const auto cell = [&](std::size_t i, std::size_t j) -> std::uint32_t {
        if (j < lo[i] || j > hi[i]) return detail::kInfCost;
        return dp[offset[i] + (j - lo[i])];
    };

    for (std::size_t j = lo[0]; j <= hi[0]; ++j) dp[offset[0] + (j - lo[0])] = 0;  // free start
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = lo[i]; j <= hi[i]; ++j) {
            std::uint32_t best = detail::kInfCost;
            if (j > 0)
                best = std::min(best,
                                cell(i - 1, j - 1) + (query[i - 1] == region[j - 1] ? 0u : 1u));
            best = std::min(best, cell(i - 1, j) + 1);
            if (j > lo[i]) best = std::min(best, dp[offset[i] + (j - lo[i] - 1)] + 1);
            dp[offset[i] + (j - lo[i])] = best;
        }
    }

    std::size_t end_j = lo[m];
    for (std::size_t j = lo[m]; j <= hi[m]; ++j)
        if (cell(m, j) < cell(m, end_j)) end_j = j;

    Alignment out;
    out.q_end = m;
    out.t_end = end_j;
    out.cost = cell(m, end_j);
    detail::traceback_banded(query, region, cell, /*free_start=*/true, m, end_j, out);
    if (stats) stats->dp_cells = dp.size();
    return out;
}

}  // namespace textanchor
