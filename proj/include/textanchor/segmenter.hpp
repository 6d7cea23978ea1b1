#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "textanchor/aligner.hpp"
#include "textanchor/normalize.hpp"
#include "textanchor/transcript.hpp"

namespace textanchor {

/// Silence longer than this contributes no extra boundary score.
inline constexpr double kSilenceCapS = 3.0;

enum class BoundaryKind : std::uint8_t { bos, eos };

/// Candidate begin/end of segment, placed at sentence-final punctuation.
/// `byte_index` is the first byte of the cut for a BOS and one past the
/// trailing punctuation for an EOS, so a (BOS, EOS) pair directly yields the
/// byte span of the cut text.
struct BoundaryCandidate {
    BoundaryKind kind = BoundaryKind::bos;
    std::size_t sym_index = 0;
    std::size_t byte_index = 0;
    double time_s = 0.0;
    double silence_s = 0.0;
    std::size_t local_errors = 0;
    double score = 0.0;
};

struct SegmentCandidate {
    BoundaryCandidate bos;
    BoundaryCandidate eos;
    double duration_s = 0.0;
    std::size_t matches = 0;
    std::size_t errors = 0;
    double score = 0.0;
};

struct SegmenterConfig {
    std::size_t error_window = 10;  ///< symbols around a boundary counted as local errors
    double w_sil = 1.0;
    double w_match = 1.0;
    double w_err = 2.0;
    double min_duration_s = 2.0;
    double pref_min_s = 5.0;
    double pref_max_s = 20.0;
    double max_duration_s = 30.0;
    int best_per_boundary = 4;
    double overlap_fraction = 0.25;
    /// When set, silences at least this long also generate boundaries.
    std::optional<double> silence_split_threshold_s;
};

namespace detail {

inline bool is_sentence_punct(char c) { return c == '.' || c == '?' || c == '!'; }

/// Prefix sums over the alignment ops, keyed by target position. Deletes
/// carry no target index and inherit the running position.
struct OpsIndex {
    std::vector<std::size_t> tpos;
    std::vector<std::uint32_t> err_prefix;    // errors among ops[0..k)
    std::vector<std::uint32_t> match_prefix;  // matches among ops[0..k)
    std::vector<std::size_t> aligned_tj;      // target positions of match/substitute ops
    std::vector<std::uint32_t> aligned_word;  // transcript word aligned there

    OpsIndex(const Alignment& a, const NormalizedQuery& query) {
        tpos.reserve(a.ops.size());
        err_prefix.reserve(a.ops.size() + 1);
        match_prefix.reserve(a.ops.size() + 1);
        err_prefix.push_back(0);
        match_prefix.push_back(0);
        std::size_t running = a.t_begin;
        for (const EditOp& op : a.ops) {
            if (op.tj >= 0) running = static_cast<std::size_t>(op.tj);
            tpos.push_back(running);
            err_prefix.push_back(err_prefix.back() + (op.kind == EditKind::match ? 0 : 1));
            match_prefix.push_back(match_prefix.back() + (op.kind == EditKind::match ? 1 : 0));
            if (op.qi >= 0 && op.tj >= 0) {
                aligned_tj.push_back(static_cast<std::size_t>(op.tj));
                aligned_word.push_back(query.word_of_symbol[static_cast<std::size_t>(op.qi)]);
            }
        }
    }

    std::size_t errors_in(std::size_t sym_lo, std::size_t sym_hi) const {  // inclusive range
        const auto lo = std::lower_bound(tpos.begin(), tpos.end(), sym_lo) - tpos.begin();
        const auto hi = std::upper_bound(tpos.begin(), tpos.end(), sym_hi) - tpos.begin();
        return err_prefix[hi] - err_prefix[lo];
    }

    std::size_t matches_in(std::size_t sym_lo, std::size_t sym_hi) const {
        const auto lo = std::lower_bound(tpos.begin(), tpos.end(), sym_lo) - tpos.begin();
        const auto hi = std::upper_bound(tpos.begin(), tpos.end(), sym_hi) - tpos.begin();
        return match_prefix[hi] - match_prefix[lo];
    }

    /// Transcript word aligned at the last target position <= sym.
    std::optional<std::uint32_t> word_at_or_before(std::size_t sym) const {
        auto it = std::upper_bound(aligned_tj.begin(), aligned_tj.end(), sym);
        if (it == aligned_tj.begin()) return std::nullopt;
        return aligned_word[(it - aligned_tj.begin()) - 1];
    }

    /// Transcript word aligned at the first target position >= sym.
    std::optional<std::uint32_t> word_at_or_after(std::size_t sym) const {
        auto it = std::lower_bound(aligned_tj.begin(), aligned_tj.end(), sym);
        if (it == aligned_tj.end()) return std::nullopt;
        return aligned_word[it - aligned_tj.begin()];
    }

    /// First aligned word with an index above `w` (the next spoken word).
    std::optional<std::uint32_t> first_word_after(std::uint32_t w) const {
        auto it = std::upper_bound(aligned_word.begin(), aligned_word.end(), w);
        if (it == aligned_word.end()) return std::nullopt;
        return *it;
    }

    /// Last aligned word with an index below `w`.
    std::optional<std::uint32_t> last_word_before(std::uint32_t w) const {
        auto it = std::lower_bound(aligned_word.begin(), aligned_word.end(), w);
        if (it == aligned_word.begin()) return std::nullopt;
        return *(it - 1);
    }
};

inline double minmax_norm(double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
}

}  // namespace detail

/// Places BOS/EOS candidates at sentence-final punctuation ('.', '?', '!')
/// inside the aligned region and fills in time, silence and local error
/// counts. The alignment's target indices must be document symbol positions.
/// Times fall in the middle of the silence between the surrounding words.
inline std::vector<BoundaryCandidate> find_boundaries(const TextSource& text,
                                                      const Alignment& alignment,
                                                      const NormalizedQuery& query,
                                                      const TimedTranscript& transcript,
                                                      const SegmenterConfig& cfg = {}) {
    std::vector<BoundaryCandidate> out;
    if (alignment.ops.empty() || text.symbols.empty()) return out;
    const std::size_t t_begin = alignment.t_begin;
    const std::size_t t_end = alignment.t_end;
    if (t_begin >= t_end || t_end > text.symbols.size()) return out;

    const detail::OpsIndex index(alignment, query);
    const double audio_end = transcript.words.empty() ? 0.0 : transcript.words.back().end_s;

    const auto boundary_times = [&](std::size_t sym, BoundaryKind kind, BoundaryCandidate& b) {
        // the spoken words on either side of the boundary; the space symbol
        // between words maps to the earlier word, so the far side is found by
        // word index, not by target position
        std::optional<std::uint32_t> left, right;
        if (kind == BoundaryKind::eos) {
            left = index.word_at_or_before(sym);
            right = left ? index.first_word_after(*left) : index.word_at_or_after(sym + 1);
        } else {
            right = index.word_at_or_after(sym);
            left = right ? index.last_word_before(*right)
                         : (sym > 0 ? index.word_at_or_before(sym - 1) : std::nullopt);
        }
        const double left_end = left ? transcript.words[*left].end_s : 0.0;
        const double right_start = right ? transcript.words[*right].start_s : audio_end;
        const double gap = std::max(0.0, right_start - left_end);
        b.time_s = left_end + gap / 2.0;
        b.silence_s = std::min(gap, kSilenceCapS);
        const std::size_t win_lo = sym > cfg.error_window ? sym - cfg.error_window : 0;
        b.local_errors = index.errors_in(win_lo, sym + cfg.error_window);
    };

    std::set<std::pair<int, std::size_t>> seen;  // (kind, sym_index)
    const auto push = [&](BoundaryKind kind, std::size_t sym, std::size_t byte) {
        if (!seen.insert({static_cast<int>(kind), sym}).second) return;
        BoundaryCandidate b;
        b.kind = kind;
        b.sym_index = sym;
        b.byte_index = byte;
        boundary_times(sym, kind, b);
        out.push_back(b);
    };

    // scan the raw bytes of the aligned region, starting at the previous
    // symbol (a collapsed space points at its separator run, so a sentence
    // break right before the region still yields the opening BOS)
    const std::size_t byte_lo =
        t_begin > 0 ? text.byte_of_symbol[t_begin - 1] : text.byte_of_symbol[t_begin];
    const std::size_t byte_hi =
        t_end < text.symbols.size() ? text.byte_of_symbol[t_end] : text.raw.size();

    for (std::size_t b = byte_lo; b < byte_hi;) {
        if (!detail::is_sentence_punct(text.raw[b])) {
            ++b;
            continue;
        }
        std::size_t run_end = b;
        while (run_end < text.raw.size() && detail::is_sentence_punct(text.raw[run_end]))
            ++run_end;

        // EOS: last word symbol whose byte precedes the punctuation run
        {
            auto it = std::lower_bound(text.byte_of_symbol.begin(), text.byte_of_symbol.end(), b);
            std::size_t s = it - text.byte_of_symbol.begin();
            while (s > 0 && text.symbols[s - 1] == ' ') --s;
            if (s > t_begin && s <= t_end) push(BoundaryKind::eos, s - 1, run_end);
        }
        // BOS: first word symbol whose byte follows the run
        {
            auto it = std::lower_bound(text.byte_of_symbol.begin(), text.byte_of_symbol.end(),
                                       run_end);
            std::size_t s = it - text.byte_of_symbol.begin();
            while (s < text.symbols.size() && text.symbols[s] == ' ') ++s;
            if (s >= t_begin && s < t_end)
                push(BoundaryKind::bos, s, text.byte_of_symbol[s]);
        }
        b = run_end;
    }

    // optional extra boundaries at long silences
    if (cfg.silence_split_threshold_s) {
        const double threshold = *cfg.silence_split_threshold_s;
        for (std::size_t w = 0; w + 1 < transcript.words.size(); ++w) {
            const double gap = transcript.words[w + 1].start_s - transcript.words[w].end_s;
            if (gap < threshold) continue;
            // last aligned symbol of word w and first of word w+1
            auto hi = std::upper_bound(index.aligned_word.begin(), index.aligned_word.end(),
                                       static_cast<std::uint32_t>(w));
            auto lo = std::lower_bound(index.aligned_word.begin(), index.aligned_word.end(),
                                       static_cast<std::uint32_t>(w + 1));
            if (hi != index.aligned_word.begin() &&
                index.aligned_word[(hi - index.aligned_word.begin()) - 1] == w) {
                const std::size_t sym = index.aligned_tj[(hi - index.aligned_word.begin()) - 1];
                push(BoundaryKind::eos, sym, text.byte_of_symbol[sym] + 1);
            }
            if (lo != index.aligned_word.end() &&
                index.aligned_word[lo - index.aligned_word.begin()] == w + 1) {
                const std::size_t sym = index.aligned_tj[lo - index.aligned_word.begin()];
                push(BoundaryKind::bos, sym, text.byte_of_symbol[sym]);
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const BoundaryCandidate& a, const BoundaryCandidate& b) {
        if (a.sym_index != b.sym_index) return a.sym_index < b.sym_index;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    return out;
}

/// Fills boundary scores: silence rewarded, local errors penalized, both
/// min-max normalized across the recording's candidates. A component that is
/// constant across candidates contributes zero.
inline void score_boundaries(std::vector<BoundaryCandidate>& cands,
                             const SegmenterConfig& cfg = {}) {
    if (cands.empty()) return;
    double sil_lo = cands[0].silence_s, sil_hi = cands[0].silence_s;
    double err_lo = static_cast<double>(cands[0].local_errors);
    double err_hi = err_lo;
    for (const BoundaryCandidate& b : cands) {
        sil_lo = std::min(sil_lo, b.silence_s);
        sil_hi = std::max(sil_hi, b.silence_s);
        err_lo = std::min(err_lo, static_cast<double>(b.local_errors));
        err_hi = std::max(err_hi, static_cast<double>(b.local_errors));
    }
    for (BoundaryCandidate& b : cands) {
        b.score = cfg.w_sil * detail::minmax_norm(b.silence_s, sil_lo, sil_hi) -
                  cfg.w_err * detail::minmax_norm(static_cast<double>(b.local_errors), err_lo,
                                                  err_hi);
    }
}

/// Piecewise-linear preference over the allowed duration band.
inline double duration_score(double d, const SegmenterConfig& cfg = {}) {
    if (d < cfg.min_duration_s || d > cfg.max_duration_s) return 0.0;
    if (d < cfg.pref_min_s)
        return (d - cfg.min_duration_s) / (cfg.pref_min_s - cfg.min_duration_s);
    if (d <= cfg.pref_max_s) return 1.0;
    return (cfg.max_duration_s - d) / (cfg.max_duration_s - cfg.pref_max_s);
}

/// Pairs each BOS with its best-scoring feasible EOS partners and vice versa,
/// then scores the union. Match/error counts are taken over the candidate's
/// symbol span and min-max normalized across candidates.
inline std::vector<SegmentCandidate> enumerate_segments(
    const std::vector<BoundaryCandidate>& bounds, const Alignment& alignment,
    const NormalizedQuery& query, const SegmenterConfig& cfg = {}) {
    std::vector<const BoundaryCandidate*> bos_list, eos_list;
    for (const BoundaryCandidate& b : bounds)
        (b.kind == BoundaryKind::bos ? bos_list : eos_list).push_back(&b);

    const auto feasible = [&](const BoundaryCandidate* b, const BoundaryCandidate* e) {
        if (e->sym_index <= b->sym_index) return false;
        const double d = e->time_s - b->time_s;
        return d >= cfg.min_duration_s && d <= cfg.max_duration_s;
    };
    const auto better = [](const BoundaryCandidate* a, const BoundaryCandidate* b) {
        if (a->score != b->score) return a->score > b->score;
        return a->sym_index < b->sym_index;
    };

    std::set<std::pair<std::size_t, std::size_t>> chosen;
    const auto keep_best = [&](const BoundaryCandidate* fixed, bool fixed_is_bos) {
        std::vector<const BoundaryCandidate*> partners;
        for (const BoundaryCandidate* other : fixed_is_bos ? eos_list : bos_list) {
            const BoundaryCandidate* b = fixed_is_bos ? fixed : other;
            const BoundaryCandidate* e = fixed_is_bos ? other : fixed;
            if (feasible(b, e)) partners.push_back(other);
        }
        const std::size_t take =
            std::min<std::size_t>(partners.size(), static_cast<std::size_t>(cfg.best_per_boundary));
        std::partial_sort(partners.begin(), partners.begin() + take, partners.end(), better);
        for (std::size_t k = 0; k < take; ++k) {
            const BoundaryCandidate* b = fixed_is_bos ? fixed : partners[k];
            const BoundaryCandidate* e = fixed_is_bos ? partners[k] : fixed;
            chosen.insert({b->sym_index, e->sym_index});
        }
    };
    for (const BoundaryCandidate* b : bos_list) keep_best(b, true);
    for (const BoundaryCandidate* e : eos_list) keep_best(e, false);

    // materialize candidates in deterministic (bos, eos) order
    const detail::OpsIndex index(alignment, query);
    std::vector<SegmentCandidate> cands;
    cands.reserve(chosen.size());
    for (const auto& [bs, es] : chosen) {
        const BoundaryCandidate* b = nullptr;
        const BoundaryCandidate* e = nullptr;
        for (const BoundaryCandidate* x : bos_list)
            if (x->sym_index == bs) b = x;
        for (const BoundaryCandidate* x : eos_list)
            if (x->sym_index == es) e = x;
        SegmentCandidate s;
        s.bos = *b;
        s.eos = *e;
        s.duration_s = e->time_s - b->time_s;
        s.matches = index.matches_in(bs, es);
        s.errors = index.errors_in(bs, es);
        cands.push_back(s);
    }

    if (!cands.empty()) {
        double m_lo = static_cast<double>(cands[0].matches), m_hi = m_lo;
        double e_lo = static_cast<double>(cands[0].errors), e_hi = e_lo;
        for (const SegmentCandidate& s : cands) {
            m_lo = std::min(m_lo, static_cast<double>(s.matches));
            m_hi = std::max(m_hi, static_cast<double>(s.matches));
            e_lo = std::min(e_lo, static_cast<double>(s.errors));
            e_hi = std::max(e_hi, static_cast<double>(s.errors));
        }
        for (SegmentCandidate& s : cands) {
            s.score = s.bos.score + s.eos.score + duration_score(s.duration_s, cfg) +
                      cfg.w_match * detail::minmax_norm(static_cast<double>(s.matches), m_lo, m_hi) -
                      cfg.w_err * detail::minmax_norm(static_cast<double>(s.errors), e_lo, e_hi);
        }
    }
    return cands;
}

/// Greedy selection in descending score. A candidate survives if its time
/// overlap with every already selected segment stays below
/// `overlap_fraction` of the shorter of the two. Output is in start order.
inline std::vector<SegmentCandidate> select_segments(std::vector<SegmentCandidate> cands,
                                                     const SegmenterConfig& cfg = {}) {
    std::sort(cands.begin(), cands.end(), [](const SegmentCandidate& a, const SegmentCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.bos.time_s != b.bos.time_s) return a.bos.time_s < b.bos.time_s;
        if (a.duration_s != b.duration_s) return a.duration_s > b.duration_s;
        return a.eos.sym_index < b.eos.sym_index;
    });
    std::vector<SegmentCandidate> selected;
    for (const SegmentCandidate& c : cands) {
        bool ok = true;
        for (const SegmentCandidate& s : selected) {
            const double lo = std::max(c.bos.time_s, s.bos.time_s);
            const double hi = std::min(c.eos.time_s, s.eos.time_s);
            const double overlap = std::max(0.0, hi - lo);
            if (overlap >= cfg.overlap_fraction * std::min(c.duration_s, s.duration_s)) {
                ok = false;
                break;
            }
        }
        if (ok) selected.push_back(c);
    }
    std::sort(selected.begin(), selected.end(),
              [](const SegmentCandidate& a, const SegmentCandidate& b) {
                  if (a.bos.time_s != b.bos.time_s) return a.bos.time_s < b.bos.time_s;
                  return a.eos.time_s < b.eos.time_s;
              });
    return selected;
}

}  // namespace textanchor
