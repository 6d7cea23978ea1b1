#pragma once

#include <atomic>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "textanchor/aligner.hpp"
#include "textanchor/error.hpp"
#include "textanchor/locator.hpp"
#include "textanchor/manifest.hpp"
#include "textanchor/normalize.hpp"
#include "textanchor/segmenter.hpp"
#include "textanchor/suffix_array.hpp"
#include "textanchor/symbols.hpp"

namespace textanchor {

/// Every tunable of the pipeline, with library defaults.
struct PipelineConfig {
    std::size_t context_bytes = 1000;
    int close_matches_per_side = 1;
    std::uint32_t anchor_spacing = 32;
    std::uint32_t block_slack = 8;
    std::size_t error_window = 10;
    double w_sil = 1.0;
    double w_match = 1.0;
    double w_err = 2.0;
    double min_duration_s = 2.0;
    double pref_min_s = 5.0;
    double pref_max_s = 20.0;
    double max_duration_s = 30.0;
    double overlap_fraction = 0.25;
    std::optional<double> silence_split_threshold_s;
    int best_per_boundary = 4;
    std::size_t region_margin = 0;  ///< 0 selects max(64, query_len / 100)
    double min_chain_coverage = 0.2;
    double chunk_overlap_s = 2.0;
    int jobs = 1;
    bool no_anchors = false;  ///< debug: force the unconstrained fallback
    std::string speakers_path;

    SegmenterConfig segmenter() const {
        SegmenterConfig s;
        s.error_window = error_window;
        s.w_sil = w_sil;
        s.w_match = w_match;
        s.w_err = w_err;
        s.min_duration_s = min_duration_s;
        s.pref_min_s = pref_min_s;
        s.pref_max_s = pref_max_s;
        s.max_duration_s = max_duration_s;
        s.best_per_boundary = best_per_boundary;
        s.overlap_fraction = overlap_fraction;
        s.silence_split_threshold_s = silence_split_threshold_s;
        return s;
    }

    AlignConfig aligner() const { return {anchor_spacing, block_slack}; }

    void validate() const {
        if (!(min_duration_s > 0 && min_duration_s < pref_min_s && pref_min_s <= pref_max_s &&
              pref_max_s < max_duration_s))
            throw ContractError("duration bands must satisfy 0 < min < pref_min <= pref_max < max");
        if (jobs < 1) throw ContractError("jobs must be >= 1");
        if (close_matches_per_side < 1) throw ContractError("close_matches_per_side must be >= 1");
        if (min_chain_coverage < 0.0 || min_chain_coverage > 1.0)
            throw ContractError("min_chain_coverage must be in [0, 1]");
        if (anchor_spacing == 0) throw ContractError("anchor_spacing must be >= 1");
        if (overlap_fraction < 0.0 || overlap_fraction > 1.0)
            throw ContractError("overlap_fraction must be in [0, 1]");
    }
};

/// Applies the keys present in a JSON config object onto `cfg`.
inline void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j) {
    const auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("context_bytes", cfg.context_bytes);
    get("close_matches_per_side", cfg.close_matches_per_side);
    get("anchor_spacing", cfg.anchor_spacing);
    get("block_slack", cfg.block_slack);
    get("error_window", cfg.error_window);
    get("w_sil", cfg.w_sil);
    get("w_match", cfg.w_match);
    get("w_err", cfg.w_err);
    get("min_duration_s", cfg.min_duration_s);
    get("pref_min_s", cfg.pref_min_s);
    get("pref_max_s", cfg.pref_max_s);
    get("max_duration_s", cfg.max_duration_s);
    get("overlap_fraction", cfg.overlap_fraction);
    get("best_per_boundary", cfg.best_per_boundary);
    get("region_margin", cfg.region_margin);
    get("min_chain_coverage", cfg.min_chain_coverage);
    get("chunk_overlap_s", cfg.chunk_overlap_s);
    get("jobs", cfg.jobs);
    get("speakers_path", cfg.speakers_path);
    if (j.contains("silence_split_threshold_s") && !j.at("silence_split_threshold_s").is_null())
        cfg.silence_split_threshold_s = j.at("silence_split_threshold_s").get<double>();
}

inline PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    PipelineConfig cfg;
    try {
        apply_config_json(cfg, nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error("config file " + path + ": " + e.what());
    }
    return cfg;
}

/// Immutable per-book state, shared by every recording of that book.
struct BookIndex {
    TextSource text;
    SymbolSeq seq;
    SuffixArray sa;
};

inline BookIndex make_book_index(std::string raw, std::string path) {
    BookIndex book;
    book.text = normalize_text(std::move(raw), std::move(path));
    book.seq = make_symbol_seq(book.text.symbols);
    book.sa = build_suffix_array(book.seq);
    return book;
}

inline BookIndex load_book(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open book: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return make_book_index(buf.str(), path);
}

/// How far process_recording runs; earlier stages leave later fields empty.
enum class Stage { locate, align, full };

struct RecordingResult {
    std::string id;
    bool located = false;
    std::string note;
    std::size_t query_len = 0;
    double chain_coverage = 0.0;
    Region region;
    AnchorChain chain;
    Alignment alignment;  // target indices are document symbol positions
    AlignStats align_stats;
    double error_rate = 0.0;
    std::vector<BoundaryCandidate> boundaries;
    std::vector<SegmentCandidate> candidates;
    std::vector<SegmentCandidate> selected;
    std::vector<Cut> cuts;
    double audio_s = 0.0;
    double covered_s = 0.0;
};

inline RecordingResult process_recording(const BookIndex& book, const TimedTranscript& t,
                                         const PipelineConfig& cfg, Stage stage = Stage::full,
                                         std::string_view speaker = "") {
    RecordingResult r;
    r.id = t.recording_id;
    if (!t.words.empty())
        r.audio_s = std::max(0.0, t.words.back().end_s - t.words.front().start_s);

    NormalizedQuery query;
    try {
        query = normalize_transcript(t);
    } catch (const Error& e) {
        r.note = e.what();
        return r;
    }
    r.query_len = query.symbols.size();
    const SymbolSeq query_seq = make_symbol_seq(query.symbols);

    const auto pairs =
        find_close_matches(query_seq, book.seq, book.sa, cfg.close_matches_per_side);
    r.chain = longest_chain(pairs);
    r.chain_coverage =
        r.query_len == 0 ? 0.0 : static_cast<double>(r.chain.size()) / r.query_len;
    if (r.chain.empty() || r.chain_coverage < cfg.min_chain_coverage) {
        r.note = "unlocatable: chain covers " + std::to_string(r.chain_coverage * 100.0) +
                 "% of the query";
        return r;
    }
    const std::size_t margin =
        cfg.region_margin > 0 ? cfg.region_margin : default_region_margin(r.query_len);
    r.region = locate_region(r.chain, book.seq.payload_size(), r.query_len, margin);
    r.located = true;
    if (stage == Stage::locate) return r;

    AnchorChain local_chain;
    if (!cfg.no_anchors) {
        local_chain.pairs.reserve(r.chain.size());
        for (const MatchPair& p : r.chain.pairs)
            if (p.j >= r.region.begin && p.j < r.region.end)
                local_chain.pairs.push_back(
                    {p.i, p.j - static_cast<std::uint32_t>(r.region.begin)});
    }
    const std::span<const std::uint32_t> query_syms(query_seq.data.data(), r.query_len);
    const std::span<const std::uint32_t> region_syms(book.seq.data.data() + r.region.begin,
                                                     r.region.length());
    r.alignment = align_with_anchors(query_syms, region_syms, local_chain, cfg.aligner(),
                                     &r.align_stats);
    shift_alignment_target(r.alignment, r.region.begin);
    r.error_rate = r.query_len == 0
                       ? 0.0
                       : static_cast<double>(r.alignment.cost) / static_cast<double>(r.query_len);
    if (stage == Stage::align) return r;

    const SegmenterConfig seg_cfg = cfg.segmenter();
    r.boundaries = find_boundaries(book.text, r.alignment, query, t, seg_cfg);
    if (r.boundaries.empty()) {
        std::cerr << "textanchor: recording '" << r.id
                  << "': no boundary candidates in the aligned region\n";
        return r;
    }
    score_boundaries(r.boundaries, seg_cfg);
    r.candidates = enumerate_segments(r.boundaries, r.alignment, query, seg_cfg);
    r.selected = select_segments(r.candidates, seg_cfg);

    double covered = 0.0, open_from = 0.0, open_to = -1.0;
    for (const SegmentCandidate& s : r.selected) {  // selected is sorted by start
        if (s.bos.time_s > open_to) {
            covered += std::max(0.0, open_to - open_from);
            open_from = s.bos.time_s;
            open_to = s.eos.time_s;
        } else {
            open_to = std::max(open_to, s.eos.time_s);
        }
    }
    covered += std::max(0.0, open_to - open_from);
    r.covered_s = covered;

    r.cuts.reserve(r.selected.size());
    for (std::size_t k = 0; k < r.selected.size(); ++k)
        r.cuts.push_back(emit_cut(r.selected[k], book.text, t, cfg.context_bytes, k, speaker));
    return r;
}

struct PipelineSummary {
    std::string book_path;
    std::string out_path;
    std::size_t recordings = 0;
    std::size_t located = 0;
    std::size_t with_segments = 0;
    std::size_t cuts_written = 0;
    std::vector<RecordingResult> results;
};

namespace detail {

/// Groups transcript lines by recording id and merges multi-line chunk sets.
inline std::vector<TimedTranscript> merge_by_recording(std::vector<TimedTranscript> lines,
                                                       double overlap_s) {
    std::map<std::string, std::vector<TimedTranscript>> groups;
    for (TimedTranscript& t : lines) groups[t.recording_id].push_back(std::move(t));
    std::vector<TimedTranscript> out;
    out.reserve(groups.size());
    for (auto& [id, chunks] : groups) {
        if (chunks.size() == 1) {
            out.push_back(std::move(chunks.front()));
        } else {
            std::stable_sort(chunks.begin(), chunks.end(),
                             [](const TimedTranscript& a, const TimedTranscript& b) {
                                 const double sa =
                                     a.words.empty() ? 0.0 : a.words.front().start_s;
                                 const double sb =
                                     b.words.empty() ? 0.0 : b.words.front().start_s;
                                 return sa < sb;
                             });
            out.push_back(merge_chunk_transcripts(chunks, overlap_s));
        }
    }
    return out;  // std::map iteration keeps ids sorted
}

inline std::map<std::string, std::string> load_speakers(const std::string& path) {
    std::map<std::string, std::string> speakers;
    if (path.empty()) return speakers;
    std::ifstream in(path);
    if (!in) throw Error("cannot open speakers file: " + path);
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& [key, value] : j.items()) speakers[key] = value.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("speakers file " + path + ": " + e.what());
    }
    return speakers;
}

}  // namespace detail

/// Runs locate → align → segment → emit over every recording in the
/// transcripts file. Recordings are independent; with jobs > 1 they are
/// processed on a small thread pool and written back in id order, so the
/// output does not depend on the parallelism degree.
inline PipelineSummary run_pipeline(const std::string& book_path,
                                    const std::string& transcripts_path,
                                    const std::string& out_path, const PipelineConfig& cfg,
                                    Stage stage = Stage::full) {
    cfg.validate();
    const BookIndex book = load_book(book_path);

    std::ifstream tin(transcripts_path);
    if (!tin) throw Error("cannot open transcripts: " + transcripts_path);
    const std::vector<TimedTranscript> recordings =
        detail::merge_by_recording(read_transcripts(tin), cfg.chunk_overlap_s);
    const auto speakers = detail::load_speakers(cfg.speakers_path);

    PipelineSummary summary;
    summary.book_path = book_path;
    summary.out_path = out_path;
    summary.recordings = recordings.size();
    summary.results.resize(recordings.size());

    const auto work = [&](std::size_t k) {
        const TimedTranscript& t = recordings[k];
        const auto sp = speakers.find(t.recording_id);
        try {
            summary.results[k] = process_recording(
                book, t, cfg, stage, sp == speakers.end() ? "" : sp->second);
        } catch (const std::exception& e) {
            summary.results[k].id = t.recording_id;
            summary.results[k].note = std::string("failed: ") + e.what();
        }
    };

    const std::size_t jobs =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), recordings.size());
    if (jobs <= 1) {
        for (std::size_t k = 0; k < recordings.size(); ++k) work(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < recordings.size();
                     k = next.fetch_add(1))
                    work(k);
            });
        for (std::thread& th : pool) th.join();
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot open output: " + out_path);
    for (const RecordingResult& r : summary.results) {
        if (r.located) ++summary.located;
        if (!r.cuts.empty()) ++summary.with_segments;
        summary.cuts_written += r.cuts.size();
        write_cuts(r.cuts, out);
    }
    return summary;
}

inline nlohmann::json recording_report_json(const RecordingResult& r) {
    nlohmann::json j{{"id", r.id},
                     {"located", r.located},
                     {"chain_coverage", r.chain_coverage},
                     {"segments", r.selected.size()},
                     {"audio_s", r.audio_s},
                     {"covered_s", r.covered_s},
                     {"discarded_s", std::max(0.0, r.audio_s - r.covered_s)}};
    if (r.located) {
        j["region"] = {r.region.begin, r.region.end};
        j["error_rate"] = r.error_rate;
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline nlohmann::json summary_json(const PipelineSummary& s) {
    nlohmann::json recs = nlohmann::json::array();
    for (const RecordingResult& r : s.results) recs.push_back(recording_report_json(r));
    return nlohmann::json{{"book", s.book_path},
                          {"out", s.out_path},
                          {"recordings", s.recordings},
                          {"located", s.located},
                          {"with_segments", s.with_segments},
                          {"cuts", s.cuts_written},
                          {"per_recording", recs}};
}

inline nlohmann::json locate_stage_json(const RecordingResult& r) {
    nlohmann::json chain = nlohmann::json::array();
    for (const MatchPair& p : r.chain.pairs) chain.push_back({p.i, p.j});
    nlohmann::json j{{"id", r.id},
                     {"located", r.located},
                     {"query_len", r.query_len},
                     {"chain_coverage", r.chain_coverage},
                     {"chain", std::move(chain)}};
    if (r.located) j["region"] = {r.region.begin, r.region.end};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline nlohmann::json align_stage_json(const RecordingResult& r) {
    nlohmann::json j{{"id", r.id}, {"located", r.located}};
    if (r.located) {
        std::string ops;
        ops.reserve(r.alignment.ops.size());
        for (const EditOp& op : r.alignment.ops) ops.push_back(edit_kind_char(op.kind));
        j["q_span"] = {r.alignment.q_begin, r.alignment.q_end};
        j["t_span"] = {r.alignment.t_begin, r.alignment.t_end};
        j["cost"] = r.alignment.cost;
        j["error_rate"] = r.error_rate;
        j["dp_cells"] = r.align_stats.dp_cells;
        j["fallback"] = r.align_stats.fallback;
        j["ops"] = std::move(ops);
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline nlohmann::json segment_stage_json(const RecordingResult& r) {
    const auto boundary = [](const BoundaryCandidate& b) {
        return nlohmann::json{{"kind", b.kind == BoundaryKind::bos ? "bos" : "eos"},
                              {"sym", b.sym_index},
                              {"byte", b.byte_index},
                              {"time_s", b.time_s},
                              {"silence_s", b.silence_s},
                              {"local_errors", b.local_errors},
                              {"score", b.score}};
    };
    const auto segment = [](const SegmentCandidate& s) {
        return nlohmann::json{{"bos_sym", s.bos.sym_index}, {"eos_sym", s.eos.sym_index},
                              {"start", s.bos.time_s},     {"duration", s.duration_s},
                              {"matches", s.matches},      {"errors", s.errors},
                              {"score", s.score}};
    };
    nlohmann::json bounds = nlohmann::json::array();
    for (const BoundaryCandidate& b : r.boundaries) bounds.push_back(boundary(b));
    nlohmann::json cands = nlohmann::json::array();
    for (const SegmentCandidate& s : r.candidates) cands.push_back(segment(s));
    nlohmann::json sel = nlohmann::json::array();
    for (const SegmentCandidate& s : r.selected) sel.push_back(segment(s));
    nlohmann::json j{{"id", r.id},
                     {"located", r.located},
                     {"boundaries", std::move(bounds)},
                     {"candidates", std::move(cands)},
                     {"selected", std::move(sel)}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

}  // namespace textanchor
