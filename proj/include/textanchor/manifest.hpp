#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "textanchor/error.hpp"
#include "textanchor/normalize.hpp"
#include "textanchor/segmenter.hpp"
#include "textanchor/transcript.hpp"

namespace textanchor {

/// One training-ready segment: an audio span tied to its full-format text
/// and the bytes of preceding context.
struct Cut {
    std::string id;
    double start = 0.0;
    double duration = 0.0;
    std::string text;
    std::string pre_texts;
    std::uint64_t begin_byte = 0;
    std::uint64_t end_byte = 0;
    std::string text_path;
    std::string speaker;
};

/// Combines transcripts of overlapping audio chunks into one transcript.
/// Inside each overlap zone the earlier chunk supplies the words whose
/// midpoint falls at or before the zone midpoint, the later chunk the rest.
/// `overlap_s` is the nominal per-side chunk overlap and bounds the zone.
inline TimedTranscript merge_chunk_transcripts(const std::vector<TimedTranscript>& chunks,
                                               double overlap_s = 2.0) {
    if (chunks.empty()) throw ContractError("merge_chunk_transcripts: no chunks");
    for (const TimedTranscript& c : chunks)
        for (std::size_t w = 0; w + 1 < c.words.size(); ++w)
            if (c.words[w + 1].start_s < c.words[w].start_s)
                throw ContractError("chunk '" + c.recording_id + "' words not sorted by start");
    for (std::size_t k = 0; k + 1 < chunks.size(); ++k) {
        if (chunks[k].words.empty() || chunks[k + 1].words.empty()) continue;
        if (chunks[k + 1].words.front().start_s < chunks[k].words.front().start_s)
            throw ContractError("chunks out of order for '" + chunks[k].recording_id + "'");
    }

    TimedTranscript out = chunks.front();
    for (std::size_t k = 1; k < chunks.size(); ++k) {
        const TimedTranscript& next = chunks[k];
        if (next.words.empty()) continue;
        if (out.words.empty()) {
            out.words = next.words;
            continue;
        }
        double zone_hi = 0.0;
        for (const TimedWord& w : out.words) zone_hi = std::max(zone_hi, w.end_s);
        double zone_lo = next.words.front().start_s;
        if (zone_lo >= zone_hi) {
            out.words.insert(out.words.end(), next.words.begin(), next.words.end());
            continue;
        }
        zone_lo = std::max(zone_lo, zone_hi - 2.0 * overlap_s);
        const double mid = (zone_lo + zone_hi) / 2.0;
        const auto midpoint = [](const TimedWord& w) { return (w.start_s + w.end_s) / 2.0; };
        std::erase_if(out.words, [&](const TimedWord& w) { return midpoint(w) > mid; });
        for (const TimedWord& w : next.words)
            if (midpoint(w) > mid) out.words.push_back(w);
    }
    std::stable_sort(out.words.begin(), out.words.end(),
                     [](const TimedWord& a, const TimedWord& b) { return a.start_s < b.start_s; });
    return out;
}

/// Builds the output record for one selected segment. The byte span comes
/// from the boundary byte indices (EOS already includes trailing sentence
/// punctuation); `ctx_bytes` of preceding text are attached, clipped at the
/// document start.
inline Cut emit_cut(const SegmentCandidate& seg, const TextSource& text,
                    const TimedTranscript& transcript, std::size_t ctx_bytes = 1000,
                    std::size_t index = 0, std::string_view speaker = "") {
    const std::size_t begin = seg.bos.byte_index;
    const std::size_t end = seg.eos.byte_index;
    if (begin >= end || end > text.raw.size())
        throw Error("emit_cut: inconsistent byte span [" + std::to_string(begin) + ", " +
                    std::to_string(end) + ") for '" + transcript.recording_id + "'");
    char seq[16];
    std::snprintf(seq, sizeof seq, "-%04zu", index);
    Cut c;
    c.id = transcript.recording_id + seq;
    c.start = seg.bos.time_s;
    c.duration = seg.duration_s;
    c.text = text.raw.substr(begin, end - begin);
    const std::size_t ctx_begin = begin > ctx_bytes ? begin - ctx_bytes : 0;
    c.pre_texts = text.raw.substr(ctx_begin, begin - ctx_begin);
    c.begin_byte = begin;
    c.end_byte = end;
    c.text_path = text.text_path;
    c.speaker = speaker;
    return c;
}

namespace detail {

inline std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline std::string json_str(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace detail

/// Writes cuts as JSON lines with a fixed field order and millisecond time
/// precision, so identical inputs produce byte-identical files.
inline void write_cuts(const std::vector<Cut>& cuts, std::ostream& os) {
    for (const Cut& c : cuts) {
        os << "{\"id\": " << detail::json_str(c.id) << ", \"start\": " << detail::fixed3(c.start)
           << ", \"duration\": " << detail::fixed3(c.duration)
           << ", \"text\": " << detail::json_str(c.text)
           << ", \"pre_texts\": " << detail::json_str(c.pre_texts)
           << ", \"begin_byte\": " << c.begin_byte << ", \"end_byte\": " << c.end_byte
           << ", \"text_path\": " << detail::json_str(c.text_path)
           << ", \"speaker\": " << detail::json_str(c.speaker) << "}\n";
    }
}

inline std::vector<Cut> read_cuts(std::istream& is) {
    std::vector<Cut> cuts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Cut c;
            c.id = j.at("id").get<std::string>();
            c.start = j.at("start").get<double>();
            c.duration = j.at("duration").get<double>();
            c.text = j.at("text").get<std::string>();
            c.pre_texts = j.at("pre_texts").get<std::string>();
            c.begin_byte = j.at("begin_byte").get<std::uint64_t>();
            c.end_byte = j.at("end_byte").get<std::uint64_t>();
            c.text_path = j.at("text_path").get<std::string>();
            c.speaker = j.at("speaker").get<std::string>();
            cuts.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return cuts;
}

/// Reads transcripts from JSON lines, one recording per line:
/// {"id": ..., "audio_path": ..., "words": [{"word", "start", "end"}, ...]}
inline std::vector<TimedTranscript> read_transcripts(std::istream& is) {
    std::vector<TimedTranscript> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            TimedTranscript t;
            t.recording_id = j.at("id").get<std::string>();
            t.audio_path = j.at("audio_path").get<std::string>();
            for (const auto& jw : j.at("words")) {
                TimedWord w;
                w.word = jw.at("word").get<std::string>();
                w.start_s = jw.at("start").get<double>();
                w.end_s = jw.at("end").get<double>();
                t.words.push_back(std::move(w));
            }
            for (std::size_t k = 0; k + 1 < t.words.size(); ++k)
                if (t.words[k + 1].start_s < t.words[k].start_s)
                    throw ParseError(line_no, "words of '" + t.recording_id +
                                                  "' not sorted by start time");
            out.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

}  // namespace textanchor
