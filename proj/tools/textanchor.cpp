#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "textanchor/textanchor.hpp"

namespace {

using textanchor::PipelineConfig;

/// Flag values parsed by CLI11, merged over an optional config file.
/// Explicit flags always win over file values.
struct SharedArgs {
    std::string book;
    std::string transcripts;
    std::string out = "-";
    std::string config_path;
    PipelineConfig flags;
    double silence_split = 0.0;
    std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&, const PipelineConfig&)>>>
        overrides;

    void add_common(CLI::App* sub, bool out_required) {
        sub->add_option("--book", book, "UTF-8 reference text file")->required();
        sub->add_option("--transcripts", transcripts, "transcripts JSONL file")->required();
        auto* out_opt = sub->add_option("--out", out, "output path ('-' for stdout)");
        if (out_required) out_opt->required();
        sub->add_option("--config", config_path, "JSON config file (flags override it)");

        const auto reg = [&](CLI::Option* opt, auto member) {
            overrides.emplace_back(opt, [member](PipelineConfig& dst, const PipelineConfig& src) {
                dst.*member = src.*member;
            });
        };
        reg(sub->add_option("--context-bytes", flags.context_bytes,
                            "bytes of preceding text stored per cut"),
            &PipelineConfig::context_bytes);
        reg(sub->add_option("--close-matches-per-side", flags.close_matches_per_side,
                            "suffix-order neighbors per direction and query position"),
            &PipelineConfig::close_matches_per_side);
        reg(sub->add_option("--anchor-spacing", flags.anchor_spacing,
                            "max one alignment anchor per this many query symbols"),
            &PipelineConfig::anchor_spacing);
        reg(sub->add_option("--block-slack", flags.block_slack,
                            "extra border around alignment blocks"),
            &PipelineConfig::block_slack);
        reg(sub->add_option("--error-window", flags.error_window,
                            "symbols around a boundary counted as local errors"),
            &PipelineConfig::error_window);
        reg(sub->add_option("--w-sil", flags.w_sil, "silence weight"), &PipelineConfig::w_sil);
        reg(sub->add_option("--w-match", flags.w_match, "match bonus weight"),
            &PipelineConfig::w_match);
        reg(sub->add_option("--w-err", flags.w_err, "error penalty weight"),
            &PipelineConfig::w_err);
        reg(sub->add_option("--min-duration", flags.min_duration_s, "hard minimum seconds"),
            &PipelineConfig::min_duration_s);
        reg(sub->add_option("--pref-min", flags.pref_min_s, "preferred band start, seconds"),
            &PipelineConfig::pref_min_s);
        reg(sub->add_option("--pref-max", flags.pref_max_s, "preferred band end, seconds"),
            &PipelineConfig::pref_max_s);
        reg(sub->add_option("--max-duration", flags.max_duration_s, "hard maximum seconds"),
            &PipelineConfig::max_duration_s);
        reg(sub->add_option("--overlap-fraction", flags.overlap_fraction,
                            "allowed overlap as a fraction of the shorter segment"),
            &PipelineConfig::overlap_fraction);
        reg(sub->add_option("--best-per-boundary", flags.best_per_boundary,
                            "EOS kept per BOS and vice versa"),
            &PipelineConfig::best_per_boundary);
        reg(sub->add_option("--region-margin", flags.region_margin,
                            "symbols of slack around the located region (0 = auto)"),
            &PipelineConfig::region_margin);
        reg(sub->add_option("--min-chain-coverage", flags.min_chain_coverage,
                            "reject recordings whose chain covers less of the query"),
            &PipelineConfig::min_chain_coverage);
        reg(sub->add_option("--chunk-overlap", flags.chunk_overlap_s,
                            "nominal per-side chunk overlap, seconds"),
            &PipelineConfig::chunk_overlap_s);
        reg(sub->add_option("--jobs", flags.jobs, "recordings processed in parallel"),
            &PipelineConfig::jobs);
        reg(sub->add_option("--speakers", flags.speakers_path,
                            "JSON file mapping recording id to speaker"),
            &PipelineConfig::speakers_path);
        reg(sub->add_flag("--no-anchors", flags.no_anchors,
                          "debug: skip anchors, align the whole region directly"),
            &PipelineConfig::no_anchors);

        auto* sil = sub->add_option("--silence-split-threshold", silence_split,
                                    "also split at silences of at least this many seconds");
        overrides.emplace_back(sil, [this](PipelineConfig& dst, const PipelineConfig&) {
            dst.silence_split_threshold_s = silence_split;
        });
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = textanchor::load_config_file(config_path);
        for (const auto& [opt, apply] : overrides)
            if (opt->count() > 0) apply(cfg, flags);
        cfg.validate();
        return cfg;
    }
};

int run_stage(const SharedArgs& args, textanchor::Stage stage) {
    const PipelineConfig cfg = args.resolve();
    const textanchor::BookIndex book = textanchor::load_book(args.book);
    std::ifstream tin(args.transcripts);
    if (!tin) throw textanchor::Error("cannot open transcripts: " + args.transcripts);
    const auto recordings = textanchor::detail::merge_by_recording(
        textanchor::read_transcripts(tin), cfg.chunk_overlap_s);

    std::ofstream file;
    if (args.out != "-") {
        file.open(args.out, std::ios::binary);
        if (!file) throw textanchor::Error("cannot open output: " + args.out);
    }
    std::ostream& os = args.out == "-" ? std::cout : file;

    for (const auto& t : recordings) {
        const auto r = textanchor::process_recording(book, t, cfg, stage);
        switch (stage) {
            case textanchor::Stage::locate:
                os << textanchor::locate_stage_json(r).dump() << "\n";
                break;
            case textanchor::Stage::align:
                os << textanchor::align_stage_json(r).dump() << "\n";
                break;
            case textanchor::Stage::full:
                os << textanchor::segment_stage_json(r).dump() << "\n";
                break;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locate, align and segment noisy transcripts inside a large reference text"};
    app.require_subcommand(1);

    SharedArgs pipeline_args, locate_args, align_args, segment_args;
    auto* pipeline = app.add_subcommand("pipeline", "run the full pipeline and write cuts JSONL");
    pipeline_args.add_common(pipeline, /*out_required=*/true);
    auto* locate = app.add_subcommand("locate", "first stage: anchor chains and located regions");
    locate_args.add_common(locate, /*out_required=*/false);
    auto* align = app.add_subcommand("align", "second stage: anchored alignments as op strings");
    align_args.add_common(align, /*out_required=*/false);
    auto* segment =
        app.add_subcommand("segment", "third stage: boundary and segment candidates with scores");
    segment_args.add_common(segment, /*out_required=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(pipeline)) {
            const auto summary = textanchor::run_pipeline(
                pipeline_args.book, pipeline_args.transcripts, pipeline_args.out,
                pipeline_args.resolve());
            std::cout << textanchor::summary_json(summary).dump() << "\n";
            return summary.with_segments >= 1 ? 0 : 1;
        }
        if (app.got_subcommand(locate)) return run_stage(locate_args, textanchor::Stage::locate);
        if (app.got_subcommand(align)) return run_stage(align_args, textanchor::Stage::align);
        return run_stage(segment_args, textanchor::Stage::full);
    } catch (const std::exception& e) {
        std::cerr << "textanchor: " << e.what() << "\n";
        return 2;
    }
}
