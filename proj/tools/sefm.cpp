#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sefm/errors.hpp"
#include "sefm/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    bool dump_config = false;
    int workers = -1;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "flat key = value config file");
    cmd->add_option("--set", opts.sets, "override one key=value setting")
        ->expected(-1);
    cmd->add_option("--workers", opts.workers, "worker threads for the sweep");
    cmd->add_option("--seed", opts.seed, "seed for all randomness");
    cmd->add_flag("--dump-config", opts.dump_config, "print effective settings");
}

sefm::PipelineConfig build_config(const CommonOpts& opts) {
    sefm::PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg.load_file(opts.config_path);
    for (const std::string& s : opts.sets) {
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw sefm::ConfigError("--set expects key=value, got '" + s + "'");
        cfg.apply(s.substr(0, eq), s.substr(eq + 1));
    }
    if (opts.workers > 0) cfg.workers = opts.workers;
    if (opts.seed >= 0) cfg.seed = uint64_t(opts.seed);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SeFM two-view dense matching and sparse reconstruction"};
    app.require_subcommand(1);

    CommonOpts match_opts, rec_opts, synth_opts, eval_opts;
    std::string m_img1, m_img2, m_intr, m_ext, m_fund, m_out = "out";
    std::string r_img1, r_img2, r_intr, r_ext, r_fund, r_out = "out";
    std::string s_scene = "plane", s_out = "out";
    std::string e_scene = "plane", e_out = "out";

    CLI::App* match = app.add_subcommand("match", "dense-match two images");
    match->add_option("img1", m_img1, "first image (PGM/PPM)")->required();
    match->add_option("img2", m_img2, "second image (PGM/PPM)")->required();
    match->add_option("--intrinsics", m_intr, "intrinsics key=value file");
    match->add_option("--ext-matches", m_ext, "seed matches: x1 y1 x2 y2 [sim]");
    match->add_option("--fundamental", m_fund, "use this F instead of estimating");
    match->add_option("--out", m_out, "output directory");
    add_common(match, match_opts);

    CLI::App* rec = app.add_subcommand("reconstruct", "match and triangulate a cloud");
    rec->add_option("img1", r_img1)->required();
    rec->add_option("img2", r_img2)->required();
    rec->add_option("--intrinsics", r_intr);
    rec->add_option("--ext-matches", r_ext);
    rec->add_option("--fundamental", r_fund);
    rec->add_option("--out", r_out, "output directory");
    add_common(rec, rec_opts);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scene");
    synth->add_option("--scene", s_scene, "plane | two-plane");
    synth->add_option("--out", s_out, "output directory");
    add_common(synth, synth_opts);

    CLI::App* eval = app.add_subcommand("eval", "synthetic precision/recall run");
    eval->add_option("--scene", e_scene, "plane | two-plane");
    eval->add_option("--out", e_out, "output directory");
    add_common(eval, eval_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (match->parsed()) {
            sefm::PipelineConfig cfg = build_config(match_opts);
            cfg.image1_path = m_img1;
            cfg.image2_path = m_img2;
            cfg.intrinsics_path = m_intr;
            cfg.ext_matches_path = m_ext;
            cfg.fundamental_path = m_fund;
            cfg.out_dir = m_out;
            if (match_opts.dump_config) {
                std::fputs(cfg.dump().c_str(), stdout);
                return 0;
            }
            sefm::MatchRunResult res = sefm::run_match(cfg);
            std::printf("seeds=%d inliers=%d lines=%zu total=%ld survivors=%ld\n",
                        res.n_seeds, res.n_inliers, res.lines.size(),
                        res.report.total, res.report.survivors);
        } else if (rec->parsed()) {
            sefm::PipelineConfig cfg = build_config(rec_opts);
            cfg.image1_path = r_img1;
            cfg.image2_path = r_img2;
            cfg.intrinsics_path = r_intr;
            cfg.ext_matches_path = r_ext;
            cfg.fundamental_path = r_fund;
            cfg.out_dir = r_out;
            if (rec_opts.dump_config) {
                std::fputs(cfg.dump().c_str(), stdout);
                return 0;
            }
            sefm::MatchRunResult res = sefm::run_reconstruct(cfg);
            if (!res.metric)
                std::fprintf(stderr,
                             "warning: no intrinsics; cloud.ply is projective\n");
            std::printf("seeds=%d survivors=%ld cloud=%s/cloud.ply\n", res.n_seeds,
                        res.report.survivors, r_out.c_str());
        } else if (synth->parsed()) {
            sefm::PipelineConfig cfg = build_config(synth_opts);
            cfg.apply("scene", s_scene);
            cfg.out_dir = s_out;
            if (synth_opts.dump_config) {
                std::fputs(cfg.dump().c_str(), stdout);
                return 0;
            }
            sefm::run_synth(cfg);
            std::printf("scene '%s' written to %s\n", s_scene.c_str(), s_out.c_str());
        } else if (eval->parsed()) {
            sefm::PipelineConfig cfg = build_config(eval_opts);
            cfg.apply("scene", e_scene);
            cfg.out_dir = e_out;
            if (eval_opts.dump_config) {
                std::fputs(cfg.dump().c_str(), stdout);
                return 0;
            }
            sefm::EvalResult res = sefm::run_eval(cfg);
            std::printf("%s\n", res.metrics.to_kv().c_str());
        }
    } catch (const sefm::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 2;
    }
    return 0;
}
