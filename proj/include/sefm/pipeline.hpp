#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sefm/config.hpp"
#include "sefm/dense.hpp"
#include "sefm/epipolar.hpp"
#include "sefm/metrics.hpp"
#include "sefm/seed.hpp"
#include "sefm/sweep.hpp"
#include "sefm/synth.hpp"
#include "sefm/validate.hpp"

namespace sefm {

// Everything one line-pair job needs. Shared read-only across workers.
struct SweepContext {
    const GrayImage* img1 = nullptr;
    const GrayImage* img2 = nullptr;
    FundamentalMatrix f;
    HomPoint2 e1;
    HomPoint2 e2;
    Pencil pencil;
    RectD rect1;
    RectD rect2;
    const ProjectiveCameraPair* cameras = nullptr;  // null: depth filter off
    const PipelineConfig* cfg = nullptr;
};

SweepContext make_sweep_context(const GrayImage& img1, const GrayImage& img2,
                                const FundamentalMatrix& f,
                                const ProjectiveCameraPair* cameras,
                                const PipelineConfig& cfg);

// Result of one line-pair job.
struct LineMatches {
    int line_index = 0;
    std::vector<DenseMatch> matches;
    std::vector<DepthRecord> depths;  // parallel to matches when metric
    int n_keypoints1 = 0;
    int n_keypoints2 = 0;
    int n_aligned = 0;
};

// Pure per-line computation: sample both chords, extract and align key
// points, dense-match the slices, apply the validity filters.
LineMatches process_line_pair(const SweepContext& ctx, int k);

// Serial reference sweep over every pencil line, in index order.
std::vector<LineMatches> sweep_serial(const SweepContext& ctx);

// OpenMP sweep. Results land in per-index slots, so output is identical to
// the serial reference for any worker count.
std::vector<LineMatches> sweep_parallel(const SweepContext& ctx, int workers);

struct MatchRunResult {
    std::vector<LineMatches> lines;
    ValidityReport report;
    FundamentalMatrix f;
    int n_seeds = 0;
    int n_inliers = 0;
    bool metric = false;
    RelativePose pose;  // valid when metric

    std::vector<DenseMatch> survivors() const;
};

// seed -> RANSAC+F -> sweep -> rough -> dense -> validity. Pass f_override
// to skip estimation (external F file, synthetic truth) and intrinsics to
// enable the metric depth filter.
MatchRunResult run_match_pipeline(const GrayImage& img1, const GrayImage& img2,
                                  const PipelineConfig& cfg,
                                  const FundamentalMatrix* f_override = nullptr,
                                  const std::vector<SeedMatch>* ext_seeds = nullptr,
                                  const CameraIntrinsics* intrinsics = nullptr,
                                  const PointPair* pose_sample = nullptr);

// File writers (all atomic: temp + rename).
void write_text_atomic(const std::string& path, const std::string& text);
std::string format_matches(const std::vector<LineMatches>& lines);
void write_matches(const std::vector<LineMatches>& lines, const std::string& path);
void write_ply(const std::vector<LineMatches>& lines, const GrayImage& img1,
               bool metric, const FundamentalMatrix& f, const std::string& path);
void write_viz(const GrayImage& img1, const GrayImage& img2,
               const SweepContext& ctx, int n_lines, const std::string& path);

// CLI entry points. Each writes its outputs under cfg.out_dir and returns
// the primary result.
MatchRunResult run_match(const PipelineConfig& cfg);
MatchRunResult run_reconstruct(const PipelineConfig& cfg);

struct EvalResult {
    MatchRunResult run;
    MetricsReport metrics;
};
EvalResult run_eval(const PipelineConfig& cfg);

void run_synth(const PipelineConfig& cfg);

SyntheticScene make_scene(const PipelineConfig& cfg);

}  // namespace sefm
