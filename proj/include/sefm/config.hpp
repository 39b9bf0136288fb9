#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sefm {

// All pipeline tunables. Flat `key = value` files with '#' comments; every
// key has a default and unknown keys are rejected.
struct PipelineConfig {
    // seed detection / matching
    double seed_k = 0.04;                // seed.k
    double seed_response_thresh = 500.0; // seed.response_thresh
    int seed_nms_radius = 4;             // seed.nms_radius
    int seed_max_features = 1200;        // seed.max_features
    double seed_min_similarity = 0.75;   // seed.min_similarity

    // robust fundamental estimation
    int ransac_max_iters = 2000;   // ransac.max_iters
    double ransac_thresh = 1.0;    // ransac.thresh (px)

    // epipolar sweep
    double sweep_spacing = 1.0;        // sweep.spacing (px)
    std::string sweep_orient = "away"; // sweep.orient: away | dp-both

    // rough matching
    double rough_threshold = 10.0;   // rough.threshold (intensity/px)
    int rough_window = 16;           // rough.window (samples, power of two)
    int rough_harmonics = 4;         // rough.harmonics
    double rough_sigma = 1.0;        // rough.sigma
    double rough_gap_penalty = 0.25; // rough.gap_penalty

    // dense matching
    double dense_reject = 12.0;      // dense.reject (intensity units)
    bool cost_paper_literal = false; // cost.paper_literal

    // validity filters
    double validate_depth_jump = 0.1; // validate.depth_jump (fraction)

    // evaluation
    double eval_tol = 2.0;            // eval.tol (px)
    std::string eval_f_source = "true"; // eval.f_source: true | estimate
    int scene_width = 800;            // scene.width
    int scene_height = 600;           // scene.height

    // visualization
    int viz_lines = 24;  // viz.lines (0 disables viz.ppm)

    // run controls (also CLI flags)
    int workers = 1;        // workers
    uint64_t seed = 7;      // seed
    std::string scene = "plane";  // scene (plane | two-plane)

    // paths (CLI only)
    std::string image1_path;
    std::string image2_path;
    std::string intrinsics_path;
    std::string ext_matches_path;
    std::string fundamental_path;
    std::string out_dir = ".";

    // Applies one `key = value` setting; throws ConfigError on unknown keys
    // or unparsable values.
    void apply(const std::string& key, const std::string& value);

    // Effective settings, one `key = value` per line, keys sorted.
    std::string dump() const;

    static PipelineConfig from_file(const std::string& path);
    void load_file(const std::string& path);
};

}  // namespace sefm
