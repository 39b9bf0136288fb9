#include "sefm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sefm/errors.hpp"
#include "sefm/rough.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sefm {

SweepContext make_sweep_context(const GrayImage& img1, const GrayImage& img2,
                                const FundamentalMatrix& f,
                                const ProjectiveCameraPair* cameras,
                                const PipelineConfig& cfg) {
    SweepContext ctx;
    ctx.img1 = &img1;
    ctx.img2 = &img2;
    ctx.f = f;
    ctx.e1 = epipole(f, EpipoleSide::left);
    ctx.e2 = epipole(f, EpipoleSide::right);
    ctx.rect1 = RectD::of_image(img1.width, img1.height);
    ctx.rect2 = RectD::of_image(img2.width, img2.height);
    ctx.pencil = build_pencil(ctx.e1, ctx.rect1);
    ctx.cameras = cameras;
    ctx.cfg = &cfg;
    return ctx;
}

namespace {

SubProfile slice_profile(const SampledLine& line, int begin, int end) {
    SubProfile s;
    s.points.assign(line.points.begin() + begin, line.points.begin() + end + 1);
    s.intensities.assign(line.intensities.begin() + begin,
                         line.intensities.begin() + end + 1);
    return s;
}

SampledLine reversed_line(const SampledLine& line) {
    SampledLine r;
    r.points.assign(line.points.rbegin(), line.points.rend());
    r.intensities.assign(line.intensities.rbegin(), line.intensities.rend());
    return r;
}

}  // namespace

LineMatches process_line_pair(const SweepContext& ctx, int k) {
    const PipelineConfig& cfg = *ctx.cfg;
    LineMatches res;
    res.line_index = k;

    std::optional<LinePair> lp =
        corresponding_pair(ctx.f, ctx.pencil, k, ctx.rect1, ctx.rect2);
    if (!lp) return res;

    SampledLine sl1 = sample_line(*ctx.img1, lp->seg1, cfg.sweep_spacing);
    SampledLine sl2 = sample_line(*ctx.img2, lp->seg2, cfg.sweep_spacing);
    if (sl1.points.size() < 3 || sl2.points.size() < 3) return res;

    RoughMatchSet rm1 = extract_keypoints(sl1, intensity_derivative(sl1.intensities),
                                          cfg.rough_threshold, cfg.rough_window,
                                          cfg.rough_harmonics);
    RoughMatchSet rm2 = extract_keypoints(sl2, intensity_derivative(sl2.intensities),
                                          cfg.rough_threshold, cfg.rough_window,
                                          cfg.rough_harmonics);
    Alignment alignment =
        align_keypoints_dp(rm1, rm2, cfg.rough_gap_penalty, cfg.rough_sigma);

    if (cfg.sweep_orient == "dp-both") {
        // Fallback for camera setups where "away from the epipole" flips
        // between the views: try the reversed second line, keep the better
        // alignment.
        SampledLine sl2r = reversed_line(sl2);
        RoughMatchSet rm2r = extract_keypoints(
            sl2r, intensity_derivative(sl2r.intensities), cfg.rough_threshold,
            cfg.rough_window, cfg.rough_harmonics);
        Alignment alt =
            align_keypoints_dp(rm1, rm2r, cfg.rough_gap_penalty, cfg.rough_sigma);
        if (alt.score > alignment.score) {
            sl2 = std::move(sl2r);
            rm2 = std::move(rm2r);
            alignment = std::move(alt);
        }
    }

    res.n_keypoints1 = rm1.size();
    res.n_keypoints2 = rm2.size();
    res.n_aligned = int(alignment.pairs.size());
    if (alignment.pairs.size() < 2) return res;

    std::vector<bool> valid = sequence_validity(alignment, rm1, rm2);
    for (size_t r = 0; r + 1 < alignment.pairs.size(); ++r) {
        auto [i0, j0] = alignment.pairs[r];
        auto [i1, j1] = alignment.pairs[r + 1];
        SegmentPair sp;
        sp.s1 = slice_profile(sl1, rm1.keypoints[size_t(i0)].index,
                              rm1.keypoints[size_t(i1)].index);
        sp.s2 = slice_profile(sl2, rm2.keypoints[size_t(j0)].index,
                              rm2.keypoints[size_t(j1)].index);
        sp.valid = valid[r];
        std::vector<DenseMatch> seg =
            dense_match_segment(sp, cfg.dense_reject, cfg.cost_paper_literal);
        res.matches.insert(res.matches.end(), seg.begin(), seg.end());
    }

    if (ctx.cameras)
        res.depths = depth_validity(res.matches, *ctx.cameras,
                                    cfg.validate_depth_jump);
    return res;
}

std::vector<LineMatches> sweep_serial(const SweepContext& ctx) {
    std::vector<LineMatches> lines(static_cast<size_t>(ctx.pencil.size()));
    for (int k = 0; k < ctx.pencil.size(); ++k)
        lines[size_t(k)] = process_line_pair(ctx, k);
    return lines;
}

std::vector<LineMatches> sweep_parallel(const SweepContext& ctx, int workers) {
    const int n = ctx.pencil.size();
    std::vector<LineMatches> lines(static_cast<size_t>(n));
    if (workers <= 1) {
        for (int k = 0; k < n; ++k) lines[size_t(k)] = process_line_pair(ctx, k);
        return lines;
    }

    std::vector<std::string> errors(static_cast<size_t>(n));
    bool failed = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers) \
    reduction(|| : failed)
#endif
    for (int k = 0; k < n; ++k) {
        try {
            lines[size_t(k)] = process_line_pair(ctx, k);
        } catch (const std::exception& e) {
            errors[size_t(k)] = e.what();
            failed = true;
        }
    }
    if (failed) {
        for (const std::string& e : errors)
            if (!e.empty()) throw PipelineError("sweep", e);
    }
    return lines;
}

std::vector<DenseMatch> MatchRunResult::survivors() const {
    std::vector<DenseMatch> out;
    for (const LineMatches& lm : lines)
        for (const DenseMatch& m : lm.matches)
            if (m.flags == 0) out.push_back(m);
    return out;
}

MatchRunResult run_match_pipeline(const GrayImage& img1, const GrayImage& img2,
                                  const PipelineConfig& cfg,
                                  const FundamentalMatrix* f_override,
                                  const std::vector<SeedMatch>* ext_seeds,
                                  const CameraIntrinsics* intrinsics,
                                  const PointPair* pose_sample) {
    MatchRunResult res;

    // Seed stage: external matches when supplied, otherwise Harris corners
    // with mutual nearest-neighbor matching.
    std::vector<SeedMatch> seeds;
    if (ext_seeds) {
        seeds = *ext_seeds;
    } else {
        std::vector<Feature> f1 =
            detect_harris(img1, cfg.seed_k, cfg.seed_response_thresh,
                          cfg.seed_nms_radius, cfg.seed_max_features);
        std::vector<Feature> f2 =
            detect_harris(img2, cfg.seed_k, cfg.seed_response_thresh,
                          cfg.seed_nms_radius, cfg.seed_max_features);
        seeds = match_mutual_nn(f1, f2, cfg.seed_min_similarity);
    }
    res.n_seeds = int(seeds.size());

    std::vector<PointPair> pairs;
    pairs.reserve(seeds.size());
    for (const SeedMatch& s : seeds) pairs.push_back({hom(s.p1), hom(s.p2)});

    if (f_override) {
        res.f = *f_override;
        res.n_inliers = 0;
        for (const PointPair& p : pairs)
            if (sampson_distance(res.f, p.first, p.second) <= cfg.ransac_thresh)
                ++res.n_inliers;
    } else {
        if (res.n_seeds < 8)
            throw PipelineError("seed", "only " + std::to_string(res.n_seeds) +
                                            " seed matches; need at least 8");
        RansacResult rr;
        try {
            rr = ransac_fundamental(pairs, cfg.ransac_max_iters,
                                    cfg.ransac_thresh, cfg.seed);
        } catch (const DegeneracyError& e) {
            throw PipelineError("ransac", e.what());
        } catch (const RobustFitError& e) {
            throw PipelineError("ransac", e.what());
        }
        res.f = rr.f;
        res.n_inliers = rr.n_inliers;
        // Drop outlier seeds so the pose sample below is trustworthy.
        std::vector<PointPair> inlier_pairs;
        for (size_t i = 0; i < pairs.size(); ++i)
            if (rr.inliers[i]) inlier_pairs.push_back(pairs[i]);
        pairs = std::move(inlier_pairs);
    }

    // Metric setup: decompose E and triangulate depths when intrinsics are
    // available; otherwise the depth filter stays off.
    ProjectiveCameraPair cameras;
    const ProjectiveCameraPair* cam_ptr = nullptr;
    if (intrinsics) {
        PointPair sample;
        if (pose_sample) {
            sample = *pose_sample;
        } else {
            if (pairs.empty())
                throw PipelineError("pose", "no correspondence available for "
                                            "cheirality disambiguation");
            double best = 1e300;
            for (const PointPair& p : pairs) {
                double d = sampson_distance(res.f, p.first, p.second);
                if (d < best) {
                    best = d;
                    sample = p;
                }
            }
        }
        res.pose = decompose_essential(res.f, *intrinsics, *intrinsics, sample);
        cameras = metric_camera_pair(*intrinsics, *intrinsics, res.pose);
        cam_ptr = &cameras;
        res.metric = true;
    }

    SweepContext ctx = make_sweep_context(img1, img2, res.f, cam_ptr, cfg);
    res.lines = sweep_parallel(ctx, cfg.workers);

    for (const LineMatches& lm : res.lines)
        for (const DenseMatch& m : lm.matches) res.report.add(m);
    return res;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error("cannot write file: " + tmp);
        f << text;
    }
    std::filesystem::rename(tmp, path);
}

std::string format_matches(const std::vector<LineMatches>& lines) {
    std::string out;
    char buf[256];
    for (const LineMatches& lm : lines) {
        for (const DenseMatch& m : lm.matches) {
            int n = std::snprintf(buf, sizeof(buf), "%d %.4f %.4f %.4f %.4f %.4f %s\n",
                                  lm.line_index, m.p1.x, m.p1.y, m.p2.x, m.p2.y,
                                  m.cost, flag_names(m.flags).c_str());
            out.append(buf, size_t(n));
        }
    }
    return out;
}

void write_matches(const std::vector<LineMatches>& lines, const std::string& path) {
    write_text_atomic(path, format_matches(lines));
}

void write_ply(const std::vector<LineMatches>& lines, const GrayImage& img1,
               bool metric, const FundamentalMatrix& f, const std::string& path) {
    // Collect survivor points. Metric runs already carry depth records;
    // projective runs triangulate against the canonical camera pair.
    ProjectiveCameraPair canon;
    if (!metric) canon = canonical_camera_pair(f);

    std::vector<std::array<double, 3>> pts;
    std::vector<uint8_t> grays;
    for (const LineMatches& lm : lines) {
        for (size_t i = 0; i < lm.matches.size(); ++i) {
            const DenseMatch& m = lm.matches[i];
            if (m.flags != 0) continue;
            Vec3 p;
            if (metric) {
                if (i >= lm.depths.size() || !lm.depths[i].ok) continue;
                p = lm.depths[i].point;
            } else {
                try {
                    p = triangulate(canon.p1, canon.p2, hom(m.p1), hom(m.p2)).point;
                } catch (const TriangulationError&) {
                    continue;
                }
            }
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
                continue;
            pts.push_back({p[0], p[1], p[2]});
            double g = sample_bilinear(img1, m.p1);
            grays.push_back(uint8_t(std::lround(std::clamp(g, 0.0, 255.0))));
        }
    }

    std::ostringstream out;
    out << "ply\nformat ascii 1.0\n";
    if (!metric) out << "comment projective\n";
    out << "element vertex " << pts.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        << "end_header\n";
    char buf[128];
    for (size_t i = 0; i < pts.size(); ++i) {
        int n = std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d %d %d\n",
                              pts[i][0], pts[i][1], pts[i][2], grays[i], grays[i],
                              grays[i]);
        out.write(buf, n);
    }
    write_text_atomic(path, out.str());
}

void write_viz(const GrayImage& img1, const GrayImage& img2,
               const SweepContext& ctx, int n_lines, const std::string& path) {
    GrayImage canvas(img1.width + img2.width, std::max(img1.height, img2.height));
    for (int y = 0; y < img1.height; ++y)
        for (int x = 0; x < img1.width; ++x) canvas.at(x, y) = img1.at(x, y);
    for (int y = 0; y < img2.height; ++y)
        for (int x = 0; x < img2.width; ++x)
            canvas.at(img1.width + x, y) = img2.at(x, y);

    const uint8_t palette[6][3] = {{230, 60, 60},  {60, 200, 60},  {70, 110, 245},
                                   {230, 200, 40}, {200, 70, 220}, {40, 210, 210}};
    std::vector<OverlaySegment> overlay;
    int total = ctx.pencil.size();
    int count = std::min(n_lines, total);
    for (int i = 0; i < count; ++i) {
        int k = count > 1 ? int(double(i) * (total - 1) / (count - 1)) : 0;
        std::optional<LinePair> lp =
            corresponding_pair(ctx.f, ctx.pencil, k, ctx.rect1, ctx.rect2);
        if (!lp) continue;
        const uint8_t* c = palette[i % 6];
        Point2 off{double(img1.width), 0.0};
        overlay.push_back({lp->seg1.entry, lp->seg1.exit, c[0], c[1], c[2]});
        overlay.push_back({lp->seg2.entry + off, lp->seg2.exit + off, c[0], c[1], c[2]});
    }
    save_ppm(canvas, overlay, path);
}

namespace {

std::filesystem::path out_path(const PipelineConfig& cfg, const char* name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

std::string run_report(const MatchRunResult& res, const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "seeds=" << res.n_seeds << "\n";
    out << "inliers=" << res.n_inliers << "\n";
    out << "lines=" << res.lines.size() << "\n";
    long kp1 = 0, kp2 = 0, aligned = 0;
    for (const LineMatches& lm : res.lines) {
        kp1 += lm.n_keypoints1;
        kp2 += lm.n_keypoints2;
        aligned += lm.n_aligned;
    }
    out << "keypoints1=" << kp1 << "\n";
    out << "keypoints2=" << kp2 << "\n";
    out << "aligned=" << aligned << "\n";
    out << "metric=" << (res.metric ? 1 : 0) << "\n";
    out << res.report.to_kv();
    out << "# config\n" << cfg.dump();
    return out.str();
}

struct LoadedInputs {
    GrayImage img1;
    GrayImage img2;
    std::optional<CameraIntrinsics> intrinsics;
    std::optional<FundamentalMatrix> f_override;
    std::optional<std::vector<SeedMatch>> ext_seeds;
};

LoadedInputs load_inputs(const PipelineConfig& cfg) {
    LoadedInputs in;
    if (cfg.image1_path.empty() || cfg.image2_path.empty())
        throw PipelineError("input", "two input images are required");
    in.img1 = load_image(cfg.image1_path);
    in.img2 = load_image(cfg.image2_path);
    if (!cfg.intrinsics_path.empty())
        in.intrinsics = load_intrinsics(cfg.intrinsics_path);
    if (!cfg.fundamental_path.empty())
        in.f_override = load_fundamental(cfg.fundamental_path);
    if (!cfg.ext_matches_path.empty()) {
        std::ifstream f(cfg.ext_matches_path, std::ios::binary);
        if (!f)
            throw PipelineError("input", "cannot open external matches: " +
                                             cfg.ext_matches_path);
        std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
        in.ext_seeds = load_external_matches(bytes);
    }
    return in;
}

MatchRunResult run_match_files(const PipelineConfig& cfg, bool with_cloud) {
    LoadedInputs in = load_inputs(cfg);
    MatchRunResult res = run_match_pipeline(
        in.img1, in.img2, cfg, in.f_override ? &*in.f_override : nullptr,
        in.ext_seeds ? &*in.ext_seeds : nullptr,
        in.intrinsics ? &*in.intrinsics : nullptr);

    write_matches(res.lines, out_path(cfg, "matches.txt").string());
    write_text_atomic(out_path(cfg, "report.txt").string(), run_report(res, cfg));
    write_text_atomic(out_path(cfg, "fundamental.txt").string(),
                      serialize_fundamental(res.f));
    if (cfg.viz_lines > 0) {
        SweepContext ctx = make_sweep_context(in.img1, in.img2, res.f, nullptr, cfg);
        write_viz(in.img1, in.img2, ctx, cfg.viz_lines,
                  out_path(cfg, "viz.ppm").string());
    }
    if (with_cloud)
        write_ply(res.lines, in.img1, res.metric, res.f,
                  out_path(cfg, "cloud.ply").string());
    return res;
}

}  // namespace

MatchRunResult run_match(const PipelineConfig& cfg) {
    return run_match_files(cfg, false);
}

MatchRunResult run_reconstruct(const PipelineConfig& cfg) {
    return run_match_files(cfg, true);
}

SyntheticScene make_scene(const PipelineConfig& cfg) {
    if (cfg.scene == "two-plane")
        return make_two_plane_scene(cfg.scene_width, cfg.scene_height, cfg.seed);
    return make_plane_scene(cfg.scene_width, cfg.scene_height, cfg.seed);
}

EvalResult run_eval(const PipelineConfig& cfg) {
    SyntheticScene scene = make_scene(cfg);

    const FundamentalMatrix* f_override = nullptr;
    if (cfg.eval_f_source == "true") f_override = &scene.f_true;

    PointPair sample = scene.center_pair();
    EvalResult res;
    res.run = run_match_pipeline(scene.img1, scene.img2, cfg, f_override,
                                 nullptr, &scene.k, &sample);
    res.metrics = precision_recall(res.run.survivors(), scene, cfg.eval_tol);

    write_matches(res.run.lines, out_path(cfg, "matches.txt").string());
    write_text_atomic(out_path(cfg, "metrics.csv").string(),
                      MetricsReport::csv_header() + "\n" +
                          res.metrics.csv_row() + "\n");
    write_text_atomic(out_path(cfg, "report.txt").string(),
                      run_report(res.run, cfg) + res.metrics.to_kv());
    return res;
}

void run_synth(const PipelineConfig& cfg) {
    SyntheticScene scene = make_scene(cfg);
    save_pgm(scene.img1, out_path(cfg, "img1.pgm").string());
    save_pgm(scene.img2, out_path(cfg, "img2.pgm").string());
    write_text_atomic(out_path(cfg, "F_true.txt").string(),
                      serialize_fundamental(scene.f_true));

    char buf[256];
    std::snprintf(buf, sizeof(buf), "fx = %.9g\nfy = %.9g\ncx = %.9g\ncy = %.9g\nskew = 0\n",
                  scene.k.fx, scene.k.fy, scene.k.cx, scene.k.cy);
    write_text_atomic(out_path(cfg, "intrinsics.txt").string(), buf);

    // Ground truth on a coarse lattice, in the external-match text format.
    std::ostringstream gt;
    gt << "# x1 y1 x2 y2 (visible ground-truth pairs, stride 8)\n";
    for (int y = 0; y < scene.img1.height; y += 8) {
        for (int x = 0; x < scene.img1.width; x += 8) {
            GtResult g = scene.ground_truth({double(x), double(y)});
            if (g.status != GtStatus::visible) continue;
            std::snprintf(buf, sizeof(buf), "%d %d %.4f %.4f\n", x, y, g.point.x,
                          g.point.y);
            gt << buf;
        }
    }
    write_text_atomic(out_path(cfg, "gt.txt").string(), gt.str());
}

}  // namespace sefm
