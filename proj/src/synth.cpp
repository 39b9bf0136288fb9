#include "sefm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sefm/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sefm {

namespace {

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

struct PlaneHit {
    int plane = -1;
    Vec3 point;    // camera-1 frame
    double depth = 0.0;
    double u = 0.0, v = 0.0;
};

// Nearest plane hit along the ray lambda * dir (camera frame given by
// rot/trans mapping camera-1 coordinates into that camera).
PlaneHit intersect_planes(const std::vector<ScenePlane>& planes,
                          const Mat3& cam_r, const Vec3& cam_t, Vec3 dir) {
    // Ray in camera coords: X_cam = lambda * dir. In camera-1 coords:
    // X = R^T (X_cam - t) = lambda * R^T dir - R^T t.
    Mat3 rt = transpose(cam_r);
    Vec3 d1 = rt * dir;
    Vec3 o1 = -1.0 * (rt * cam_t);

    PlaneHit best;
    for (size_t i = 0; i < planes.size(); ++i) {
        const ScenePlane& pl = planes[i];
        double denom = dot(pl.normal, d1);
        if (std::abs(denom) < 1e-14) continue;
        double lambda = (pl.dist - dot(pl.normal, o1)) / denom;
        if (lambda <= 1e-9) continue;  // behind the camera
        Vec3 x = o1 + lambda * d1;
        Vec3 rel = x - pl.origin;
        double u = dot(rel, pl.eu);
        double v = dot(rel, pl.ev);
        if (!pl.in_bounds(u, v)) continue;
        if (best.plane < 0 || lambda < best.depth) {
            best.plane = int(i);
            best.point = x;
            best.depth = lambda;  // dir has unit z, so lambda is the depth
            best.u = u;
            best.v = v;
        }
    }
    return best;
}

}  // namespace

ProjectiveCameraPair SyntheticScene::cameras() const {
    RelativePose scaled = pose;
    ProjectiveCameraPair pair = metric_camera_pair(k, k, scaled);
    // Stretch the translation column to the true baseline.
    Vec3 kt = k.matrix() * (baseline * pose.t);
    for (int i = 0; i < 3; ++i) pair.p2(i, 3) = kt[i];
    return pair;
}

namespace {

GtResult ground_truth_impl(const SyntheticScene& scene, Point2 src,
                           bool from_first) {
    const Mat3 r1 = Mat3::identity();
    const Vec3 t1 = {0, 0, 0};
    const Mat3& r2 = scene.pose.r;
    const Vec3 t2 = scene.baseline * scene.pose.t;

    const Mat3& src_r = from_first ? r1 : r2;
    const Vec3& src_t = from_first ? t1 : t2;
    const Mat3& dst_r = from_first ? r2 : r1;
    const Vec3& dst_t = from_first ? t2 : t1;

    Mat3 kinv = inverse(scene.k.matrix());
    GtResult res;

    PlaneHit hit = intersect_planes(scene.planes, src_r, src_t, kinv * hom(src));
    if (hit.plane < 0) return res;  // ray escapes the scene
    res.depth = hit.depth;

    // Project the surface point into the destination view.
    Vec3 x_dst = dst_r * hit.point + dst_t;
    if (x_dst[2] <= 1e-12) return res;
    Vec3 proj = scene.k.matrix() * x_dst;
    Point2 p{proj[0] / proj[2], proj[1] / proj[2]};

    const GrayImage& dst_img = from_first ? scene.img2 : scene.img1;
    if (!dst_img.contains(p)) return res;

    // Occlusion: the destination ray must hit the same surface point first.
    PlaneHit dst_hit =
        intersect_planes(scene.planes, dst_r, dst_t, kinv * hom(p));
    res.point = p;
    if (dst_hit.plane != hit.plane ||
        norm(dst_hit.point - hit.point) > 1e-6 * (1.0 + hit.depth)) {
        res.status = GtStatus::occluded;
        return res;
    }
    res.status = GtStatus::visible;
    return res;
}

}  // namespace

GtResult SyntheticScene::ground_truth(Point2 p1) const {
    return ground_truth_impl(*this, p1, true);
}

GtResult SyntheticScene::ground_truth_reverse(Point2 p2) const {
    return ground_truth_impl(*this, p2, false);
}

PointPair SyntheticScene::center_pair() const {
    Point2 c{double(img1.width - 1) / 2.0, double(img1.height - 1) / 2.0};
    // Spiral out from the center until a visible point is found.
    for (int radius = 0; radius < std::min(img1.width, img1.height) / 2; ++radius) {
        for (int dy = -radius; dy <= radius; ++dy) {
            for (int dx = -radius; dx <= radius; ++dx) {
                if (std::max(std::abs(dx), std::abs(dy)) != radius) continue;
                Point2 p{c.x + dx, c.y + dy};
                if (!img1.contains(p)) continue;
                GtResult gt = ground_truth(p);
                if (gt.status == GtStatus::visible)
                    return {hom(p), hom(gt.point)};
            }
        }
    }
    throw GeometryError("no visible ground-truth pair anywhere near the center");
}

GrayImage make_block_texture(int w, int h, int block, uint64_t seed, double lo,
                             double hi, double min_contrast, double noise_amp) {
    if (block < 1 || w < block || h < block)
        throw SizeError("texture smaller than one block");

    std::mt19937_64 rng(seed);
    int bw = (w + block - 1) / block;
    int bh = (h + block - 1) / block;
    std::vector<double> levels(size_t(bw) * bh);
    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            double left = bx > 0 ? levels[size_t(by) * bw + bx - 1] : -1e9;
            double top = by > 0 ? levels[size_t(by - 1) * bw + bx] : -1e9;
            double v = 0.0;
            for (int attempt = 0; attempt < 64; ++attempt) {
                v = lo + uniform01(rng) * (hi - lo);
                if (std::abs(v - left) >= min_contrast &&
                    std::abs(v - top) >= min_contrast)
                    break;
            }
            levels[size_t(by) * bw + bx] = v;
        }
    }

    GrayImage tex(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            tex.at(x, y) = levels[size_t(y / block) * bw + size_t(x / block)];

    if (noise_amp > 0.0) {
        // White noise softened by one box pass, so it perturbs descriptors
        // without spawning key points of its own.
        GrayImage noise(w, h);
        for (double& v : noise.data) v = (uniform01(rng) * 2.0 - 1.0) * noise_amp;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double s = 0.0;
                int cnt = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int xx = x + dx, yy = y + dy;
                        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                        s += noise.at(xx, yy);
                        ++cnt;
                    }
                tex.at(x, y) = std::clamp(tex.at(x, y) + s / cnt, 0.0, 255.0);
            }
        }
    }
    return tex;
}

namespace {

// Orthonormal in-plane basis with eu roughly along +x.
void plane_basis(const Vec3& normal, Vec3& eu, Vec3& ev) {
    Vec3 up = std::abs(normal[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    ev = normalized(cross(normal, up));
    eu = normalized(cross(ev, normal));
}

FundamentalMatrix fundamental_from_pose(const CameraIntrinsics& k,
                                        const RelativePose& pose) {
    Mat3 e = skew(pose.t) * pose.r;
    Mat3 kinv = inverse(k.matrix());
    return FundamentalMatrix::from_raw(transpose(kinv) * e * kinv);
}

// Fits tex_scale / tex_off so the (u, v) footprints of both views map
// inside the texture with a safety margin.
void fit_texture_mapping(SyntheticScene& scene, ScenePlane& pl) {
    Mat3 kinv = inverse(scene.k.matrix());
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;

    auto visit = [&](const Mat3& r, const Vec3& t, Point2 px) {
        Mat3 rt = transpose(r);
        Vec3 d1 = rt * (kinv * hom(px));
        Vec3 o1 = -1.0 * (rt * t);
        double denom = dot(pl.normal, d1);
        if (std::abs(denom) < 1e-14)
            throw GeometryError("view ray parallel to scene plane");
        double lambda = (pl.dist - dot(pl.normal, o1)) / denom;
        if (lambda <= 0.0)
            throw GeometryError("plane behind a camera");
        Vec3 x = o1 + lambda * d1;
        Vec3 rel = x - pl.origin;
        umin = std::min(umin, dot(rel, pl.eu));
        umax = std::max(umax, dot(rel, pl.eu));
        vmin = std::min(vmin, dot(rel, pl.ev));
        vmax = std::max(vmax, dot(rel, pl.ev));
    };

    const int w = scene.img1.width, h = scene.img1.height;
    const Point2 corners[4] = {{0, 0}, {double(w - 1), 0},
                               {double(w - 1), double(h - 1)}, {0, double(h - 1)}};
    for (const Point2& c : corners) {
        visit(Mat3::identity(), {0, 0, 0}, c);
        visit(scene.pose.r, scene.baseline * scene.pose.t, c);
    }

    const GrayImage& tex = scene.textures[size_t(pl.texture)];
    double margin = 2.0;
    double su = (tex.width - 1 - 2 * margin) / std::max(umax - umin, 1e-12);
    double sv = (tex.height - 1 - 2 * margin) / std::max(vmax - vmin, 1e-12);
    pl.tex_scale = std::min(su, sv);
    pl.tex_off_u = margin - pl.tex_scale * umin;
    pl.tex_off_v = margin - pl.tex_scale * vmin;
}

void render_views(SyntheticScene& scene) {
    Mat3 kinv = inverse(scene.k.matrix());
    const int w = scene.img1.width, h = scene.img1.height;

    auto render = [&](GrayImage& img, const Mat3& r, const Vec3& t) {
        bool behind = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(|| : behind)
#endif
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                PlaneHit hit = intersect_planes(
                    scene.planes, r, t, kinv * hom({double(x), double(y)}));
                if (hit.plane < 0) {
                    behind = true;
                    continue;
                }
                const ScenePlane& pl = scene.planes[size_t(hit.plane)];
                const GrayImage& tex = scene.textures[size_t(pl.texture)];
                Point2 tp{hit.u * pl.tex_scale + pl.tex_off_u,
                          hit.v * pl.tex_scale + pl.tex_off_v};
                tp.x = std::clamp(tp.x, 0.0, double(tex.width - 1));
                tp.y = std::clamp(tp.y, 0.0, double(tex.height - 1));
                img.at(x, y) = sample_bilinear(tex, tp);
            }
        }
        if (behind)
            throw GeometryError("a view ray misses every scene plane");
    };

    render(scene.img1, Mat3::identity(), {0, 0, 0});
    render(scene.img2, scene.pose.r, scene.baseline * scene.pose.t);
}

}  // namespace

SyntheticScene synth_plane_pair(GrayImage texture, const CameraIntrinsics& k,
                                const RelativePose& pose, double baseline,
                                const Vec3& plane_normal, double plane_dist,
                                int width, int height) {
    SyntheticScene scene;
    scene.img1 = GrayImage(width, height);
    scene.img2 = GrayImage(width, height);
    scene.k = k;
    scene.pose = pose;
    scene.pose.t = normalized(pose.t);
    scene.baseline = baseline;
    scene.f_true = fundamental_from_pose(k, scene.pose);
    scene.textures.push_back(std::move(texture));

    ScenePlane pl;
    pl.normal = normalized(plane_normal);
    pl.dist = plane_dist;
    pl.origin = plane_dist * pl.normal;
    plane_basis(pl.normal, pl.eu, pl.ev);
    pl.texture = 0;
    scene.planes.push_back(pl);

    fit_texture_mapping(scene, scene.planes[0]);
    render_views(scene);
    return scene;
}

SyntheticScene synth_two_plane_pair(GrayImage bg_texture, GrayImage fg_texture,
                                    const CameraIntrinsics& k,
                                    const RelativePose& pose, double baseline,
                                    const Vec3& bg_normal, double bg_dist,
                                    const Vec3& fg_normal, double fg_dist,
                                    double fg_extent, int width, int height) {
    SyntheticScene scene;
    scene.img1 = GrayImage(width, height);
    scene.img2 = GrayImage(width, height);
    scene.k = k;
    scene.pose = pose;
    scene.pose.t = normalized(pose.t);
    scene.baseline = baseline;
    scene.f_true = fundamental_from_pose(k, scene.pose);
    scene.textures.push_back(std::move(bg_texture));
    scene.textures.push_back(std::move(fg_texture));

    ScenePlane bg;
    bg.normal = normalized(bg_normal);
    bg.dist = bg_dist;
    bg.origin = bg_dist * bg.normal;
    plane_basis(bg.normal, bg.eu, bg.ev);
    bg.texture = 0;
    scene.planes.push_back(bg);

    ScenePlane fg;
    fg.normal = normalized(fg_normal);
    fg.dist = fg_dist;
    fg.origin = fg_dist * fg.normal;
    plane_basis(fg.normal, fg.eu, fg.ev);
    fg.texture = 1;
    fg.bounded = true;
    fg.u0 = -fg_extent;
    fg.u1 = fg_extent;
    fg.v0 = -fg_extent;
    fg.v1 = fg_extent;
    scene.planes.push_back(fg);

    fit_texture_mapping(scene, scene.planes[0]);
    // The foreground footprint is its own bounded patch.
    {
        ScenePlane& pl = scene.planes[1];
        const GrayImage& tex = scene.textures[1];
        double margin = 2.0;
        pl.tex_scale = std::min((tex.width - 1 - 2 * margin) / (2 * fg_extent),
                                (tex.height - 1 - 2 * margin) / (2 * fg_extent));
        pl.tex_off_u = margin - pl.tex_scale * pl.u0;
        pl.tex_off_v = margin - pl.tex_scale * pl.v0;
    }
    render_views(scene);
    return scene;
}

SyntheticScene make_plane_scene(int width, int height, uint64_t seed) {
    CameraIntrinsics k;
    k.fx = k.fy = 0.9 * width;
    k.cx = (width - 1) / 2.0;
    k.cy = (height - 1) / 2.0;

    RelativePose pose;
    double ay = -0.06, az = 0.01;  // mild yaw plus a whisper of roll
    Mat3 ry{{std::cos(ay), 0, std::sin(ay), 0, 1, 0, -std::sin(ay), 0, std::cos(ay)}};
    Mat3 rz{{std::cos(az), -std::sin(az), 0, std::sin(az), std::cos(az), 0, 0, 0, 1}};
    pose.r = rz * ry;
    pose.t = normalized(Vec3{-1.0, 0.05, 0.12});

    GrayImage tex = make_block_texture(3 * width, 3 * height, 16, seed, 20.0, 235.0);
    return synth_plane_pair(std::move(tex), k, pose, 0.55,
                            normalized(Vec3{0.12, -0.08, 1.0}), 6.0, width,
                            height);
}

SyntheticScene make_two_plane_scene(int width, int height, uint64_t seed) {
    CameraIntrinsics k;
    k.fx = k.fy = 0.9 * width;
    k.cx = (width - 1) / 2.0;
    k.cy = (height - 1) / 2.0;

    RelativePose pose;
    double ay = -0.05;
    Mat3 ry{{std::cos(ay), 0, std::sin(ay), 0, 1, 0, -std::sin(ay), 0, std::cos(ay)}};
    pose.r = ry;
    pose.t = normalized(Vec3{-1.0, 0.04, 0.1});

    GrayImage bg = make_block_texture(3 * width, 3 * height, 16, seed, 15.0, 140.0);
    GrayImage fg = make_block_texture(width, height, 16, seed + 1, 130.0, 250.0);
    return synth_two_plane_pair(std::move(bg), std::move(fg), k, pose, 0.5,
                                normalized(Vec3{0.1, -0.06, 1.0}), 7.0,
                                normalized(Vec3{-0.05, 0.04, 1.0}), 3.8, 0.9,
                                width, height);
}

}  // namespace sefm
