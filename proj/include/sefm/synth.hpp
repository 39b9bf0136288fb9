#pragma once

#include <cstdint>
#include <vector>

#include "sefm/epipolar.hpp"
#include "sefm/image.hpp"
#include "sefm/linalg.hpp"

namespace sefm {

// Textured plane in the camera-1 frame: points X with dot(normal, X) = dist.
// Texture coordinates come from the in-plane orthonormal basis (eu, ev)
// anchored at `origin`. A bounded plane only exists inside the (u, v) box,
// which is how the foreground occluder is cut out.
struct ScenePlane {
    Vec3 normal = {0, 0, 1};  // unit
    double dist = 1.0;
    Vec3 origin = {0, 0, 1};
    Vec3 eu = {1, 0, 0};
    Vec3 ev = {0, 1, 0};
    int texture = 0;      // index into SyntheticScene::textures
    double tex_scale = 1.0;
    double tex_off_u = 0.0;
    double tex_off_v = 0.0;
    bool bounded = false;
    double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;

    bool in_bounds(double u, double v) const {
        return !bounded || (u >= u0 && u <= u1 && v >= v0 && v <= v1);
    }
};

enum class GtStatus { visible, occluded, out_of_view };

struct GtResult {
    GtStatus status = GtStatus::out_of_view;
    Point2 point;       // correspondence in the other image (when visible)
    double depth = 0.0; // camera depth of the surface point in the source view
};

// Two rendered views of a plane arrangement, with the exact ground-truth
// correspondence map and the true two-view geometry.
struct SyntheticScene {
    GrayImage img1;
    GrayImage img2;
    FundamentalMatrix f_true;
    CameraIntrinsics k;
    RelativePose pose;      // unit translation direction
    double baseline = 1.0;  // camera-2 center sits at baseline * t
    std::vector<ScenePlane> planes;
    std::vector<GrayImage> textures;

    ProjectiveCameraPair cameras() const;

    // Exact correspondence of a subpixel image-1 point into image 2
    // (or the reverse). Occlusion is decided against the nearest surface
    // along the target view's ray.
    GtResult ground_truth(Point2 p1) const;
    GtResult ground_truth_reverse(Point2 p2) const;

    // A visible correspondence near the image-1 center, for cheirality
    // disambiguation and smoke checks.
    PointPair center_pair() const;
};

// Block-mosaic texture: `block`-pixel cells with neighbor contrast of at
// least min_contrast, plus low-amplitude smoothed noise. Levels stay within
// [lo, hi].
GrayImage make_block_texture(int w, int h, int block, uint64_t seed,
                             double lo, double hi, double min_contrast = 30.0,
                             double noise_amp = 6.0);

// Renders one textured plane into both views by exact ray-plane
// intersection with bilinear texture lookup. Throws GeometryError when the
// plane falls behind a camera. The texture mapping is fitted automatically
// so both views stay inside the texture.
SyntheticScene synth_plane_pair(GrayImage texture, const CameraIntrinsics& k,
                                const RelativePose& pose, double baseline,
                                const Vec3& plane_normal, double plane_dist,
                                int width, int height);

// Same, plus a bounded foreground plane occluding part of the background.
SyntheticScene synth_two_plane_pair(GrayImage bg_texture, GrayImage fg_texture,
                                    const CameraIntrinsics& k,
                                    const RelativePose& pose, double baseline,
                                    const Vec3& bg_normal, double bg_dist,
                                    const Vec3& fg_normal, double fg_dist,
                                    double fg_extent, int width, int height);

// Ready-made benchmark scenes (seeded textures, mild rotation, sideways
// baseline).
SyntheticScene make_plane_scene(int width, int height, uint64_t seed);
SyntheticScene make_two_plane_scene(int width, int height, uint64_t seed);

}  // namespace sefm
