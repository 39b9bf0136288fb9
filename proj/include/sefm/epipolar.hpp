#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sefm/linalg.hpp"

namespace sefm {

// Rank-2 relation between two views: x2^T * F * x1 == 0 for every
// correspondence (x1 in image 1, x2 in image 2). Normalized to Frobenius
// norm 1 with the largest-magnitude entry positive, so equal geometries
// compare equal entrywise.
struct FundamentalMatrix {
    Mat3 m;

    // Projects an arbitrary 3x3 matrix onto the invariants: nearest rank-2
    // matrix, unit Frobenius norm, fixed sign.
    static FundamentalMatrix from_raw(const Mat3& raw);
};

struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    double skew = 0.0;

    Mat3 matrix() const {
        return {{fx, skew, cx, 0, fy, cy, 0, 0, 1}};
    }
};

// Maps camera-1 coordinates into camera 2: X2 = R * X1 + t, with ||t|| = 1.
struct RelativePose {
    Mat3 r = Mat3::identity();
    Vec3 t = {1, 0, 0};
};

struct ProjectiveCameraPair {
    Mat34 p1;
    Mat34 p2;
    bool metric = false;  // true when built from intrinsics + pose
};

// P1 = K1 [I | 0], P2 = K2 [R | t].
ProjectiveCameraPair metric_camera_pair(const CameraIntrinsics& k1,
                                        const CameraIntrinsics& k2,
                                        const RelativePose& pose);

// Canonical pair from F alone: P1 = [I | 0], P2 = [[e2]x F | e2]. Depths
// from this pair are projective, not metric.
ProjectiveCameraPair canonical_camera_pair(const FundamentalMatrix& f);

using PointPair = std::pair<HomPoint2, HomPoint2>;

// Hartley-normalized eight-point estimate. Throws ArityError with fewer
// than 8 pairs and DegeneracyError when the design matrix drops below
// rank 8.
FundamentalMatrix estimate_fundamental_8pt(const std::vector<PointPair>& pairs);

// First-order geometric distance (pixels) of a correspondence from the
// epipolar constraint.
double sampson_distance(const FundamentalMatrix& f, const HomPoint2& x1,
                        const HomPoint2& x2);

struct RansacResult {
    FundamentalMatrix f;
    std::vector<bool> inliers;
    int n_inliers = 0;
    int iterations_run = 0;
};

// Repeated minimal 8-point samples scored by Sampson distance, refit on the
// consensus set. Deterministic for a fixed seed. Early exit once the
// standard adaptive iteration count at 99.9% confidence is reached. Throws
// RobustFitError if no model gathers 8 inliers.
RansacResult ransac_fundamental(const std::vector<PointPair>& pairs,
                                int max_iters, double inlier_thresh,
                                uint64_t seed);

enum class EpipoleSide {
    left,   // image-1 epipole: F * e = 0
    right,  // image-2 epipole: F^T * e = 0
};

HomPoint2 epipole(const FundamentalMatrix& f, EpipoleSide side);

enum class LineDirection {
    forward,   // point in image 1 -> line in image 2 (F * x)
    backward,  // point in image 2 -> line in image 1 (F^T * x)
};

// Throws DegeneracyError when x coincides with the epipole of its image
// (the mapped line vanishes).
HomLine2 epipolar_line(const FundamentalMatrix& f, const HomPoint2& x,
                       LineDirection dir);

// E = K2^T F K1 with singular values forced to (1,1,0); the four (R, t)
// candidates are disambiguated by triangulating sample_pair and keeping the
// one with positive depth in both cameras. sample_pair must be a real
// correspondence: pairs whose Sampson distance exceeds max_residual_px are
// rejected up front.
RelativePose decompose_essential(const FundamentalMatrix& f,
                                 const CameraIntrinsics& k1,
                                 const CameraIntrinsics& k2,
                                 const PointPair& sample_pair,
                                 double max_residual_px = 4.0);

struct TriangulatedPoint {
    Vec3 point;     // world frame (= camera-1 frame for metric pairs)
    double depth1;  // depth in camera 1
    double depth2;  // depth in camera 2
};

// Linear (DLT) triangulation from the stacked 4x4 constraint system.
// Throws TriangulationError for points at infinity (parallel rays).
TriangulatedPoint triangulate(const Mat34& p1, const Mat34& p2,
                              const HomPoint2& x1, const HomPoint2& x2);

// Flat key=value file with keys fx, fy, cx, cy and optional skew.
CameraIntrinsics load_intrinsics(const std::string& path);

// 9 whitespace-separated decimals, row-major, full precision.
std::string serialize_fundamental(const FundamentalMatrix& f);
FundamentalMatrix parse_fundamental(const std::string& text);
FundamentalMatrix load_fundamental(const std::string& path);

}  // namespace sefm
