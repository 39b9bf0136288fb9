#pragma once

// Independent reference computations shared by the unit and acceptance
// suites. Everything here is deliberately brute-force and kept separate
// from the library implementation paths it checks.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sefm/epipolar.hpp"
#include "sefm/linalg.hpp"
#include "sefm/rough.hpp"

namespace oracle {

inline double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + uniform01(rng) * (hi - lo);
}

// ---------------------------------------------------------------------------
// Synthetic projection: random 3D points seen by two known cameras. The
// fundamental matrix, poses, and pixel correspondences are all exact, so
// estimator outputs can be checked against ground truth.
// ---------------------------------------------------------------------------

struct ProjectionScene {
    sefm::CameraIntrinsics k;
    sefm::RelativePose pose;                // unit-baseline ground truth
    sefm::ProjectiveCameraPair cams;
    sefm::FundamentalMatrix f_true;
    std::vector<sefm::Vec3> points;         // camera-1 frame
    std::vector<sefm::PointPair> pairs;     // exact pixel correspondences
    int width = 640;
    int height = 480;
};

inline sefm::Mat3 rotation_xyz(double ax, double ay, double az) {
    using sefm::Mat3;
    Mat3 rx{{1, 0, 0, 0, std::cos(ax), -std::sin(ax), 0, std::sin(ax), std::cos(ax)}};
    Mat3 ry{{std::cos(ay), 0, std::sin(ay), 0, 1, 0, -std::sin(ay), 0, std::cos(ay)}};
    Mat3 rz{{std::cos(az), -std::sin(az), 0, std::sin(az), std::cos(az), 0, 0, 0, 1}};
    return rz * ry * rx;
}

inline ProjectionScene make_projection_scene(uint64_t seed, int n_points) {
    std::mt19937_64 rng(seed);
    ProjectionScene s;
    s.k.fx = 520.0;
    s.k.fy = 540.0;
    s.k.cx = (s.width - 1) / 2.0;
    s.k.cy = (s.height - 1) / 2.0;

    s.pose.r = rotation_xyz(uniform(rng, -0.08, 0.08), uniform(rng, -0.15, 0.15),
                            uniform(rng, -0.05, 0.05));
    s.pose.t = sefm::normalized(sefm::Vec3{uniform(rng, -1.0, -0.5),
                                           uniform(rng, -0.2, 0.2),
                                           uniform(rng, -0.2, 0.2)});
    s.cams = sefm::metric_camera_pair(s.k, s.k, s.pose);

    sefm::Mat3 kinv = sefm::inverse(s.k.matrix());
    sefm::Mat3 e = sefm::skew(s.pose.t) * s.pose.r;
    s.f_true = sefm::FundamentalMatrix::from_raw(sefm::transpose(kinv) * e * kinv);

    while (int(s.points.size()) < n_points) {
        // Sample inside the first frustum, keep when visible in both.
        double z = uniform(rng, 4.0, 10.0);
        double x = uniform(rng, -0.5, 0.5) * z * s.width / s.k.fx;
        double y = uniform(rng, -0.5, 0.5) * z * s.height / s.k.fy;
        sefm::Vec3 p{x, y, z};
        sefm::Vec3 x1 = sefm::project_point(s.cams.p1, p);
        sefm::Vec3 x2 = sefm::project_point(s.cams.p2, p);
        if (x2[2] <= 0.1) continue;
        sefm::Point2 q1 = sefm::dehom(x1);
        sefm::Point2 q2 = sefm::dehom(x2);
        if (q1.x < 0 || q1.x > s.width - 1 || q1.y < 0 || q1.y > s.height - 1)
            continue;
        if (q2.x < 0 || q2.x > s.width - 1 || q2.y < 0 || q2.y > s.height - 1)
            continue;
        s.points.push_back(p);
        s.pairs.push_back({sefm::hom(q1), sefm::hom(q2)});
    }
    return s;
}

// Uniform random pairs over the image rectangles (RANSAC outliers).
inline std::vector<sefm::PointPair> random_pairs(std::mt19937_64& rng, int n,
                                                 int width, int height) {
    std::vector<sefm::PointPair> out;
    out.reserve(size_t(n));
    for (int i = 0; i < n; ++i) {
        out.push_back({sefm::hom({uniform(rng, 0, width - 1), uniform(rng, 0, height - 1)}),
                       sefm::hom({uniform(rng, 0, width - 1), uniform(rng, 0, height - 1)})});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Naive O(N^2) discrete Fourier series of the descriptor window, built from
// the profile with the same end-clamping convention but independent math.
// ---------------------------------------------------------------------------

inline std::vector<double> naive_fourier_descriptor(
    const std::vector<double>& values, int center, int window, int harmonics) {
    const int n = int(values.size());
    std::vector<double> w(static_cast<size_t>(window));
    for (int k = 0; k < window; ++k) {
        int idx = center - window / 2 + k;
        if (idx < 0) idx = 0;
        if (idx > n - 1) idx = n - 1;
        w[size_t(k)] = values[size_t(idx)];
    }

    std::vector<double> d;
    double a0 = 0.0;
    for (int k = 0; k < window; ++k) a0 += w[size_t(k)];
    d.push_back(a0 / window);
    for (int h = 1; h <= harmonics; ++h) {
        double ah = 0.0, bh = 0.0;
        for (int k = 0; k < window; ++k) {
            double ang = 2.0 * M_PI * h * k / window;
            ah += w[size_t(k)] * std::cos(ang);
            bh += w[size_t(k)] * std::sin(ang);
        }
        d.push_back(2.0 * ah / window);
        d.push_back(2.0 * bh / window);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Exhaustive search over every order-preserving alignment, accumulating
// scores in left-to-right path order (same associativity as the DP), so
// the optimum must agree bit for bit.
// ---------------------------------------------------------------------------

inline double exhaustive_alignment_score(const sefm::RoughMatchSet& rm1,
                                         const sefm::RoughMatchSet& rm2,
                                         double gap_penalty, double sigma) {
    const int n1 = rm1.size();
    const int n2 = rm2.size();
    std::vector<double> score(size_t(n1) * size_t(n2 > 0 ? n2 : 1), 0.0);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            score[size_t(i) * size_t(n2) + size_t(j)] =
                std::exp(-sefm::descriptor_distance(
                             rm1.keypoints[size_t(i)].descriptor,
                             rm2.keypoints[size_t(j)].descriptor) /
                         sigma) -
                0.5;

    double best = -1e300;
    // Explicit DFS over the move lattice (match / skip-2 / skip-1).
    struct Frame {
        int i, j;
        double acc;
    };
    std::vector<Frame> stack;
    stack.push_back({0, 0, 0.0});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.i == n1 && f.j == n2) {
            if (f.acc > best) best = f.acc;
            continue;
        }
        if (f.i < n1 && f.j < n2)
            stack.push_back({f.i + 1, f.j + 1,
                             f.acc + score[size_t(f.i) * size_t(n2) + size_t(f.j)]});
        if (f.j < n2) stack.push_back({f.i, f.j + 1, f.acc - gap_penalty});
        if (f.i < n1) stack.push_back({f.i + 1, f.j, f.acc - gap_penalty});
    }
    return best;
}

// Random key-point set with descriptors drawn near a shared pool so some
// pairs look alike and some do not.
inline sefm::RoughMatchSet random_keypoints(std::mt19937_64& rng, int count,
                                            int descriptor_len) {
    sefm::RoughMatchSet rm;
    for (int i = 0; i < count; ++i) {
        sefm::KeyPoint kp;
        kp.index = i * 3;
        kp.position = {double(i), 0.0};
        kp.magnitude = 20.0;
        for (int d = 0; d < descriptor_len; ++d)
            kp.descriptor.push_back(uniform(rng, -2.0, 2.0));
        rm.keypoints.push_back(kp);
    }
    return rm;
}

}  // namespace oracle
