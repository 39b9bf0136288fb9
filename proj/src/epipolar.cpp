#include "sefm/epipolar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "sefm/errors.hpp"

namespace sefm {

FundamentalMatrix FundamentalMatrix::from_raw(const Mat3& raw) {
    Svd3Result d = svd3(raw);

    // Nearest rank-2 matrix: drop the smallest singular value. Rebuilding
    // from A*v_i avoids relying on the (possibly null) third column of U.
    Mat3 f = Mat3::zero();
    for (int k = 0; k < 2; ++k) {
        Vec3 av = raw * d.v.col(k);  // = s_k * u_k
        Vec3 vk = d.v.col(k);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) f(i, j) += av[i] * vk[j];
    }

    double n = frobenius_norm(f);
    if (n < 1e-300)
        throw DegeneracyError("zero fundamental matrix");
    f = (1.0 / n) * f;

    // Fix the sign so the largest-magnitude entry is positive; ties resolve
    // to the first such entry in row-major order.
    int arg = 0;
    for (int i = 1; i < 9; ++i)
        if (std::abs(f.m[i]) > std::abs(f.m[arg])) arg = i;
    if (f.m[arg] < 0.0) f = -1.0 * f;

    return FundamentalMatrix{f};
}

ProjectiveCameraPair metric_camera_pair(const CameraIntrinsics& k1,
                                        const CameraIntrinsics& k2,
                                        const RelativePose& pose) {
    ProjectiveCameraPair pair;
    pair.p1 = Mat34::from(k1.matrix(), {0, 0, 0});
    pair.p2 = Mat34::from(k2.matrix() * pose.r, k2.matrix() * pose.t);
    pair.metric = true;
    return pair;
}

ProjectiveCameraPair canonical_camera_pair(const FundamentalMatrix& f) {
    Vec3 e2 = epipole(f, EpipoleSide::right);
    ProjectiveCameraPair pair;
    pair.p1 = Mat34::from(Mat3::identity(), {0, 0, 0});
    pair.p2 = Mat34::from(skew(e2) * f.m, e2);
    pair.metric = false;
    return pair;
}

namespace {

struct Normalization {
    Mat3 t;  // similarity sending the point set to centroid 0, RMS sqrt(2)
};

Normalization hartley_normalization(const std::vector<PointPair>& pairs,
                                    bool second) {
    double cx = 0.0, cy = 0.0;
    for (const auto& pr : pairs) {
        Point2 p = dehom(second ? pr.second : pr.first);
        cx += p.x;
        cy += p.y;
    }
    double n = double(pairs.size());
    cx /= n;
    cy /= n;

    double rms = 0.0;
    for (const auto& pr : pairs) {
        Point2 p = dehom(second ? pr.second : pr.first);
        rms += (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
    }
    rms = std::sqrt(rms / n);
    double s = rms > 1e-12 ? std::sqrt(2.0) / rms : 1.0;

    Normalization norm;
    norm.t = {{s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1}};
    return norm;
}

}  // namespace

FundamentalMatrix estimate_fundamental_8pt(const std::vector<PointPair>& pairs) {
    if (pairs.size() < 8)
        throw ArityError("need at least 8 point pairs, got " +
                         std::to_string(pairs.size()));

    Normalization n1 = hartley_normalization(pairs, false);
    Normalization n2 = hartley_normalization(pairs, true);

    int n = int(pairs.size());
    MatX a(n, 9);
    for (int i = 0; i < n; ++i) {
        Vec3 p1 = n1.t * pairs[i].first;
        Vec3 p2 = n2.t * pairs[i].second;
        Point2 u = dehom(p1);
        Point2 v = dehom(p2);
        a(i, 0) = v.x * u.x;
        a(i, 1) = v.x * u.y;
        a(i, 2) = v.x;
        a(i, 3) = v.y * u.x;
        a(i, 4) = v.y * u.y;
        a(i, 5) = v.y;
        a(i, 6) = u.x;
        a(i, 7) = u.y;
        a(i, 8) = 1.0;
    }

    SvdResult d = svd(a);
    // Rank < 8 means a one-parameter family of solutions (all points on a
    // line, duplicated points): no unique F.
    if (d.s[7] <= 1e-10 * std::max(d.s[0], 1e-300))
        throw DegeneracyError("degenerate correspondence configuration");

    Mat3 fn;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) fn(i, j) = d.v(3 * i + j, 8);

    // Denormalize: x2n^T Fn x1n = 0 with xin = Ti xi gives F = T2^T Fn T1.
    Mat3 f = transpose(n2.t) * fn * n1.t;
    return FundamentalMatrix::from_raw(f);
}

double sampson_distance(const FundamentalMatrix& f, const HomPoint2& x1,
                        const HomPoint2& x2) {
    Vec3 p1 = {x1[0] / x1[2], x1[1] / x1[2], 1.0};
    Vec3 p2 = {x2[0] / x2[2], x2[1] / x2[2], 1.0};
    Vec3 fx1 = f.m * p1;
    Vec3 ftx2 = transpose(f.m) * p2;
    double num = dot(p2, fx1);
    double den = fx1[0] * fx1[0] + fx1[1] * fx1[1] + ftx2[0] * ftx2[0] +
                 ftx2[1] * ftx2[1];
    if (den <= 0.0) return std::abs(num) > 0.0 ? 1e30 : 0.0;
    return std::abs(num) / std::sqrt(den);
}

namespace {

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

RansacResult ransac_fundamental(const std::vector<PointPair>& pairs,
                                int max_iters, double inlier_thresh,
                                uint64_t seed) {
    if (pairs.size() < 8)
        throw ArityError("need at least 8 point pairs, got " +
                         std::to_string(pairs.size()));
    if (inlier_thresh <= 0.0)
        throw RangeError("inlier threshold must be positive");

    const int n = int(pairs.size());
    std::mt19937_64 rng(seed);

    int best_count = 0;
    std::vector<bool> best_mask;
    int needed_iters = max_iters;
    int iter = 0;
    std::vector<int> sample(8);
    std::vector<bool> mask(pairs.size());

    for (; iter < max_iters && iter < needed_iters; ++iter) {
        // Draw 8 distinct indices.
        for (int k = 0; k < 8; ++k) {
            bool fresh;
            do {
                sample[k] = int(uniform01(rng) * n);
                if (sample[k] >= n) sample[k] = n - 1;
                fresh = true;
                for (int j = 0; j < k; ++j)
                    if (sample[j] == sample[k]) fresh = false;
            } while (!fresh);
        }

        std::vector<PointPair> minimal;
        minimal.reserve(8);
        for (int k = 0; k < 8; ++k) minimal.push_back(pairs[sample[k]]);

        FundamentalMatrix f;
        try {
            f = estimate_fundamental_8pt(minimal);
        } catch (const DegeneracyError&) {
            continue;  // collinear / duplicated sample
        }

        int count = 0;
        for (int i = 0; i < n; ++i) {
            bool in = sampson_distance(f, pairs[i].first, pairs[i].second) <=
                      inlier_thresh;
            mask[i] = in;
            if (in) ++count;
        }

        if (count > best_count) {
            best_count = count;
            best_mask = mask;
            // Standard adaptive stopping rule at 99.9% confidence.
            double w = double(count) / n;
            double p_all = std::pow(w, 8);
            if (p_all >= 1.0) {
                needed_iters = iter + 1;
            } else if (p_all > 0.0) {
                double need = std::log(1e-3) / std::log(1.0 - p_all);
                needed_iters = int(std::min(double(max_iters), std::ceil(need)));
            }
        }
    }

    if (best_count < 8)
        throw RobustFitError("no consensus set of 8 inliers after " +
                             std::to_string(iter) + " iterations");

    // Refit on the consensus set, then rescore so the returned mask matches
    // the returned model.
    std::vector<PointPair> consensus;
    consensus.reserve(best_count);
    for (int i = 0; i < n; ++i)
        if (best_mask[i]) consensus.push_back(pairs[i]);

    RansacResult res;
    res.f = estimate_fundamental_8pt(consensus);
    res.inliers.resize(size_t(n));
    res.n_inliers = 0;
    for (int i = 0; i < n; ++i) {
        bool in = sampson_distance(res.f, pairs[i].first, pairs[i].second) <=
                  inlier_thresh;
        res.inliers[i] = in;
        if (in) ++res.n_inliers;
    }
    res.iterations_run = iter;
    if (res.n_inliers < 8)
        throw RobustFitError("consensus collapsed below 8 inliers after refit");
    return res;
}

HomPoint2 epipole(const FundamentalMatrix& f, EpipoleSide side) {
    Mat3 m = side == EpipoleSide::left ? f.m : transpose(f.m);
    return null_vector3(m);
}

HomLine2 epipolar_line(const FundamentalMatrix& f, const HomPoint2& x,
                       LineDirection dir) {
    Vec3 l = dir == LineDirection::forward ? f.m * x : transpose(f.m) * x;
    if (norm(l) <= 1e-12 * frobenius_norm(f.m) * norm(x))
        throw DegeneracyError("point coincides with the epipole");
    return l;
}

RelativePose decompose_essential(const FundamentalMatrix& f,
                                 const CameraIntrinsics& k1,
                                 const CameraIntrinsics& k2,
                                 const PointPair& sample_pair,
                                 double max_residual_px) {
    if (sampson_distance(f, sample_pair.first, sample_pair.second) >
        max_residual_px)
        throw DecompositionError("sample pair violates the epipolar constraint");

    Mat3 e = transpose(k2.matrix()) * f.m * k1.matrix();
    Svd3Result d = svd3(e);

    Mat3 u = d.u;
    Mat3 v = d.v;
    if (det(u) < 0.0) u = -1.0 * u;
    if (det(v) < 0.0) v = -1.0 * v;

    const Mat3 w{{0, -1, 0, 1, 0, 0, 0, 0, 1}};
    Mat3 r1 = u * w * transpose(v);
    Mat3 r2 = u * transpose(w) * transpose(v);
    Vec3 t = u.col(2);

    // Normalized image coordinates for the cheirality test.
    Vec3 xn1 = inverse(k1.matrix()) * sample_pair.first;
    Vec3 xn2 = inverse(k2.matrix()) * sample_pair.second;
    Mat34 p1 = Mat34::from(Mat3::identity(), {0, 0, 0});

    const Mat3 rots[2] = {r1, r2};
    const double signs[2] = {1.0, -1.0};
    for (const Mat3& r : rots) {
        for (double s : signs) {
            Vec3 ts = s * t;
            Mat34 p2 = Mat34::from(r, ts);
            try {
                TriangulatedPoint tri = triangulate(p1, p2, xn1, xn2);
                if (tri.depth1 > 0.0 && tri.depth2 > 0.0)
                    return RelativePose{r, normalized(ts)};
            } catch (const TriangulationError&) {
                // parallel rays: candidate rejected
            }
        }
    }
    throw DecompositionError("no pose candidate passes the cheirality test");
}

namespace {

// Depth of a homogeneous point X in the camera of P (Hartley & Zisserman,
// result 6.1): sign(det M) * w / (T * ||m3||) with x = P X = (.., .., w).
double depth_in_camera(const Mat34& p, const std::array<double, 4>& x) {
    Vec3 proj = p * x;
    Mat3 m = p.left3();
    double m3 = norm(m.row(2));
    double dm = det(m);
    double s = dm >= 0.0 ? 1.0 : -1.0;
    return s * proj[2] / (x[3] * m3);
}

}  // namespace

TriangulatedPoint triangulate(const Mat34& p1, const Mat34& p2,
                              const HomPoint2& x1, const HomPoint2& x2) {
    Point2 a = dehom(x1);
    Point2 b = dehom(x2);

    MatX sys(4, 4);
    for (int c = 0; c < 4; ++c) {
        sys(0, c) = a.x * p1(2, c) - p1(0, c);
        sys(1, c) = a.y * p1(2, c) - p1(1, c);
        sys(2, c) = b.x * p2(2, c) - p2(0, c);
        sys(3, c) = b.y * p2(2, c) - p2(1, c);
    }

    SvdResult d = svd(sys);
    // A second vanishing singular value means the rays coincide (point on
    // the baseline): no unique solution.
    if (d.s[2] <= 1e-10 * std::max(d.s[0], 1e-300))
        throw TriangulationError("coincident rays, solution not unique");
    std::array<double, 4> xh;
    for (int i = 0; i < 4; ++i) xh[i] = d.v(i, 3);

    double scale = std::sqrt(xh[0] * xh[0] + xh[1] * xh[1] + xh[2] * xh[2]);
    if (std::abs(xh[3]) <= 1e-12 * std::max(scale, 1e-300))
        throw TriangulationError("triangulated point at infinity");

    TriangulatedPoint res;
    res.point = {xh[0] / xh[3], xh[1] / xh[3], xh[2] / xh[3]};
    res.depth1 = depth_in_camera(p1, xh);
    res.depth2 = depth_in_camera(p2, xh);
    return res;
}

CameraIntrinsics load_intrinsics(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw Error("cannot open intrinsics file: " + path);

    CameraIntrinsics k;
    bool have_fx = false, have_fy = false, have_cx = false, have_cy = false;
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ParseError("expected key=value", lineno);
            continue;
        }
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        double v;
        try {
            v = std::stod(val);
        } catch (const std::exception&) {
            throw ParseError("bad numeric value for " + key, lineno);
        }
        if (key == "fx") { k.fx = v; have_fx = true; }
        else if (key == "fy") { k.fy = v; have_fy = true; }
        else if (key == "cx") { k.cx = v; have_cx = true; }
        else if (key == "cy") { k.cy = v; have_cy = true; }
        else if (key == "skew") { k.skew = v; }
        else throw ParseError("unknown intrinsics key: " + key, lineno);
    }
    if (!(have_fx && have_fy && have_cx && have_cy))
        throw Error("intrinsics file must define fx, fy, cx, cy: " + path);
    if (k.fx <= 0.0 || k.fy <= 0.0)
        throw Error("focal lengths must be positive: " + path);
    return k;
}

std::string serialize_fundamental(const FundamentalMatrix& f) {
    char buf[512];
    int n = std::snprintf(buf, sizeof(buf),
                          "%.17g %.17g %.17g\n%.17g %.17g %.17g\n%.17g %.17g %.17g\n",
                          f.m.m[0], f.m.m[1], f.m.m[2], f.m.m[3], f.m.m[4],
                          f.m.m[5], f.m.m[6], f.m.m[7], f.m.m[8]);
    return std::string(buf, size_t(n));
}

FundamentalMatrix parse_fundamental(const std::string& text) {
    std::istringstream in(text);
    Mat3 m;
    for (int i = 0; i < 9; ++i) {
        if (!(in >> m.m[i]))
            throw ParseError("expected 9 numeric entries", 1);
    }
    return FundamentalMatrix::from_raw(m);
}

FundamentalMatrix load_fundamental(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw Error("cannot open fundamental-matrix file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_fundamental(ss.str());
}

}  // namespace sefm
