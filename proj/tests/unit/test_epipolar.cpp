#include <doctest.h>

#include <random>

#include "sefm/epipolar.hpp"
#include "sefm/errors.hpp"
#include "support/oracles.hpp"

using namespace sefm;

namespace {

double rotation_angle_between(const Mat3& a, const Mat3& b) {
    Mat3 rel = transpose(a) * b;
    double tr = rel(0, 0) + rel(1, 1) + rel(2, 2);
    return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

double fnorm_diff_up_to_sign(const Mat3& a, const Mat3& b) {
    double d1 = frobenius_norm(a - b);
    double d2 = frobenius_norm(a + b);
    return std::min(d1, d2);
}

}  // namespace

TEST_CASE("fundamental matrix invariants hold by construction") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Mat3 raw;
        for (double& e : raw.m) e = oracle::uniform(rng, -2.0, 2.0);
        FundamentalMatrix f = FundamentalMatrix::from_raw(raw);

        Svd3Result d = svd3(f.m);
        CHECK(d.s[2] < 1e-12 * d.s[0]);  // rank 2
        CHECK(frobenius_norm(f.m) == doctest::Approx(1.0).epsilon(1e-12));
        int arg = 0;
        for (int i = 1; i < 9; ++i)
            if (std::abs(f.m.m[i]) > std::abs(f.m.m[arg])) arg = i;
        CHECK(f.m.m[arg] > 0.0);
    }
}

TEST_CASE("eight-point estimate matches the true geometry on clean pairs") {
    for (uint64_t seed : {101u, 102u, 103u}) {
        oracle::ProjectionScene s = oracle::make_projection_scene(seed, 20);
        FundamentalMatrix f = estimate_fundamental_8pt(s.pairs);
        for (const PointPair& p : s.pairs)
            CHECK(sampson_distance(f, p.first, p.second) < 1e-9);
        CHECK(fnorm_diff_up_to_sign(f.m, s.f_true.m) < 1e-9);
    }
}

TEST_CASE("eight-point needs at least 8 pairs") {
    oracle::ProjectionScene s = oracle::make_projection_scene(104, 7);
    CHECK_THROWS_AS(estimate_fundamental_8pt(s.pairs), ArityError);
}

TEST_CASE("eight-point rejects collinear configurations") {
    std::vector<PointPair> pairs;
    for (int i = 0; i < 8; ++i)
        pairs.push_back({hom({double(10 + 7 * i), double(20 + 3 * i)}),
                         hom({double(30 + 5 * i), double(40 + 2 * i)})});
    CHECK_THROWS_AS(estimate_fundamental_8pt(pairs), DegeneracyError);
}

TEST_CASE("eight-point is invariant under a similarity applied to one image") {
    oracle::ProjectionScene s = oracle::make_projection_scene(105, 30);
    FundamentalMatrix f = estimate_fundamental_8pt(s.pairs);

    // x1' = T x1 with a rotation + scale + shift similarity
    double c = std::cos(0.4), sn = std::sin(0.4), sc = 3.7;
    Mat3 t{{sc * c, -sc * sn, 42.0, sc * sn, sc * c, -11.0, 0, 0, 1}};
    std::vector<PointPair> moved;
    for (const PointPair& p : s.pairs) moved.push_back({t * p.first, p.second});
    FundamentalMatrix f2 = estimate_fundamental_8pt(moved);

    // x2^T F' (T x1) = 0, so F' T must equal F after normalization.
    FundamentalMatrix recomposed = FundamentalMatrix::from_raw(f2.m * t);
    CHECK(fnorm_diff_up_to_sign(recomposed.m, f.m) < 1e-9);
}

TEST_CASE("ransac keeps exact inliers when there are no outliers") {
    oracle::ProjectionScene s = oracle::make_projection_scene(106, 40);
    RansacResult r = ransac_fundamental(s.pairs, 500, 1.0, 9);
    CHECK(r.n_inliers == 40);
    for (bool b : r.inliers) CHECK(b);
}

TEST_CASE("ransac recovers the inlier set under 50% contamination") {
    oracle::ProjectionScene s = oracle::make_projection_scene(107, 100);
    std::mt19937_64 rng(108);
    std::vector<PointPair> pairs = s.pairs;
    for (const PointPair& p : oracle::random_pairs(rng, 100, s.width, s.height))
        pairs.push_back(p);

    RansacResult r = ransac_fundamental(pairs, 2000, 1.0, 10);
    int true_kept = 0;
    for (int i = 0; i < 100; ++i)
        if (r.inliers[size_t(i)]) ++true_kept;
    CHECK(true_kept >= 99);
}

TEST_CASE("ransac fails cleanly on pure noise") {
    std::mt19937_64 rng(109);
    std::vector<PointPair> pairs = oracle::random_pairs(rng, 60, 640, 480);
    // With 8-point samples on 60 uniform pairs, consensus above the sample
    // itself is vanishingly rare; expect a robust-fit failure.
    CHECK_THROWS_AS(ransac_fundamental(pairs, 200, 0.001, 11), RobustFitError);
}

TEST_CASE("epipole of a pure x-translation is the point at infinity") {
    // F = [t]_x for t = (1, 0, 0)
    FundamentalMatrix f = FundamentalMatrix::from_raw(skew({1, 0, 0}));
    HomPoint2 e1 = epipole(f, EpipoleSide::left);
    CHECK(std::abs(e1[1]) < 1e-12);
    CHECK(std::abs(e1[2]) < 1e-12);
    CHECK(std::abs(e1[0]) == doctest::Approx(1.0));
}

TEST_CASE("left and right epipoles swap under transposition") {
    oracle::ProjectionScene s = oracle::make_projection_scene(110, 10);
    FundamentalMatrix ft{transpose(s.f_true.m)};
    HomPoint2 a = epipole(s.f_true, EpipoleSide::left);
    HomPoint2 b = epipole(ft, EpipoleSide::right);
    CHECK(norm(cross(a, b)) < 1e-9);  // equal up to scale
}

TEST_CASE("epipole projects the other camera center") {
    oracle::ProjectionScene s = oracle::make_projection_scene(111, 10);
    // camera-2 center in camera-1 coordinates: -R^T t
    Vec3 c2 = -1.0 * (transpose(s.pose.r) * s.pose.t);
    Point2 expected = dehom(s.k.matrix() * c2);
    HomPoint2 e1 = epipole(s.f_true, EpipoleSide::left);
    CHECK(norm(s.f_true.m * e1) < 1e-9);
    Point2 got = dehom(e1);
    CHECK(got.x == doctest::Approx(expected.x).epsilon(1e-6));
    CHECK(got.y == doctest::Approx(expected.y).epsilon(1e-6));
}

TEST_CASE("epipolar lines contain the other epipole") {
    oracle::ProjectionScene s = oracle::make_projection_scene(112, 10);
    HomPoint2 e2 = epipole(s.f_true, EpipoleSide::right);
    for (const PointPair& p : s.pairs) {
        HomLine2 l2 = epipolar_line(s.f_true, p.first, LineDirection::forward);
        CHECK(std::abs(dot(l2, e2)) < 1e-9);
        // and the correspondence itself lies on its line
        CHECK(std::abs(dot(l2, p.second)) / (norm(l2) * norm(p.second)) < 1e-9);
    }
}

TEST_CASE("points on one epipolar line map to the same line up to scale") {
    oracle::ProjectionScene s = oracle::make_projection_scene(113, 4);
    HomPoint2 e1 = epipole(s.f_true, EpipoleSide::left);
    Point2 e = dehom(e1);
    std::mt19937_64 rng(114);
    for (int trial = 0; trial < 50; ++trial) {
        double theta = oracle::uniform(rng, 0, 2 * M_PI);
        Point2 d{std::cos(theta), std::sin(theta)};
        HomPoint2 xa = hom(e + 50.0 * d);
        HomPoint2 xb = hom(e + 230.0 * d);
        HomLine2 la = epipolar_line(s.f_true, xa, LineDirection::forward);
        HomLine2 lb = epipolar_line(s.f_true, xb, LineDirection::forward);
        CHECK(norm(cross(normalized(la), normalized(lb))) < 1e-6);
    }
}

TEST_CASE("the epipole itself has no epipolar line") {
    oracle::ProjectionScene s = oracle::make_projection_scene(115, 4);
    HomPoint2 e1 = epipole(s.f_true, EpipoleSide::left);
    CHECK_THROWS_AS(epipolar_line(s.f_true, e1, LineDirection::forward),
                    DegeneracyError);
}

TEST_CASE("essential decomposition recovers the true pose") {
    for (uint64_t seed : {116u, 117u, 118u}) {
        oracle::ProjectionScene s = oracle::make_projection_scene(seed, 10);
        RelativePose pose =
            decompose_essential(s.f_true, s.k, s.k, s.pairs.front());
        CHECK(rotation_angle_between(pose.r, s.pose.r) < 1e-6);
        CHECK(norm(pose.t - s.pose.t) < 1e-6);

        // recomposing [t]x R reproduces E up to scale
        Mat3 e_true = skew(s.pose.t) * s.pose.r;
        Mat3 e_got = skew(pose.t) * pose.r;
        double scale = frobenius_norm(e_true) / frobenius_norm(e_got);
        CHECK(fnorm_diff_up_to_sign(scale * e_got, e_true) < 1e-6);
    }
}

TEST_CASE("pure translation decomposes to the identity rotation") {
    CameraIntrinsics k;
    k.fx = k.fy = 500;
    k.cx = 320;
    k.cy = 240;
    RelativePose truth;
    truth.r = Mat3::identity();
    truth.t = normalized(Vec3{-1, 0, 0});
    Mat3 kinv = inverse(k.matrix());
    FundamentalMatrix f = FundamentalMatrix::from_raw(
        transpose(kinv) * (skew(truth.t) * truth.r) * kinv);

    Vec3 p{0.5, -0.2, 5.0};
    ProjectiveCameraPair cams = metric_camera_pair(k, k, truth);
    PointPair pair{project_point(cams.p1, p), project_point(cams.p2, p)};

    RelativePose pose = decompose_essential(f, k, k, pair);
    CHECK(rotation_angle_between(pose.r, Mat3::identity()) < 1e-6);
    CHECK(norm(pose.t - truth.t) < 1e-6);
}

TEST_CASE("a mismatched sample pair fails decomposition") {
    oracle::ProjectionScene s = oracle::make_projection_scene(119, 10);
    PointPair bad = s.pairs.front();
    // push the second point 40 px off its epipolar line, along the normal
    HomLine2 l2 = epipolar_line(s.f_true, bad.first, LineDirection::forward);
    Point2 n{l2[0], l2[1]};
    n = (1.0 / norm(n)) * n;
    bad.second[0] += 40.0 * n.x;
    bad.second[1] += 40.0 * n.y;
    REQUIRE(sampson_distance(s.f_true, bad.first, bad.second) > 10.0);
    CHECK_THROWS_AS(decompose_essential(s.f_true, s.k, s.k, bad),
                    DecompositionError);
}

TEST_CASE("triangulation reprojects exactly on clean data") {
    oracle::ProjectionScene s = oracle::make_projection_scene(120, 25);
    for (size_t i = 0; i < s.pairs.size(); ++i) {
        TriangulatedPoint tp = triangulate(s.cams.p1, s.cams.p2,
                                           s.pairs[i].first, s.pairs[i].second);
        Point2 r1 = dehom(project_point(s.cams.p1, tp.point));
        Point2 r2 = dehom(project_point(s.cams.p2, tp.point));
        CHECK(dist(r1, dehom(s.pairs[i].first)) < 1e-6);
        CHECK(dist(r2, dehom(s.pairs[i].second)) < 1e-6);
        CHECK(tp.depth1 == doctest::Approx(s.points[i][2]).epsilon(1e-9));
        CHECK(tp.depth1 > 0.0);
        CHECK(tp.depth2 > 0.0);
    }
}

TEST_CASE("triangulating a known-depth point recovers that depth") {
    oracle::ProjectionScene s = oracle::make_projection_scene(121, 1);
    Vec3 p{0.4, 0.1, 5.0};
    HomPoint2 x1 = project_point(s.cams.p1, p);
    HomPoint2 x2 = project_point(s.cams.p2, p);
    TriangulatedPoint tp = triangulate(s.cams.p1, s.cams.p2, x1, x2);
    CHECK(tp.depth1 == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("a point on the baseline cannot be triangulated") {
    oracle::ProjectionScene s = oracle::make_projection_scene(122, 1);
    // Both epipoles image the baseline; their rays are parallel (identical).
    HomPoint2 e1 = epipole(s.f_true, EpipoleSide::left);
    HomPoint2 e2 = epipole(s.f_true, EpipoleSide::right);
    CHECK_THROWS_AS(triangulate(s.cams.p1, s.cams.p2, e1, e2),
                    TriangulationError);
}

TEST_CASE("ransac is reproducible for a fixed seed") {
    oracle::ProjectionScene s = oracle::make_projection_scene(123, 60);
    std::mt19937_64 rng(124);
    std::vector<PointPair> pairs = s.pairs;
    for (const PointPair& p : oracle::random_pairs(rng, 30, s.width, s.height))
        pairs.push_back(p);
    RansacResult a = ransac_fundamental(pairs, 800, 1.0, 42);
    RansacResult b = ransac_fundamental(pairs, 800, 1.0, 42);
    CHECK(a.inliers == b.inliers);
    for (int i = 0; i < 9; ++i) CHECK(a.f.m.m[i] == b.f.m.m[i]);
}

TEST_CASE("fundamental serialization round-trips at full precision") {
    oracle::ProjectionScene s = oracle::make_projection_scene(125, 10);
    FundamentalMatrix f = parse_fundamental(serialize_fundamental(s.f_true));
    for (int i = 0; i < 9; ++i)
        CHECK(f.m.m[i] == doctest::Approx(s.f_true.m.m[i]).epsilon(1e-15));
}
