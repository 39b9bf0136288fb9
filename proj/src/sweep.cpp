#include "sefm/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "sefm/errors.hpp"

namespace sefm {

namespace {

constexpr double kEpipoleExclusionPx = 3.0;

// Slab clipping of p0 + t*dir against rect. Returns the [t_lo, t_hi]
// parameter window intersected with [t_min, t_max].
bool clip_param(Point2 p0, Point2 dir, const RectD& rect, double t_min,
                double t_max, double& t_lo, double& t_hi) {
    t_lo = t_min;
    t_hi = t_max;
    const double p[4] = {-dir.x, dir.x, -dir.y, dir.y};
    const double q[4] = {p0.x - rect.x0, rect.x1 - p0.x, p0.y - rect.y0,
                         rect.y1 - p0.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;  // parallel and outside the slab
        } else {
            double t = q[i] / p[i];
            if (p[i] < 0.0)
                t_lo = std::max(t_lo, t);
            else
                t_hi = std::min(t_hi, t);
        }
    }
    return t_lo < t_hi;
}

}  // namespace

bool epipole_at_infinity(const HomPoint2& e) {
    return std::abs(e[2]) * 1e9 <= std::hypot(e[0], e[1]);
}

Pencil build_pencil(const HomPoint2& e, const RectD& rect) {
    Pencil pencil;
    const Point2 corners[4] = {{rect.x0, rect.y0},
                               {rect.x1, rect.y0},
                               {rect.x1, rect.y1},
                               {rect.x0, rect.y1}};

    if (epipole_at_infinity(e)) {
        pencil.at_infinity = true;
        double n = std::hypot(e[0], e[1]);
        if (n == 0.0)
            throw DegeneracyError("zero epipole");
        pencil.direction = {e[0] / n, e[1] / n};

        // Offsets along the line normal, corner to corner at 1 px spacing.
        Point2 normal{-pencil.direction.y, pencil.direction.x};
        double omin = 1e300, omax = -1e300;
        for (const Point2& c : corners) {
            double o = dot(c, normal);
            omin = std::min(omin, o);
            omax = std::max(omax, o);
        }
        int count = int(std::floor(omax - omin + 1e-9)) + 1;
        pencil.params.reserve(size_t(count));
        for (int k = 0; k < count; ++k) pencil.params.push_back(omin + k);
        return pencil;
    }

    pencil.at_infinity = false;
    pencil.center = dehom(e);
    double r_max = 0.0;
    for (const Point2& c : corners) r_max = std::max(r_max, dist(pencil.center, c));
    if (r_max == 0.0) r_max = 1.0;
    double dtheta = 1.0 / r_max;

    bool inside = pencil.center.x >= rect.x0 && pencil.center.x <= rect.x1 &&
                  pencil.center.y >= rect.y0 && pencil.center.y <= rect.y1;
    if (inside) {
        int count = int(std::ceil(2.0 * M_PI * r_max));
        pencil.params.reserve(size_t(count));
        for (int k = 0; k < count; ++k) pencil.params.push_back(k * dtheta);
        return pencil;
    }

    // From an outside point the directions hitting a convex rectangle form
    // one angular interval whose extremes point at corners.
    double base = std::atan2(corners[0].y - pencil.center.y,
                             corners[0].x - pencil.center.x);
    double dmin = 0.0, dmax = 0.0;
    for (int i = 1; i < 4; ++i) {
        double a = std::atan2(corners[i].y - pencil.center.y,
                              corners[i].x - pencil.center.x);
        double delta = std::remainder(a - base, 2.0 * M_PI);
        dmin = std::min(dmin, delta);
        dmax = std::max(dmax, delta);
    }
    double theta0 = base + dmin;
    double span = dmax - dmin;
    int count = int(std::floor(span / dtheta + 1e-9)) + 1;
    pencil.params.reserve(size_t(count));
    for (int k = 0; k < count; ++k) pencil.params.push_back(theta0 + k * dtheta);
    return pencil;
}

std::vector<double> pencil_angles(const HomPoint2& e, const RectD& rect) {
    return build_pencil(e, rect).params;
}

std::optional<Segment> clip_line_to_rect(const HomLine2& l, const RectD& rect) {
    double n = std::hypot(l[0], l[1]);
    if (n == 0.0) return std::nullopt;  // line at infinity

    // Unit direction along the line and its closest point to the origin.
    Point2 dir{l[1] / n, -l[0] / n};
    Point2 p0{-l[0] * l[2] / (n * n), -l[1] * l[2] / (n * n)};

    double t_lo, t_hi;
    if (!clip_param(p0, dir, rect, -1e18, 1e18, t_lo, t_hi)) return std::nullopt;
    if (t_hi - t_lo <= 1e-9) return std::nullopt;  // corner touch
    return Segment{p0 + t_lo * dir, p0 + t_hi * dir};
}

std::optional<Segment> clip_ray_to_rect(Point2 origin, Point2 dir,
                                        const RectD& rect, double t_min) {
    double t_lo, t_hi;
    if (!clip_param(origin, dir, rect, t_min, 1e18, t_lo, t_hi))
        return std::nullopt;
    if (t_hi - t_lo <= 1e-9) return std::nullopt;
    return Segment{origin + t_lo * dir, origin + t_hi * dir};
}

Segment orient_segment(const Segment& seg, const HomPoint2& e) {
    if (epipole_at_infinity(e)) {
        Point2 d = seg.exit - seg.entry;
        double len = norm(d);
        bool flip;
        if (std::abs(d.x) > 1e-12 * len)
            flip = d.x < 0.0;
        else
            flip = d.y < 0.0;
        return flip ? Segment{seg.exit, seg.entry} : seg;
    }
    Point2 c = dehom(e);
    if (dist(seg.entry, c) > dist(seg.exit, c)) return {seg.exit, seg.entry};
    return seg;
}

std::optional<LinePair> corresponding_pair(const FundamentalMatrix& f,
                                           const Pencil& pencil, int k,
                                           const RectD& rect1,
                                           const RectD& rect2) {
    double param = pencil.params[size_t(k)];

    HomLine2 l1;
    std::optional<Segment> seg1;
    if (pencil.at_infinity) {
        Point2 d = pencil.direction;
        Point2 normal{-d.y, d.x};
        Point2 p0 = param * normal;
        l1 = cross(hom(p0), hom(p0 + d));
        seg1 = clip_line_to_rect(l1, rect1);
        if (seg1) *seg1 = orient_segment(*seg1, {d.x, d.y, 0.0});
    } else {
        Point2 d{std::cos(param), std::sin(param)};
        l1 = cross(hom(pencil.center), hom(pencil.center + d));
        // Rays start outside the exclusion disc around the epipole, so the
        // singular point is never sampled.
        seg1 = clip_ray_to_rect(pencil.center, d, rect1, kEpipoleExclusionPx);
    }
    if (!seg1) return std::nullopt;

    // Every point of l1 maps to the same l2 (F annihilates the epipole), so
    // the chord midpoint is as good as any.
    Point2 mid = 0.5 * (seg1->entry + seg1->exit);
    HomLine2 l2 = epipolar_line(f, hom(mid), LineDirection::forward);

    std::optional<Segment> seg2 = clip_line_to_rect(l2, rect2);
    if (!seg2) return std::nullopt;

    HomPoint2 e2 = epipole(f, EpipoleSide::right);
    LinePair pair;
    pair.index = k;
    pair.l1 = l1;
    pair.l2 = l2;
    pair.seg1 = *seg1;
    pair.seg2 = orient_segment(*seg2, e2);
    return pair;
}

SampledLine sample_line(const GrayImage& img, const Segment& seg, double spacing) {
    if (spacing <= 0.0)
        throw RangeError("sampling spacing must be positive");

    double len = seg.length();
    Point2 dir = seg.direction();
    int count = int(std::floor(len / spacing + 1e-9)) + 1;

    SampledLine out;
    out.points.reserve(size_t(count));
    out.intensities.reserve(size_t(count));
    for (int k = 0; k < count; ++k) {
        Point2 p = seg.entry + (k * spacing) * dir;
        // Guard against float drift past the clipped boundary.
        p.x = std::clamp(p.x, 0.0, double(img.width - 1));
        p.y = std::clamp(p.y, 0.0, double(img.height - 1));
        out.points.push_back(p);
        out.intensities.push_back(sample_bilinear(img, p));
    }
    return out;
}

}  // namespace sefm
