#pragma once

#include <optional>
#include <vector>

#include "sefm/epipolar.hpp"
#include "sefm/image.hpp"
#include "sefm/linalg.hpp"

namespace sefm {

// Sampling domain of a w x h image: [0, w-1] x [0, h-1].
struct RectD {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    static RectD of_image(int w, int h) { return {0.0, 0.0, double(w - 1), double(h - 1)}; }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

struct Segment {
    Point2 entry;
    Point2 exit;

    double length() const { return dist(entry, exit); }
    Point2 direction() const {
        double l = length();
        return l > 0.0 ? (1.0 / l) * (exit - entry) : Point2{0.0, 0.0};
    }
};

// Matched pair of epipolar lines with their in-image chords, both oriented
// away from the epipoles.
struct LinePair {
    int index = 0;
    HomLine2 l1;
    HomLine2 l2;
    Segment seg1;
    Segment seg2;
};

struct SampledLine {
    std::vector<Point2> points;       // uniform spacing along the segment
    std::vector<double> intensities;  // bilinear samples, same length
};

// Discretized pencil of epipolar rays around an epipole. For a finite
// epipole, params are ray angles with step 1/R_max (at most 1 px of sweep
// displacement at the farthest rectangle corner). For an epipole at
// infinity, params are signed perpendicular offsets of parallel lines at
// 1 px spacing.
struct Pencil {
    bool at_infinity = false;
    Point2 center;     // finite epipole position
    Point2 direction;  // unit line direction (infinite case)
    std::vector<double> params;

    int size() const { return int(params.size()); }
};

bool epipole_at_infinity(const HomPoint2& e);
Pencil build_pencil(const HomPoint2& e, const RectD& rect);

// Parameter list of the pencil (angles, or offsets for a pencil at
// infinity).
std::vector<double> pencil_angles(const HomPoint2& e, const RectD& rect);

// Chord of an infinite line inside rect, or nothing when the line misses
// the rectangle (zero-length corner touches count as misses).
std::optional<Segment> clip_line_to_rect(const HomLine2& l, const RectD& rect);

// Ray clip starting at parameter t_min along dir from origin.
std::optional<Segment> clip_ray_to_rect(Point2 origin, Point2 dir,
                                        const RectD& rect, double t_min);

// Builds the corresponding line pair for pencil parameter k: l1 through the
// image-1 epipole, l2 = F * x for any x on l1. Nothing when either chord is
// empty. Both segments come out oriented away from their epipoles.
std::optional<LinePair> corresponding_pair(const FundamentalMatrix& f,
                                           const Pencil& pencil, int k,
                                           const RectD& rect1,
                                           const RectD& rect2);

// Orients a chord away from a finite epipole (entry = nearer endpoint), or
// by the global convention for an epipole at infinity: increasing x, ties
// by increasing y.
Segment orient_segment(const Segment& seg, const HomPoint2& e);

SampledLine sample_line(const GrayImage& img, const Segment& seg, double spacing);

}  // namespace sefm
