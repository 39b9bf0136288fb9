#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sefm/linalg.hpp"

namespace sefm {

// Match flags; a survivor carries none of them.
enum MatchFlag : uint8_t {
    kFlagSvInvalid = 1,     // segment failed sequence validity
    kFlagSpInvalid = 2,     // depth-continuity violation
    kFlagCostRejected = 4,  // dissimilarity above the rejection threshold
};

struct DenseMatch {
    Point2 p1;
    Point2 p2;
    double cost = 0.0;
    uint8_t flags = 0;
};

std::string flag_names(uint8_t flags);

// Contiguous slice of a sampled line between two aligned key points,
// inclusive of both endpoints.
struct SubProfile {
    std::vector<Point2> points;
    std::vector<double> intensities;

    int size() const { return int(intensities.size()); }
};

// Pair of slices bounded by consecutive aligned key-point pairs.
struct SegmentPair {
    SubProfile s1;
    SubProfile s2;
    bool valid = true;  // sequence validity of the slice
};

// Linear resampling of coordinates and intensities to n samples at
// positions k*(m-1)/(n-1); the endpoints are preserved exactly.
SubProfile interpolate_profile(const SubProfile& p, int n);

struct IntensityBounds {
    double lo;
    double hi;
};

// Half-sample interpolation interval around sample i: the min/max of the
// sample and its two half-sample neighbor means. A missing neighbor at a
// slice end contributes the sample itself.
IntensityBounds bt_bounds(const SubProfile& p, int i);

// Sampling-insensitive dissimilarity: zero whenever the intensity lies
// inside the bounds, otherwise the distance to the nearer bound.
double dissimilarity(IntensityBounds bounds, double intensity);

// The cost expression with min and max bounds exchanged, selectable for
// comparison runs (config key cost.paper_literal).
double dissimilarity_literal(IntensityBounds bounds, double intensity);

// Equalizes the two slice lengths by interpolating the shorter one, then
// pairs samples index by index. The cost is the smaller of the two
// directed dissimilarities. Matches above reject_thresh get
// kFlagCostRejected; an invalid pair stamps kFlagSvInvalid on all output.
std::vector<DenseMatch> dense_match_segment(const SegmentPair& pair,
                                            double reject_thresh,
                                            bool paper_literal_cost = false);

}  // namespace sefm
