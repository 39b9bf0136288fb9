#pragma once

#include <cstdint>
#include <vector>

#include "sefm/image.hpp"
#include "sefm/linalg.hpp"

namespace sefm {

// Interest point with a mean-free, unit-norm 11x11 patch descriptor.
struct Feature {
    Point2 position;
    double score = 0.0;
    std::vector<double> descriptor;
};

struct SeedMatch {
    Point2 p1;
    Point2 p2;
    double similarity = 1.0;
};

// Harris response map: det(M) - k * trace(M)^2 on the 3x3-box-smoothed
// Sobel structure tensor. Exposed for the detector tests.
GrayImage harris_response(const GrayImage& img, double k);

// Corner detection with non-maximum suppression inside a Chebyshev radius,
// keeping the strongest max_features. Images below 13x13 cannot host the
// 11x11 descriptor plus its gradient border and are rejected.
std::vector<Feature> detect_harris(const GrayImage& img, double k,
                                   double response_thresh, int nms_radius,
                                   int max_features);

// Mutual nearest neighbors under cosine similarity, kept when similarity
// reaches min_similarity. Sorted by descending similarity.
std::vector<SeedMatch> match_mutual_nn(const std::vector<Feature>& feats_a,
                                       const std::vector<Feature>& feats_b,
                                       double min_similarity);

// Text matches, one per line: x1 y1 x2 y2 [similarity]. '#' lines are
// comments. Throws ParseError with the offending line number.
std::vector<SeedMatch> load_external_matches(const std::vector<uint8_t>& bytes);

}  // namespace sefm
