#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "sefm/linalg.hpp"
#include "sefm/sweep.hpp"

namespace sefm {

// Intensity-edge key point on a sampled epipolar line.
struct KeyPoint {
    int index = 0;       // position in the profile
    Point2 position;     // image coordinates of that sample
    double magnitude = 0.0;
    std::vector<double> descriptor;  // (a0, a1, b1, ..., ah, bh)
};

// Ordered key points of one line (strictly increasing indices).
struct RoughMatchSet {
    std::vector<KeyPoint> keypoints;

    int size() const { return int(keypoints.size()); }
    bool empty() const { return keypoints.empty(); }
};

// Order-preserving alignment between two key-point sequences.
struct Alignment {
    std::vector<std::pair<int, int>> pairs;  // indices into the two sets
    double score = 0.0;
};

// Central-difference edge strength: |(a[i-1] - a[i+1]) / 2| with the two
// boundary entries set to 0. Needs at least 3 samples.
std::vector<double> intensity_derivative(const std::vector<double>& values);

// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

// Real Fourier-series coefficients of the window of `window` samples
// centered at `center` (index clamping replicates the profile ends):
// (a0, a1, b1, ..., ah, bh), so a constant window c gives a0 = c and a pure
// cosine of amplitude A at harmonic k gives ak = A.
std::vector<double> fourier_descriptor(const std::vector<double>& values,
                                       int center, int window, int n_harmonics);

// Key points where the derivative reaches `threshold` and is a local
// maximum within radius 2 (ties keep the smaller index). Each key point
// carries its Fourier descriptor.
RoughMatchSet extract_keypoints(const SampledLine& line,
                                const std::vector<double>& da, double threshold,
                                int window, int n_harmonics);

// Euclidean distance with the DC coefficient down-weighted by 0.5.
double descriptor_distance(const std::vector<double>& d1,
                           const std::vector<double>& d2);

// Global order-preserving alignment maximizing
//   sum over matches of (exp(-distance/sigma) - 0.5)  -  gaps * gap_penalty.
// Deterministic tie-break: match preferred over gap, then the gap in the
// second sequence.
Alignment align_keypoints_dp(const RoughMatchSet& rm1, const RoughMatchSet& rm2,
                             double gap_penalty, double sigma);

}  // namespace sefm
