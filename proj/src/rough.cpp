#include "sefm/rough.hpp"

#include <algorithm>
#include <cmath>

#include "sefm/errors.hpp"

namespace sefm {

std::vector<double> intensity_derivative(const std::vector<double>& values) {
    if (values.size() < 3)
        throw SizeError("profile needs at least 3 samples for the derivative");
    std::vector<double> da(values.size(), 0.0);
    for (size_t i = 1; i + 1 < values.size(); ++i)
        da[i] = std::abs((values[i - 1] - values[i + 1]) / 2.0);
    return da;
}

void fft_radix2(std::vector<std::complex<double>>& data) {
    const size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw SizeError("FFT size must be a power of two");

    // Bit-reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * M_PI / double(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = data[i + k];
                std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<double> fourier_descriptor(const std::vector<double>& values,
                                       int center, int window, int n_harmonics) {
    if (window <= 0 || (window & (window - 1)) != 0)
        throw SizeError("descriptor window must be a power of two");
    if (n_harmonics > window / 2)
        throw SizeError("harmonics cannot exceed half the window");
    if (values.empty() || size_t(window) > 4 * values.size())
        throw SizeError("descriptor window too large for the profile");

    const int n = int(values.size());
    std::vector<std::complex<double>> buf(static_cast<size_t>(window));
    for (int k = 0; k < window; ++k) {
        int idx = std::clamp(center - window / 2 + k, 0, n - 1);
        buf[size_t(k)] = values[size_t(idx)];
    }
    fft_radix2(buf);

    std::vector<double> d;
    d.reserve(size_t(2 * n_harmonics + 1));
    d.push_back(buf[0].real() / window);  // a0 (mean)
    for (int h = 1; h <= n_harmonics; ++h) {
        d.push_back(2.0 * buf[size_t(h)].real() / window);   // ah
        d.push_back(-2.0 * buf[size_t(h)].imag() / window);  // bh
    }
    return d;
}

RoughMatchSet extract_keypoints(const SampledLine& line,
                                const std::vector<double>& da, double threshold,
                                int window, int n_harmonics) {
    if (threshold <= 0.0)
        throw RangeError("key-point threshold must be positive");

    RoughMatchSet rm;
    const int n = int(da.size());
    for (int i = 0; i < n; ++i) {
        double v = da[size_t(i)];
        if (v < threshold) continue;

        // Local maximum within radius 2; plateaus resolve to the smallest
        // index.
        bool is_max = true;
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            if (j == i) continue;
            double w = da[size_t(j)];
            if (w > v || (w == v && j < i)) {
                is_max = false;
                break;
            }
        }
        if (!is_max) continue;

        KeyPoint kp;
        kp.index = i;
        kp.position = line.points[size_t(i)];
        kp.magnitude = v;
        kp.descriptor =
            fourier_descriptor(line.intensities, i, window, n_harmonics);
        rm.keypoints.push_back(std::move(kp));
    }
    return rm;
}

double descriptor_distance(const std::vector<double>& d1,
                           const std::vector<double>& d2) {
    if (d1.size() != d2.size())
        throw ArityError("descriptor lengths differ");
    double s = 0.0;
    for (size_t i = 0; i < d1.size(); ++i) {
        double diff = d1[i] - d2[i];
        if (i == 0) diff *= 0.5;  // DC carries brightness, not shape
        s += diff * diff;
    }
    return std::sqrt(s);
}

Alignment align_keypoints_dp(const RoughMatchSet& rm1, const RoughMatchSet& rm2,
                             double gap_penalty, double sigma) {
    if (gap_penalty <= 0.0 || sigma <= 0.0)
        throw RangeError("gap penalty and sigma must be positive");

    const int n1 = rm1.size();
    const int n2 = rm2.size();

    auto match_score = [&](int i, int j) {
        double d = descriptor_distance(rm1.keypoints[size_t(i)].descriptor,
                                       rm2.keypoints[size_t(j)].descriptor);
        return std::exp(-d / sigma) - 0.5;
    };

    // Needleman-Wunsch table. Accumulation stays strictly in path order so
    // the optimum is bit-identical to a term-by-term enumeration of the
    // winning alignment.
    std::vector<double> score(size_t(n1 + 1) * size_t(n2 + 1), 0.0);
    std::vector<uint8_t> move(size_t(n1 + 1) * size_t(n2 + 1), 0);
    auto at = [&](int i, int j) -> double& {
        return score[size_t(i) * size_t(n2 + 1) + size_t(j)];
    };
    auto mv = [&](int i, int j) -> uint8_t& {
        return move[size_t(i) * size_t(n2 + 1) + size_t(j)];
    };
    enum : uint8_t { kNone = 0, kMatch = 1, kSkip2 = 2, kSkip1 = 3 };

    at(0, 0) = 0.0;
    for (int j = 1; j <= n2; ++j) {
        at(0, j) = at(0, j - 1) - gap_penalty;
        mv(0, j) = kSkip2;
    }
    for (int i = 1; i <= n1; ++i) {
        at(i, 0) = at(i - 1, 0) - gap_penalty;
        mv(i, 0) = kSkip1;
    }
    for (int i = 1; i <= n1; ++i) {
        for (int j = 1; j <= n2; ++j) {
            double diag = at(i - 1, j - 1) + match_score(i - 1, j - 1);
            double left = at(i, j - 1) - gap_penalty;  // rm2[j-1] unmatched
            double up = at(i - 1, j) - gap_penalty;    // rm1[i-1] unmatched
            // Preference for ties: match, then the gap in rm2.
            if (diag >= left && diag >= up) {
                at(i, j) = diag;
                mv(i, j) = kMatch;
            } else if (left >= up) {
                at(i, j) = left;
                mv(i, j) = kSkip2;
            } else {
                at(i, j) = up;
                mv(i, j) = kSkip1;
            }
        }
    }

    Alignment out;
    out.score = at(n1, n2);
    int i = n1, j = n2;
    while (i > 0 || j > 0) {
        switch (mv(i, j)) {
            case kMatch:
                out.pairs.push_back({i - 1, j - 1});
                --i;
                --j;
                break;
            case kSkip2:
                --j;
                break;
            default:
                --i;
                break;
        }
    }
    std::reverse(out.pairs.begin(), out.pairs.end());
    return out;
}

}  // namespace sefm
