#include "sefm/dense.hpp"

#include <algorithm>
#include <cmath>

#include "sefm/errors.hpp"

namespace sefm {

std::string flag_names(uint8_t flags) {
    if (flags == 0) return "-";
    std::string s;
    auto add = [&](const char* name) {
        if (!s.empty()) s += ',';
        s += name;
    };
    if (flags & kFlagSvInvalid) add("sv_invalid");
    if (flags & kFlagSpInvalid) add("sp_invalid");
    if (flags & kFlagCostRejected) add("cost_rejected");
    return s;
}

SubProfile interpolate_profile(const SubProfile& p, int n) {
    const int m = p.size();
    if (m < 2)
        throw SizeError("cannot interpolate a slice with fewer than 2 samples");
    if (n == m) return p;

    SubProfile out;
    out.points.reserve(size_t(n));
    out.intensities.reserve(size_t(n));
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            out.points.push_back(p.points.front());
            out.intensities.push_back(p.intensities.front());
            continue;
        }
        if (k == n - 1) {
            out.points.push_back(p.points.back());
            out.intensities.push_back(p.intensities.back());
            continue;
        }
        double t = double(k) * double(m - 1) / double(n - 1);
        int i = std::min(int(t), m - 2);
        double f = t - i;
        out.points.push_back(p.points[size_t(i)] +
                             f * (p.points[size_t(i) + 1] - p.points[size_t(i)]));
        out.intensities.push_back((1.0 - f) * p.intensities[size_t(i)] +
                                  f * p.intensities[size_t(i) + 1]);
    }
    return out;
}

IntensityBounds bt_bounds(const SubProfile& p, int i) {
    double c = p.intensities[size_t(i)];
    double plus = i + 1 < p.size() ? (c + p.intensities[size_t(i) + 1]) / 2.0 : c;
    double minus = i > 0 ? (c + p.intensities[size_t(i) - 1]) / 2.0 : c;
    return {std::min({minus, c, plus}), std::max({minus, c, plus})};
}

double dissimilarity(IntensityBounds bounds, double intensity) {
    return std::max({0.0, intensity - bounds.hi, bounds.lo - intensity});
}

double dissimilarity_literal(IntensityBounds bounds, double intensity) {
    return std::max({0.0, intensity - bounds.lo, bounds.hi - intensity});
}

std::vector<DenseMatch> dense_match_segment(const SegmentPair& pair,
                                            double reject_thresh,
                                            bool paper_literal_cost) {
    const int n = std::max(pair.s1.size(), pair.s2.size());
    SubProfile stretched;
    const SubProfile* a = &pair.s1;
    const SubProfile* b = &pair.s2;
    if (pair.s1.size() < n) {
        stretched = interpolate_profile(pair.s1, n);
        a = &stretched;
    } else if (pair.s2.size() < n) {
        stretched = interpolate_profile(pair.s2, n);
        b = &stretched;
    }

    auto cost_fn = paper_literal_cost ? dissimilarity_literal : dissimilarity;

    std::vector<DenseMatch> out;
    out.reserve(size_t(n));
    for (int k = 0; k < n; ++k) {
        DenseMatch m;
        m.p1 = a->points[size_t(k)];
        m.p2 = b->points[size_t(k)];
        double c12 = cost_fn(bt_bounds(*a, k), b->intensities[size_t(k)]);
        double c21 = cost_fn(bt_bounds(*b, k), a->intensities[size_t(k)]);
        m.cost = std::min(c12, c21);
        if (m.cost > reject_thresh) m.flags |= kFlagCostRejected;
        if (!pair.valid) m.flags |= kFlagSvInvalid;
        out.push_back(m);
    }
    return out;
}

}  // namespace sefm
