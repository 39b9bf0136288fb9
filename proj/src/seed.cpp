#include "sefm/seed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sefm/errors.hpp"

namespace sefm {

namespace {

constexpr int kPatchRadius = 5;   // 11x11 descriptor
constexpr int kBorder = kPatchRadius + 1;  // +1 for the gradient stencil

// Normalized Sobel derivative (units: intensity per pixel).
void sobel_gradients(const GrayImage& img, GrayImage& gx, GrayImage& gy) {
    gx = GrayImage(img.width, img.height, 0.0);
    gy = GrayImage(img.width, img.height, 0.0);
    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            double p00 = img.at(x - 1, y - 1), p10 = img.at(x, y - 1), p20 = img.at(x + 1, y - 1);
            double p01 = img.at(x - 1, y),                             p21 = img.at(x + 1, y);
            double p02 = img.at(x - 1, y + 1), p12 = img.at(x, y + 1), p22 = img.at(x + 1, y + 1);
            gx.at(x, y) = ((p20 + 2.0 * p21 + p22) - (p00 + 2.0 * p01 + p02)) / 8.0;
            gy.at(x, y) = ((p02 + 2.0 * p12 + p22) - (p00 + 2.0 * p10 + p20)) / 8.0;
        }
    }
}

}  // namespace

GrayImage harris_response(const GrayImage& img, double k) {
    GrayImage gx, gy;
    sobel_gradients(img, gx, gy);

    GrayImage resp(img.width, img.height, 0.0);
    for (int y = 2; y < img.height - 2; ++y) {
        for (int x = 2; x < img.width - 2; ++x) {
            double sxx = 0.0, sxy = 0.0, syy = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    double a = gx.at(x + dx, y + dy);
                    double b = gy.at(x + dx, y + dy);
                    sxx += a * a;
                    sxy += a * b;
                    syy += b * b;
                }
            }
            sxx /= 9.0;
            sxy /= 9.0;
            syy /= 9.0;
            double detm = sxx * syy - sxy * sxy;
            double tr = sxx + syy;
            resp.at(x, y) = detm - k * tr * tr;
        }
    }
    return resp;
}

std::vector<Feature> detect_harris(const GrayImage& img, double k,
                                   double response_thresh, int nms_radius,
                                   int max_features) {
    if (img.width < 13 || img.height < 13)
        throw SizeError("image must be at least 13x13 for feature detection");
    if (nms_radius < 1)
        throw RangeError("nms radius must be >= 1");

    GrayImage resp = harris_response(img, k);

    std::vector<Feature> cands;
    for (int y = kBorder; y < img.height - kBorder; ++y) {
        for (int x = kBorder; x < img.width - kBorder; ++x) {
            double r = resp.at(x, y);
            if (r < response_thresh || r <= 0.0) continue;

            // Non-maximum suppression; equal responses resolve to the
            // lexicographically smaller (y, x).
            bool is_max = true;
            for (int dy = -nms_radius; dy <= nms_radius && is_max; ++dy) {
                int yy = y + dy;
                if (yy < 0 || yy >= img.height) continue;
                for (int dx = -nms_radius; dx <= nms_radius; ++dx) {
                    int xx = x + dx;
                    if (xx < 0 || xx >= img.width || (dx == 0 && dy == 0)) continue;
                    double rn = resp.at(xx, yy);
                    if (rn > r || (rn == r && (yy < y || (yy == y && xx < x)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max) continue;

            Feature f;
            f.position = {double(x), double(y)};
            f.score = r;
            cands.push_back(std::move(f));
        }
    }

    std::stable_sort(cands.begin(), cands.end(),
                     [](const Feature& a, const Feature& b) { return a.score > b.score; });
    if (int(cands.size()) > max_features) cands.resize(size_t(max_features));

    // Mean-free, unit-norm patch descriptors.
    for (auto it = cands.begin(); it != cands.end();) {
        int cx = int(it->position.x), cy = int(it->position.y);
        std::vector<double> d;
        d.reserve(11 * 11);
        double mean = 0.0;
        for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy)
            for (int dx = -kPatchRadius; dx <= kPatchRadius; ++dx) {
                double v = img.at(cx + dx, cy + dy);
                d.push_back(v);
                mean += v;
            }
        mean /= double(d.size());
        double n2 = 0.0;
        for (double& v : d) {
            v -= mean;
            n2 += v * v;
        }
        if (n2 <= 0.0) {
            it = cands.erase(it);  // flat patch, nothing to describe
            continue;
        }
        double inv = 1.0 / std::sqrt(n2);
        for (double& v : d) v *= inv;
        it->descriptor = std::move(d);
        ++it;
    }
    return cands;
}

std::vector<SeedMatch> match_mutual_nn(const std::vector<Feature>& feats_a,
                                       const std::vector<Feature>& feats_b,
                                       double min_similarity) {
    const int na = int(feats_a.size());
    const int nb = int(feats_b.size());
    if (na == 0 || nb == 0) return {};

    auto cosine = [](const Feature& a, const Feature& b) {
        double s = 0.0;
        size_t n = std::min(a.descriptor.size(), b.descriptor.size());
        for (size_t i = 0; i < n; ++i) s += a.descriptor[i] * b.descriptor[i];
        return s;
    };

    std::vector<int> best_b(size_t(na), -1);
    std::vector<double> best_b_sim(size_t(na), -2.0);
    std::vector<int> best_a(size_t(nb), -1);
    std::vector<double> best_a_sim(size_t(nb), -2.0);

    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            double s = cosine(feats_a[i], feats_b[j]);
            if (s > best_b_sim[i]) {
                best_b_sim[i] = s;
                best_b[i] = j;
            }
            if (s > best_a_sim[j]) {
                best_a_sim[j] = s;
                best_a[j] = i;
            }
        }
    }

    std::vector<SeedMatch> out;
    for (int i = 0; i < na; ++i) {
        int j = best_b[i];
        if (j >= 0 && best_a[j] == i && best_b_sim[i] >= min_similarity)
            out.push_back({feats_a[i].position, feats_b[size_t(j)].position,
                           best_b_sim[i]});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SeedMatch& a, const SeedMatch& b) {
                         return a.similarity > b.similarity;
                     });
    return out;
}

std::vector<SeedMatch> load_external_matches(const std::vector<uint8_t>& bytes) {
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    std::vector<SeedMatch> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        double x1, y1, x2, y2;
        if (!(ls >> x1)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;  // blank line
            throw ParseError("expected numeric match fields", lineno);
        }
        if (!(ls >> y1 >> x2 >> y2))
            throw ParseError("expected 4 numeric fields: x1 y1 x2 y2", lineno);
        double sim = 1.0;
        if (!(ls >> sim)) {
            ls.clear();
            std::string rest;
            if (ls >> rest)
                throw ParseError("trailing non-numeric content", lineno);
            sim = 1.0;
        } else {
            std::string rest;
            if (ls >> rest)
                throw ParseError("trailing non-numeric content", lineno);
        }
        out.push_back({{x1, y1}, {x2, y2}, sim});
    }
    return out;
}

}  // namespace sefm
