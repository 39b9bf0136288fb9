#include "sefm/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "sefm/errors.hpp"

namespace sefm {

std::string MetricsReport::to_kv() const {
    char buf[256];
    int n = std::snprintf(buf, sizeof(buf),
                          "n_matches=%ld\nn_positives=%.1f\nn_correct=%ld\n"
                          "precision=%.6f\nrecall=%.6f\n",
                          n_matches, n_positives, n_correct, precision, recall);
    return std::string(buf, size_t(n));
}

std::string MetricsReport::csv_header() {
    return "n_matches,n_positives,n_correct,precision,recall";
}

std::string MetricsReport::csv_row() const {
    char buf[256];
    int n = std::snprintf(buf, sizeof(buf), "%ld,%.1f,%ld,%.6f,%.6f", n_matches,
                          n_positives, n_correct, precision, recall);
    return std::string(buf, size_t(n));
}

long count_visible_lattice(const SyntheticScene& scene, bool from_first) {
    const GrayImage& img = from_first ? scene.img1 : scene.img2;
    long count = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : count)
#endif
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            Point2 p{double(x), double(y)};
            GtResult gt = from_first ? scene.ground_truth(p)
                                     : scene.ground_truth_reverse(p);
            if (gt.status == GtStatus::visible) ++count;
        }
    }
    return count;
}

MetricsReport precision_recall(const std::vector<DenseMatch>& survivors,
                               const SyntheticScene& scene, double tol) {
    if (tol <= 0.0)
        throw RangeError("ground-truth tolerance must be positive");

    MetricsReport rep;
    rep.n_matches = long(survivors.size());
    rep.n_positives = 0.5 * (double(count_visible_lattice(scene, true)) +
                             double(count_visible_lattice(scene, false)));

    long correct = 0;
    const long n = long(survivors.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : correct)
#endif
    for (long i = 0; i < n; ++i) {
        const DenseMatch& m = survivors[size_t(i)];
        GtResult gt = scene.ground_truth(m.p1);
        if (gt.status == GtStatus::visible && dist(m.p2, gt.point) <= tol)
            ++correct;
    }
    rep.n_correct = correct;
    rep.precision = rep.n_matches > 0 ? double(correct) / double(rep.n_matches) : 0.0;
    rep.recall = rep.n_positives > 0 ? double(correct) / rep.n_positives : 0.0;
    return rep;
}

}  // namespace sefm
