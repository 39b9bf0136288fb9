#pragma once

#include <string>
#include <vector>

#include "sefm/dense.hpp"
#include "sefm/synth.hpp"

namespace sefm {

struct MetricsReport {
    long n_matches = 0;
    double n_positives = 0.0;  // average of the two views' visible counts
    long n_correct = 0;
    double precision = 0.0;
    double recall = 0.0;

    std::string to_kv() const;
    static std::string csv_header();
    std::string csv_row() const;
};

// Visible ground-truth count on the integer pixel lattice of one view.
long count_visible_lattice(const SyntheticScene& scene, bool from_first);

// Scores surviving matches against the exact scene map: a match is correct
// when its image-1 point is visible in image 2 and the predicted point
// lands within tol pixels of the true one.
MetricsReport precision_recall(const std::vector<DenseMatch>& survivors,
                               const SyntheticScene& scene, double tol);

}  // namespace sefm
