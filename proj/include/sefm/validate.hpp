#pragma once

#include <string>
#include <vector>

#include "sefm/dense.hpp"
#include "sefm/epipolar.hpp"
#include "sefm/rough.hpp"

namespace sefm {

// Aggregate filter counts for one run. `survivors` counts matches carrying
// no flag at all.
struct ValidityReport {
    long total = 0;
    long sv_invalid = 0;
    long sp_invalid = 0;
    long cost_rejected = 0;
    long survivors = 0;

    void add(const DenseMatch& m) {
        ++total;
        if (m.flags & kFlagSvInvalid) ++sv_invalid;
        if (m.flags & kFlagSpInvalid) ++sp_invalid;
        if (m.flags & kFlagCostRejected) ++cost_rejected;
        if (m.flags == 0) ++survivors;
    }
    void merge(const ValidityReport& o) {
        total += o.total;
        sv_invalid += o.sv_invalid;
        sp_invalid += o.sp_invalid;
        cost_rejected += o.cost_rejected;
        survivors += o.survivors;
    }
    std::string to_kv() const;
};

// Sequence validity of the slice between consecutive aligned pairs: valid
// iff neither key-point sequence skips an element across the slice. Output
// has alignment.pairs.size() - 1 entries (empty for fewer than 2 pairs).
std::vector<bool> sequence_validity(const Alignment& alignment,
                                    const RoughMatchSet& rm1,
                                    const RoughMatchSet& rm2);

struct DepthRecord {
    Vec3 point;
    double depth = 0.0;
    bool ok = false;  // triangulation succeeded
};

// Depth continuity along one line: triangulates every match and flags each
// one whose camera-1 depth differs from its immediate predecessor's by more
// than jump_fraction of the predecessor depth. The first match of a line is
// never flagged; triangulation failures are. Returns the per-match depth
// records for point-cloud export.
std::vector<DepthRecord> depth_validity(std::vector<DenseMatch>& matches,
                                        const ProjectiveCameraPair& cameras,
                                        double jump_fraction);

}  // namespace sefm
