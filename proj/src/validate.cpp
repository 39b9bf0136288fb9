#include "sefm/validate.hpp"

#include <cmath>
#include <cstdio>

#include "sefm/errors.hpp"

namespace sefm {

std::string ValidityReport::to_kv() const {
    char buf[256];
    int n = std::snprintf(buf, sizeof(buf),
                          "total=%ld\nsv_invalid=%ld\nsp_invalid=%ld\n"
                          "cost_rejected=%ld\nsurvivors=%ld\n",
                          total, sv_invalid, sp_invalid, cost_rejected,
                          survivors);
    return std::string(buf, size_t(n));
}

std::vector<bool> sequence_validity(const Alignment& alignment,
                                    const RoughMatchSet& rm1,
                                    const RoughMatchSet& rm2) {
    for (const auto& [i, j] : alignment.pairs) {
        if (i < 0 || i >= rm1.size() || j < 0 || j >= rm2.size())
            throw RangeError("alignment index outside key-point sets");
    }

    if (alignment.pairs.size() < 2) return {};
    std::vector<bool> valid(alignment.pairs.size() - 1);
    for (size_t k = 0; k + 1 < alignment.pairs.size(); ++k) {
        auto [i0, j0] = alignment.pairs[k];
        auto [i1, j1] = alignment.pairs[k + 1];
        // A skipped key point on either line marks occlusion across the
        // slice.
        valid[k] = (i1 == i0 + 1) && (j1 == j0 + 1);
    }
    return valid;
}

std::vector<DepthRecord> depth_validity(std::vector<DenseMatch>& matches,
                                        const ProjectiveCameraPair& cameras,
                                        double jump_fraction) {
    std::vector<DepthRecord> records(matches.size());

    bool have_prev = false;
    double prev_depth = 0.0;
    for (size_t k = 0; k < matches.size(); ++k) {
        DepthRecord& rec = records[k];
        try {
            TriangulatedPoint tri = triangulate(cameras.p1, cameras.p2,
                                                hom(matches[k].p1),
                                                hom(matches[k].p2));
            rec.point = tri.point;
            rec.depth = tri.depth1;
            rec.ok = true;
        } catch (const TriangulationError&) {
            matches[k].flags |= kFlagSpInvalid;
            have_prev = false;
            continue;
        }

        if (have_prev &&
            std::abs(rec.depth - prev_depth) >
                jump_fraction * std::max(std::abs(prev_depth), 1e-12)) {
            matches[k].flags |= kFlagSpInvalid;
        }
        prev_depth = rec.depth;
        have_prev = true;
    }
    return records;
}

}  // namespace sefm
