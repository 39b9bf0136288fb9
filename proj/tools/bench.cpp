// Compares the serial reference sweep against the OpenMP sweep on a
// synthetic scene and verifies that both produce identical matches.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sefm/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

long count_matches(const std::vector<sefm::LineMatches>& lines) {
    long n = 0;
    for (const auto& lm : lines) n += long(lm.matches.size());
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    int width = argc > 1 ? std::atoi(argv[1]) : 800;
    int height = argc > 2 ? std::atoi(argv[2]) : 600;
    uint64_t seed = argc > 3 ? uint64_t(std::atoll(argv[3])) : 7;

    sefm::PipelineConfig cfg;
    cfg.scene_width = width;
    cfg.scene_height = height;
    cfg.seed = seed;

    std::printf("scene: plane %dx%d (seed %llu)\n", width, height,
                (unsigned long long)seed);
    sefm::SyntheticScene scene = sefm::make_plane_scene(width, height, seed);
    sefm::SweepContext ctx = sefm::make_sweep_context(
        scene.img1, scene.img2, scene.f_true, nullptr, cfg);
    std::printf("pencil: %d line pairs\n", ctx.pencil.size());

    auto t0 = Clock::now();
    std::vector<sefm::LineMatches> ref = sefm::sweep_serial(ctx);
    double serial_ms = ms_since(t0);
    std::printf("serial reference: %9.1f ms  (%ld matches)\n", serial_ms,
                count_matches(ref));

    std::string ref_dump = sefm::format_matches(ref);

    int max_threads = 8;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif
    bool all_equal = true;
    for (int workers = 1; workers <= max_threads; workers *= 2) {
        t0 = Clock::now();
        std::vector<sefm::LineMatches> par = sefm::sweep_parallel(ctx, workers);
        double par_ms = ms_since(t0);
        bool equal = sefm::format_matches(par) == ref_dump;
        all_equal = all_equal && equal;
        std::printf("omp %2d workers:   %9.1f ms  speedup %5.2fx  %s\n", workers,
                    par_ms, serial_ms / par_ms,
                    equal ? "output == serial" : "OUTPUT MISMATCH");
    }
    return all_equal ? 0 : 1;
}
