#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>

#include "cubiclab/metric.hpp"
#include "cubiclab/rng.hpp"
#include "cubiclab/sampler.hpp"

using namespace cubiclab;

namespace {

double best_of(int reps, const std::function<void()>& job) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        job();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* kernel, double serial, double parallel, bool agree) {
    std::printf("%-18s serial %8.4f s  openmp %8.4f s  speedup %5.2f  %s\n", kernel, serial, parallel, serial / parallel,
                agree ? "results agree" : "RESULTS DIFFER");
}

}  // namespace

// usage: bench_kernels [q] [reps]
int main(int argc, char** argv) {
    const int q = argc > 1 ? std::atoi(argv[1]) : 400;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
    std::printf("threads %d, core size q = %d, best of %d\n", omp_get_max_threads(), q, reps);

    Rng rng(2024);
    NetworkSampler sampler(network_law(Variant::graph));
    auto s = build_core_substituted(q, rng, sampler);
    auto core_metric = induced_core_distance(s);
    std::vector<int> sources(s.core.n());
    std::iota(sources.begin(), sources.end(), 0);

    DistanceMatrix rows_serial, rows_parallel;
    double ts = best_of(reps, [&] { rows_serial = fpp_distance_rows_serial(core_metric, sources); });
    double tp = best_of(reps, [&] { rows_parallel = fpp_distance_rows(core_metric, sources); });
    report("fpp_distance_rows", ts, tp, rows_serial == rows_parallel);

    DistanceMatrix graph_rows(s.graph.n());
    for (int v = 0; v < s.graph.n(); ++v) {
        auto d = bfs_distances(s.graph, {v});
        graph_rows[v].assign(d.begin(), d.end());
    }
    auto corr = projection_correspondence(s);
    double ds = 0, dp = 0;
    ts = best_of(reps, [&] { ds = gh_distortion_serial(corr, graph_rows, rows_serial); });
    tp = best_of(reps, [&] { dp = gh_distortion(corr, graph_rows, rows_serial); });
    report("gh_distortion", ts, tp, ds == dp);
    std::printf("graph vertices %d, correspondence pairs %zu, distortion %.1f\n", s.graph.n(), corr.size(), ds);
    return 0;
}
