// Timing comparison of the serial reference kernels against the OpenMP ones.
// Run manually: build/bench/bench_kernels [threads]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "nmv/builtin_models.hpp"
#include "nmv/stochastic.hpp"

using namespace nmv;
namespace chrono = std::chrono;

namespace {

double seconds_since(const chrono::steady_clock::time_point& t0) {
    return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    std::printf("threads: %d\n", threads);

    const TimeGrid grid(0.25, 1.0, 1.0 / 128.0);
    const ModelSpec model = builtin_model("TEST-1");
    PathGrid xi = constant_initial_path(grid, Vec::Constant(1, 1.0));
    const NoiseBundle bundle{12345};

    {
        const long N = 2048;
        auto t0 = chrono::steady_clock::now();
        const ParticleCloud serial =
            simulate_particles_serial(model, segment_at(xi, 0.0), 0.1, N, grid, bundle, 0);
        const double ts = seconds_since(t0);
        t0 = chrono::steady_clock::now();
        const ParticleCloud parallel =
            simulate_particles(model, segment_at(xi, 0.0), 0.1, N, grid, bundle, 0, {}, threads);
        const double tp = seconds_since(t0);
        double check = 0.0;
        for (long i = 0; i < serial.size(); ++i)
            check += sup_gap(serial.paths[static_cast<size_t>(i)],
                             parallel.paths[static_cast<size_t>(i)]);
        std::printf("particle cloud  N=%ld steps=%ld   serial %.3fs  omp %.3fs  speedup %.2fx"
                    "  max-gap %g\n",
                    N, grid.horizon_steps(), ts, tp, ts / tp, check);
    }

    {
        const long replicas = 200000;
        auto t0 = chrono::steady_clock::now();
        const ItoTailResult serial =
            ito_tail_check_serial(1.0, 0.0, 1, 1.0, 3.0, 1.0 / 256.0, replicas, bundle);
        const double ts = seconds_since(t0);
        t0 = chrono::steady_clock::now();
        const ItoTailResult parallel =
            ito_tail_check(1.0, 0.0, 1, 1.0, 3.0, 1.0 / 256.0, replicas, bundle, threads);
        const double tp = seconds_since(t0);
        std::printf("ito tail  replicas=%ld steps=256   serial %.3fs  omp %.3fs  speedup %.2fx"
                    "  hits %ld/%ld\n",
                    replicas, ts, tp, ts / tp, serial.hits, parallel.hits);
    }
    return 0;
}
