// Wall-clock comparison of the OpenMP ensemble kernels against their serial
// reference implementations. Build and run manually:
//   cmake --build build && ./build/bench/ffst_bench [repeats]

#include "ffst/chain.hpp"
#include "ffst/channel.hpp"
#include "ffst/disorder_lab.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace {

template <typename F>
double time_best_of(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads available: %d\n\n", omp_get_max_threads());

    {
        ffst::EnsembleSpec spec;
        spec.base = ffst::make_uniform_spec(25, 1.0, 0.01, 0.0);
        spec.model = {ffst::DisorderKind::coupling, ffst::DisorderDistribution::uniform_relative,
                      0.3, 99};
        spec.realizations = 2000;
        spec.epsilon0 = 1e-3;
        spec.compensate = true;

        const double serial = time_best_of(repeats, [&] { ffst::run_ensemble_serial(spec); });
        const double parallel = time_best_of(repeats, [&] { ffst::run_ensemble(spec); });
        std::printf("disorder ensemble  N=25, 2000 realizations\n");
        std::printf("  serial   %8.3f s\n  parallel %8.3f s   speedup %.2fx\n\n", serial,
                    parallel, serial / parallel);
        if (ffst::realizations_csv(ffst::run_ensemble(spec)) !=
            ffst::realizations_csv(ffst::run_ensemble_serial(spec))) {
            std::printf("  MISMATCH between serial and parallel results\n");
            return 1;
        }
    }

    {
        const ffst::ChainSpec spec = ffst::make_uniform_spec(9, 1.0, 0.01, 0.0);
        const double tau = ffst::plan_transfer(spec).tau;
        ffst::OracleOptions serial_opts;
        serial_opts.parallel = false;

        const double serial = time_best_of(repeats, [&] {
            ffst::single_transfer_channel(spec, tau, ffst::Ensemble::exhaustive(), nullptr,
                                          serial_opts);
        });
        const double parallel = time_best_of(repeats, [&] {
            ffst::single_transfer_channel(spec, tau, ffst::Ensemble::exhaustive());
        });
        std::printf("oracle channel     N=9, 512 chain states\n");
        std::printf("  serial   %8.3f s\n  parallel %8.3f s   speedup %.2fx\n", serial, parallel,
                    serial / parallel);
    }
    return 0;
}
