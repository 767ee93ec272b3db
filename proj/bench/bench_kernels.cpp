// Times the parallel kernels against their serial reference paths:
// the psi sweep over a simplex grid and the decay sampling check.
#include <chrono>
#include <cstdio>
#include <string>

#include "radshoot/parallel.hpp"
#include "radshoot/system.hpp"
#include "radshoot/target_map.hpp"

using namespace radshoot;

namespace {

template <typename Fn>
double time_ms(Fn&& fn, int reps) {
    fn();  // warm-up
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-24s serial %9.3f ms   parallel %9.3f ms   speedup %.2fx\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    int k = argc > 1 ? std::stoi(argv[1]) : 48;
    int reps = argc > 2 ? std::stoi(argv[2]) : 3;
    std::printf("threads available: %d\n", hardware_threads());

    SystemSpec spec = builtin("sign_changing", {{"p", 5.0}, {"n", 3.0}});
    ShotConfig cfg;
    SimplexGrid grid = SimplexGrid::create(2.0, spec.L, k);
    std::printf("sweep grid: k=%d (%zu points), %d reps\n", k,
                grid.points.size(), reps);

    double sweep_serial = time_ms(
        [&] { sweep_psi(spec, grid, cfg, ExecPolicy::Serial); }, reps);
    double sweep_parallel = time_ms(
        [&] { sweep_psi(spec, grid, cfg, ExecPolicy::Parallel); }, reps);
    report("sweep_psi", sweep_serial, sweep_parallel);

    const long samples = 200000;
    double decay_serial = time_ms(
        [&] { check_decay(spec, 10.0, samples, 7, ExecPolicy::Serial); }, reps);
    double decay_parallel = time_ms(
        [&] { check_decay(spec, 10.0, samples, 7, ExecPolicy::Parallel); },
        reps);
    report("check_decay", decay_serial, decay_parallel);
    return 0;
}
