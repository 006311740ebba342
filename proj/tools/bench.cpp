// Benchmark comparing the OpenMP kernels against the serial reference
// implementations, checking that both sides agree on the way.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "spiky/bounds.hpp"
#include "spiky/core.hpp"
#include "spiky/gen.hpp"
#include "spiky/oracle.hpp"
#include "spiky/reference.hpp"
#include "spiky/util.hpp"

using namespace spiky;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

int mismatches = 0;

void row(const char* name, double serial_ms, double parallel_ms, bool agree) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, agree ? "ok" : "MISMATCH");
    if (!agree) ++mismatches;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "reference", "kernel", "speedup");

    {
        // wide matrix: many row subsets stay shatterable candidates
        Rng rng(7);
        Matrix m(16, 400);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 400; ++j) m.at(i, j) = rng.next_bool() ? 1.0 : 0.0;
        double t0 = now_ms();
        int serial = ref::vc_dimension(m);
        double t1 = now_ms();
        int parallel = oracle::exact_vc(m);
        double t2 = now_ms();
        row("vc 16x400", t1 - t0, t2 - t1, serial == parallel);
    }

    {
        Matrix m = hd1(8);
        int samples = 200000;
        double t0 = now_ms();
        double serial = ref::p1_worst_ratio_sampled(m, 4, 2.0, samples, 11);
        double t1 = now_ms();
        double parallel = bounds::check_p1_sampled(m, 4, 2.0, samples, 11).value;
        double t2 = now_ms();
        row("p1 sampled hd1(8)", t1 - t0, t2 - t1, serial == parallel);
    }

    {
        Matrix m = random_boolean(12, 0.4, 3);
        double t0 = now_ms();
        double serial = ref::p1_worst_ratio_exhaustive(m, 4, 2.0);
        double t1 = now_ms();
        double parallel = bounds::check_p1_exhaustive(m, 4, 2.0).value;
        double t2 = now_ms();
        row("p1 exhaustive 12x12", t1 - t0, t2 - t1, serial == parallel);
    }

    {
        // rigidity of every 3x3 GF2 matrix at target rank 1
        double t0 = now_ms();
        long long serial_sum = 0;
        for (std::uint32_t mask = 0; mask < 512; ++mask) {
            Matrix m(3, 3, Field::GF2);
            for (int t = 0; t < 9; ++t)
                if (mask & (1u << t)) m.at(t / 3, t % 3) = 1.0;
            serial_sum += ref::rigidity_gf2_lowrank_scan(m, 1);
        }
        double t1 = now_ms();
        long long parallel_sum = 0;
        for (std::uint32_t mask = 0; mask < 512; ++mask) {
            Matrix m(3, 3, Field::GF2);
            for (int t = 0; t < 9; ++t)
                if (mask & (1u << t)) m.at(t / 3, t % 3) = 1.0;
            parallel_sum += oracle::exact_rigidity_gf2(m, 1);
        }
        double t2 = now_ms();
        row("rigidity all 3x3, r=1", t1 - t0, t2 - t1, serial_sum == parallel_sum);
    }

    {
        // subset-sum-free weights force the full search depth
        Matrix m = diagonal({1, 3, 7});
        double t0 = now_ms();
        auto br = oracle::exact_blocky_rank_real(m, 3);
        double t1 = now_ms();
        std::printf("%-28s %13s %10.1f ms   br=%d\n", "blocky-rank diag(1,3,7)", "-", t1 - t0,
                    br ? *br : -1);
        if (!br || *br != 3) ++mismatches;
    }

    if (mismatches) {
        std::printf("%d kernel mismatches\n", mismatches);
        return 1;
    }
    return 0;
}
