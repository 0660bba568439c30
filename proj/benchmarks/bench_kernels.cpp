// Times the OpenMP kernels against their plain-loop references on the
// desk-scale workload. Each row reports both wall times, the speedup, and a
// consistency check so a silently diverging fast path cannot hide behind a
// good ratio. Sizes are chosen so every kernel runs long enough to time
// reliably but the whole binary stays under a minute.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dcu/conjugate.hpp"
#include "dcu/model.hpp"
#include "dcu/parallel.hpp"
#include "dcu/paths.hpp"
#include "dcu/serial_ref.hpp"

namespace {

using namespace dcu;

double time_of(const std::function<void()>& body, int reps) {
    // one warm-up pass, then the best of `reps` to damp scheduler noise
    body();
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count());
    }
    return best;
}

void row(const char* name, double serial_s, double parallel_s, bool consistent) {
    std::printf("%-28s %10.4fs %10.4fs %8.2fx   %s\n", name, serial_s, parallel_s,
                serial_s / parallel_s, consistent ? "consistent" : "MISMATCH");
}

} // namespace

int main() {
    const std::size_t M = 200000, N = 64;
    std::printf("threads: %d, workload: M = %zu paths, N = %zu steps\n\n", par::thread_count(), M,
                N);
    std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    // path generation, elementwise: the two must agree bitwise
    PathEnsemble ens_par = generate(M, N, 1, 1.0, 42, {});
    PathEnsemble ens_ser = serial::generate(M, N, 1, 1.0, 42);
    {
        bool same = true;
        for (std::size_t p = 0; p < M && same; p += 997)
            for (std::size_t i = 0; i < N; ++i)
                same = same && ens_par.step(p, i)[0] == ens_ser.step(p, i)[0];
        const double ts = time_of([&] { (void)serial::generate(M, N, 1, 1.0, 42); }, 3);
        const double tp = time_of([&] { (void)generate(M, N, 1, 1.0, 42, {}); }, 3);
        row("path generation", ts, tp, same);
    }

    // stochastic exponential, elementwise along each path
    {
        const auto q = constant_control({0.7});
        const auto dp_par = stochastic_exponential(ens_par, q);
        const auto dp_ser = serial::stochastic_exponential(ens_par, q);
        bool same = true;
        for (std::size_t p = 0; p < M && same; p += 997)
            same = dp_par.log_at(p, N) == dp_ser.log_at(p, N);
        const double ts = time_of([&] { (void)serial::stochastic_exponential(ens_par, q); }, 3);
        const double tp = time_of([&] { (void)stochastic_exponential(ens_par, q); }, 3);
        row("stochastic exponential", ts, tp, same);
    }

    // blocked mean against the naive loop: equal up to summation order
    {
        std::vector<double> xs(M * 8);
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = std::sin(0.001 * static_cast<double>(i));
        const auto term = [&xs](std::size_t i) { return xs[i]; };
        const double mp = par::block_mean_se(xs.size(), term).mean;
        const double ms = serial::mean_se(xs).mean;
        const bool same = std::fabs(mp - ms) <= 1e-12 * xs.size();
        const double ts = time_of([&] { (void)serial::mean_se(xs); }, 5);
        const double tp = time_of([&] { (void)par::block_mean_se(xs.size(), term); }, 5);
        row("mean + standard error", ts, tp, same);
    }

    // conjugate transform: monotone-argmax sweep against the O(n*m) brute max
    {
        GrowthParams p;
        const auto core = build_catalogue_entry("entropic", p).core;
        const auto tab = tabulate_core(core, linspace(-12.0, 12.0, 8001));
        const auto zg = linspace(-10.0, 10.0, 8001);
        const auto fast = legendre_transform(tab, zg);
        const auto brute = serial::legendre_bruteforce(tab, zg);
        // rounding can tie-break the winning node differently, so the two
        // disagree by ulps on plateaus; anything larger is a real bug
        bool same = true;
        for (std::size_t j = 0; j < zg.size(); ++j)
            same = same && std::fabs(fast.fn.values[j] - brute[j]) <=
                               1e-12 * std::max(1.0, std::fabs(brute[j]));
        const double ts = time_of([&] { (void)serial::legendre_bruteforce(tab, zg); }, 3);
        const double tp = time_of([&] { (void)legendre_transform(tab, zg); }, 3);
        row("legendre transform", ts, tp, same);
    }

    return 0;
}
