// Serial vs OpenMP timings for the index-triple tensor kernels.
#include "kvg/geometry.hpp"
#include "kvg/kernels.hpp"
#include "kvg/tangent.hpp"

#include <chrono>
#include <cstdio>
#include <random>

using namespace kvg;

namespace {

SymBivector random_bivector(std::size_t n, unsigned degree, std::mt19937_64& rng) {
    std::vector<std::string> coords;
    for (std::size_t i = 0; i < n; ++i) coords.push_back("x" + std::to_string(i + 1));
    Chart c("R" + std::to_string(n), coords);
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Polynomial p;
            for (int t = 0; t < 4; ++t) {
                Polynomial term(static_cast<long>(rng() % 7) - 3);
                unsigned d = static_cast<unsigned>(rng() % (degree + 1));
                for (unsigned e = 0; e < d; ++e) term = term * Polynomial::variable(coords[rng() % n]);
                p += term;
            }
            m(i, j) = m(j, i) = Expr(p);
        }
    return SymBivector(c, m);
}

template <typename F>
double seconds(F&& f, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
    std::mt19937_64 rng(7);
    std::printf("threads %d\n", kernel_threads());
    std::printf("%-10s %4s %12s %12s %8s\n", "kernel", "dim", "serial [s]", "openmp [s]", "same");
    for (std::size_t n : {3u, 4u, 6u, 8u}) {
        SymBivector h = random_bivector(n, 3, rng);
        TrilinearForm a, b;
        double ts = seconds([&] { a = codazzi_tensor_serial(h); }, 3);
        double tp = seconds([&] { b = codazzi_tensor(h); }, 3);
        std::printf("%-10s %4zu %12.5f %12.5f %8s\n", "codazzi", n, ts, tp, a == b ? "yes" : "NO");

        SkewBivector pi = build_pi(h);
        const auto& z = pi.chart().total.coords;
        double js = seconds([&] { a = jacobiator_serial(z, pi.matrix()); }, 1);
        double jp = seconds([&] { b = jacobiator(z, pi.matrix()); }, 1);
        std::printf("%-10s %4zu %12.5f %12.5f %8s\n", "jacobiator", 2 * n, js, jp, a == b ? "yes" : "NO");
    }
    return 0;
}
