// Index-triple tensor loops. Each parallel kernel has a serial twin with the
// plain textbook loop order; tests compare the two entry by entry.
#include "kvg/kernels.hpp"

#include <omp.h>

namespace kvg {

namespace {

// grad[l][p] = d_l m_p for every entry p of an n x n matrix, 0 skipped.
std::vector<std::vector<Expr>> gradients(const std::vector<std::string>& coords, const ExprMatrix& m) {
    const std::size_t n = coords.size();
    const std::size_t cells = m.rows() * m.cols();
    std::vector<std::vector<Expr>> grad(n, std::vector<Expr>(cells));
    const long total = static_cast<long>(n * cells);
#pragma omp parallel for schedule(dynamic, 4)
    for (long t = 0; t < total; ++t) {
        const std::size_t l = static_cast<std::size_t>(t) / cells;
        const std::size_t p = static_cast<std::size_t>(t) % cells;
        const Expr& e = m.data()[p];
        if (!e.is_constant()) grad[l][p] = differentiate(e, coords[l]);
    }
    return grad;
}

}  // namespace

TrilinearForm codazzi_tensor(const SymBivector& h) {
    const std::size_t n = h.dim();
    const auto grad = gradients(h.chart().coords, h.matrix());
    TrilinearForm t(n);
    const long total = static_cast<long>(n * n * n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long idx = 0; idx < total; ++idx) {
        const std::size_t i = static_cast<std::size_t>(idx) / (n * n);
        const std::size_t j = (static_cast<std::size_t>(idx) / n) % n;
        const std::size_t k = static_cast<std::size_t>(idx) % n;
        if (i == j) continue;  // antisymmetric in (i, j)
        Expr v;
        for (std::size_t l = 0; l < n; ++l) {
            const Expr& djk = grad[l][j * n + k];
            const Expr& dik = grad[l][i * n + k];
            if (!djk.is_zero() && !h(i, l).is_zero()) v += h(i, l) * djk;
            if (!dik.is_zero() && !h(j, l).is_zero()) v -= h(j, l) * dik;
        }
        t.at(i, j, k) = std::move(v);
    }
    return t;
}

TrilinearForm codazzi_tensor_serial(const SymBivector& h) {
    const std::size_t n = h.dim();
    const auto& x = h.chart().coords;
    TrilinearForm t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                Expr v;
                for (std::size_t l = 0; l < n; ++l)
                    v += h(i, l) * differentiate(h(j, k), x[l]) - h(j, l) * differentiate(h(i, k), x[l]);
                t.at(i, j, k) = v;
            }
    return t;
}

TrilinearForm jacobiator(const std::vector<std::string>& coords, const ExprMatrix& pi) {
    const std::size_t n = coords.size();
    const auto grad = gradients(coords, pi);
    TrilinearForm t(n);
    const long total = static_cast<long>(n * n * n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long idx = 0; idx < total; ++idx) {
        const std::size_t i = static_cast<std::size_t>(idx) / (n * n);
        const std::size_t j = (static_cast<std::size_t>(idx) / n) % n;
        const std::size_t k = static_cast<std::size_t>(idx) % n;
        Expr v;
        for (std::size_t l = 0; l < n; ++l) {
            const Expr& a = grad[l][j * n + k];
            const Expr& b = grad[l][k * n + i];
            const Expr& c = grad[l][i * n + j];
            if (!a.is_zero() && !pi(l, i).is_zero()) v += pi(l, i) * a;
            if (!b.is_zero() && !pi(l, j).is_zero()) v += pi(l, j) * b;
            if (!c.is_zero() && !pi(l, k).is_zero()) v += pi(l, k) * c;
        }
        t.at(i, j, k) = std::move(v);
    }
    return t;
}

TrilinearForm jacobiator_serial(const std::vector<std::string>& coords, const ExprMatrix& pi) {
    const std::size_t n = coords.size();
    TrilinearForm t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                Expr v;
                for (std::size_t l = 0; l < n; ++l)
                    v += pi(l, i) * differentiate(pi(j, k), coords[l]) +
                         pi(l, j) * differentiate(pi(k, i), coords[l]) +
                         pi(l, k) * differentiate(pi(i, j), coords[l]);
                t.at(i, j, k) = v;
            }
    return t;
}

int kernel_threads() { return omp_get_max_threads(); }

}  // namespace kvg
