#include "kvg/checks.hpp"

#include "kvg/sampling.hpp"
#include "kvg/tangent.hpp"

#include <functional>
#include <sstream>

namespace kvg {

namespace {

using Values = std::vector<std::optional<Rational>>;
using JetRows = std::vector<std::vector<Jet>>;

// ------------------------------------------------------------ formatting

std::string matrix_text(const ExprMatrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) s += "; ";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + to_string(m(i, j));
    }
    return s + "]";
}

std::string vector_text(const RatVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

std::vector<std::string> point_strings(const RatVector& v) {
    std::vector<std::string> out;
    for (const auto& q : v) out.push_back(to_string(q));
    return out;
}

std::string idx3(std::size_t i, std::size_t j, std::size_t k) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
}

std::string idx2(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

Point as_point(const std::vector<std::string>& vars, const RatVector& v) {
    Point p;
    for (std::size_t i = 0; i < vars.size(); ++i) p[vars[i]] = v.at(i);
    return p;
}

/// First sample at which e is defined and nonzero; the point is left empty if none is found.
Witness witness_for(const Expr& e, const std::vector<std::string>& vars, const std::vector<RatVector>& points) {
    Witness w{{}, to_string(e)};
    for (const auto& p : points) {
        try {
            if (eval_at(e, as_point(vars, p)) != 0) {
                w.point = point_strings(p);
                break;
            }
        } catch (const Error&) {
        }
    }
    return w;
}

std::optional<std::pair<std::size_t, std::size_t>> first_nonzero(const ExprMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero()) return std::pair{i, j};
    return std::nullopt;
}

std::vector<Expr> flatten(const ExprMatrix& m) { return m.data(); }

// ------------------------------------------------------------ numeric side

std::shared_ptr<const JetSpace> space(std::size_t n, unsigned order) {
    thread_local std::map<std::pair<std::size_t, unsigned>, std::shared_ptr<const JetSpace>> cache;
    auto& s = cache[{n, order}];
    if (!s) s = std::make_shared<const JetSpace>(n, order);
    return s;
}

JetRows jet_rows(const ExprMatrix& m, const JetPoint& at) {
    JetRows out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i].push_back(jet_eval(m(i, j), at));
    return out;
}

RatMatrix values_at(const ExprMatrix& m, const std::vector<std::string>& vars, const RatVector& p) {
    RatMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = numeric_value(m(i, j), vars, p);
    return out;
}

Values all_values(const std::vector<Rational>& v) { return Values(v.begin(), v.end()); }

Values all_values(const RatMatrix& m) { return all_values(m.data()); }

/// sum_l h_il d_l h_jk - h_jl d_l h_ik from first-order jets.
std::vector<Rational> codazzi_numeric(const SymBivector& h, const RatVector& p) {
    const std::size_t n = h.dim();
    auto at = seed_jets(space(n, 1), h.chart().coords, p);
    JetRows hj = jet_rows(h.matrix(), at);
    std::vector<Rational> out(n * n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                Rational acc = 0;
                for (std::size_t l = 0; l < n; ++l)
                    acc += hj[i][l].value() * hj[j][k].slope(l) - hj[j][l].value() * hj[i][k].slope(l);
                out[(i * n + j) * n + k] = acc;
            }
    return out;
}

OracleGroup codazzi_group(const std::string& label, const SymBivector& h, const TrilinearForm& t, int sign) {
    OracleGroup g{label, h.chart().coords, t.entries(), {}};
    g.numeric = [h, sign](const RatVector& p) {
        auto v = codazzi_numeric(h, p);
        if (sign < 0)
            for (auto& q : v) q = -q;
        return all_values(v);
    };
    return g;
}

/// Adapted matrix P^{-1} H(o + P (t, 0)) P^{-T} at tangent coordinates t.
RatMatrix adapted_numeric(const AdaptedFrame& f, const SymBivector& h, const RatVector& t) {
    const std::size_t n = f.sub.n();
    RatVector x = f.sub.origin;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f.sub.k(); ++j) x[i] += f.change(i, j) * t.at(j);
    RatMatrix hx = values_at(h.matrix(), h.chart().coords, x);
    return f.inverse * hx * f.inverse.transpose();
}

std::vector<std::string> tangent_vars(const AdaptedFrame& f) {
    return f.tangent ? f.tangent->coords : std::vector<std::string>{};
}

/// A - B D^{-1} B^T at t; nullopt entries when D is singular there.
Values schur_numeric(const AdaptedFrame& f, const SymBivector& h, const RatVector& t) {
    const std::size_t k = f.sub.k();
    const std::size_t c = f.sub.n() - k;
    RatMatrix on = adapted_numeric(f, h, t);
    RatMatrix a = on.block(0, 0, k, k);
    if (c == 0) return all_values(a);
    auto dinv = inverse(on.block(k, k, c, c));
    if (!dinv) return Values(k * k);
    RatMatrix b = on.block(0, k, k, c);
    return all_values(a - b * (*dinv) * b.transpose());
}

// ------------------------------------------------------------ sampling

struct Sampling {
    std::uint64_t seed;
    std::size_t count;
    std::optional<RatRows> points;

    std::vector<RatVector> in(std::size_t dim) const {
        if (dim == 0) return {RatVector{}};
        if (points) {
            std::vector<RatVector> out;
            for (const auto& p : *points)
                if (p.size() == dim) out.push_back(p);
            if (!out.empty()) return out;
        }
        return Sampler(seed).points(dim, count);
    }
};

struct Runner {
    const CheckDecl& c;
    const Model& m;
    Sampling sampling;
    CheckResult r;

    const SymBivector& biv(std::size_t i) const { return m.bivectors.at(c.args.at(i)); }
    const ScalarField& scal(std::size_t i) const { return m.scalars.at(c.args.at(i)); }
    const AffineMap& map(std::size_t i) const { return m.maps.at(c.args.at(i)); }
    const AffineSubmanifold& sub(std::size_t i) const { return m.submanifolds.at(c.args.at(i)); }
    const AlgebraSpec& alg(std::size_t i) const { return m.algebras.at(c.args.at(i)); }

    void verdict(bool ok) { r.status = ok ? Status::Pass : Status::Fail; }

    void fail_on(const Expr& residual, const std::vector<std::string>& vars, std::size_t dim) {
        r.status = Status::Fail;
        r.witness = witness_for(residual, vars, sampling.in(dim));
    }

    /// Compares an induced / derived matrix against the `equals` option.
    bool compare_equals(const ExprMatrix& got, const std::vector<std::string>& vars, const char* what) {
        if (!c.options.equals) return true;
        auto want = square_from_rows(*c.options.equals, got.rows());
        if (!want) {
            r.status = Status::Fail;
            r.details += "; expected " + std::string(what) + " has the wrong shape";
            return false;
        }
        ExprMatrix diff = got - *want;
        if (auto nz = first_nonzero(diff)) {
            fail_on(diff(nz->first, nz->second), vars, vars.size());
            r.details += "; " + std::string(what) + " differs from " + matrix_text(*want) + " at entry " +
                         idx2(nz->first, nz->second);
            return false;
        }
        r.details += "; matches " + matrix_text(*want);
        return true;
    }

    // -------------------------------------------------------- one bivector

    void codazzi() {
        const SymBivector& h = biv(0);
        TrilinearForm t = codazzi_tensor(h);
        r.oracle.push_back(codazzi_group("codazzi", h, t, 1));
        if (auto nz = t.first_nonzero()) {
            auto [i, j, k] = *nz;
            fail_on(t.at(i, j, k), h.chart().coords, h.dim());
            r.details = "Codazzi defect nonzero at indices " + idx3(i, j, k);
        } else {
            verdict(true);
            r.details = "Codazzi tensor vanishes identically (" + std::to_string(t.entries().size()) + " entries)";
        }
    }

    void kv_bracket() {
        const SymBivector& h = biv(0);
        TrilinearForm t = kv_bracket_form(h);
        r.oracle.push_back(codazzi_group("kv_bracket", h, t, -1));
        if (auto nz = t.first_nonzero()) {
            auto [i, j, k] = *nz;
            fail_on(t.at(i, j, k), h.chart().coords, h.dim());
            r.details = "[h,h] nonzero at indices " + idx3(i, j, k);
        } else {
            verdict(true);
            r.details = "[h,h] vanishes on all coordinate triples";
        }
    }

    void jacobi_tangent() {
        const SymBivector& h = biv(0);
        SkewBivector pi = build_pi(h);
        TrilinearForm jac = schouten_jacobi(pi);
        const auto& z = pi.chart().total.coords;
        const std::size_t n = h.dim();
        OracleGroup g{"jacobiator", z, jac.entries(), {}};
        g.numeric = [h, z, n](const RatVector& p) {
            const std::size_t N = 2 * n;
            auto at = seed_jets(space(N, 1), z, p);
            JetRows hj = jet_rows(h.matrix(), at);
            JetRows P(N, std::vector<Jet>(N, Jet(space(N, 1), Rational(0))));
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    P[a][n + b] = hj[a][b];
                    P[n + b][a] = hj[a][b] * Rational(-1);
                }
            std::vector<Rational> out(N * N * N);
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j)
                    for (std::size_t k = 0; k < N; ++k) {
                        Rational acc = 0;
                        for (std::size_t l = 0; l < N; ++l) {
                            acc += P[l][i].value() * P[j][k].slope(l) + P[l][j].value() * P[k][i].slope(l) +
                                   P[l][k].value() * P[i][j].slope(l);
                        }
                        out[(i * N + j) * N + k] = acc;
                    }
            return all_values(out);
        };
        r.oracle.push_back(std::move(g));
        bool poisson = jac.is_zero();
        bool kv = is_kv(h);
        if (auto nz = jac.first_nonzero()) {
            auto [i, j, k] = *nz;
            fail_on(jac.at(i, j, k), z, z.size());
            r.details = "Jacobiator of the tangent lift nonzero at " + idx3(i, j, k);
        } else {
            verdict(true);
            r.details = "tangent lift is Poisson";
        }
        r.details += kv == poisson ? "; agrees with the Codazzi verdict" : "; DISAGREES with the Codazzi verdict";
        if (kv != poisson) r.status = Status::Fail;
    }

    void rank() {
        const SymBivector& h = biv(0);
        std::vector<RatVector> pts;
        if (c.options.points) pts = *c.options.points;
        if (c.options.point) pts.push_back(*c.options.point);
        if (pts.empty()) pts = sampling.in(h.dim());
        bool ok = true;
        std::string list;
        for (const auto& p : pts) {
            if (p.size() != h.dim()) throw Error(ErrorCode::ChartMismatch, "rank point has the wrong dimension");
            std::size_t rk = rank_at(h, h.chart().point(p));
            if (c.options.value && static_cast<long>(rk) != *c.options.value) {
                if (ok) r.witness = Witness{point_strings(p), std::to_string(rk)};
                ok = false;
            }
            if (list.size() < 400) list += (list.empty() ? "" : ", ") + vector_text(p) + " -> " + std::to_string(rk);
        }
        verdict(ok);
        r.details = "rank of h_# at " + list;
        if (c.options.value) r.details += "; expected " + std::to_string(*c.options.value);
    }

    // -------------------------------------------------------- maps

    OracleGroup kv_map_group(const AffineMap& f, const SymBivector& h1, const SymBivector& h2,
                             const ExprMatrix& residual) {
        OracleGroup g{"kv_map", f.source.coords, flatten(residual), {}};
        g.numeric = [f, h1, h2](const RatVector& p) {
            RatMatrix a = values_at(h1.matrix(), h1.chart().coords, p);
            RatMatrix b = values_at(h2.matrix(), h2.chart().coords, f.apply(p));
            return all_values(f.matrix * a * f.matrix.transpose() - b);
        };
        return g;
    }

    void kv_map() {
        const AffineMap& f = map(0);
        ExprMatrix res = kv_map_residual(f, biv(1), biv(2));
        r.oracle.push_back(kv_map_group(f, biv(1), biv(2), res));
        if (auto nz = first_nonzero(res)) {
            fail_on(res(nz->first, nz->second), f.source.coords, f.source.dim());
            r.details = "M H1 M^T - H2(F) nonzero at entry " + idx2(nz->first, nz->second);
        } else {
            verdict(true);
            r.details = "M H1 M^T = H2 o F";
        }
    }

    void theorem1() {
        const AffineMap& f = map(0);
        Theorem1Report t = theorem1_equivalences(f, biv(1), biv(2));
        r.oracle.push_back(kv_map_group(f, biv(1), biv(2), kv_map_residual(f, biv(1), biv(2))));
        auto b = [](bool v) { return std::string(v ? "true" : "false"); };
        r.details = "(i) K-V map " + b(t.kv_map) + ", (ii) TF Poisson " + b(t.tangent_poisson) +
                    ", (iii) sharp related " + b(t.sharp_related) + ", (iv) Hamiltonian related " +
                    b(t.hamiltonian_related);
        verdict(t.agree());
        r.details += t.agree() ? "; all four agree" : "; verdicts DISAGREE";
    }

    /// Conormal-conormal block of the adapted matrix on N, symbolic and numeric.
    OracleGroup d_block_group(const std::string& label, const AffineSubmanifold& n, const SymBivector& h,
                              const ExprMatrix& d) {
        AdaptedFrame f = adapted_frame(n);
        OracleGroup g{label, tangent_vars(f), flatten(d), {}};
        g.numeric = [f, h](const RatVector& t) {
            const std::size_t k = f.sub.k(), c = f.sub.n() - k;
            return all_values(adapted_numeric(f, h, t).block(k, k, c, c));
        };
        return g;
    }

    void graph() {
        const AffineMap& f = map(0);
        GraphReport g = graph_check(f, biv(1), biv(2));
        r.oracle.push_back(kv_map_group(f, biv(1), biv(2), kv_map_residual(f, biv(1), biv(2))));
        r.oracle.push_back(
            d_block_group("graph_conormal", g.graph, g.product.h, is_coisotropic(g.graph, g.product.h).residual));
        auto b = [](bool v) { return std::string(v ? "true" : "false"); };
        r.details = "Graph(F) coisotropic in M1 x M2bar: " + b(g.coisotropic) + ", F K-V map: " + b(g.kv_map);
        verdict(g.agree());
    }

    void preimage() {
        const AffineMap& f = map(0);
        const AffineSubmanifold& n2 = sub(3);
        const long k1 = static_cast<long>(f.source.dim() + n2.k()) - static_cast<long>(f.target.dim());
        auto s1 = sampling.in(static_cast<std::size_t>(std::max(0L, k1)));
        auto s2 = sampling.in(n2.k());
        PreimageReport p;
        try {
            p = preimage_transversal(f, biv(1), biv(2), n2, s1, s2);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Parse || e.code() == ErrorCode::Semantic) throw;
            if (e.code() == ErrorCode::PreconditionViolated || e.code() == ErrorCode::NotTransverseAtSample ||
                e.code() == ErrorCode::InvalidSubspace) {
                r.status = Status::Fail;
                r.details = e.what();
                return;
            }
            throw;
        }
        r.oracle.push_back(transversal_det_group("target_det_d", n2, biv(2), p.target.det_d));
        r.oracle.push_back(transversal_det_group("source_det_d", p.preimage, biv(1), p.source.det_d));
        std::ostringstream d;
        d << "N1 = F^-1(" << n2.name << "): origin " << vector_text(p.preimage.origin) << ", dim "
          << p.preimage.k() << "; target " << to_string(p.target.verdict) << ", source "
          << to_string(p.source.verdict) << "; restriction K-V " << (p.restriction_kv ? "true" : "false");
        r.details = d.str();
        bool pointwise = p.target.verdict == TransversalVerdict::PointwiseTrue ||
                         p.source.verdict == TransversalVerdict::PointwiseTrue;
        bool ok = p.target.verdict != TransversalVerdict::False && p.source.verdict != TransversalVerdict::False &&
                  p.restriction_kv;
        r.status = !ok ? Status::Fail : pointwise ? Status::PointwisePass : Status::Pass;
        if (p.restriction && p.source.induced && p.target.induced) {
            AdaptedFrame f1 = adapted_frame(p.preimage), f2 = adapted_frame(n2);
            const AffineMap rm = *p.restriction;
            const SymBivector h1 = biv(1), h2 = biv(2);
            OracleGroup g{"restriction_kv", tangent_vars(f1), flatten(p.restriction_residual), {}};
            g.numeric = [f1, f2, rm, h1, h2](const RatVector& t) {
                Values a = schur_numeric(f1, h1, t);
                Values b = schur_numeric(f2, h2, rm.apply(t));
                const std::size_t k1 = rm.source.dim(), k2 = rm.target.dim();
                for (const auto& v : a)
                    if (!v) return Values(k2 * k2);
                for (const auto& v : b)
                    if (!v) return Values(k2 * k2);
                RatMatrix am(k1, k1), bm(k2, k2);
                for (std::size_t i = 0; i < k1 * k1; ++i) am(i / k1, i % k1) = *a[i];
                for (std::size_t i = 0; i < k2 * k2; ++i) bm(i / k2, i % k2) = *b[i];
                return all_values(rm.matrix * am * rm.matrix.transpose() - bm);
            };
            r.oracle.push_back(std::move(g));
            if (!p.restriction_kv)
                if (auto nz = first_nonzero(p.restriction_residual))
                    fail_on(p.restriction_residual(nz->first, nz->second), f1.tangent->coords, p.preimage.k());
        }
    }

    // -------------------------------------------------------- submanifolds

    OracleGroup transversal_det_group(const std::string& label, const AffineSubmanifold& n, const SymBivector& h,
                                      const Expr& det) {
        AdaptedFrame f = adapted_frame(n);
        OracleGroup g{label, tangent_vars(f), {det}, {}};
        g.numeric = [f, h](const RatVector& t) {
            const std::size_t k = f.sub.k(), c = f.sub.n() - k;
            return Values{numeric_det(adapted_numeric(f, h, t).block(k, k, c, c))};
        };
        return g;
    }

    std::string ambient_warning(const SymBivector& h) const {
        return is_kv(h) ? "" : "; warning: ambient h is not K-V";
    }

    void submanifold_check(const AffineSubmanifold& n, const SymBivector& h) {
        SubmanifoldReport s = is_kv_submanifold(n, h);
        AdaptedFrame f = adapted_frame(n);
        auto vars = tangent_vars(f);
        OracleGroup g{"conormal_rows", vars, flatten(s.residual), {}};
        g.numeric = [f, h](const RatVector& t) {
            const std::size_t k = f.sub.k(), dim = f.sub.n();
            return all_values(adapted_numeric(f, h, t).block(k, 0, dim - k, dim));
        };
        r.oracle.push_back(std::move(g));
        if (auto nz = first_nonzero(s.residual)) {
            fail_on(s.residual(nz->first, nz->second), vars, n.k());
            r.details = "h_#(TN°) is not tangent to " + n.name + ": adapted entry " +
                        idx2(n.k() + nz->first, nz->second) + " nonzero on N";
        } else {
            verdict(true);
            r.details = n.name + " is a K-V submanifold";
            if (s.induced) {
                r.details += "; induced h^N = " + matrix_text(s.induced->matrix()) + " in (" + join(vars) + ")";
                compare_equals(s.induced->matrix(), vars, "induced h^N");
                OracleGroup gi{"induced", vars, flatten(s.induced->matrix()), {}};
                gi.numeric = [f, h](const RatVector& t) {
                    const std::size_t k = f.sub.k();
                    return all_values(adapted_numeric(f, h, t).block(0, 0, k, k));
                };
                r.oracle.push_back(std::move(gi));
            }
        }
        r.details += ambient_warning(h);
    }

    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    }

    void transversal() {
        const AffineSubmanifold& n = sub(0);
        const SymBivector& h = biv(1);
        auto samples = sampling.in(n.k());
        TransversalReport t = is_transversal(n, h, samples);
        AdaptedFrame f = adapted_frame(n);
        auto vars = tangent_vars(f);
        r.oracle.push_back(transversal_det_group("det_d", n, h, t.det_d));
        std::ostringstream d;
        d << "verdict " << to_string(t.verdict) << "; det D = " << to_string(t.det_d);
        switch (t.verdict) {
            case TransversalVerdict::SymbolicTrue: r.status = Status::Pass; break;
            case TransversalVerdict::PointwiseTrue: {
                r.status = Status::PointwisePass;
                d << "; nonzero at " << t.checked.size() << " sampled points:";
                for (const auto& p : t.checked) d << " " << vector_text(p);
                break;
            }
            case TransversalVerdict::False: {
                r.status = Status::Fail;
                RatVector at = t.singular.empty() ? RatVector(n.k(), Rational(0)) : t.singular.front();
                r.witness = Witness{point_strings(at), to_string(t.det_d)};
                d << "; D singular at " << vector_text(at);
                break;
            }
        }
        r.details = d.str();
        if (t.induced) {
            r.details += "; induced h^N = " + matrix_text(t.induced->matrix()) + " in (" + join(vars) + ")";
            if (t.verdict != TransversalVerdict::False) compare_equals(t.induced->matrix(), vars, "induced h^N");
            OracleGroup gi{"schur", vars, flatten(t.induced->matrix()), {}};
            gi.numeric = [f, h](const RatVector& p) { return schur_numeric(f, h, p); };
            r.oracle.push_back(std::move(gi));
        }
        r.details += ambient_warning(h);
    }

    void coisotropic_check(const AffineSubmanifold& n, const SymBivector& h) {
        CoisotropicReport cr = is_coisotropic(n, h);
        AdaptedFrame f = adapted_frame(n);
        auto vars = tangent_vars(f);
        r.oracle.push_back(d_block_group("d_block", n, h, cr.residual));
        if (auto nz = first_nonzero(cr.residual)) {
            fail_on(cr.residual(nz->first, nz->second), vars, n.k());
            r.details = "h_#(TN°) leaves TN: conormal block entry " + idx2(nz->first, nz->second) + " nonzero";
        } else {
            verdict(true);
            r.details = n.name + " is coisotropic";
        }
    }

    void conormal() {
        const AffineSubmanifold& n = sub(0);
        const SymBivector& h = biv(1);
        ConormalAlgebroid a;
        try {
            a = conormal_algebroid(n, h, c.options.point);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotCoisotropic && e.code() != ErrorCode::ClosureFailure) throw;
            r.status = Status::Fail;
            r.details = e.what();
            return;
        }
        const AdaptedFrame& f = a.frame;
        const std::size_t k = n.k(), rk = a.rank;
        auto vars = tangent_vars(f);
        std::vector<std::string> dw;
        for (std::size_t s = 0; s < rk; ++s) dw.push_back("d" + f.adapted.coords[k + s]);

        std::vector<Expr> flat;
        for (const auto& x : a.structure)
            for (const auto& y : x)
                for (const auto& z : y) flat.push_back(z);
        const SymBivector hh = h;
        const AdaptedFrame ff = f;
        // h̃ as first-order jets in the adapted coordinates y = (t, w) at (t, 0).
        auto adapted_jets = [ff, hh](const RatVector& t) {
            const std::size_t dim = ff.sub.n(), kk = ff.sub.k();
            auto s = space(dim, 1);
            RatVector y0(dim, Rational(0));
            for (std::size_t j = 0; j < kk; ++j) y0[j] = t.at(j);
            std::vector<Jet> y;
            for (std::size_t j = 0; j < dim; ++j) y.push_back(Jet::variable(s, j, y0[j]));
            JetPoint x;
            for (std::size_t i = 0; i < dim; ++i) {
                Jet xi(s, ff.sub.origin[i]);
                for (std::size_t j = 0; j < dim; ++j)
                    if (ff.change(i, j) != 0) xi += y[j] * ff.change(i, j);
                x.emplace(hh.chart().coords[i], xi);
            }
            JetRows hx = jet_rows(hh.matrix(), x);
            JetRows out(dim, std::vector<Jet>(dim, Jet(s, Rational(0))));
            for (std::size_t a1 = 0; a1 < dim; ++a1)
                for (std::size_t b1 = 0; b1 < dim; ++b1)
                    for (std::size_t p = 0; p < dim; ++p)
                        for (std::size_t q = 0; q < dim; ++q) {
                            Rational w = ff.inverse(a1, p) * ff.inverse(b1, q);
                            if (w != 0) out[a1][b1] += hx[p][q] * w;
                        }
            return out;
        };
        OracleGroup gs{"conormal_structure", vars, flat, {}};
        gs.numeric = [adapted_jets, k, rk](const RatVector& t) {
            JetRows ht = adapted_jets(t);
            Values out;
            for (std::size_t p = 0; p < rk; ++p)
                for (std::size_t q = 0; q < rk; ++q)
                    for (std::size_t s = 0; s < rk; ++s) out.push_back(ht[k + p][k + q].slope(k + s));
            return out;
        };
        r.oracle.push_back(std::move(gs));
        OracleGroup ga{"anchor", vars, flatten(a.anchor), {}};
        ga.numeric = [adapted_jets, k, rk](const RatVector& t) {
            JetRows ht = adapted_jets(t);
            Values out;
            for (std::size_t p = 0; p < rk; ++p)
                for (std::size_t j = 0; j < k; ++j) out.push_back(ht[k + p][j].value());
            return out;
        };
        r.oracle.push_back(std::move(ga));

        std::ostringstream d;
        d << "rank " << rk << "; closed " << (a.closed ? "true" : "false") << ", left-symmetric "
          << (a.left_symmetric ? "true" : "false") << ", anchor-compatible "
          << (a.anchor_compatible ? "true" : "false");
        std::string table;
        for (std::size_t p = 0; p < rk; ++p)
            for (std::size_t q = 0; q < rk; ++q) {
                Expr e;
                for (std::size_t s = 0; s < rk; ++s) e += a.structure[p][q][s] * Expr::variable(dw[s]);
                if (!e.is_zero()) table += " " + dw[p] + "*" + dw[q] + " = " + to_string(e) + ";";
            }
        d << "; products:" << (table.empty() ? " all zero" : table);
        bool ok = a.closed && a.left_symmetric && a.anchor_compatible;
        if (a.fiber) {
            const auto& fb = *a.fiber;
            d << " fiber at " << vector_text(fb.point) << ": dim " << fb.basis.size() << ", closed "
              << (fb.closed ? "true" : "false") << ", commutative " << (fb.commutative ? "true" : "false")
              << ", associative " << (fb.associative ? "true" : "false");
            ok = ok && fb.closed && fb.commutative && fb.associative;
        }
        r.details = d.str();
        verdict(ok);
    }

    // -------------------------------------------------------- functions

    void in_E_check(const SymBivector& h, const ScalarField& f, unsigned order, const std::string& label,
                    const std::function<Jet(const JetPoint&)>& g_jet, const ExprMatrix& res) {
        const std::size_t n = h.dim();
        OracleGroup g{label, h.chart().coords, flatten(res), {}};
        g.numeric = [h, n, order, g_jet](const RatVector& p) {
            auto at = seed_jets(space(n, order), h.chart().coords, p);
            Jet gj = g_jet(at);
            JetRows hj = jet_rows(h.matrix(), at);
            std::vector<Jet> dg;
            for (std::size_t l = 0; l < n; ++l) dg.push_back(gj.d(l));
            std::vector<Rational> out(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Rational acc = 0;
                    for (std::size_t l = 0; l < n; ++l)
                        for (std::size_t k = 0; k < n; ++k)
                            acc += hj[i][l].value() * hj[j][k].value() * dg[l].slope(k);
                    out[i * n + j] = acc;
                }
            return all_values(out);
        };
        r.oracle.push_back(std::move(g));
        (void)f;
    }

    void in_E() {
        const SymBivector& h = biv(0);
        const ScalarField& f = scal(1);
        ExprMatrix res = in_E_residuals(h, f);
        const Expr fv = f.value;
        in_E_check(h, f, 2, "in_E", [fv](const JetPoint& at) { return jet_eval(fv, at); }, res);
        if (auto nz = first_nonzero(res)) {
            fail_on(res(nz->first, nz->second), h.chart().coords, h.dim());
            r.details = "<nabla_{X_i} df, X_j> nonzero at " + idx2(nz->first, nz->second) + ": f is not in E";
        } else {
            verdict(true);
            r.details = "f = " + to_string(f.value) + " is in E";
        }
    }

    void special_class() {
        const SymBivector& h = biv(0);
        const ScalarField& f1 = scal(1);
        const ScalarField& f2 = scal(2);
        bool holds;
        try {
            holds = special_class_check(h, f1, f2);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PreconditionViolated) throw;
            r.status = Status::Unsupported;
            r.details = e.what();
            return;
        }
        ScalarField g{h.chart(), evaluate(h, differential(f1), differential(f2))};
        ExprMatrix res = in_E_residuals(h, g);
        const Expr a = f1.value, b = f2.value;
        const SymBivector hh = h;
        in_E_check(h, g, 3, "special_class",
                   [a, b, hh](const JetPoint& at) {
                       const std::size_t n = hh.dim();
                       Jet ja = jet_eval(a, at), jb = jet_eval(b, at);
                       JetRows hj = jet_rows(hh.matrix(), at);
                       Jet acc = ja * Rational(0);
                       for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < n; ++j) acc += ja.d(i) * hj[i][j] * jb.d(j);
                       return acc;
                   },
                   res);
        r.details = "h(df1, df2) = " + to_string(g.value);
        if (auto nz = first_nonzero(res)) {
            fail_on(res(nz->first, nz->second), h.chart().coords, h.dim());
            r.details += " is not in E (entry " + idx2(nz->first, nz->second) + ")";
        } else {
            r.details += " is in E";
        }
        verdict(holds);
    }

    /// Value of X_f, L_{X_f}h and the proposition residual at p, from second-order jets.
    static std::pair<std::vector<Rational>, std::vector<Rational>> lie_numeric(const SymBivector& h, const Expr& f,
                                                                             const RatVector& p) {
        const std::size_t n = h.dim();
        auto at = seed_jets(space(n, 2), h.chart().coords, p);
        Jet fj = jet_eval(f, at);
        JetRows hj = jet_rows(h.matrix(), at);
        std::vector<Jet> df, x;
        for (std::size_t a = 0; a < n; ++a) df.push_back(fj.d(a));
        for (std::size_t i = 0; i < n; ++i) {
            Jet xi = fj * Rational(0);
            for (std::size_t a = 0; a < n; ++a) xi += df[a] * hj[a][i];
            x.push_back(xi);
        }
        std::vector<Rational> lie(n * n), res(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Rational xh = 0, l = 0, hess = 0;
                for (std::size_t q = 0; q < n; ++q) xh += x[q].value() * hj[i][j].slope(q);
                l = xh;
                for (std::size_t k = 0; k < n; ++k)
                    l -= hj[k][j].value() * x[i].slope(k) + hj[i][k].value() * x[j].slope(k);
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        hess += hj[i][a].value() * df[a].slope(b) * hj[j][b].value();
                lie[i * n + j] = l;
                res[i * n + j] = l + xh - 2 * hess;
            }
        return {lie, res};
    }

    void lie_derivative() {
        const SymBivector& h = biv(0);
        const ScalarField& f = scal(1);
        SymBivector lie = lie_derivative_h(h, f);
        ExprMatrix res = lie_derivative_residual(h, f);
        const Expr fv = f.value;
        OracleGroup gl{"lie_derivative", h.chart().coords, flatten(lie.matrix()), {}};
        gl.numeric = [h, fv](const RatVector& p) { return all_values(lie_numeric(h, fv, p).first); };
        OracleGroup gr{"proposition_residual", h.chart().coords, flatten(res), {}};
        gr.numeric = [h, fv](const RatVector& p) { return all_values(lie_numeric(h, fv, p).second); };
        r.oracle.push_back(std::move(gl));
        r.oracle.push_back(std::move(gr));
        r.details = "L_{X_f}h = " + matrix_text(lie.matrix());
        if (auto nz = first_nonzero(res)) {
            fail_on(res(nz->first, nz->second), h.chart().coords, h.dim());
            r.details += "; proposition residual nonzero at " + idx2(nz->first, nz->second);
            return;
        }
        verdict(true);
        r.details += "; proposition residual vanishes";
        compare_equals(lie.matrix(), h.chart().coords, "L_{X_f}h");
    }

    void lift_props() {
        const SymBivector& h = biv(0);
        const ScalarField& f = scal(1);
        LiftReport lr = lift_propositions_check(h, f);
        TangentChart tc(h.chart());
        SkewBivector pi = build_pi(h);
        VectorField xv = vertical_lift(tc, hamiltonian(h, f));
        VectorField ps = pi_sharp(pi, differential(lift(tc, f)));
        VectorField diff = xv - ps;
        const auto& z = tc.total.coords;
        const std::size_t n = h.dim(), N = 2 * n;
        const Expr fv = f.value;

        auto jets_at = [h, fv, z, n, N](const RatVector& p) {
            auto at = seed_jets(space(N, 2), z, p);
            Jet fj = jet_eval(fv, at);
            JetRows hj = jet_rows(h.matrix(), at);
            Jet zero = fj * Rational(0);
            JetRows pij(N, std::vector<Jet>(N, zero));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    pij[i][n + j] = hj[i][j];
                    pij[n + j][i] = hj[i][j] * Rational(-1);
                }
            std::vector<Jet> df;
            for (std::size_t a = 0; a < N; ++a) df.push_back(fj.d(a));
            std::vector<Jet> xf(n, zero);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t a = 0; a < n; ++a) xf[i] += df[a] * hj[a][i];
            return std::tuple{pij, df, xf};
        };

        OracleGroup gv{"vertical_hamiltonian", z, diff.components, {}};
        gv.numeric = [jets_at, n, N](const RatVector& p) {
            auto [pij, df, xf] = jets_at(p);
            Values out;
            for (std::size_t b = 0; b < N; ++b) {
                Rational s = 0;
                for (std::size_t c = 0; c < N; ++c) s += df[c].value() * pij[c][b].value();
                Rational v = b >= n ? xf[b - n].value() : Rational(0);
                out.push_back(Rational(v - s));
            }
            return out;
        };
        OracleGroup gl{"lie_pi", z, flatten(lr.lie_pi), {}};
        gl.numeric = [jets_at, n, N](const RatVector& p) {
            auto [pij, df, xf] = jets_at(p);
            // Y = X_f^h: base components X_f, fiber components zero.
            auto Y = [&](std::size_t a) -> const Jet* { return a < n ? &xf[a] : nullptr; };
            Values out;
            for (std::size_t a = 0; a < N; ++a)
                for (std::size_t b = 0; b < N; ++b) {
                    Rational acc = 0;
                    for (std::size_t l = 0; l < n; ++l) acc += xf[l].value() * pij[a][b].slope(l);
                    for (std::size_t c = 0; c < N; ++c) {
                        if (Y(a)) acc -= pij[c][b].value() * Y(a)->slope(c);
                        if (Y(b)) acc -= pij[a][c].value() * Y(b)->slope(c);
                    }
                    out.push_back(acc);
                }
            return out;
        };
        r.oracle.push_back(std::move(gv));
        r.oracle.push_back(std::move(gl));
        auto b = [](bool v) { return std::string(v ? "true" : "false"); };
        r.details = "X_f^v = Pi_#(d(f o p)) " + b(lr.vertical_is_hamiltonian) + "; L_{X_f^h}Pi = 0 " +
                    b(lr.lie_pi_zero) + "; f in E " + b(lr.in_E) + "; block formula " +
                    b(lr.block_formula_holds);
        verdict(lr.agrees());
        if (!lr.agrees()) {
            if (auto nz = first_nonzero(lr.lie_pi)) fail_on(lr.lie_pi(nz->first, nz->second), z, N);
        }
    }

    // -------------------------------------------------------- algebras

    static Expr basis_combination(const RatVector& v) {
        Expr e;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != 0) e += Expr(v[i]) * Expr::variable("e" + std::to_string(i + 1));
        return e;
    }

    void algebra() {
        const AlgebraSpec& a = alg(0);
        AlgebraReport rep = validate_algebra(a);
        if (!rep.valid()) {
            r.status = Status::Fail;
            r.details = "invalid algebra: " + rep.failure;
            if (rep.witness) {
                auto [i, j, k] = *rep.witness;
                const std::size_t n = a.dim;
                auto e = [n](std::size_t t) {
                    RatVector v(n, Rational(0));
                    v[t - 1] = 1;
                    return v;
                };
                Expr residual;
                if (!rep.commutative) {
                    residual = basis_combination(a.multiply(e(i), e(j))) - basis_combination(a.multiply(e(j), e(i)));
                } else if (!rep.associative) {
                    residual = basis_combination(a.multiply(a.multiply(e(i), e(j)), e(k))) -
                               basis_combination(a.multiply(e(i), a.multiply(e(j), e(k))));
                } else if (!rep.cocycle_symmetric) {
                    residual = Expr(a.cocycle(i - 1, j - 1) - a.cocycle(j - 1, i - 1));
                } else {
                    RatVector uv = a.multiply(e(i), e(j)), vw = a.multiply(e(j), e(k));
                    Rational lhs = 0, rhs = 0;
                    for (std::size_t m2 = 0; m2 < n; ++m2) {
                        lhs += uv[m2] * a.cocycle(m2, k - 1);
                        rhs += a.cocycle(i - 1, m2) * vw[m2];
                    }
                    residual = Expr(Rational(lhs - rhs));
                }
                r.witness = Witness{{std::to_string(i), std::to_string(j), std::to_string(k)}, to_string(residual)};
                r.details += " at basis triple " + idx3(i - 1, j - 1, k - 1);
            }
            return;
        }
        SymBivector h = algebra_to_kv(a);
        r.oracle.push_back(codazzi_group("dual_codazzi", h, codazzi_tensor(h), 1));
        verdict(true);
        r.details = "commutative, associative, cocycle condition holds; dual K-V structure h = " +
                    matrix_text(h.matrix()) + " in (" + join(h.chart().coords) + ")";
    }

    void annihilator() {
        const AlgebraSpec& a = alg(0);
        SubspaceSpec s{a, *c.options.basis, *c.options.kind};
        const bool ideal = s.kind == SubspaceKind::Ideal;
        std::string why = check_subspace(s);
        if (!why.empty()) {
            r.status = Status::Fail;
            r.details = why;
            return;
        }
        Chart chart = dual_chart(a);
        SymBivector h = algebra_to_kv(a, chart);
        AffineSubmanifold n = annihilator_submanifold(s, chart);
        n.name = "Ann";
        std::string what = std::string(ideal ? "ideal" : "subalgebra") + " annihilator of dim " +
                           std::to_string(n.k()) + " in (" + join(chart.coords) + ")";
        if (ideal) {
            submanifold_check(n, h);
        } else {
            coisotropic_check(n, h);
        }
        r.details = what + ": " + r.details;
    }
};

}  // namespace

std::string check_name(const CheckDecl& c) {
    if (c.options.label) return *c.options.label;
    std::string s = c.kind;
    for (const auto& a : c.args) s += " " + a;
    return s;
}

CheckResult run_check(const CheckDecl& c, const Model& m, const CheckContext& ctx) {
    Sampling sampling{c.options.seed ? static_cast<std::uint64_t>(*c.options.seed) : ctx.seed,
                      c.options.samples ? static_cast<std::size_t>(*c.options.samples) : ctx.samples,
                      c.options.points};
    Runner run{c, m, sampling, {}};
    run.r.name = check_name(c);
    run.r.kind = c.kind;
    run.r.expected = c.options.expect.value_or(Expectation::Pass);
    try {
        const std::string& k = c.kind;
        if (k == "codazzi") run.codazzi();
        else if (k == "kv_bracket") run.kv_bracket();
        else if (k == "jacobi_tangent") run.jacobi_tangent();
        else if (k == "rank") run.rank();
        else if (k == "kv_map") run.kv_map();
        else if (k == "theorem1") run.theorem1();
        else if (k == "graph") run.graph();
        else if (k == "preimage_transversal") run.preimage();
        else if (k == "submanifold") run.submanifold_check(run.sub(0), run.biv(1));
        else if (k == "transversal") run.transversal();
        else if (k == "coisotropic") run.coisotropic_check(run.sub(0), run.biv(1));
        else if (k == "conormal") run.conormal();
        else if (k == "in_E") run.in_E();
        else if (k == "special_class") run.special_class();
        else if (k == "lie_derivative") run.lie_derivative();
        else if (k == "lift_props") run.lift_props();
        else if (k == "algebra") run.algebra();
        else if (k == "annihilator") run.annihilator();
        else throw Error(ErrorCode::Semantic, "unknown check kind " + k);
    } catch (const Error& e) {
        run.r.status = Status::Unsupported;
        run.r.witness.reset();
        run.r.oracle.clear();
        run.r.details = e.what();
    }
    if (run.r.expected != Expectation::Pass) run.r.details += " [expected " + to_string(run.r.expected) + "]";
    return std::move(run.r);
}

}  // namespace kvg
