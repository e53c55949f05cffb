#include "nlgrad/nonlocal.h"

#include <cmath>

#include "nlgrad/kernels.h"

namespace nlgrad {

PairField nonlocal_gradient(const ScalarField& u, const WeightSpec& w, const PairMask& mask) {
    const DomainGrid& g = u.grid();
    const VectorField G = local_gradient(u);
    const std::size_t n = g.points();
    PairField out(g, g.dim(), mask);
    for (int c = 0; c < g.dim(); ++c) {
        const double* Gc = G.comp_data(c);
        kernels::parallel_rows(n, [&, c](std::size_t x) {
            double* row = out.row(x, c);
            std::vector<double> wrow(n);
            mask_row_blocks(g, mask, x, [&](std::size_t b, std::size_t e) {
                w.eval_row_pow(g, x, 1.0, b, e, wrow.data() + b);
                for (std::size_t y = b; y < e; ++y) row[y] = wrow[y] * (Gc[y] - Gc[x]);
            });
        });
    }
    return out;
}

ScalarField pair_divergence_1(const PairField& psi) {
    const DomainGrid& g = psi.grid();
    const std::size_t n = g.points();
    const double mu = g.cell_measure();
    // <grad_1 u, psi> = sum_z G(z) . (colsum(z) - rowsum(z)) mu^2, so the pair
    // inner product against grad_1 u is the mu-weighted vector inner product
    // against V(z) = (colsum(z) - rowsum(z)) mu; the exact adjoint is then the
    // local divergence of V.
    VectorField V(g, 0.0);
    for (int c = 0; c < psi.components(); ++c) {
        double* Vc = V.comp_data(c);
        for (std::size_t x = 0; x < n; ++x) {
            const double* row = psi.row(x, c);
            double rowsum = 0.0;
            mask_row_blocks(g, psi.mask(), x, [&](std::size_t b, std::size_t e) {
                for (std::size_t y = b; y < e; ++y) {
                    rowsum += row[y];
                    Vc[y] += row[y];  // accumulates colsum over x
                }
            });
            Vc[x] -= rowsum;
        }
        for (std::size_t z = 0; z < n; ++z) Vc[z] *= mu;
    }
    return local_divergence(V);
}

ScalarField nonlocal_divergence(const PairField& phi, const WeightSpec& w) {
    const DomainGrid& g = phi.grid();
    const std::size_t n = g.points();
    PairField wphi(g, phi.components(), phi.mask());
    for (int c = 0; c < phi.components(); ++c) {
        kernels::parallel_rows(n, [&, c](std::size_t x) {
            const double* src = phi.row(x, c);
            double* dst = wphi.row(x, c);
            std::vector<double> wrow(n);
            mask_row_blocks(g, phi.mask(), x, [&](std::size_t b, std::size_t e) {
                w.eval_row_pow(g, x, 1.0, b, e, wrow.data() + b);
                for (std::size_t y = b; y < e; ++y) dst[y] = wrow[y] * src[y];
            });
        });
    }
    return pair_divergence_1(wphi);
}

double seminorm_pow(const ScalarField& u, const WeightSpec& w, double p, const PairMask& mask) {
    if (!is_pinf(p) && !(p >= 1.0)) throw config_error("p: must be >= 1 or inf");
    const DomainGrid& g = u.grid();
    const VectorField G = local_gradient(u);
    const std::size_t n = g.points();
    const double mu = g.cell_measure();
    const auto& ops = kernels::active();
    const double* G0 = G.comp_data(0);
    const double* G1 = g.dim() == 2 ? G.comp_data(1) : nullptr;

    if (is_pinf(p)) {
        // discrete esssup: max over active pairs of omega |G(y) - G(x)|
        std::vector<double> rowmax(n, 0.0);
        kernels::parallel_rows(n, [&](std::size_t x) {
            std::vector<double> wrow(n);
            double m = 0.0;
            mask_row_blocks(g, mask, x, [&](std::size_t b, std::size_t e) {
                w.eval_row_pow(g, x, 1.0, b, e, wrow.data() + b);
                for (std::size_t y = b; y < e; ++y) {
                    double d;
                    if (G1) {
                        const double d0 = G0[y] - G0[x], d1 = G1[y] - G1[x];
                        d = std::sqrt(d0 * d0 + d1 * d1);
                    } else {
                        d = std::abs(G0[y] - G0[x]);
                    }
                    m = std::max(m, wrow[y] * d);
                }
            });
            rowmax[x] = m;
        });
        double m = 0.0;
        for (double v : rowmax) m = std::max(m, v);
        return m;
    }

    const double total = kernels::parallel_row_sum(n, [&](std::size_t x) {
        std::vector<double> wrow(n);
        double s = 0.0;
        mask_row_blocks(g, mask, x, [&](std::size_t b, std::size_t e) {
            w.eval_row_pow(g, x, p, b, e, wrow.data() + b);
            const std::size_t len = e - b;
            if (p == 1.0) {
                s += G1 ? ops.wdiff_abs2(wrow.data() + b, G0 + b, G1 + b, len, G0[x], G1[x])
                        : ops.wdiff_abs(wrow.data() + b, G0 + b, len, G0[x]);
            } else if (p == 2.0) {
                s += G1 ? ops.wdiff_sq2(wrow.data() + b, G0 + b, G1 + b, len, G0[x], G1[x])
                        : ops.wdiff_sq(wrow.data() + b, G0 + b, len, G0[x]);
            } else {
                for (std::size_t y = b; y < e; ++y) {
                    double d;
                    if (G1) {
                        const double d0 = G0[y] - G0[x], d1 = G1[y] - G1[x];
                        d = std::sqrt(d0 * d0 + d1 * d1);
                    } else {
                        d = std::abs(G0[y] - G0[x]);
                    }
                    s += wrow[y] * std::pow(d, p);
                }
            }
        });
        return s;
    });
    return total * mu * mu;
}

double seminorm(const ScalarField& u, const WeightSpec& w, double p, const PairMask& mask) {
    const double sp = seminorm_pow(u, w, p, mask);
    if (is_pinf(p) || p == 1.0) return sp;
    return std::pow(sp, 1.0 / p);
}

double nltv(const ScalarField& u, const WeightSpec& w, const PairMask& mask) {
    return seminorm_pow(u, w, 1.0, mask);
}

DualCheckReport nltv_dual_check(const ScalarField& u, const WeightSpec& w, std::size_t trials,
                                Rng& rng) {
    const DomainGrid& g = u.grid();
    const std::size_t n = g.points();
    const int N = g.dim();
    const VectorField G = local_gradient(u);

    DualCheckReport rep;
    rep.trials = trials;
    rep.formula = nltv(u, w);

    // Closed-form maximizer: phi* = -omega * D/|D| on pairs with D != 0.
    PairField phistar(g, N);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            double d[2] = {G.comp(y, 0) - G.comp(x, 0), 0.0};
            if (N == 2) d[1] = G.comp(y, 1) - G.comp(x, 1);
            const double norm = N == 2 ? std::sqrt(d[0] * d[0] + d[1] * d[1]) : std::abs(d[0]);
            if (norm == 0.0) continue;
            const double wxy = w.evaluate(g, x, y);
            for (int c = 0; c < N; ++c) phistar.comp(x, y, c) = -wxy * d[c] / norm;
        }
    }
    rep.maximizer_value = inner(u, pair_divergence_1(phistar));
    rep.attained =
        std::abs(rep.maximizer_value - rep.formula) <= 1e-10 * std::max(1.0, std::abs(rep.formula));

    // Random feasible fields |phi| <= omega never beat the formula.
    rep.no_violation = true;
    rep.best_feasible = 0.0;
    PairField phi(g, N);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = 0; y < n; ++y) {
                double v[2] = {rng.uniform(-1.0, 1.0), 0.0};
                if (N == 2) v[1] = rng.uniform(-1.0, 1.0);
                const double norm = N == 2 ? std::sqrt(v[0] * v[0] + v[1] * v[1]) : std::abs(v[0]);
                const double wxy = w.evaluate(g, x, y);
                const double f = norm > 1.0 ? wxy / norm : wxy;
                for (int c = 0; c < N; ++c) phi.comp(x, y, c) = f * v[c];
            }
        }
        const double val = inner(u, pair_divergence_1(phi));
        rep.best_feasible = std::max(rep.best_feasible, val);
        if (val > rep.formula + 1e-10 * std::max(1.0, std::abs(rep.formula)))
            rep.no_violation = false;
    }
    return rep;
}

std::vector<bool> difference_support(const ScalarField& u) {
    const VectorField G = local_gradient(u);
    std::vector<bool> s(u.size(), false);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] != 0.0) s[i] = true;
        for (int c = 0; c < G.components(); ++c)
            if (G.comp(i, c) != 0.0) s[i] = true;
    }
    return s;
}

InteractionSplit interaction_split(const ScalarField& u, const std::vector<bool>& support,
                                   const WeightSpec& w, double p) {
    if (!(p >= 1.0)) throw config_error("p: must be >= 1");
    const DomainGrid& g = u.grid();
    const std::size_t n = g.points();
    if (support.size() != n) throw config_error("support mask: size mismatch");
    const VectorField G = local_gradient(u);
    for (std::size_t i = 0; i < n; ++i) {
        if (support[i]) continue;
        bool clean = u[i] == 0.0;
        for (int c = 0; c < G.components(); ++c) clean = clean && G.comp(i, c) == 0.0;
        if (!clean)
            throw config_error(
                "support mask must cover the difference support of u (u and its local "
                "gradient must vanish outside the mask)");
    }

    const double mu = g.cell_measure();
    InteractionSplit out;
    std::vector<double> wrow(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (!support[x]) continue;
        w.eval_row_pow(g, x, p, 0, n, wrow.data());
        double inside = 0.0, far_weight = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (support[y]) {
                double d;
                if (g.dim() == 2) {
                    const double d0 = G.comp(y, 0) - G.comp(x, 0);
                    const double d1 = G.comp(y, 1) - G.comp(x, 1);
                    d = std::sqrt(d0 * d0 + d1 * d1);
                } else {
                    d = std::abs(G.comp(y, 0) - G.comp(x, 0));
                }
                inside += wrow[y] * (p == 1.0 ? d : (p == 2.0 ? d * d : std::pow(d, p)));
            } else {
                far_weight += wrow[y];
            }
        }
        const double gnorm = G.norm_at(x);
        const double gpow = p == 1.0 ? gnorm : (p == 2.0 ? gnorm * gnorm : std::pow(gnorm, p));
        out.inside += inside * mu * mu;
        out.cross += 2.0 * gpow * (far_weight * mu) * mu;
    }
    return out;
}

}  // namespace nlgrad
