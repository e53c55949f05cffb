#include "nlgrad/weight.h"

#include <cmath>

#include "nlgrad/kernels.h"

namespace nlgrad {

void SubBox::validate_inside(const DomainGrid& g) const {
    if (lo.size() != static_cast<std::size_t>(g.dim()) || hi.size() != lo.size())
        throw config_error("K: axis count does not match the grid");
    for (int a = 0; a < g.dim(); ++a) {
        const double o = g.origin(a), L = g.length(a);
        if (!(lo[a] < hi[a]))
            throw config_error("K: lo must be strictly below hi on every axis");
        if (!(lo[a] > o && hi[a] < o + L))
            throw config_error("K: must lie strictly inside the domain");
    }
}

bool SubBox::contains(const DomainGrid& g, std::size_t point) const {
    for (int a = 0; a < g.dim(); ++a) {
        const double c = g.coord(point, a);
        if (c < lo[a] || c > hi[a]) return false;
    }
    return true;
}

WeightSpec WeightSpec::constant(double c) {
    if (c < 0.0 || !std::isfinite(c)) throw config_error("weight.c: must be finite and >= 0");
    WeightSpec w;
    w.kind_ = Kind::constant;
    w.c_ = c;
    return w;
}

WeightSpec WeightSpec::gaussian(double amplitude, double bandwidth, double floor) {
    if (!(amplitude > 0.0)) throw config_error("weight.amplitude: must be positive");
    if (!(bandwidth > 0.0)) throw config_error("weight.bandwidth: must be positive");
    if (!(floor >= 0.0) || !std::isfinite(floor))
        throw config_error("weight.floor: must be finite and >= 0");
    WeightSpec w;
    w.kind_ = Kind::gaussian;
    w.amplitude_ = amplitude;
    w.bandwidth_ = bandwidth;
    w.floor_ = floor;
    return w;
}

WeightSpec WeightSpec::separable_theta() {
    WeightSpec w;
    w.kind_ = Kind::separable_theta;
    return w;
}

WeightSpec WeightSpec::boundary_singular(double alpha) {
    if (!(alpha > 0.0)) throw config_error("weight.alpha: must be positive");
    WeightSpec w;
    w.kind_ = Kind::boundary_singular;
    w.alpha_ = alpha;
    return w;
}

WeightSpec WeightSpec::tabulated(const DomainGrid& grid, std::vector<double> values) {
    const std::size_t n = grid.points();
    if (values.size() != n * n)
        throw config_error("weight.table: need n*n entries, got " + std::to_string(values.size()));
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const double v = values[x * n + y];
            if (!std::isfinite(v)) throw config_error("weight.table: non-finite entry");
            if (v < 0.0) throw config_error("weight.table: negative entry");
            const double vt = values[y * n + x];
            if (std::abs(v - vt) > 1e-12 * std::max(1.0, std::abs(v)))
                throw config_error("weight.table: asymmetric at pair (" + std::to_string(x) +
                                   "," + std::to_string(y) + ")");
        }
    }
    WeightSpec w;
    w.kind_ = Kind::tabulated;
    w.table_ = std::make_shared<const std::vector<double>>(std::move(values));
    w.table_n_ = n;
    return w;
}

double WeightSpec::param(const char* name) const {
    const std::string k(name);
    if (k == "c") return c_;
    if (k == "amplitude") return amplitude_;
    if (k == "bandwidth") return bandwidth_;
    if (k == "floor") return floor_;
    if (k == "alpha") return alpha_;
    throw config_error("unknown weight parameter: " + k);
}

double WeightSpec::theta_profile(const DomainGrid& g, std::size_t i) {
    double t = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
        const double o = g.origin(a), L = g.length(a);
        const double x = g.coord(i, a);
        t *= (x - o) * (o + L - x) / (L * L);
    }
    return t;
}

namespace {
double dist2(const DomainGrid& g, std::size_t x, std::size_t y) {
    double d2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        const double d = g.coord(x, a) - g.coord(y, a);
        d2 += d * d;
    }
    return d2;
}
}  // namespace

double WeightSpec::evaluate(const DomainGrid& g, std::size_t x, std::size_t y) const {
    switch (kind_) {
        case Kind::constant:
            return c_;
        case Kind::gaussian:
            return std::max(
                amplitude_ * std::exp(-dist2(g, x, y) / (2.0 * bandwidth_ * bandwidth_)),
                floor_);
        case Kind::separable_theta:
            return theta_profile(g, x) + theta_profile(g, y);
        case Kind::boundary_singular:
            return std::pow(g.boundary_distance(x) * g.boundary_distance(y), -alpha_);
        case Kind::tabulated:
            if (g.points() != table_n_)
                throw config_error("weight.table: grid layout does not match the table");
            return (*table_)[x * table_n_ + y];
    }
    return 0.0;
}

void WeightSpec::eval_row_pow(const DomainGrid& g, std::size_t x, double p, std::size_t y0,
                              std::size_t y1, double* out) const {
    const std::size_t n = y1 - y0;
    switch (kind_) {
        case Kind::constant: {
            const double v = (p == 1.0) ? c_ : (p == 2.0 ? c_ * c_ : std::pow(c_, p));
            for (std::size_t i = 0; i < n; ++i) out[i] = v;
            return;
        }
        case Kind::gaussian: {
            const double s2 = 2.0 * bandwidth_ * bandwidth_;
            if (floor_ > 0.0) {
                // clip before raising to the power
                for (std::size_t i = 0; i < n; ++i) {
                    const double v =
                        std::max(amplitude_ * std::exp(-dist2(g, x, y0 + i) / s2), floor_);
                    out[i] = (p == 1.0) ? v : (p == 2.0 ? v * v : std::pow(v, p));
                }
                return;
            }
            // omega^p = a^p exp(-p d^2 / (2 s^2)) evaluated directly
            const double ap = (p == 1.0) ? amplitude_ : std::pow(amplitude_, p);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = ap * std::exp(-p * dist2(g, x, y0 + i) / s2);
            return;
        }
        default: {
            for (std::size_t i = 0; i < n; ++i) out[i] = evaluate(g, x, y0 + i);
            if (p == 1.0) return;
            if (p == 2.0) {
                for (std::size_t i = 0; i < n; ++i) out[i] *= out[i];
            } else {
                for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(out[i], p);
            }
            return;
        }
    }
}

std::pair<double, double> WeightSpec::range(const DomainGrid& g) const {
    const std::size_t n = g.points();
    double lo = evaluate(g, 0, 0), hi = lo;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const double v = evaluate(g, x, y);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

ScalarField weight_f_p(const WeightSpec& w, const DomainGrid& g, double p) {
    if (!is_pinf(p) && !(p >= 1.0)) throw config_error("p: must be >= 1 or inf");
    const std::size_t n = g.points();
    const double mu = g.cell_measure();
    ScalarField f(g);
    kernels::parallel_rows(n, [&](std::size_t x) {
        std::vector<double> row(n);
        if (is_pinf(p)) {
            w.eval_row_pow(g, x, 1.0, 0, n, row.data());
            double m = 0.0;
            for (double v : row) m = std::max(m, v);
            f[x] = m;
        } else {
            w.eval_row_pow(g, x, p, 0, n, row.data());
            f[x] = kernels::active().sum(row.data(), n) * mu;
        }
    });
    return f;
}

namespace {
struct ResolutionStats {
    double inf_omega, sup_omega, sup_f_p, int_K_f_p;
    ScalarField f;
};

ResolutionStats stats_at(const WeightSpec& w, const DomainGrid& g, double p, const SubBox& K) {
    auto [lo, hi] = w.range(g);
    ScalarField f = weight_f_p(w, g, p);
    double supf = 0.0, intK = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        supf = std::max(supf, f[i]);
        if (K.contains(g, i)) intK += f[i];
    }
    intK *= g.cell_measure();
    return {lo, hi, supf, intK, std::move(f)};
}

bool grew(double base, double refined) { return refined > kGrowthRatio * base; }
}  // namespace

WeightDiagnostics classify_embeddings(const WeightSpec& w, const DomainGrid& g, double p,
                                      const SubBox& K) {
    K.validate_inside(g);
    ResolutionStats base = stats_at(w, g, p, K);

    WeightDiagnostics d{.f_p_values = base.f};
    d.inf_omega = base.inf_omega;
    d.sup_omega = base.sup_omega;
    d.sup_f_p = base.sup_f_p;
    d.int_K_f_p = base.int_K_f_p;

    if (!w.refinable()) {
        d.refinement_checked = false;
        d.inf_omega_refined = base.inf_omega;
        d.sup_omega_refined = base.sup_omega;
        d.sup_f_p_refined = base.sup_f_p;
        d.int_K_f_p_refined = base.int_K_f_p;
        d.embedding_class.lower_bounded = base.inf_omega > 0.0;
        d.embedding_class.f_p_bounded = true;
        d.embedding_class.test_functions_nontrivial = true;
        return d;
    }

    std::vector<std::size_t> dims2;
    std::vector<double> spacing2, origin2;
    for (int a = 0; a < g.dim(); ++a) {
        dims2.push_back(g.extent(a) * 2);
        spacing2.push_back(g.spacing(a) / 2.0);
        origin2.push_back(g.origin(a));
    }
    const DomainGrid g2(dims2, spacing2, origin2);
    ResolutionStats fine = stats_at(w, g2, p, K);

    d.inf_omega_refined = fine.inf_omega;
    d.sup_omega_refined = fine.sup_omega;
    d.sup_f_p_refined = fine.sup_f_p;
    d.int_K_f_p_refined = fine.int_K_f_p;
    d.sup_omega_unbounded = grew(base.sup_omega, fine.sup_omega);

    // The lower bound k <= omega fails when inf omega collapses toward 0
    // under refinement (or is already 0).
    d.embedding_class.lower_bounded =
        fine.inf_omega > 0.0 && base.inf_omega <= kGrowthRatio * fine.inf_omega;
    d.embedding_class.f_p_bounded = !grew(base.sup_f_p, fine.sup_f_p);
    d.embedding_class.test_functions_nontrivial = !grew(base.int_K_f_p, fine.int_K_f_p);
    return d;
}

}  // namespace nlgrad
