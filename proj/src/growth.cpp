// Domain-growth scans: the same compactly supported field on a ladder of
// growing 1D domains at fixed spacing, with the affine control and the
// f_p-integrability cross-check.
#include "nlgrad/growth.h"

#include <cmath>
#include <cstdint>
#include <cstring>

#include "nlgrad/nonlocal.h"

namespace nlgrad {

namespace {

DomainGrid schedule_grid(double length, double h) {
    if (!(h > 0.0)) throw config_error("h: must be positive");
    const double steps = length / h;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    if (n == 0 || std::abs(steps - static_cast<double>(n)) > 1e-9)
        throw config_error("lengths: every domain length must be a multiple of h");
    return DomainGrid::interval(n, length);
}

// smooth compactly supported profile, identical samples on every schedule grid
ScalarField bump_field(const DomainGrid& g, double center, double radius) {
    ScalarField u(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double t = (g.coord(i, 0) - center) / radius;
        if (std::abs(t) < 1.0) {
            const double c = std::cos(0.5 * M_PI * t);
            u[i] = c * c;
        }
    }
    return u;
}

bool ratio_above(double prev, double cur, double threshold) {
    if (prev <= 0.0) return false;  // nothing to grow from
    return cur / prev > threshold;
}

}  // namespace

GrowthResult growth_scan(const GrowthExperiment& exp, const WeightSpec& w, double p) {
    if (!(p >= 1.0) || is_pinf(p)) throw config_error("p: growth scan needs finite p >= 1");
    if (exp.lengths.empty()) throw config_error("lengths: schedule must be nonempty");
    for (std::size_t k = 1; k < exp.lengths.size(); ++k)
        if (!(exp.lengths[k] > exp.lengths[k - 1]))
            throw config_error("lengths: schedule must be strictly increasing");

    const double lmin = exp.lengths.front();
    if (exp.profile == GrowthProfile::bump) {
        // one full cell of margin on both sides of the support
        if (!(exp.support_center - exp.support_radius >= exp.h &&
              exp.support_center + exp.support_radius <= lmin - exp.h))
            throw config_error("support: the bump must sit inside the smallest domain "
                               "with at least one cell of margin");
    }

    GrowthResult out;
    for (double L : exp.lengths) {
        const DomainGrid g = schedule_grid(L, exp.h);
        ScalarField u0(g);
        if (exp.profile == GrowthProfile::affine) {
            // Per-point rounding of slope * x_i would leave ulp-level jitter in
            // the forward differences. Clearing the low mantissa bits of the
            // per-cell step makes every product step * i exact (i < 2^11), so
            // the field is affine to the last bit and the scan returns an
            // exact 0 rather than rounding noise.
            double step = exp.affine_slope * g.spacing(0);
            std::uint64_t bits;
            std::memcpy(&bits, &step, sizeof bits);
            bits &= ~((std::uint64_t{1} << 11) - 1);
            std::memcpy(&step, &bits, sizeof bits);
            for (std::size_t i = 0; i < g.points(); ++i)
                u0[i] = step * static_cast<double>(i);
        } else {
            u0 = bump_field(g, exp.support_center, exp.support_radius);
        }
        const double value = seminorm_pow(u0, w, p);
        out.rows.push_back({L, g.measure(), value, value / g.measure()});
    }

    const std::size_t m = out.rows.size();
    out.all_zero = true;
    out.strictly_increasing = m >= 2;
    for (std::size_t k = 0; k < m; ++k) {
        if (out.rows[k].seminorm_pow_value != 0.0) out.all_zero = false;
        if (k > 0 && !(out.rows[k].seminorm_pow_value > out.rows[k - 1].seminorm_pow_value))
            out.strictly_increasing = false;
    }
    if (m >= 3) {
        double lo = out.rows[m - 3].ratio, hi = lo;
        for (std::size_t k = m - 2; k < m; ++k) {
            lo = std::min(lo, out.rows[k].ratio);
            hi = std::max(hi, out.rows[k].ratio);
        }
        out.ratio_stable_last3 = lo > 0.0 && (hi - lo) <= 0.1 * lo;
    }
    out.verdict = out.strictly_increasing && out.ratio_stable_last3;
    return out;
}

TestFnResult test_function_criterion(const WeightSpec& w, const SubBox& K,
                                     const std::vector<double>& lengths, double h, double p) {
    if (!(p >= 1.0) || is_pinf(p)) throw config_error("p: criterion needs finite p >= 1");
    if (lengths.empty()) throw config_error("lengths: schedule must be nonempty");
    for (std::size_t k = 1; k < lengths.size(); ++k)
        if (!(lengths[k] > lengths[k - 1]))
            throw config_error("lengths: schedule must be strictly increasing");

    const DomainGrid smallest = schedule_grid(lengths.front(), h);
    K.validate_inside(smallest);
    if (K.lo.size() != 1) throw config_error("K: 1D sub-intervals only");
    const double center = 0.5 * (K.lo[0] + K.hi[0]);
    const double radius = 0.45 * (K.hi[0] - K.lo[0]);
    if (!(radius > h)) throw config_error("K: too narrow to carry a resolvable bump");

    TestFnResult out;
    for (double L : lengths) {
        const DomainGrid g = schedule_grid(L, h);
        const ScalarField f = weight_f_p(w, g, p);
        double intK = 0.0;
        bool hit = false;
        for (std::size_t i = 0; i < g.points(); ++i) {
            if (K.contains(g, i)) {
                intK += f[i];
                hit = true;
            }
        }
        intK *= g.cell_measure();
        if (!hit) throw config_error("K: contains no cell centers at this resolution");

        const ScalarField bump = bump_field(g, center, radius);
        out.rows.push_back({L, g.measure(), intK, seminorm_pow(bump, w, p)});
    }

    const std::size_t m = out.rows.size();
    if (m >= 2) {
        out.fp_divergent =
            ratio_above(out.rows[m - 2].int_K_fp, out.rows[m - 1].int_K_fp, kGrowthRatio);
        out.bump_divergent = ratio_above(out.rows[m - 2].bump_seminorm_pow,
                                         out.rows[m - 1].bump_seminorm_pow, kGrowthRatio);
    }
    out.lockstep = out.fp_divergent == out.bump_divergent;
    out.nontrivial_predicted = !out.fp_divergent;
    return out;
}

}  // namespace nlgrad
