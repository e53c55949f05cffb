#include "nlgrad/affine.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlgrad/nonlocal.h"

namespace nlgrad {

namespace {

constexpr double kEta = 1e-12;         // singularity guard for 1/|r| weights
constexpr double kStepTol = 1e-10;     // iteration stops below this step size
constexpr std::size_t kMaxIter = 100000;

double objective_at(const VectorField& G, const std::vector<double>& a, double p) {
    const DomainGrid& g = G.grid();
    const int N = g.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        double r2 = 0.0;
        for (int c = 0; c < N; ++c) {
            const double d = G.comp_data(c)[i] - a[c];
            r2 += d * d;
        }
        s += p == 2.0 ? r2 : std::pow(std::sqrt(r2), p);
    }
    return s * g.cell_measure();
}

[[noreturn]] void raise_nonconvergence(const char* method, const std::vector<double>& a,
                                       double value) {
    std::ostringstream os;
    os << method << ": no convergence after " << kMaxIter << " iterations; best iterate (";
    for (std::size_t c = 0; c < a.size(); ++c) os << (c ? ", " : "") << a[c];
    os << ") with value " << value;
    throw numerical_error(os.str());
}

AffineReduction weiszfeld(const VectorField& G) {
    const DomainGrid& g = G.grid();
    const int N = g.dim();
    const std::size_t n = g.points();
    double hmin = g.spacing(0);
    for (int axis = 1; axis < N; ++axis) hmin = std::min(hmin, g.spacing(axis));

    // start from the mean
    std::vector<double> a(N, 0.0);
    for (int c = 0; c < N; ++c) {
        const double* gc = G.comp_data(c);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += gc[i];
        a[c] = s / static_cast<double>(n);
    }

    std::vector<double> next(N, 0.0);
    for (std::size_t it = 1; it <= kMaxIter; ++it) {
        double wsum = 0.0;
        std::fill(next.begin(), next.end(), 0.0);
        bool on_data_point = false;
        for (std::size_t i = 0; i < n; ++i) {
            double r2 = 0.0;
            for (int c = 0; c < N; ++c) {
                const double d = G.comp_data(c)[i] - a[c];
                r2 += d * d;
            }
            const double r = std::sqrt(r2);
            if (r < kEta) on_data_point = true;
            const double w = 1.0 / std::max(r, kEta);
            wsum += w;
            for (int c = 0; c < N; ++c) next[c] += w * G.comp_data(c)[i];
        }
        for (int c = 0; c < N; ++c) next[c] /= wsum;

        if (on_data_point) {
            // nudge off the anchor so the 1/r weights stay meaningful
            for (int c = 0; c < N; ++c) next[c] += 1e-10 * hmin;
        }
        double step2 = 0.0;
        for (int c = 0; c < N; ++c) {
            const double d = next[c] - a[c];
            step2 += d * d;
        }
        a = next;
        if (std::sqrt(step2) < kStepTol)
            return {a, objective_at(G, a, 1.0), it, true};
    }
    raise_nonconvergence("geometric median", a, objective_at(G, a, 1.0));
}

AffineReduction damped_newton(const VectorField& G, double p) {
    const DomainGrid& g = G.grid();
    const int N = g.dim();
    const std::size_t n = g.points();

    std::vector<double> a(N, 0.0);
    for (int c = 0; c < N; ++c) {
        const double* gc = G.comp_data(c);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += gc[i];
        a[c] = s / static_cast<double>(n);
    }
    double fa = objective_at(G, a, p);

    std::vector<double> grad(N), dir(N), trial(N);
    for (std::size_t it = 1; it <= kMaxIter; ++it) {
        // gradient and Hessian of sum |r|^p at the current point (mu factored out)
        std::fill(grad.begin(), grad.end(), 0.0);
        double H[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        for (std::size_t i = 0; i < n; ++i) {
            double r[2] = {0.0, 0.0};
            double r2 = 0.0;
            for (int c = 0; c < N; ++c) {
                r[c] = G.comp_data(c)[i] - a[c];
                r2 += r[c] * r[c];
            }
            const double rn = std::max(std::sqrt(r2), kEta);
            const double rp2 = std::pow(rn, p - 2.0);
            for (int c = 0; c < N; ++c) grad[c] -= p * rp2 * r[c];
            const double rp4 = rp2 / (rn * rn);
            for (int c = 0; c < N; ++c) {
                H[c][c] += p * rp2;
                for (int d = 0; d < N; ++d) H[c][d] += p * (p - 2.0) * rp4 * r[c] * r[d];
            }
        }

        if (N == 1) {
            dir[0] = -grad[0] / std::max(H[0][0], kEta);
        } else {
            const double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
            if (std::abs(det) < kEta) {
                const double scale = std::max(H[0][0] + H[1][1], kEta);
                dir[0] = -grad[0] / scale;
                dir[1] = -grad[1] / scale;
            } else {
                dir[0] = (-grad[0] * H[1][1] + grad[1] * H[0][1]) / det;
                dir[1] = (-grad[1] * H[0][0] + grad[0] * H[1][0]) / det;
            }
        }

        // halving line search
        double t = 1.0;
        double ft = fa;
        for (int ls = 0; ls < 60; ++ls) {
            for (int c = 0; c < N; ++c) trial[c] = a[c] + t * dir[c];
            ft = objective_at(G, trial, p);
            if (ft <= fa) break;
            t *= 0.5;
        }
        double step2 = 0.0;
        for (int c = 0; c < N; ++c) {
            const double d = t * dir[c];
            step2 += d * d;
            a[c] += d;
        }
        fa = std::min(ft, fa);
        if (std::sqrt(step2) < kStepTol) return {a, objective_at(G, a, p), it, true};
    }
    raise_nonconvergence("damped Newton", a, fa);
}

}  // namespace

AffineReduction affine_reduced_seminorm(const ScalarField& u, double p) {
    if (!(p >= 1.0)) throw config_error("p: must be >= 1");
    const VectorField G = local_gradient(u);
    const DomainGrid& g = u.grid();
    const int N = g.dim();

    if (p == 2.0) {
        std::vector<double> a(N, 0.0);
        for (int c = 0; c < N; ++c) {
            const double* gc = G.comp_data(c);
            double s = 0.0;
            for (std::size_t i = 0; i < g.points(); ++i) s += gc[i];
            a[c] = s / static_cast<double>(g.points());  // mu cancels: uniform grid
        }
        return {a, objective_at(G, a, 2.0), 0, true};
    }
    if (p == 1.0) return weiszfeld(G);
    return damped_newton(G, p);
}

SandwichReport sandwich_check(const ScalarField& u, double p) {
    const AffineReduction red = affine_reduced_seminorm(u, p);
    const DomainGrid& g = u.grid();
    const WeightSpec unit = WeightSpec::constant(1.0);

    SandwichReport rep;
    rep.lower = g.measure() * red.residual;
    rep.middle = seminorm_pow(u, unit, p);
    rep.upper = std::pow(2.0, p) * g.measure() * red.residual;

    const double scale = std::max({std::abs(rep.lower), std::abs(rep.middle),
                                   std::abs(rep.upper), 1.0});
    const double slack = 1e-9 * scale;
    rep.ok = rep.lower <= rep.middle + slack && rep.middle <= rep.upper + slack;
    if (p == 1.0) {
        rep.nltv_value = nltv(u, unit);
        rep.ok = rep.ok && std::abs(rep.nltv_value - rep.middle) <= slack &&
                 rep.lower <= rep.nltv_value + slack && rep.nltv_value <= rep.upper + slack;
    } else {
        rep.nltv_value = rep.middle;
    }
    return rep;
}

VectorField theta_reconstruction(const ScalarField& u, const ScalarField& theta) {
    const DomainGrid& g = u.grid();
    if (&theta.grid() != &g && theta.grid().points() != g.points())
        throw config_error("theta: must live on the same grid as u");
    const double T = integrate(theta);
    const double tnorm = std::sqrt(inner(theta, theta));
    if (!(std::abs(T) > 1e-12 * tnorm))
        throw config_error("theta: integral too close to zero for reconstruction");

    const VectorField G = local_gradient(u);
    const VectorField Gt = local_gradient(theta);
    const double mu = g.cell_measure();
    const int N = g.dim();
    const std::size_t n = g.points();

    VectorField out(g);
    for (int c = 0; c < N; ++c) {
        // the x-independent part: sum_y [u dtheta_c + G_c theta] mu
        double fixed = 0.0;
        double theta_mass = 0.0;
        const double* gc = G.comp_data(c);
        const double* gtc = Gt.comp_data(c);
        for (std::size_t y = 0; y < n; ++y) {
            fixed += (u[y] * gtc[y] + gc[y] * theta[y]) * mu;
            theta_mass += theta[y] * mu;
        }
        double* oc = out.comp_data(c);
        for (std::size_t x = 0; x < n; ++x)
            oc[x] = -(fixed - gc[x] * theta_mass) / T;
    }
    return out;
}

EquivalenceConstants equivalence_constants(const ScalarField& theta, double p) {
    if (!(p >= 1.0)) throw config_error("p: must be >= 1");
    const DomainGrid& g = theta.grid();
    const double T = integrate(theta);
    const double tnorm = std::sqrt(inner(theta, theta));
    if (!(std::abs(T) > 1e-12 * tnorm))
        throw config_error("theta: integral too close to zero");

    EquivalenceConstants out;
    out.theta_integral = T;
    for (std::size_t i = 0; i < g.points(); ++i)
        out.theta_sup = std::max(out.theta_sup, std::abs(theta[i]));
    const VectorField Gt = local_gradient(theta);
    for (std::size_t i = 0; i < g.points(); ++i)
        out.grad_theta_sup = std::max(out.grad_theta_sup, Gt.norm_at(i));

    const double vol = g.measure();
    out.C_p_theta = std::pow(2.0 * vol, p - 1.0) / std::pow(std::abs(T), p) *
                    std::max(vol * std::pow(out.grad_theta_sup, p), std::pow(out.theta_sup, p));
    out.lower_bound = std::pow(2.0, p - 1.0) / vol;
    out.bound_ok = out.C_p_theta >= out.lower_bound * (1.0 - 1e-9);
    return out;
}

}  // namespace nlgrad
