// Scalar reference kernels. These define the semantics; every SIMD variant is
// equivalence-tested against them.
#include <cmath>

#include "nlgrad/kernels.h"

namespace nlgrad::kernels {
namespace {

double k_sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_wdiff_abs(const double* w, const double* g, std::size_t n, double gx) {
    double s = 0.0;
    if (w) {
        for (std::size_t i = 0; i < n; ++i) s += w[i] * std::abs(g[i] - gx);
    } else {
        for (std::size_t i = 0; i < n; ++i) s += std::abs(g[i] - gx);
    }
    return s;
}

double k_wdiff_sq(const double* w, const double* g, std::size_t n, double gx) {
    double s = 0.0;
    if (w) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = g[i] - gx;
            s += w[i] * d * d;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = g[i] - gx;
            s += d * d;
        }
    }
    return s;
}

double k_wdiff_abs2(const double* w, const double* g0, const double* g1, std::size_t n,
                    double gx0, double gx1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d0 = g0[i] - gx0;
        const double d1 = g1[i] - gx1;
        const double norm = std::sqrt(d0 * d0 + d1 * d1);
        s += w ? w[i] * norm : norm;
    }
    return s;
}

double k_wdiff_sq2(const double* w, const double* g0, const double* g1, std::size_t n,
                   double gx0, double gx1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d0 = g0[i] - gx0;
        const double d1 = g1[i] - gx1;
        const double q = d0 * d0 + d1 * d1;
        s += w ? w[i] * q : q;
    }
    return s;
}

void k_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void k_clamp_radius(double* v, const double* r, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > r[i]) v[i] = r[i];
        else if (v[i] < -r[i]) v[i] = -r[i];
    }
}

void k_ball_project2(double* v0, double* v1, const double* r, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double norm = std::sqrt(v0[i] * v0[i] + v1[i] * v1[i]);
        if (norm > r[i]) {
            const double f = r[i] / norm;
            v0[i] *= f;
            v1[i] *= f;
        }
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{
        "scalar", k_sum,  k_dot,          k_wdiff_abs,    k_wdiff_sq, k_wdiff_abs2,
        k_wdiff_sq2, k_axpy, k_clamp_radius, k_ball_project2,
    };
    return ops;
}

}  // namespace nlgrad::kernels
