// NEON kernels (2 doubles per vector) for aarch64. Mirrors the AVX2 set; the
// two-lane partials are combined in fixed order.
#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

#include "nlgrad/kernels.h"

namespace nlgrad::kernels {
namespace {

inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

double k_sum(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_wdiff_abs(const double* w, const double* g, std::size_t n, double gx) {
    const float64x2_t vgx = vdupq_n_f64(gx);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vabsq_f64(vsubq_f64(vld1q_f64(g + i), vgx));
        acc = w ? vfmaq_f64(acc, vld1q_f64(w + i), d) : vaddq_f64(acc, d);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += (w ? w[i] : 1.0) * std::abs(g[i] - gx);
    return s;
}

double k_wdiff_sq(const double* w, const double* g, std::size_t n, double gx) {
    const float64x2_t vgx = vdupq_n_f64(gx);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(g + i), vgx);
        const float64x2_t q = vmulq_f64(d, d);
        acc = w ? vfmaq_f64(acc, vld1q_f64(w + i), q) : vaddq_f64(acc, q);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = g[i] - gx;
        s += (w ? w[i] : 1.0) * d * d;
    }
    return s;
}

double k_wdiff_abs2(const double* w, const double* g0, const double* g1, std::size_t n,
                    double gx0, double gx1) {
    const float64x2_t vg0 = vdupq_n_f64(gx0), vg1 = vdupq_n_f64(gx1);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(g0 + i), vg0);
        const float64x2_t d1 = vsubq_f64(vld1q_f64(g1 + i), vg1);
        const float64x2_t norm = vsqrtq_f64(vfmaq_f64(vmulq_f64(d0, d0), d1, d1));
        acc = w ? vfmaq_f64(acc, vld1q_f64(w + i), norm) : vaddq_f64(acc, norm);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d0 = g0[i] - gx0, d1 = g1[i] - gx1;
        s += (w ? w[i] : 1.0) * std::sqrt(d0 * d0 + d1 * d1);
    }
    return s;
}

double k_wdiff_sq2(const double* w, const double* g0, const double* g1, std::size_t n,
                   double gx0, double gx1) {
    const float64x2_t vg0 = vdupq_n_f64(gx0), vg1 = vdupq_n_f64(gx1);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(g0 + i), vg0);
        const float64x2_t d1 = vsubq_f64(vld1q_f64(g1 + i), vg1);
        const float64x2_t q = vfmaq_f64(vmulq_f64(d0, d0), d1, d1);
        acc = w ? vfmaq_f64(acc, vld1q_f64(w + i), q) : vaddq_f64(acc, q);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d0 = g0[i] - gx0, d1 = g1[i] - gx1;
        s += (w ? w[i] : 1.0) * (d0 * d0 + d1 * d1);
    }
    return s;
}

void k_axpy(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void k_clamp_radius(double* v, const double* r, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vr = vld1q_f64(r + i);
        float64x2_t x = vld1q_f64(v + i);
        x = vminq_f64(x, vr);
        x = vmaxq_f64(x, vnegq_f64(vr));
        vst1q_f64(v + i, x);
    }
    for (; i < n; ++i) {
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

const Ops& neon_ops() {
    static const Ops ops{
        "neon",      k_sum,  k_dot,          k_wdiff_abs,    k_wdiff_sq, k_wdiff_abs2,
        k_wdiff_sq2, k_axpy, k_clamp_radius, k_ball_project2,
    };
    return ops;
}

}  // namespace nlgrad::kernels

#endif  // aarch64
