// AVX2/FMA kernels (4 doubles per vector). Four-lane partial accumulators are
// combined in a fixed lane order, so results are reproducible run-to-run on
// the same machine; they are not bitwise equal to the scalar kernels, which
// is why the deterministic mode pins the scalar set.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "nlgrad/kernels.h"

namespace nlgrad::kernels {
namespace {

inline double hsum(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

inline __m256d vabs(__m256d x) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(x, mask);
}

double k_sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_wdiff_abs(const double* w, const double* g, std::size_t n, double gx) {
    const __m256d vgx = _mm256_set1_pd(gx);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    if (w) {
        for (; i + 4 <= n; i += 4) {
            const __m256d d = vabs(_mm256_sub_pd(_mm256_loadu_pd(g + i), vgx));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), d, acc);
        }
    } else {
        for (; i + 4 <= n; i += 4)
            acc = _mm256_add_pd(acc, vabs(_mm256_sub_pd(_mm256_loadu_pd(g + i), vgx)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += (w ? w[i] : 1.0) * std::abs(g[i] - gx);
    return s;
}

double k_wdiff_sq(const double* w, const double* g, std::size_t n, double gx) {
    const __m256d vgx = _mm256_set1_pd(gx);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    if (w) {
        for (; i + 4 <= n; i += 4) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(g + i), vgx);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(d, d), acc);
        }
    } else {
        for (; i + 4 <= n; i += 4) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(g + i), vgx);
            acc = _mm256_fmadd_pd(d, d, acc);
        }
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
    const __m256d vg0 = _mm256_set1_pd(gx0), vg1 = _mm256_set1_pd(gx1);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(g0 + i), vg0);
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(g1 + i), vg1);
        const __m256d norm = _mm256_sqrt_pd(_mm256_fmadd_pd(d1, d1, _mm256_mul_pd(d0, d0)));
        acc = w ? _mm256_fmadd_pd(_mm256_loadu_pd(w + i), norm, acc) : _mm256_add_pd(acc, norm);
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
    const __m256d vg0 = _mm256_set1_pd(gx0), vg1 = _mm256_set1_pd(gx1);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(g0 + i), vg0);
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(g1 + i), vg1);
        const __m256d q = _mm256_fmadd_pd(d1, d1, _mm256_mul_pd(d0, d0));
        acc = w ? _mm256_fmadd_pd(_mm256_loadu_pd(w + i), q, acc) : _mm256_add_pd(acc, q);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d0 = g0[i] - gx0, d1 = g1[i] - gx1;
        s += (w ? w[i] : 1.0) * (d0 * d0 + d1 * d1);
    }
    return s;
}

void k_axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void k_clamp_radius(double* v, const double* r, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vr = _mm256_loadu_pd(r + i);
        const __m256d lo = _mm256_sub_pd(_mm256_setzero_pd(), vr);
        __m256d x = _mm256_loadu_pd(v + i);
        x = _mm256_min_pd(x, vr);
        x = _mm256_max_pd(x, lo);
        _mm256_storeu_pd(v + i, x);
    }
    for (; i < n; ++i) {
        if (v[i] > r[i]) v[i] = r[i];
        else if (v[i] < -r[i]) v[i] = -r[i];
    }
}

void k_ball_project2(double* v0, double* v1, const double* r, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(v0 + i);
        const __m256d b = _mm256_loadu_pd(v1 + i);
        const __m256d vr = _mm256_loadu_pd(r + i);
        const __m256d norm = _mm256_sqrt_pd(_mm256_fmadd_pd(b, b, _mm256_mul_pd(a, a)));
        // factor = norm > r ? r / norm : 1   (norm == 0 implies factor 1)
        const __m256d over = _mm256_cmp_pd(norm, vr, _CMP_GT_OQ);
        const __m256d f = _mm256_blendv_pd(one, _mm256_div_pd(vr, norm), over);
        _mm256_storeu_pd(v0 + i, _mm256_mul_pd(a, f));
        _mm256_storeu_pd(v1 + i, _mm256_mul_pd(b, f));
    }
    for (; i < n; ++i) {
        const double norm = std::sqrt(v0[i] * v0[i] + v1[i] * v1[i]);
        if (norm > r[i]) {
            const double f = r[i] / norm;
            v0[i] *= f;
            v1[i] *= f;
        }
    }
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{
        "avx2",      k_sum,  k_dot,          k_wdiff_abs,    k_wdiff_sq, k_wdiff_abs2,
        k_wdiff_sq2, k_axpy, k_clamp_radius, k_ball_project2,
    };
    return ops;
}

}  // namespace nlgrad::kernels

#endif  // x86_64
