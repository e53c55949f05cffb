// Data-parallel inner loops behind the pair reductions and solver updates.
// A scalar reference implementation always exists; an AVX2 variant (and a
// NEON variant on aarch64) is selected at runtime when the CPU supports it.
// All variants must agree with the scalar kernels to 1e-12 relative; the
// deterministic execution mode pins the scalar kernels so report bytes do not
// depend on the host CPU.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nlgrad::kernels {

struct Ops {
    const char* name;

    double (*sum)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);

    // Row reductions for pair sums with a fixed left endpoint x:
    //   sum_y w[y] * |g[y] - gx|      and      sum_y w[y] * (g[y] - gx)^2
    // (w may be null, meaning w == 1). The two-component variants take the
    // Euclidean norm across (g0, g1).
    double (*wdiff_abs)(const double* w, const double* g, std::size_t n, double gx);
    double (*wdiff_sq)(const double* w, const double* g, std::size_t n, double gx);
    double (*wdiff_abs2)(const double* w, const double* g0, const double* g1, std::size_t n,
                         double gx0, double gx1);
    double (*wdiff_sq2)(const double* w, const double* g0, const double* g1, std::size_t n,
                        double gx0, double gx1);

    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // v[i] <- clamp(v[i], -r[i], r[i])  (per-pair interval projection)
    void (*clamp_radius)(double* v, const double* r, std::size_t n);
    // Euclidean ball projection per entry: (v0,v1) scaled onto radius r[i]
    void (*ball_project2)(double* v0, double* v1, const double* r, std::size_t n);
};

// Scalar reference kernels (always available).
const Ops& scalar_ops();

// Kernels for the current execution mode. Defaults to the best variant the
// CPU supports; select() narrows or widens the choice.
const Ops& active();

// mode: "auto" | "scalar" | "avx2" | "neon". Unknown or unsupported modes
// fall back to scalar and return false.
bool select(const std::string& mode);

// Threads used by row-parallel reductions (per-row partials are merged in row
// order, so the thread count never changes results). Clamped to >= 1.
void set_threads(int t);
int threads();

namespace detail {
void run_chunked(std::size_t rows, void* ctx, void (*fn)(void*, std::size_t, std::size_t));
}

// Evaluate fn(x) for every row x in [0, rows), possibly on several threads,
// and return the sum of the per-row values accumulated in row order. The
// result is bitwise independent of the thread count.
template <class RowFn>
double parallel_row_sum(std::size_t rows, RowFn fn) {
    std::vector<double> partial(rows, 0.0);
    struct Ctx {
        std::vector<double>* partial;
        RowFn* fn;
    } ctx{&partial, &fn};
    detail::run_chunked(rows, &ctx, [](void* c, std::size_t b, std::size_t e) {
        auto* cc = static_cast<Ctx*>(c);
        for (std::size_t x = b; x < e; ++x) (*cc->partial)[x] = (*cc->fn)(x);
    });
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

// Same chunked dispatch for row loops that write disjoint per-row outputs.
template <class RowFn>
void parallel_rows(std::size_t rows, RowFn fn) {
    struct Ctx {
        RowFn* fn;
    } ctx{&fn};
    detail::run_chunked(rows, &ctx, [](void* c, std::size_t b, std::size_t e) {
        auto* cc = static_cast<Ctx*>(c);
        for (std::size_t x = b; x < e; ++x) (*cc->fn)(x);
    });
}

}  // namespace nlgrad::kernels
