// Runtime kernel selection and the chunked row dispatcher. The default is the
// best variant the CPU supports; NLGRAD_SIMD=scalar|avx2|neon overrides, and
// the deterministic execution mode selects "scalar" explicitly.
#include <atomic>
#include <cstdlib>
#include <thread>

#include "nlgrad/kernels.h"

namespace nlgrad::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

namespace {

const Ops* best_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return &avx2_ops();
#endif
#if defined(__aarch64__)
    return &neon_ops();
#endif
    return &scalar_ops();
}

std::atomic<const Ops*> g_active{nullptr};
std::atomic<int> g_threads{1};

const Ops* init_active() {
    const char* env = std::getenv("NLGRAD_SIMD");
    if (env) {
        select(env);
        return g_active.load();
    }
    const Ops* best = best_supported();
    g_active.store(best);
    return best;
}

}  // namespace

const Ops& active() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) p = init_active();
    return *p;
}

bool select(const std::string& mode) {
    if (mode == "scalar") {
        g_active.store(&scalar_ops());
        return true;
    }
    if (mode == "auto" || mode.empty()) {
        g_active.store(best_supported());
        return true;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (mode == "avx2" && __builtin_cpu_supports("avx2")) {
        g_active.store(&avx2_ops());
        return true;
    }
#endif
#if defined(__aarch64__)
    if (mode == "neon") {
        g_active.store(&neon_ops());
        return true;
    }
#endif
    g_active.store(&scalar_ops());
    return false;
}

void set_threads(int t) { g_threads.store(t < 1 ? 1 : t); }

int threads() { return g_threads.load(); }

namespace detail {

void run_chunked(std::size_t rows, void* ctx, void (*fn)(void*, std::size_t, std::size_t)) {
    const int nt = threads();
    if (nt <= 1 || rows < 2) {
        fn(ctx, 0, rows);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(nt), rows);
    const std::size_t chunk = (rows + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(rows, b + chunk);
        if (b >= e) break;
        pool.emplace_back([=] { fn(ctx, b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

}  // namespace nlgrad::kernels
