// Config parsing and report writing. All validation errors are config_error
// and name the key path that failed.
#include "nlgrad/config.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "nlgrad/io.h"

namespace nlgrad {
namespace {

[[noreturn]] void bad(const std::string& ctx, const std::string& what) {
    throw config_error(ctx + ": " + what);
}

std::string join(const std::string& ctx, const std::string& key) {
    return ctx.empty() ? key : ctx + "." + key;
}

}  // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path);
    try {
        return json::parse(in, nullptr, true, true);  // allow // comments
    } catch (const std::exception& e) {
        throw config_error(path + ": " + e.what());
    }
}

const json& require_key(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.is_object() || !obj.contains(key)) bad(join(ctx, key), "missing");
    return obj.at(key);
}

double require_number(const json& obj, const std::string& key, const std::string& ctx) {
    const json& v = require_key(obj, key, ctx);
    if (!v.is_number()) bad(join(ctx, key), "expected a number");
    return v.get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& ctx) {
    const json& v = require_key(obj, key, ctx);
    if (!v.is_string()) bad(join(ctx, key), "expected a string");
    return v.get<std::string>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& ctx) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) bad(join(ctx, key), "expected a number");
    return v.get<double>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& fallback,
                      const std::string& ctx) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) bad(join(ctx, key), "expected a string");
    return v.get<std::string>();
}

DomainGrid parse_grid(const json& j, const std::string& ctx) {
    const std::string kind = require_string(j, "kind", ctx);
    if (kind == "interval") {
        const double n = require_number(j, "n", ctx);
        if (n < 2 || n != std::floor(n)) bad(join(ctx, "n"), "expected an integer >= 2");
        return DomainGrid::interval(static_cast<std::size_t>(n),
                                    number_or(j, "length", 1.0, ctx),
                                    number_or(j, "origin", 0.0, ctx));
    }
    if (kind == "box2d") {
        const double nx = require_number(j, "nx", ctx);
        const double ny = require_number(j, "ny", ctx);
        if (nx < 2 || nx != std::floor(nx)) bad(join(ctx, "nx"), "expected an integer >= 2");
        if (ny < 2 || ny != std::floor(ny)) bad(join(ctx, "ny"), "expected an integer >= 2");
        return DomainGrid::box2d(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                                 number_or(j, "lx", 1.0, ctx), number_or(j, "ly", 1.0, ctx));
    }
    bad(join(ctx, "kind"), "unknown grid kind '" + kind + "'");
}

WeightSpec parse_weight(const json& j, const DomainGrid& g, const std::string& ctx) {
    const std::string kind = require_string(j, "kind", ctx);
    if (kind == "constant") return WeightSpec::constant(number_or(j, "c", 1.0, ctx));
    if (kind == "gaussian")
        return WeightSpec::gaussian(number_or(j, "amplitude", 1.0, ctx),
                                    require_number(j, "bandwidth", ctx),
                                    number_or(j, "floor", 0.0, ctx));
    if (kind == "separable-theta") return WeightSpec::separable_theta();
    if (kind == "boundary-singular")
        return WeightSpec::boundary_singular(require_number(j, "alpha", ctx));
    if (kind == "tabulated") {
        const std::string file = require_string(j, "file", ctx);
        auto [n, table] = read_pair_csv(file);
        if (n != g.points())
            bad(join(ctx, "file"), "pair table is " + std::to_string(n) + "x" + std::to_string(n) +
                                       " but the grid has " + std::to_string(g.points()) + " points");
        return WeightSpec::tabulated(g, std::move(table));
    }
    bad(join(ctx, "kind"), "unknown weight kind '" + kind + "'");
}

PairMask parse_mask(const json& root, const DomainGrid& g, const std::string& ctx) {
    (void)g;
    if (!root.is_object() || !root.contains(ctx)) return PairMask::full();
    const json& j = root.at(ctx);
    const std::string kind = require_string(j, "kind", ctx);
    if (kind == "full") return PairMask::full();
    if (kind == "radius") return PairMask::truncated(require_number(j, "r", ctx));
    bad(join(ctx, "kind"), "unknown mask kind '" + kind + "'");
}

SubBox parse_subbox(const json& j, const std::string& ctx) {
    SubBox box;
    const json& lo = require_key(j, "lo", ctx);
    const json& hi = require_key(j, "hi", ctx);
    if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty())
        bad(ctx, "lo/hi must be equal-length arrays");
    for (const auto& v : lo) box.lo.push_back(v.get<double>());
    for (const auto& v : hi) box.hi.push_back(v.get<double>());
    return box;
}

ScalarField parse_data(const json& j, const DomainGrid& g, Rng& rng, const std::string& ctx) {
    const std::string kind = require_string(j, "kind", ctx);
    if (kind == "file") {
        const std::string path = require_string(j, "path", ctx);
        FieldFile ff = (path.size() > 4 && path.compare(path.size() - 4, 4, ".pgm") == 0)
                           ? read_field_pgm(path)
                           : read_field_csv(path);
        if (ff.grid.points() != g.points() || ff.grid.dim() != g.dim())
            bad(join(ctx, "path"), "field layout in " + path + " does not match the grid");
        ScalarField u(g);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = ff.values[i];
        return u;
    }
    if (kind == "values") {
        const json& v = require_key(j, "values", ctx);
        if (!v.is_array() || v.size() != g.points())
            bad(join(ctx, "values"), "expected an array of " + std::to_string(g.points()) +
                                         " numbers");
        ScalarField u(g);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = v[i].get<double>();
        return u;
    }
    if (kind == "affine") {
        ScalarField u(g);
        const double intercept = number_or(j, "intercept", 0.0, ctx);
        std::vector<double> slope;
        const json& s = require_key(j, "slope", ctx);
        if (s.is_number()) {
            slope.assign(1, s.get<double>());
        } else if (s.is_array()) {
            for (const auto& v : s) slope.push_back(v.get<double>());
        }
        if (static_cast<int>(slope.size()) != g.dim())
            bad(join(ctx, "slope"), "expected " + std::to_string(g.dim()) + " component(s)");
        for (std::size_t i = 0; i < u.size(); ++i) {
            auto x = g.point(i);
            double v = intercept;
            for (int c = 0; c < g.dim(); ++c) v += slope[c] * x[c];
            u[i] = v;
        }
        return u;
    }
    if (kind == "random-uniform") {
        return rng.field(g, number_or(j, "lo", -1.0, ctx), number_or(j, "hi", 1.0, ctx));
    }
    if (kind == "noisy-bump") {
        // cos^2 bump at `center` with half-width `radius`, plus uniform noise.
        const double center = number_or(j, "center", 0.5, ctx);
        const double radius = number_or(j, "radius", 0.25, ctx);
        const double amplitude = number_or(j, "amplitude", 1.0, ctx);
        const double noise = number_or(j, "noise", 0.05, ctx);
        if (!(radius > 0.0)) bad(join(ctx, "radius"), "expected a positive number");
        ScalarField u(g);
        for (std::size_t i = 0; i < u.size(); ++i) {
            auto x = g.point(i);
            double r2 = 0.0;
            for (int c = 0; c < g.dim(); ++c) {
                const double cc = (c == 0) ? center : 0.5;
                r2 += (x[c] - cc) * (x[c] - cc);
            }
            const double t = std::sqrt(r2) / radius;
            double v = 0.0;
            if (t < 1.0) {
                const double ct = std::cos(0.5 * 3.14159265358979323846 * t);
                v = amplitude * ct * ct;
            }
            u[i] = v + rng.uniform(-noise, noise);
        }
        return u;
    }
    bad(join(ctx, "kind"), "unknown data kind '" + kind + "'");
}

FidelityTerm parse_fidelity(const json& j, const DomainGrid& g, Rng& rng, const std::string& ctx) {
    const std::string kind = require_string(j, "kind", ctx);
    const double lambda = require_number(j, "lambda", ctx);
    ScalarField data = parse_data(require_key(j, "data", ctx), g, rng, join(ctx, "data"));
    if (kind == "lq") {
        return FidelityTerm::lq_power(lambda, number_or(j, "q", 2.0, ctx), std::move(data));
    }
    if (kind == "deblur") {
        const json& k = require_key(j, "kernel", ctx);
        if (!k.is_array() || k.empty()) bad(join(ctx, "kernel"), "expected a non-empty array");
        std::vector<double> stencil;
        for (const auto& v : k) stencil.push_back(v.get<double>());
        return FidelityTerm::quadratic_deblur(lambda, std::move(stencil), std::move(data));
    }
    bad(join(ctx, "kind"), "unknown fidelity kind '" + kind + "'");
}

SolverConfig parse_solver_options(const json& root, const std::string& ctx) {
    SolverConfig cfg;
    if (!root.is_object() || !root.contains(ctx)) return cfg;
    const json& j = root.at(ctx);
    const double iters = number_or(j, "max_iters", static_cast<double>(cfg.max_iters), ctx);
    if (iters < 1 || iters != std::floor(iters)) bad(join(ctx, "max_iters"), "expected a positive integer");
    cfg.max_iters = static_cast<std::size_t>(iters);
    cfg.tol_gap = number_or(j, "tol", cfg.tol_gap, ctx);
    cfg.step_safety = number_or(j, "step_safety", cfg.step_safety, ctx);
    const double every = number_or(j, "gap_check_every", static_cast<double>(cfg.gap_check_every), ctx);
    if (every < 1 || every != std::floor(every))
        bad(join(ctx, "gap_check_every"), "expected a positive integer");
    cfg.gap_check_every = static_cast<std::size_t>(every);
    if (j.contains("trace")) {
        if (!j.at("trace").is_boolean()) bad(join(ctx, "trace"), "expected a boolean");
        cfg.trace = j.at("trace").get<bool>();
    }
    return cfg;
}

json make_report(const std::string& command, const std::string& claim, std::uint64_t seed,
                 bool deterministic, const json& config_echo) {
    json rep;
    rep["command"] = command;
    rep["claim"] = claim;
    rep["seed"] = seed;
    rep["deterministic"] = deterministic;
    // Wall-clock stamp; excluded when comparing reports for reproducibility.
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    rep["timestamp"] = stamp;
    rep["config"] = config_echo;
    rep["pass"] = nullptr;
    rep["results"] = json::object();
    return rep;
}

void write_report(const std::string& path, const json& report) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << report.dump(2) << "\n";
    if (!out) throw config_error("write failed: " + path);
}

}  // namespace nlgrad
