// Variational solver: each backend is checked against something it does not
// share code with — a dense normal-equations solve by Gaussian elimination
// for the quadratic path, a long diminishing-step subgradient run for the
// nonsmooth path, and finite-difference optimality for the smooth path.
// Plus the structural identities: affine data and zero weight reproduce the
// data, translation covariance, lambda monotonicity, uniqueness, lsc.
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "nlgrad/grid.h"
#include "nlgrad/nonlocal.h"
#include "nlgrad/rng.h"
#include "nlgrad/solver.h"
#include "nlgrad/weight.h"

using namespace nlgrad;

namespace {

// dense forward-difference matrix with the replicated last row, 1D
std::vector<std::vector<double>> diff_matrix(const DomainGrid& g) {
    const std::size_t n = g.points();
    const double h = g.spacing(0);
    std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        D[i][i] = -1.0 / h;
        D[i][i + 1] = 1.0 / h;
    }
    D[n - 1] = D[n - 2];
    return D;
}

// objective evaluated from scratch: pair sum over gradient differences plus
// the l^q fidelity, sharing no code with the solver
double brute_objective(const DomainGrid& g, const std::vector<double>& u, const WeightSpec& w,
                       double p, double lambda, double q, const std::vector<double>& gdat) {
    const std::size_t n = g.points();
    const double h = g.spacing(0), mu = g.cell_measure();
    std::vector<double> G(n);
    for (std::size_t i = 0; i + 1 < n; ++i) G[i] = (u[i + 1] - u[i]) / h;
    G[n - 1] = G[n - 2];
    double S = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const double om = w.evaluate(g, x, y);
            S += std::pow(om * std::abs(G[y] - G[x]), p) * mu * mu;
        }
    double F = 0.0;
    for (std::size_t i = 0; i < n; ++i) F += std::pow(std::abs(u[i] - gdat[i]), q) * mu;
    return S + (lambda / q) * F;
}

// one Euclidean subgradient of the p = 1 objective
std::vector<double> brute_subgradient(const DomainGrid& g, const std::vector<double>& u,
                                      const WeightSpec& w, double lambda,
                                      const std::vector<double>& gdat,
                                      const std::vector<std::vector<double>>& D) {
    const std::size_t n = g.points();
    const double mu = g.cell_measure();
    std::vector<double> G(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) G[i] += D[i][j] * u[j];
    std::vector<double> xi(n, 0.0);  // d(pair sum)/dG
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const double om = w.evaluate(g, x, y);
            const double d = G[y] - G[x];
            const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            xi[y] += om * s * mu * mu;
            xi[x] -= om * s * mu * mu;
        }
    std::vector<double> grad(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) grad[j] += D[i][j] * xi[i];
        grad[j] += lambda * (u[j] - gdat[j]) * mu;  // q = 2 fidelity
    }
    return grad;
}

// own Gaussian elimination with partial pivoting
std::vector<double> gauss_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A[r][k] / A[k][k];
            for (std::size_t c = k; c < n; ++c) A[r][c] -= f * A[k][c];
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= A[k][c] * x[c];
        x[k] = s / A[k][k];
    }
    return x;
}

ScalarField noisy_bump(const DomainGrid& g, Rng& rng, double noise) {
    ScalarField f(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double r = std::abs(g.coord(i, 0) - 0.5);
        const double b = r < 0.25 ? std::cos(M_PI * r * 2.0) * std::cos(M_PI * r * 2.0) : 0.0;
        f[i] = b + rng.uniform(-noise, noise);
    }
    return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("quadratic path agrees with a dense Gaussian-elimination oracle") {
    Rng rng(81);
    DomainGrid g = DomainGrid::interval(8);
    const double lambda = 4.0, mu = g.cell_measure();
    ScalarField gdat = rng.field(g);
    WeightSpec w = WeightSpec::gaussian(1.1, 0.3);

    VariationalProblem prob{w, 2.0, FidelityTerm::lq_power(lambda, 2.0, gdat)};
    prob.config.tol_gap = 1e-14;
    SolveResult res = solve(prob);
    CHECK(res.converged);
    CHECK(res.certificate_kind == "residual-norm");

    // Euclidean Hessian 4 mu^2 D^T (diag(rowsum W) - W) D + lambda mu I,
    // rhs lambda mu g, with W the squared pair weights
    const std::size_t n = g.points();
    auto D = diff_matrix(g);
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    for (std::size_t x = 0; x < n; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double om = w.evaluate(g, x, y);
            M[x][y] = -om * om;
            row += om * om;
        }
        M[x][x] += row;
    }
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) s += D[a][i] * M[a][b] * D[b][j];
            H[i][j] = 4.0 * mu * mu * s + (i == j ? lambda * mu : 0.0);
        }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = lambda * mu * gdat[i];
    std::vector<double> ustar = gauss_solve(H, rhs);

    for (std::size_t i = 0; i < n; ++i)
        CHECK(res.minimizer[i] == doctest::Approx(ustar[i]).epsilon(1e-8));
    CHECK(res.objective ==
          doctest::Approx(brute_objective(g, ustar, w, 2.0, lambda, 2.0, gdat.values()))
              .epsilon(1e-10));
    CHECK(res.objective == doctest::Approx(objective(prob, res.minimizer)).epsilon(1e-12));
}

TEST_CASE("quadratic path respects a truncated interaction mask") {
    Rng rng(82);
    DomainGrid g = DomainGrid::interval(8);
    const double lambda = 3.0, mu = g.cell_measure(), radius = 0.3;
    ScalarField gdat = rng.field(g);
    WeightSpec w = WeightSpec::constant(1.0);

    VariationalProblem prob{w, 2.0, FidelityTerm::lq_power(lambda, 2.0, gdat),
                            PairMask::truncated(radius)};
    prob.config.tol_gap = 1e-14;
    SolveResult res = solve(prob);
    CHECK(res.converged);

    const std::size_t n = g.points();
    auto D = diff_matrix(g);
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    for (std::size_t x = 0; x < n; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (std::abs(g.coord(x, 0) - g.coord(y, 0)) > radius) continue;
            M[x][y] = -1.0;
            row += 1.0;
        }
        M[x][x] += row;
    }
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) s += D[a][i] * M[a][b] * D[b][j];
            H[i][j] = 4.0 * mu * mu * s + (i == j ? lambda * mu : 0.0);
        }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = lambda * mu * gdat[i];
    std::vector<double> ustar = gauss_solve(H, rhs);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(res.minimizer[i] == doctest::Approx(ustar[i]).epsilon(1e-8));
}

TEST_CASE("nonsmooth path agrees with a diminishing-step subgradient oracle") {
    Rng rng(83);
    DomainGrid g = DomainGrid::interval(6);
    const double lambda = 6.0;
    ScalarField gdat = noisy_bump(g, rng, 0.3);
    WeightSpec w = WeightSpec::constant(1.0);

    VariationalProblem prob{w, 1.0, FidelityTerm::lq_power(lambda, 2.0, gdat)};
    prob.config.tol_gap = 1e-11;
    prob.config.max_iters = 400000;
    SolveResult res = solve(prob);
    CHECK(res.converged);
    CHECK(res.certificate_kind == "primal-dual-gap");
    CHECK(res.certificate <= 1e-11);

    // subgradient descent with alpha_k = 2 / (gamma (k+1)), gamma = lambda mu
    auto D = diff_matrix(g);
    std::vector<double> u = gdat.values();
    const double gamma = lambda * g.cell_measure();
    double best = brute_objective(g, u, w, 1.0, lambda, 2.0, gdat.values());
    for (std::size_t k = 0; k < 300000; ++k) {
        std::vector<double> grad = brute_subgradient(g, u, w, lambda, gdat.values(), D);
        const double alpha = 2.0 / (gamma * static_cast<double>(k + 1));
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= alpha * grad[i];
        const double val = brute_objective(g, u, w, 1.0, lambda, 2.0, gdat.values());
        if (val < best) best = val;
    }
    CHECK(res.objective == doctest::Approx(best).epsilon(1e-4));
    CHECK(res.objective <= best + 1e-9);  // solver should not be beaten
    CHECK(res.objective == doctest::Approx(objective(prob, res.minimizer)).epsilon(1e-12));
}

TEST_CASE("smooth path passes a finite-difference optimality probe") {
    Rng rng(84);
    DomainGrid g = DomainGrid::interval(8);
    const double lambda = 5.0;
    ScalarField gdat = rng.field(g);
    WeightSpec w = WeightSpec::gaussian(1.0, 0.4);

    for (double p : {1.5, 3.0}) {
        const double q = std::max(2.0, p);
        VariationalProblem prob{w, p, FidelityTerm::lq_power(lambda, q, gdat)};
        prob.config.max_iters = 400000;
        SolveResult res = solve(prob);
        CHECK(res.converged);
        CHECK(res.certificate_kind == "gradient-norm");

        // directional derivatives of the independent objective vanish at u*
        std::vector<double> base = res.minimizer.values();
        const double J0 = brute_objective(g, base, w, p, lambda, q, gdat.values());
        Rng dir = rng.fork(static_cast<std::uint64_t>(p * 10));
        for (int t = 0; t < 5; ++t) {
            std::vector<double> d(base.size());
            double nrm = 0.0;
            for (double& v : d) {
                v = dir.uniform(-1.0, 1.0);
                nrm += v * v;
            }
            nrm = std::sqrt(nrm);
            const double eps = 1e-5;
            std::vector<double> up = base, dn = base;
            for (std::size_t i = 0; i < d.size(); ++i) {
                up[i] += eps * d[i] / nrm;
                dn[i] -= eps * d[i] / nrm;
            }
            const double slope = (brute_objective(g, up, w, p, lambda, q, gdat.values()) -
                                  brute_objective(g, dn, w, p, lambda, q, gdat.values())) /
                                 (2.0 * eps);
            // Euclidean slopes are bounded by sqrt(mu) times the mu-norm
            // gradient certificate; allow that plus finite-difference noise
            CHECK(std::abs(slope) <= res.certificate + 1e-9 * (1.0 + std::abs(J0)));
            CHECK(std::abs(slope) <= 1e-3 * (1.0 + std::abs(J0)));
        }
    }
}

TEST_CASE("affine data is reproduced exactly") {
    DomainGrid g = DomainGrid::interval(16);
    // step with truncated mantissa so u[i] = step * i is exact and all forward
    // differences are bitwise equal; the seminorm then vanishes identically
    double step = 0.8 * g.spacing(0);
    std::uint64_t bits;
    std::memcpy(&bits, &step, sizeof bits);
    bits &= ~((std::uint64_t{1} << 11) - 1);
    std::memcpy(&step, &bits, sizeof bits);
    ScalarField gdat(g);
    for (std::size_t i = 0; i < g.points(); ++i)
        gdat[i] = step * static_cast<double>(i);
    for (double p : {1.0, 1.5, 2.0}) {
        VariationalProblem prob{WeightSpec::constant(1.0), p,
                                FidelityTerm::lq_power(10.0, 2.0, gdat)};
        prob.config.tol_gap = 1e-12;
        prob.config.max_iters = 400000;
        SolveResult res = solve(prob);
        CHECK(res.converged);
        CHECK(max_abs_diff(res.minimizer, gdat) <= 1e-9);
    }
}

TEST_CASE("zero weight makes the fidelity term win outright") {
    Rng rng(85);
    DomainGrid g = DomainGrid::interval(12);
    ScalarField gdat = rng.field(g);
    for (double p : {1.0, 2.0}) {
        VariationalProblem prob{WeightSpec::constant(0.0), p,
                                FidelityTerm::lq_power(2.0, 2.0, gdat)};
        prob.config.tol_gap = 1e-13;
        SolveResult res = solve(prob);
        CHECK(res.converged);
        CHECK(max_abs_diff(res.minimizer, gdat) <= 1e-9);
    }
}

TEST_CASE("larger lambda pulls the minimizer toward the data") {
    Rng rng(86);
    DomainGrid g = DomainGrid::interval(16);
    ScalarField gdat = noisy_bump(g, rng, 0.25);
    const double mu = g.cell_measure();
    double prev = 1e300;
    for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
        VariationalProblem prob{WeightSpec::constant(1.0), 1.0,
                                FidelityTerm::lq_power(lambda, 2.0, gdat)};
        prob.config.tol_gap = 1e-10;
        prob.config.max_iters = 400000;
        SolveResult res = solve(prob);
        CHECK(res.converged);
        double dist = 0.0;
        for (std::size_t i = 0; i < g.points(); ++i) {
            const double d = res.minimizer[i] - gdat[i];
            dist += d * d * mu;
        }
        dist = std::sqrt(dist);
        CHECK(dist < prev);
        prev = dist;
    }
}

TEST_CASE("translation covariance of the quadratic-fidelity minimizer") {
    Rng rng(87);
    DomainGrid g = DomainGrid::interval(10);
    ScalarField gdat = rng.field(g), shifted(g);
    for (std::size_t i = 0; i < g.points(); ++i) shifted[i] = gdat[i] + 2.5;
    for (double p : {1.0, 2.0}) {
        VariationalProblem a{WeightSpec::gaussian(1.0, 0.3), p,
                             FidelityTerm::lq_power(4.0, 2.0, gdat)};
        VariationalProblem b{WeightSpec::gaussian(1.0, 0.3), p,
                             FidelityTerm::lq_power(4.0, 2.0, shifted)};
        a.config.tol_gap = b.config.tol_gap = 1e-10;
        a.config.max_iters = b.config.max_iters = 600000;
        ScalarField ua = solve(a).minimizer, ub = solve(b).minimizer;
        for (std::size_t i = 0; i < g.points(); ++i)
            CHECK(ub[i] - ua[i] == doctest::Approx(2.5).epsilon(1e-7));
    }
}

TEST_CASE("custom starts land on the same minimizer; uniqueness probe") {
    Rng rng(88);
    DomainGrid g = DomainGrid::interval(8);
    ScalarField gdat = rng.field(g);
    VariationalProblem prob{WeightSpec::constant(1.0), 2.0,
                            FidelityTerm::lq_power(3.0, 2.0, gdat)};
    prob.config.tol_gap = 1e-14;
    ScalarField far(g, 40.0);
    CHECK(max_abs_diff(solve(prob).minimizer, solve(prob, far).minimizer) <= 1e-7);
    Rng probe_rng(89);
    CHECK(uniqueness_probe(prob, 4, probe_rng) <= 1e-6);

    VariationalProblem nonsmooth{WeightSpec::constant(1.0), 1.0,
                                 FidelityTerm::lq_power(3.0, 2.0, gdat)};
    nonsmooth.config.tol_gap = 1e-11;
    nonsmooth.config.max_iters = 30000000;
    Rng probe_rng2(90);
    CHECK(uniqueness_probe(nonsmooth, 3, probe_rng2) <= 1e-5);
}

TEST_CASE("regularizer is lower semicontinuous along oscillating sequences") {
    DomainGrid g = DomainGrid::interval(64);
    ScalarField limit(g);
    for (std::size_t i = 0; i < g.points(); ++i)
        limit[i] = std::sin(2.0 * M_PI * g.coord(i, 0));
    std::vector<ScalarField> seq;
    for (int k = 1; k <= 12; ++k) {
        ScalarField u = limit;
        for (std::size_t i = 0; i < g.points(); ++i)
            u[i] += (i % 2 ? 1.0 : -1.0) * 0.3 / static_cast<double>(k);
        seq.push_back(u);
    }
    VariationalProblem prob{WeightSpec::constant(1.0), 1.0,
                            FidelityTerm::lq_power(1.0, 2.0, limit)};
    LscReport rep = lsc_probe(prob, seq, limit);
    CHECK(rep.ok);
    CHECK(rep.values.size() == 12);
    CHECK(rep.distances.front() > rep.distances.back());
    CHECK(rep.liminf_value >= rep.limit_value - 1e-9);
}

TEST_CASE("deblur stencils: validation, symmetry, symbol classification") {
    Rng rng(91);
    DomainGrid g = DomainGrid::interval(16);
    ScalarField gdat = rng.field(g);
    CHECK_THROWS_AS(FidelityTerm::quadratic_deblur(1.0, {0.5, 0.5}, gdat), config_error);
    CHECK_THROWS_AS(FidelityTerm::quadratic_deblur(1.0, {0.25, 0.5, 0.3}, gdat), config_error);
    CHECK_THROWS_AS(FidelityTerm::lq_power(0.0, 2.0, gdat), config_error);
    CHECK_THROWS_AS(FidelityTerm::lq_power(1.0, 1.0, gdat), config_error);

    FidelityTerm flat = FidelityTerm::quadratic_deblur(1.0, {0.25, 0.5, 0.25}, gdat);
    CHECK(!flat.coercive());
    CHECK(flat.symbol_min() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(flat.tikhonov() == doctest::Approx(1e-8).epsilon(1e-15));

    FidelityTerm sharp = FidelityTerm::quadratic_deblur(1.0, {0.2, 0.6, 0.2}, gdat);
    CHECK(sharp.coercive());
    CHECK(sharp.symbol_min() >= 0.19);
    CHECK(sharp.tikhonov() == 0.0);

    // K is self-adjoint in the mu inner product
    ScalarField u = rng.field(g), v = rng.field(g);
    CHECK(inner(sharp.blur(u), v) == doctest::Approx(inner(u, sharp.blur(v))).epsilon(1e-13));

    VariationalProblem prob{WeightSpec::constant(1.0), 2.0, flat};
    prob.config.tol_gap = 1e-13;
    SolveResult res = solve(prob);
    CHECK(res.converged);
    CHECK(res.tikhonov_floor == doctest::Approx(1e-8).epsilon(1e-15));
}

TEST_CASE("exponent compatibility and iteration-cap behavior") {
    Rng rng(92);
    DomainGrid g = DomainGrid::interval(10);
    ScalarField gdat = rng.field(g);
    {
        VariationalProblem bad{WeightSpec::constant(1.0), 0.5,
                               FidelityTerm::lq_power(1.0, 2.0, gdat)};
        CHECK_THROWS_AS(bad.validate(), config_error);
    }
    {
        // quadratic fidelity cannot carry p above 2
        VariationalProblem bad{WeightSpec::constant(1.0), 3.0,
                               FidelityTerm::lq_power(1.0, 2.0, gdat)};
        CHECK_THROWS_AS(bad.validate(), config_error);
    }
    {
        // p > 1 needs q >= p
        VariationalProblem bad{WeightSpec::constant(1.0), 1.8,
                               FidelityTerm::lq_power(1.0, 1.5, gdat)};
        CHECK_THROWS_AS(bad.validate(), config_error);
    }
    {
        VariationalProblem capped{WeightSpec::constant(1.0), 1.0,
                                  FidelityTerm::lq_power(5.0, 2.0, gdat)};
        capped.config.max_iters = 3;
        capped.config.tol_gap = 1e-15;
        bool threw = false;
        try {
            solve(capped);
        } catch (const solver_divergence& e) {
            threw = true;
            CHECK(e.best.minimizer.size() == g.points());
            CHECK(std::isfinite(e.best.objective));
            CHECK(!e.best.converged);
        }
        CHECK(threw);
    }
}

TEST_CASE("objective trace is recorded and improves") {
    Rng rng(93);
    DomainGrid g = DomainGrid::interval(12);
    ScalarField gdat = rng.field(g);
    {
        // conjugate gradients traces its quadratic form, monotone by design
        VariationalProblem prob{WeightSpec::constant(1.0), 2.0,
                                FidelityTerm::lq_power(2.0, 2.0, gdat)};
        prob.config.trace = true;
        prob.config.tol_gap = 1e-13;
        SolveResult res = solve(prob);
        CHECK(res.converged);
        CHECK(!res.trace.empty());
        for (std::size_t k = 1; k < res.trace.size(); ++k)
            CHECK(res.trace[k] <= res.trace[k - 1] + 1e-12);
    }
    {
        // the primal-dual path traces the primal objective itself
        VariationalProblem prob{WeightSpec::constant(1.0), 1.0,
                                FidelityTerm::lq_power(2.0, 2.0, gdat)};
        prob.config.trace = true;
        prob.config.tol_gap = 1e-11;
        prob.config.max_iters = 400000;
        SolveResult res = solve(prob);
        CHECK(res.converged);
        CHECK(!res.trace.empty());
        CHECK(res.trace.back() == doctest::Approx(res.objective).epsilon(1e-8));
        CHECK(res.trace.back() <= res.trace.front() + 1e-12);
    }
}

TEST_CASE("strong convexity moduli") {
    Rng rng(94);
    DomainGrid g = DomainGrid::interval(8);
    ScalarField gdat = rng.field(g);
    CHECK(FidelityTerm::lq_power(7.0, 2.0, gdat).strong_convexity() ==
          doctest::Approx(7.0).epsilon(1e-12));
    CHECK(FidelityTerm::lq_power(7.0, 3.0, gdat).strong_convexity() == 0.0);
}
