// Minimization of  J(u) = pair-seminorm_p(u; omega)^p + F(u)  on grid fields.
//
// Three regimes, picked by exponent and fidelity:
//   p = 1            first-order primal-dual iteration on the saddle problem
//                    min_u max_{|phi| <= omega} <grad_1 u, phi> + F(u); the
//                    dual constraint projects per pair onto the Euclidean ball
//                    of radius omega(x,y). Certificate: explicit primal-dual
//                    gap.
//   p = 2, quadratic F   normal equations (lambda A_K + 2 L_omega) u = lambda b
//                    by conjugate gradients, L_omega u = lifted adjoint of
//                    omega^2 grad_1 u. Certificate: residual norm.
//   other p in (1,oo)    accelerated gradient descent with backtracking on the
//                    smooth objective. Certificate: gradient norm.
//
// All inner products are the grid measure ones (mu per point, mu^2 per pair),
// so step sizes and certificates are resolution-independent.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlgrad/grid.h"
#include "nlgrad/rng.h"
#include "nlgrad/weight.h"

namespace nlgrad {

class FidelityTerm {
public:
    enum class Kind { lq_power, quadratic_deblur };

    // F(u) = (lambda/q) sum |u - g|^q mu, lambda > 0, q in (1, oo).
    static FidelityTerm lq_power(double lambda, double q, ScalarField g);

    // F(u) = (lambda/2) sum |K*u - g|^2 mu with K a small symmetric odd-length
    // convolution stencil (zero padding, applied per axis). A stencil whose
    // symbol comes within 1e-8 of zero is flagged non-coercive and the term
    // gains a Tikhonov floor eps * sum u^2 mu with eps = 1e-8.
    static FidelityTerm quadratic_deblur(double lambda, std::vector<double> stencil,
                                         ScalarField g);

    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double q() const { return q_; }
    const ScalarField& data() const { return data_; }
    double tikhonov() const { return tikhonov_; }
    bool coercive() const { return coercive_; }

    double value(const ScalarField& u) const;
    ScalarField gradient(const ScalarField& u) const;  // w.r.t. the mu inner product
    ScalarField blur(const ScalarField& u) const;      // K*u; identity for lq_power
    // strong convexity modulus w.r.t. the mu norm (0 when none is guaranteed)
    double strong_convexity() const;
    double symbol_min() const { return symbol_min_; }

private:
    FidelityTerm(Kind k, double lambda, double q, ScalarField g, std::vector<double> stencil);

    Kind kind_;
    double lambda_;
    double q_;
    ScalarField data_;
    std::vector<double> stencil_;
    double tikhonov_ = 0.0;
    bool coercive_ = true;
    double symbol_min_ = 1.0;  // min |symbol| of the blur stencil (1 for lq_power)
};

struct SolverConfig {
    std::size_t max_iters = 200000;
    double tol_gap = 0.0;        // <= 0 picks 1e-8 * (1 + |objective at start|)
    double step_safety = 0.95;   // multiplies the power-iteration norm estimate
    std::size_t gap_check_every = 25;
    bool trace = false;          // record per-iteration objective values
};

struct VariationalProblem {
    WeightSpec weight;
    double p = 1.0;
    FidelityTerm fidelity;
    PairMask mask = PairMask::full();
    SolverConfig config;

    const DomainGrid& grid() const { return fidelity.data().grid(); }
    // exponent compatibility: p = 1 needs q in (1, oo); p > 1 needs q >= p
    void validate() const;
};

struct SolveResult {
    ScalarField minimizer;
    double objective = 0.0;
    double certificate = 0.0;  // primal-dual gap, residual norm, or gradient norm
    std::string certificate_kind;
    std::size_t iterations = 0;
    bool converged = false;
    double tikhonov_floor = 0.0;
    std::vector<double> trace;  // filled when config.trace is set
};

// Non-convergence within max_iters: carries the best iterate found.
struct solver_divergence : numerical_error {
    solver_divergence(const std::string& what, SolveResult best_result)
        : numerical_error(what), best(std::move(best_result)) {}
    SolveResult best;
};

SolveResult solve(const VariationalProblem& prob);
SolveResult solve(const VariationalProblem& prob, const ScalarField& start);

// Exact discrete objective: seminorm_pow(u, weight, p, mask) + fidelity.
double objective(const VariationalProblem& prob, const ScalarField& u);

// Solves from `starts` random initializations; returns the maximum pairwise
// mu-weighted L2 distance between the minimizers.
double uniqueness_probe(const VariationalProblem& prob, std::size_t starts, Rng& rng);

struct LscReport {
    std::vector<double> values;     // regularizer value along the sequence
    std::vector<double> distances;  // mu-L2 distance to the limit field
    double liminf_value = 0.0;      // min over the tail half of the sequence
    double limit_value = 0.0;       // regularizer at the limit field
    bool ok = false;                // liminf >= limit - 1e-12 * scale
};

// Lower-semicontinuity probe of the p-seminorm part along a sequence
// converging to `limit` (sequences are caller-built, e.g. shrinking sawtooth).
LscReport lsc_probe(const VariationalProblem& prob, const std::vector<ScalarField>& sequence,
                    const ScalarField& limit);

}  // namespace nlgrad
