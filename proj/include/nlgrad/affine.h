// Affine-reduced seminorms and the sandwich relations tying the pair
// seminorms (unit weight) to the distance of u from affine functions.
//
// Since an affine function contributes a constant local gradient, the
// distance inf over affine g of sum_x |G(x) - grad g|^p mu reduces exactly to
// a best constant-vector fit of G = local_gradient(u). Closed form for p = 2,
// geometric-median iteration for p = 1, damped Newton otherwise. The two-sided
// bound
//     |Omega| * residual <= pair seminorm^p (unit weight) <= 2^p |Omega| * residual
// follows pointwise from convexity and is checked verbatim by sandwich_check.
#pragma once

#include <optional>
#include <vector>

#include "nlgrad/grid.h"

namespace nlgrad {

struct AffineReduction {
    std::vector<double> best_slope;  // minimizing constant a*, one entry per axis
    double residual = 0.0;           // min_a sum_x |G(x) - a|^p mu
    std::size_t iterations = 0;      // 0 for the closed-form p = 2 path
    bool converged = true;
};

// Minimizes sum_x |local_gradient(u)(x) - a|^p mu over a in R^N.
//   p = 2: mu-weighted mean, exact.
//   p = 1: Weiszfeld iteration, singularity guard eta = 1e-12; an iterate that
//          lands on a data point is nudged off by 1e-10 * h.
//   else:  damped Newton with halving line search.
// Iterative paths stop when the step drops below 1e-10; running past 1e5
// iterations raises numerical_error carrying the best iterate in the message.
AffineReduction affine_reduced_seminorm(const ScalarField& u, double p);

struct SandwichReport {
    double lower = 0.0;       // |Omega| * residual
    double middle = 0.0;      // pair seminorm^p of u with unit weight, full mask
    double upper = 0.0;       // 2^p |Omega| * residual
    double nltv_value = 0.0;  // p = 1 only: NLTV(u) evaluated through its own path
    bool ok = false;
};

// Evaluates all three quantities independently and checks the chain with
// 1e-9 relative slack. For p = 1 the middle value is additionally recomputed
// through nltv() and must agree.
SandwichReport sandwich_check(const ScalarField& u, double p);

// Recovers grad u from u and the unit-weight pair gradient through a window
// function theta:
//   R_i(x) = -(1 / int theta) * sum_y [ u(y) d_i theta(y)
//                                       + (G_i(y) - G_i(x)) theta(y) ] mu.
// Exact in the continuum; on the grid it matches local_gradient(u) up to
// O(h) on smooth samples. Requires |sum theta mu| > 1e-12 * ||theta||_2.
VectorField theta_reconstruction(const ScalarField& u, const ScalarField& theta);

struct EquivalenceConstants {
    double C_p_theta = 0.0;
    double lower_bound = 0.0;  // 2^(p-1) / |Omega|
    bool bound_ok = false;
    double theta_sup = 0.0;
    double grad_theta_sup = 0.0;
    double theta_integral = 0.0;
};

// C^p(theta) = (2|Omega|)^(p-1) / |int theta|^p
//              * max{ |Omega| ||grad theta||_inf^p, ||theta||_inf^p },
// together with the universal lower bound 2^(p-1)/|Omega| it must dominate.
EquivalenceConstants equivalence_constants(const ScalarField& theta, double p);

}  // namespace nlgrad
