// The nonlocal calculus on pairs: the weighted pair gradient
//   (grad_w u)(x, y) = omega(x, y) (G(y) - G(x)),   G = local_gradient(u),
// its exact negative adjoint (the pair divergence), the L^p pair seminorms,
// the total-variation functional they induce at p = 1, and the discrete
// duality between the two formulations.
#pragma once

#include "nlgrad/grid.h"
#include "nlgrad/rng.h"
#include "nlgrad/weight.h"

namespace nlgrad {

// Pair gradient with weight omega; antisymmetric in (x, y), zero wherever
// omega vanishes.
PairField nonlocal_gradient(const ScalarField& u, const WeightSpec& w,
                            const PairMask& mask = PairMask::full());

// Unweighted pair divergence: the exact negative adjoint of the omega == 1
// pair gradient under the mu-weighted inner products,
//   <grad_1 u, psi>_pairs = -<u, pair_divergence_1(psi)>   for all u.
ScalarField pair_divergence_1(const PairField& psi);

// Weighted divergence div_w phi = pair_divergence_1(omega * phi), so that
// <grad_w u, phi>_pairs = -<u, nonlocal_divergence(phi, w)> exactly.
ScalarField nonlocal_divergence(const PairField& phi, const WeightSpec& w);

// ( sum over active pairs of omega^p |G(y) - G(x)|^p mu^2 )  — the p-th power
// of the pair seminorm; for p = inf the max of omega |G(y) - G(x)| over pairs.
double seminorm_pow(const ScalarField& u, const WeightSpec& w, double p,
                    const PairMask& mask = PairMask::full());
double seminorm(const ScalarField& u, const WeightSpec& w, double p,
                const PairMask& mask = PairMask::full());

// Total variation of the pair gradient: seminorm at p = 1.
double nltv(const ScalarField& u, const WeightSpec& w, const PairMask& mask = PairMask::full());

struct DualCheckReport {
    double formula = 0.0;        // primal value: seminorm at p = 1
    double maximizer_value = 0.0;  // <u, div_1 phi*> at the closed-form maximizer
    double best_feasible = 0.0;  // best <u, div_1 phi> over random feasible phi
    std::size_t trials = 0;
    bool attained = false;       // maximizer matches the formula to 1e-10 relative
    bool no_violation = false;   // no random feasible phi exceeded the formula
};

// Checks the sup characterization of the p = 1 seminorm over the feasible set
// { phi : |phi(x, y)| <= omega(x, y) }: the closed-form maximizer
// phi*(x, y) = -omega (G(y) - G(x)) / |G(y) - G(x)| attains the value, and
// random feasible fields never exceed it.
DualCheckReport nltv_dual_check(const ScalarField& u, const WeightSpec& w, std::size_t trials,
                                Rng& rng);

struct InteractionSplit {
    double inside = 0.0;  // pairs with both endpoints in the support mask
    double cross = 0.0;   // 2 x (support x complement) contribution
};

// Splits seminorm_pow into support-support interactions plus the doubled
// support-complement cross term. Requires the mask S to cover the difference
// support of u: both u and local_gradient(u) must vanish outside S (with
// forward differences this includes the cell just before the support).
InteractionSplit interaction_split(const ScalarField& u, const std::vector<bool>& support,
                                   const WeightSpec& w, double p);

// Support mask containing every cell where u or its local gradient is nonzero.
std::vector<bool> difference_support(const ScalarField& u);

}  // namespace nlgrad
