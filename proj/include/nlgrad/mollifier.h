// Compactly supported smooth bumps and the test fields built from them.
//
// The radial profile is the standard bump f(t) = A exp(1/(t^2 - 1)) on [0, 1),
// zero beyond, with A normalizing the induced mollifier J(x) = f(|x|) to unit
// mass over R^N. Its antiderivative F(z) = int_0^z f has no closed form and is
// tabulated once by adaptive Simpson quadrature. From these come the
// compactly supported field
//     h_eps(x) = eps^(-N+1) (F(1) - F(|x - x0| / eps)),
// whose gradient magnitude reproduces the scaled mollifier, the L^p
// normalized variant C_{p,eps} h_eps, and the flattened variant rho with unit
// gradient sup-norm. The experiments drive these fields through the pair
// seminorms and the L^p norms and report convergence tables.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "nlgrad/grid.h"
#include "nlgrad/weight.h"

namespace nlgrad {

class MollifierProfile {
public:
    // Shared profile for dimension N (1 or 2); built on first use.
    static const MollifierProfile& standard(int N);

    int dim() const { return N_; }
    double normalization() const { return A_; }  // the constant A
    double J0() const { return J0_; }            // f(0) = peak of the mollifier
    double F1() const { return F1_; }            // F(1) = total mass of the profile

    // f(t): zero for t >= 1.
    double f(double t) const;
    // F(z) by linear interpolation of the quadrature table; exactly F1 for z >= 1.
    double F(double z) const;

    // int_{B_1} J(x)^p dx (radial quadrature in dimension N).
    double mollifier_p_mass(double p) const;

    // (int J^p)^(-1) * int_{B_1} |F(1) - F(|x|)|^p dx — the constant in front
    // of eps^p in the L^p law of the normalized bump.
    double lp_law_constant(double p) const;

private:
    explicit MollifierProfile(int N);
    double f_unnormalized(double t) const;

    int N_ = 1;
    double A_ = 1.0, J0_ = 0.0, F1_ = 0.0;
    std::vector<double> F_table_;  // F on the uniform grid k / (size-1), k = 0..size-1
};

// C_{p,eps} = eps^(N(p-1)/p) (int_{B_1} J^p)^(-1/p); equals 1 for p = 1. The
// rescaled kernel C^p J_eps^p then has unit mass.
double normalization_constant(double p, double eps, const MollifierProfile& profile);

enum class WitnessKind { h_eps, h_p_eps_x0, rho_eps_x0 };

struct WitnessFunction {
    WitnessKind kind;
    std::vector<double> x0;
    double eps = 0.0;
    double p = 1.0;
    ScalarField field;
};

// Samples the requested bump on the grid. Requires the closed ball of radius
// eps around x0 to stay inside the domain and eps >= 3 * max spacing.
WitnessFunction build_witness(WitnessKind kind, const std::vector<double>& x0, double eps,
                              double p, const DomainGrid& grid, const MollifierProfile& profile);

struct LimitRow {
    double eps = 0.0;
    std::size_t grid_n = 0;
    double value = 0.0;   // seminorm_pow of the normalized bump
    double target = 0.0;  // 2 * f_p(x0) on the same grid
    double rel_gap = 0.0;
};

struct WitnessLimitResult {
    std::vector<LimitRow> rows;
    bool gap_monotone_last3 = false;
    double final_rel_gap = 0.0;
};

// One (eps, grid points) entry per schedule step; eps must decrease and the
// relative resolution eps/h should increase so discretization error shrinks
// along with eps.
struct WitnessSchedule {
    std::vector<double> eps;
    std::vector<std::size_t> grid_n;
    static WitnessSchedule standard();  // 1/8..1/64 on 32..1024 points
};

// Drives seminorm_pow(h_{p,eps}, omega, p) down the schedule on Omega = the
// unit-length box layout of `base` (re-gridded per entry) and compares with
// the concentration target 2 f_p(x0).
WitnessLimitResult witness_limit_experiment(const WeightSpec& w, const std::vector<double>& x0,
                                            double p, const WitnessSchedule& schedule,
                                            const DomainGrid& base);

struct ScalingRow {
    double eps = 0.0;
    std::size_t grid_n = 0;
    double lp_norm_pow = 0.0;
};

struct LpScalingResult {
    std::vector<ScalingRow> rows;
    double slope = 0.0;      // log-log regression slope (should be p)
    double intercept = 0.0;  // multiplicative constant exp(regression intercept)
    double law_constant = 0.0;  // profile.lp_law_constant(p) for comparison
};

LpScalingResult lp_scaling_check(const std::vector<double>& x0, double p,
                                 const WitnessSchedule& schedule, const DomainGrid& base);

// Least-squares fit of log(y) = slope * log(x) + b; returns {slope, exp(b)}.
std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlgrad
