// Pairwise interaction weights omega(x, y): symmetric, nonnegative, finite at
// every cell center (boundary-singular kinds blow up only at the boundary
// itself, which cell-centered sampling never touches). Also the embedding
// diagnostics built on f_p(x) = integral of omega(x, .)^p.
#pragma once

#include <memory>
#include <optional>

#include "nlgrad/grid.h"

namespace nlgrad {

// Infinity marker for the exponent p (discrete esssup semantics).
inline constexpr double kPInf = -1.0;
inline bool is_pinf(double p) { return p == kPInf; }

// Growth ratio under refinement / domain doubling beyond which a quantity is
// flagged as divergent at resolution.
inline constexpr double kGrowthRatio = 1.5;

struct SubBox {
    std::vector<double> lo, hi;
    void validate_inside(const DomainGrid& g) const;
    bool contains(const DomainGrid& g, std::size_t point) const;
};

class WeightSpec {
public:
    enum class Kind { constant, gaussian, separable_theta, boundary_singular, tabulated };

    static WeightSpec constant(double c);
    // omega(x, y) = a exp(-|x-y|^2 / (2 sigma^2)), clipped below at `floor`
    // (floor 0 keeps the plain kernel; a positive floor bounds omega away
    // from zero, which the domain-growth scans rely on).
    static WeightSpec gaussian(double amplitude, double bandwidth, double floor = 0.0);
    // omega(x, y) = theta(x) + theta(y) with the built-in profile
    // theta(x) = prod_i (x_i - o_i)(o_i + L_i - x_i) / L_i^2  (> 0 inside, -> 0 at the boundary).
    static WeightSpec separable_theta();
    // omega(x, y) = (d(x) d(y))^(-alpha), d = distance to the box boundary.
    static WeightSpec boundary_singular(double alpha);
    // Explicit symmetric table bound to a fixed grid layout; rejects
    // asymmetry beyond 1e-12 and negative entries.
    static WeightSpec tabulated(const DomainGrid& grid, std::vector<double> values);

    Kind kind() const { return kind_; }
    double param(const char* name) const;  // introspection for report echo

    // theta profile used by the separable kind (exposed because the affine /
    // reconstruction checks reuse it as a test profile).
    static double theta_profile(const DomainGrid& g, std::size_t i);

    double evaluate(const DomainGrid& g, std::size_t x, std::size_t y) const;

    // out[y - y0] = omega(x, y)^p for y in [y0, y1). p = 1 skips the power.
    void eval_row_pow(const DomainGrid& g, std::size_t x, double p, std::size_t y0,
                      std::size_t y1, double* out) const;

    // Smallest / largest omega over all ordered pairs of the grid.
    std::pair<double, double> range(const DomainGrid& g) const;

    bool refinable() const { return kind_ != Kind::tabulated; }

private:
    Kind kind_ = Kind::constant;
    double c_ = 1.0;
    double amplitude_ = 1.0, bandwidth_ = 1.0, floor_ = 0.0;
    double alpha_ = 1.0;
    std::shared_ptr<const std::vector<double>> table_;
    std::size_t table_n_ = 0;
};

// f_p(x) = sum_y omega(x, y)^p * mu for finite p; max_y omega(x, y) for p = inf.
ScalarField weight_f_p(const WeightSpec& w, const DomainGrid& g, double p);

struct WeightDiagnostics {
    double inf_omega = 0.0, sup_omega = 0.0;
    double inf_omega_refined = 0.0, sup_omega_refined = 0.0;
    bool sup_omega_unbounded = false;  // sup grows by > kGrowthRatio under refinement
    ScalarField f_p_values;            // at the base resolution
    double sup_f_p = 0.0, sup_f_p_refined = 0.0;
    double int_K_f_p = 0.0, int_K_f_p_refined = 0.0;
    bool refinement_checked = true;  // false for tabulated weights (cannot refine)
    struct {
        bool lower_bounded = false;            // inf omega stays away from 0 under refinement
        bool f_p_bounded = false;              // sup f_p stable under refinement
        bool test_functions_nontrivial = false;  // integral of f_p over K stable under refinement
    } embedding_class;
};

// Evaluates the three embedding criteria at the given resolution and at a
// refined (doubled) resolution; divergence is flagged by growth ratio
// > kGrowthRatio, since every finite grid yields finite numbers.
WeightDiagnostics classify_embeddings(const WeightSpec& w, const DomainGrid& g, double p,
                                      const SubBox& K);

}  // namespace nlgrad
