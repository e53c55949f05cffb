// Domain-growth scans: how the pair seminorms behave as the domain is
// enlarged at fixed resolution.
//
// A weight bounded below couples every cell with every other one, so a fixed
// non-affine bump picks up cross interactions proportional to the measure of
// the far region: its seminorm-power grows linearly in |Omega|. The scan
// tabulates that growth over a geometric domain schedule and issues a verdict
// (strict increase + stable ratio to |Omega| over the last three entries).
// The companion criterion integrates f_omega^p over a fixed sub-box K and
// flags divergence under domain doubling, cross-checked against the seminorm
// of a bump supported in K moving in lockstep.
#pragma once

#include <cstddef>
#include <vector>

#include "nlgrad/grid.h"
#include "nlgrad/weight.h"

namespace nlgrad {

enum class GrowthProfile { bump, affine };

struct GrowthExperiment {
    GrowthProfile profile = GrowthProfile::bump;
    double support_center = 0.5;  // bump center (ignored for the affine control)
    double support_radius = 0.25;
    double affine_slope = 0.3;              // slope of the affine control field
    std::vector<double> lengths{1, 2, 4, 8};  // 1D domains (0, L), fixed spacing
    double h = 1.0 / 32.0;
};

struct GrowthRow {
    double length = 0.0;
    double measure = 0.0;
    double seminorm_pow_value = 0.0;
    double ratio = 0.0;  // seminorm_pow / measure
};

struct GrowthResult {
    std::vector<GrowthRow> rows;
    bool strictly_increasing = false;
    bool ratio_stable_last3 = false;  // last three ratios within 10% of each other
    bool all_zero = false;            // the affine control signature
    bool verdict = false;             // strictly_increasing && ratio_stable_last3
};

// Samples the same base field (identical support and values, fixed h) on each
// domain of the schedule and evaluates seminorm_pow(u0, w, p) with the full
// mask. The bump must sit strictly inside the smallest domain with at least
// one cell of margin.
GrowthResult growth_scan(const GrowthExperiment& exp, const WeightSpec& w, double p);

struct TestFnRow {
    double length = 0.0;
    double measure = 0.0;
    double int_K_fp = 0.0;            // integral of f_omega^p over K
    double bump_seminorm_pow = 0.0;   // seminorm-power of a bump supported in K
};

struct TestFnResult {
    std::vector<TestFnRow> rows;
    bool fp_divergent = false;        // final doubling ratio > 1.5
    bool bump_divergent = false;
    bool lockstep = false;            // the two flags agree
    bool nontrivial_predicted = false;  // compactly supported fields admitted
};

// Integrates f_omega^p over the fixed sub-box K for each domain length and
// flags divergence (growth ratio above kGrowthRatio under doubling); the bump
// cross-check uses a test field supported inside K.
TestFnResult test_function_criterion(const WeightSpec& w, const SubBox& K,
                                     const std::vector<double>& lengths, double h, double p);

}  // namespace nlgrad
