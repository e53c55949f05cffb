// JSON config parsing and report assembly for the command-line tool.
//
// Configs are plain JSON documents. Every parse error names the offending
// key path (e.g. "weight.kind") so a bad config can be fixed without reading
// source. Reports are ordered JSON so identical runs produce byte-identical
// documents apart from the timestamp field.
#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "nlgrad/grid.h"
#include "nlgrad/rng.h"
#include "nlgrad/solver.h"
#include "nlgrad/weight.h"

namespace nlgrad {

using json = nlohmann::ordered_json;

json load_json_file(const std::string& path);

// Checked accessors; `ctx` is the dotted path reported on error.
const json& require_key(const json& obj, const std::string& key, const std::string& ctx);
double require_number(const json& obj, const std::string& key, const std::string& ctx);
std::string require_string(const json& obj, const std::string& key, const std::string& ctx);
double number_or(const json& obj, const std::string& key, double fallback, const std::string& ctx);
std::string string_or(const json& obj, const std::string& key, const std::string& fallback,
                      const std::string& ctx);

// {"kind": "interval", "n": 64, "length": 1, "origin": 0}
// {"kind": "box2d", "nx": 8, "ny": 8, "lx": 1, "ly": 1}
DomainGrid parse_grid(const json& j, const std::string& ctx = "grid");

// {"kind": "constant" | "gaussian" | "separable-theta" | "boundary-singular" | "tabulated", ...}
WeightSpec parse_weight(const json& j, const DomainGrid& g, const std::string& ctx = "weight");

// Missing or {"kind": "full"} or {"kind": "radius", "r": 0.25}.
PairMask parse_mask(const json& root, const DomainGrid& g, const std::string& ctx = "mask");

// {"lo": [..], "hi": [..]}
SubBox parse_subbox(const json& j, const std::string& ctx);

// {"kind": "file" | "values" | "affine" | "random-uniform" | "noisy-bump", ...}
ScalarField parse_data(const json& j, const DomainGrid& g, Rng& rng,
                       const std::string& ctx = "data");

// {"kind": "lq" | "deblur", "lambda": .., "q": .., "data": {..}, "kernel": [..]}
FidelityTerm parse_fidelity(const json& j, const DomainGrid& g, Rng& rng,
                            const std::string& ctx = "fidelity");

// Missing or {"max_iters": .., "tol": .., "step_safety": .., "gap_check_every": .., "trace": bool}
SolverConfig parse_solver_options(const json& root, const std::string& ctx = "solver");

// Report skeleton: command, claim, seed, deterministic, timestamp, config echo,
// then the caller fills "results" and "pass".
json make_report(const std::string& command, const std::string& claim, std::uint64_t seed,
                 bool deterministic, const json& config_echo);
void write_report(const std::string& path, const json& report);

}  // namespace nlgrad
