#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sselab/regime.hpp"
#include "sselab/solver.hpp"

namespace sselab::experiments {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic non-uniqueness of the drift alone: x' = sign(x)|x|^theta,
// x(0) = 0 carries both x == 0 and x(t) = ((1-theta) t)^{1/(1-theta)}.
struct DemoResult {
    double theta = 0.5;
    double horizon = 1.0;
    std::size_t grid = 1000;
    double residual_zero = 0.0;         // |x' - |x|^theta| for the zero solution
    double residual_closed_form = 0.0;  // analytic differentiation of the second solution
    double residual_fd = 0.0;           // finite-difference rendering, for contrast
    double terminal_separation = 0.0;
};

DemoResult nonuniqueness_demo(double theta, double horizon, std::size_t grid_points);

struct LadderRow {
    double magnitude = 0.0;
    double ratio = 0.0;
    double sup_rms = 0.0;
    bool zero_numerator = false;
};

struct ContinuousDependenceReport {
    std::vector<LadderRow> rows;
    double max_ratio = 0.0;
    regime::RegimeVerdict verdict;
};

// Coupling ladder across perturbation magnitudes of one mode; refuses to run
// when the tuple is not pathwise admissible with bounded drift.
ContinuousDependenceReport continuous_dependence(const solver::SimConfig& base,
                                                 std::size_t perturb_mode,
                                                 const std::vector<double>& magnitudes);

// Runs the experiment described by the JSON config file, writing CSV/JSON
// artifacts into out_dir. Returns the process exit code contract:
// 0 success, 1 runtime failure, 2 config/schema violation. A non-empty
// expected_kind must match the config's "experiment" key.
int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override, const std::string& format,
                   const std::string& expected_kind = "");

}  // namespace sselab::experiments
