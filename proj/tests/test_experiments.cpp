#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sselab/experiments.hpp"

using namespace sselab;
using experiments::nonuniqueness_demo;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::filesystem::path write_config(const std::string& name, const std::string& body) {
    const auto dir = std::filesystem::temp_directory_path() / "sselab_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream os(path, std::ios::binary);
    os << body;
    return path;
}

}  // namespace

TEST_CASE("nonuniqueness demo closed forms") {
    SUBCASE("theta = 1/2 gives x(t) = t^2/4 and separation 1/4") {
        const auto r = nonuniqueness_demo(0.5, 1.0, 1000);
        CHECK(r.terminal_separation == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(r.residual_zero == 0.0);
        CHECK(r.residual_closed_form < 1e-12);
        CHECK(r.residual_fd < 1e-6);
        CHECK(r.residual_fd > 0.0);
    }
    SUBCASE("separation shrinks as theta tends to 1") {
        const double s5 = nonuniqueness_demo(0.5, 1.0, 100).terminal_separation;
        const double s7 = nonuniqueness_demo(0.7, 1.0, 100).terminal_separation;
        const double s9 = nonuniqueness_demo(0.9, 1.0, 100).terminal_separation;
        CHECK(s5 > s7);
        CHECK(s7 > s9);
    }
    SUBCASE("theta outside (0,1) rejected") {
        CHECK_THROWS(nonuniqueness_demo(0.0, 1.0, 10));
        CHECK_THROWS(nonuniqueness_demo(1.0, 1.0, 10));
    }
}

TEST_CASE("continuous dependence ladder") {
    solver::SimConfig cfg{spectral::SpectralOperator(spectral::Basis::DirichletSine, 8, 1.0)};
    cfg.drift_spec = drift::DriftSpec::composition(
        drift::ScalarF{drift::FKind::BoundedHolder, 0.5, 0.0}, Rational(0), Rational(0));
    cfg.horizon = 0.125;
    cfg.step = 1.0 / 64.0;
    cfg.save_times = {0.0625, 0.125};
    cfg.initial = cfg.op.mode(1);
    cfg.ensemble = 8;
    cfg.seed = 9;

    SUBCASE("row count matches the ladder and degenerate rungs are flagged") {
        const auto rep = experiments::continuous_dependence(cfg, 1, {1e-1, 1e-2, 1e-3, 0.0});
        CHECK(rep.rows.size() == 4);
        CHECK(rep.rows[3].zero_numerator);
        CHECK(rep.rows[3].ratio == 0.0);
        CHECK(rep.max_ratio > 0.0);
        CHECK(rep.verdict.pathwise_DAalpha);
    }
    SUBCASE("drift-free ladder ratios never exceed 1") {
        solver::SimConfig c2 = cfg;
        c2.drift_spec = drift::DriftSpec::zero();
        const auto rep = experiments::continuous_dependence(c2, 2, {1e-1, 1e-2});
        for (const auto& row : rep.rows) CHECK(row.ratio <= 1.0);
    }
    SUBCASE("inadmissible tuples are refused with the verdict attached") {
        solver::SimConfig bad = cfg;
        bad.delta = -0.3;  // outside the admissible noise colours
        CHECK_THROWS_AS(experiments::continuous_dependence(bad, 1, {1e-2}), std::runtime_error);
        solver::SimConfig unbounded = cfg;
        unbounded.drift_spec = drift::DriftSpec::composition(
            drift::ScalarF{drift::FKind::PowerHolder, 0.5, 0.0}, Rational(0), Rational(0));
        CHECK_THROWS_AS(experiments::continuous_dependence(unbounded, 1, {1e-2}),
                        std::runtime_error);
    }
}

TEST_CASE("experiment runner obeys the exit-code contract") {
    const auto out = std::filesystem::temp_directory_path() / "sselab_out";
    std::filesystem::remove_all(out);

    SUBCASE("valid simulate config runs and is byte-deterministic") {
        const auto cfg = write_config("sim.json", R"({
            "experiment": "simulate",
            "operator": {"basis": "dirichlet-sine", "n_modes": 6, "power": 1.0},
            "drift": {"kind": "composition", "f": {"kind": "bounded-holder", "theta": 0.5}},
            "noise": {"delta": 0.0},
            "time": {"horizon": 0.125, "step": 0.015625, "save_times": [0.0625, 0.125]},
            "initial": {"mode": 1, "amplitude": 1.0},
            "ensemble": 5,
            "seed": 77
        })");
        CHECK(experiments::run_experiment(cfg.string(), (out / "a").string(), std::nullopt,
                                          "csv") == 0);
        CHECK(experiments::run_experiment(cfg.string(), (out / "b").string(), std::nullopt,
                                          "csv") == 0);
        CHECK(std::filesystem::exists(out / "a" / "simulate.csv"));
        CHECK(slurp(out / "a" / "simulate.csv") == slurp(out / "b" / "simulate.csv"));
        CHECK(slurp(out / "a" / "summary.json") == slurp(out / "b" / "summary.json"));
        // the summary carries the full regime verdict
        const std::string summary = slurp(out / "a" / "summary.json");
        CHECK(summary.find("weak_daalpha") != std::string::npos);
        CHECK(summary.find("pathwise_daalpha") != std::string::npos);
    }
    SUBCASE("unknown keys are schema violations (exit 2)") {
        const auto cfg = write_config("bad_key.json", R"({
            "experiment": "simulate",
            "operator": {"basis": "dirichlet-sine", "n_modes": 4, "powerr": 1.0},
            "drift": {"kind": "zero"},
            "time": {"horizon": 0.1, "step": 0.05},
            "initial": {"mode": 1},
            "seed": 1
        })");
        CHECK(experiments::run_experiment(cfg.string(), out.string(), std::nullopt, "csv") == 2);
    }
    SUBCASE("missing file and broken JSON are schema violations") {
        CHECK(experiments::run_experiment("/nonexistent/cfg.json", out.string(), std::nullopt,
                                          "csv") == 2);
        const auto cfg = write_config("broken.json", "{ not json");
        CHECK(experiments::run_experiment(cfg.string(), out.string(), std::nullopt, "csv") == 2);
    }
    SUBCASE("runtime failures exit 1") {
        const auto cfg = write_config("refused.json", R"({
            "experiment": "continuous-dependence",
            "operator": {"basis": "dirichlet-sine", "n_modes": 4, "power": 1.0},
            "drift": {"kind": "composition", "f": {"kind": "power-holder", "theta": 0.5}},
            "noise": {"delta": 0.0},
            "time": {"horizon": 0.1, "step": 0.05},
            "initial": {"mode": 1},
            "ensemble": 2,
            "seed": 1,
            "magnitudes": [0.01]
        })");
        CHECK(experiments::run_experiment(cfg.string(), out.string(), std::nullopt, "csv") == 1);
    }
    SUBCASE("regime table config emits the validated markdown") {
        const auto cfg = write_config("table.json", R"({
            "experiment": "regime-table",
            "class": "burgers",
            "scenario": "weak",
            "offset": "1/100"
        })");
        CHECK(experiments::run_experiment(cfg.string(), (out / "t").string(), std::nullopt,
                                          "markdown") == 0);
        const std::string t = slurp(out / "t" / "table.md");
        CHECK(t.find("| d | gamma | theta | mu | nu | rho |") != std::string::npos);
        CHECK(t.find("NO") == std::string::npos);  // every row validates
        std::size_t lines = 0;
        for (char ch : t)
            if (ch == '\n') ++lines;
        CHECK(lines == 9);  // 2 header lines + 7 rows
    }
    SUBCASE("ladder CSV has one row per magnitude") {
        const auto cfg = write_config("ladder.json", R"({
            "experiment": "continuous-dependence",
            "operator": {"basis": "dirichlet-sine", "n_modes": 6, "power": 1.0},
            "drift": {"kind": "composition", "f": {"kind": "bounded-holder", "theta": 0.5}},
            "noise": {"delta": 0.0},
            "time": {"horizon": 0.125, "step": 0.015625, "save_times": [0.125]},
            "initial": {"mode": 1},
            "ensemble": 4,
            "seed": 3,
            "perturb_mode": 1,
            "magnitudes": [0.1, 0.01, 0.001, 0.0001]
        })");
        CHECK(experiments::run_experiment(cfg.string(), (out / "l").string(), std::nullopt,
                                          "csv") == 0);
        const std::string csv = slurp(out / "l" / "ladder.csv");
        std::size_t rows = 0;
        for (char c : csv)
            if (c == '\n') ++rows;
        CHECK(rows == 5);  // header + 4 magnitudes
    }
}
