// sselab: spectral numerics laboratory for singular stochastic evolution
// equations dX + AX dt = B(X) dt + A^-delta dW on the unit interval.
//
// Subcommands:
//   regime check|rho-interval|table   exact rational admissibility tooling
//   simulate | couple | galerkin      Galerkin simulation experiments
//   kolmogorov solve|monitor          elliptic Kolmogorov fixed point
//   demo nonuniqueness                deterministic two-solutions demo
//
// Exit codes: 0 success (regime check: admissible), 1 runtime failure or
// inadmissible, 2 config/schema violation.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sselab/experiments.hpp"
#include "sselab/kolmogorov.hpp"
#include "sselab/regime_tables.hpp"

namespace {

using sselab::Rational;
namespace regime = sselab::regime;

regime::ExampleClass class_from(const std::string& s) {
    if (s == "heat" || s == "fractional-heat") return regime::ExampleClass::AbstractFractionalHeat;
    if (s == "burgers") return regime::ExampleClass::Burgers;
    if (s == "navier-stokes") return regime::ExampleClass::NavierStokes;
    if (s == "cahn-hilliard") return regime::ExampleClass::CahnHilliard;
    if (s == "cahn-hilliard-quartic") return regime::ExampleClass::CahnHilliardQuartic;
    if (s == "reaction-diffusion") return regime::ExampleClass::ReactionDiffusion;
    throw CLI::ValidationError("--class", "unknown example class '" + s + "'");
}

regime::RegimeParams params_from_flags(const std::string& cls, int d, const std::string& gamma,
                                       const std::string& theta, const std::string& mu,
                                       const std::string& nu, const std::string& rho,
                                       const std::string& p, const std::string& r, bool bounded) {
    const regime::ExampleClass c = class_from(cls);
    const Rational g = Rational::parse(gamma), th = Rational::parse(theta);
    switch (c) {
        case regime::ExampleClass::AbstractFractionalHeat:
            return regime::RegimeParams::fractional_heat(d, g, th, Rational::parse(mu),
                                                         Rational::parse(nu), Rational::parse(rho),
                                                         bounded);
        case regime::ExampleClass::Burgers:
            return regime::RegimeParams::burgers(d, g, th, Rational::parse(mu), Rational::parse(nu),
                                                 Rational::parse(rho));
        case regime::ExampleClass::NavierStokes:
            return regime::RegimeParams::navier_stokes(d, g, th, Rational::parse(mu),
                                                       Rational::parse(nu), Rational::parse(rho));
        case regime::ExampleClass::CahnHilliard:
            return regime::RegimeParams::cahn_hilliard(d, th, Rational::parse(rho));
        case regime::ExampleClass::CahnHilliardQuartic:
            return regime::RegimeParams::cahn_hilliard_quartic(d, th, Rational::parse(rho));
        case regime::ExampleClass::ReactionDiffusion:
            return regime::RegimeParams::reaction_diffusion(d, th, Rational::parse(rho),
                                                            Rational::parse(p), Rational::parse(r));
    }
    throw CLI::ValidationError("--class", "unknown class");
}

std::string verdict_json(const regime::RegimeParams& params, const regime::RegimeVerdict& v) {
    std::string s = "{";
    s += "\"class\":\"" + regime::to_string(params.example_class) + "\",";
    s += "\"d\":" + std::to_string(params.d) + ",";
    s += "\"gamma\":\"" + params.gamma.str() + "\",";
    s += "\"theta\":\"" + params.theta.str() + "\",";
    s += "\"mu\":\"" + params.mu.str() + "\",";
    s += "\"nu\":\"" + params.nu.str() + "\",";
    s += "\"rho\":\"" + params.rho.str() + "\",";
    s += std::string("\"weak_daalpha\":") + (v.weak_DAalpha ? "true" : "false") + ",";
    s += std::string("\"weak_h\":") + (v.weak_H ? "true" : "false") + ",";
    s += std::string("\"pathwise_daalpha\":") + (v.pathwise_DAalpha ? "true" : "false") + ",";
    s += std::string("\"pathwise_h\":") + (v.pathwise_H ? "true" : "false") + ",";
    s += std::string("\"critical\":") + (v.critical ? "true" : "false") + ",";
    s += "\"failed\":[";
    for (std::size_t i = 0; i < v.failed_conditions.size(); ++i) {
        if (i) s += ",";
        s += "\"" + v.failed_conditions[i].name + ": " + v.failed_conditions[i].rendered + "\"";
    }
    s += "],\"notes\":[";
    for (std::size_t i = 0; i < v.notes.size(); ++i) {
        if (i) s += ",";
        s += "\"" + v.notes[i] + "\"";
    }
    s += "]}";
    return s;
}

std::string interval_str(const regime::RatInterval& iv) {
    std::string s = iv.lo_open ? "(" : "[";
    s += iv.lo.str() + ", " + iv.hi.str();
    s += iv.hi_open ? ")" : "]";
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sselab: spectral lab for singular stochastic evolution equations"};
    app.require_subcommand(1);

    std::string cls = "fractional-heat", gamma = "1", theta = "1/2", mu = "0", nu = "0", rho = "0";
    std::string pp = "3", rr = "4", offset = "1/100", scenario = "weak", format = "markdown";
    std::string config_path, out_dir = ".";
    int d = 1;
    bool bounded = false;
    std::string level = "weak";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double demo_theta = 0.5, demo_T = 1.0;
    std::size_t demo_grid = 1000;

    auto* regime_cmd = app.add_subcommand("regime", "exact admissibility tooling");
    regime_cmd->require_subcommand(1);

    auto add_param_flags = [&](CLI::App* cmd, bool with_rho) {
        cmd->add_option("--class", cls, "example class")->capture_default_str();
        cmd->add_option("--d", d, "space dimension (1,2,3)")->capture_default_str();
        cmd->add_option("--gamma", gamma, "hyperviscosity p/q")->capture_default_str();
        cmd->add_option("--theta", theta, "Hoelder exponent p/q")->capture_default_str();
        cmd->add_option("--mu", mu, "inner smoothing exponent p/q")->capture_default_str();
        cmd->add_option("--nu", nu, "outer differential order p/q")->capture_default_str();
        if (with_rho) cmd->add_option("--rho", rho, "noise colour p/q")->capture_default_str();
        cmd->add_option("--p", pp, "reaction-diffusion growth p")->capture_default_str();
        cmd->add_option("--r", rr, "reaction-diffusion integrability r")->capture_default_str();
        cmd->add_flag("--bounded", bounded, "drift is bounded");
    };

    auto* check_cmd = regime_cmd->add_subcommand("check", "evaluate one tuple");
    add_param_flags(check_cmd, true);
    check_cmd->add_option("--level", level, "admissibility level: weak|pathwise")
        ->capture_default_str();

    auto* rho_cmd = regime_cmd->add_subcommand("rho-interval", "admissible noise colours");
    add_param_flags(rho_cmd, false);

    auto* table_cmd = regime_cmd->add_subcommand("table", "emit a built-in admissibility table");
    table_cmd->add_option("--class", cls, "fractional-heat|burgers|navier-stokes")
        ->capture_default_str();
    table_cmd->add_option("--scenario", scenario, "weak|pathwise-theta-high|pathwise-theta-low")
        ->capture_default_str();
    table_cmd->add_option("--offset", offset, "base offset p/q for the +/- marks")
        ->capture_default_str();
    table_cmd->add_option("--format", format, "csv|json|markdown")->capture_default_str();

    auto add_config_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment config")->required();
        cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--format", format, "csv|json|markdown")->capture_default_str();
    };

    add_config_flags(app.add_subcommand("simulate", "Galerkin ensemble simulation"));
    add_config_flags(app.add_subcommand("couple", "same-noise coupling of two solutions"));
    add_config_flags(app.add_subcommand("galerkin", "mode-truncation convergence study"));
    auto* kol = app.add_subcommand("kolmogorov", "elliptic Kolmogorov tooling");
    kol->require_subcommand(1);
    add_config_flags(kol->add_subcommand("solve", "fixed-point solve of u_{n,k}"));
    add_config_flags(kol->add_subcommand("monitor", "n/k sweep of the uniform estimates"));

    auto* demo = app.add_subcommand("demo", "worked demonstrations");
    auto* nonuni = demo->add_subcommand("nonuniqueness", "two solutions of x' = |x|^theta sgn x");
    nonuni->add_option("--theta", demo_theta, "Hoelder exponent in (0,1)")->capture_default_str();
    nonuni->add_option("--T", demo_T, "horizon")->capture_default_str();
    nonuni->add_option("--grid", demo_grid, "grid points")->capture_default_str();
    nonuni->add_option("--out", out_dir, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check_cmd->parsed()) {
            const regime::RegimeParams params =
                params_from_flags(cls, d, gamma, theta, mu, nu, rho, pp, rr, bounded);
            const regime::RegimeVerdict v = regime::check(params);
            std::cout << verdict_json(params, v) << "\n";
            const bool ok = level == "pathwise" ? v.pathwise_DAalpha : v.weak_DAalpha;
            return ok ? 0 : 1;
        }
        if (rho_cmd->parsed()) {
            const regime::RegimeParams params =
                params_from_flags(cls, d, gamma, theta, mu, nu, "0", pp, rr, bounded);
            const regime::RhoIntervals iv = regime::admissible_rho(params);
            std::cout << "{\"weak\":[";
            for (std::size_t i = 0; i < iv.weak.size(); ++i)
                std::cout << (i ? "," : "") << "\"" << interval_str(iv.weak[i]) << "\"";
            std::cout << "],\"pathwise\":[";
            for (std::size_t i = 0; i < iv.pathwise.size(); ++i)
                std::cout << (i ? "," : "") << "\"" << interval_str(iv.pathwise[i]) << "\"";
            std::cout << "]}\n";
            return 0;
        }
        if (table_cmd->parsed()) {
            regime::TableScenario sc;
            if (scenario == "weak") sc = regime::TableScenario::Weak;
            else if (scenario == "pathwise-theta-high") sc = regime::TableScenario::PathwiseThetaHigh;
            else if (scenario == "pathwise-theta-low") sc = regime::TableScenario::PathwiseThetaLow;
            else {
                std::cerr << "config error: unknown scenario '" << scenario << "'\n";
                return 2;
            }
            const regime::TableResult t =
                regime::emit_table(class_from(cls), sc, Rational::parse(offset));
            if (format == "csv") std::cout << regime::render_csv(t);
            else if (format == "json") std::cout << regime::render_json(t) << "\n";
            else std::cout << regime::render_markdown(t);
            return 0;
        }
        for (const char* name : {"simulate", "couple", "galerkin"}) {
            CLI::App* sub = app.get_subcommand(name);
            if (sub->parsed())
                return sselab::experiments::run_experiment(
                    config_path, out_dir,
                    seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt, format, name);
        }
        if (kol->parsed()) {
            const std::string kind = kol->get_subcommand("solve")->parsed() ? "kolmogorov-solve"
                                                                            : "kolmogorov-monitor";
            return sselab::experiments::run_experiment(
                config_path, out_dir, seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                format, kind);
        }
        if (nonuni->parsed()) {
            const auto r = sselab::experiments::nonuniqueness_demo(demo_theta, demo_T, demo_grid);
            std::cout << "{\"theta\":" << r.theta << ",\"T\":" << r.horizon
                      << ",\"grid\":" << r.grid << ",\"residual_zero_solution\":" << r.residual_zero
                      << ",\"residual_closed_form\":" << r.residual_closed_form
                      << ",\"residual_finite_difference\":" << r.residual_fd
                      << ",\"terminal_separation\":" << r.terminal_separation << "}\n";
            return 0;
        }
    } catch (const regime::ParamError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
