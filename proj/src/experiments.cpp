#include "sselab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "sselab/kolmogorov.hpp"
#include "sselab/regime_tables.hpp"

namespace sselab::experiments {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void expect_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

Rational parse_rational(const json& j, const std::string& where) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) {
        auto r = from_double(j.get<double>(), 100000);
        if (r) return *r;
    }
    throw ConfigError(where + ": expected a rational (\"p/q\" or integer)");
}

spectral::SpectralOperator parse_operator(const json& j) {
    expect_keys(j, {"basis", "n_modes", "power"}, "operator");
    if (!j.contains("basis") || !j.contains("n_modes")) throw ConfigError("operator: basis and n_modes required");
    const std::string b = j.at("basis").get<std::string>();
    spectral::Basis basis;
    if (b == "dirichlet-sine") basis = spectral::Basis::DirichletSine;
    else if (b == "neumann-cosine") basis = spectral::Basis::NeumannShiftedCosine;
    else throw ConfigError("operator.basis: 'dirichlet-sine' or 'neumann-cosine'");
    const auto n = j.at("n_modes").get<std::size_t>();
    const double power = j.value("power", 1.0);
    return spectral::SpectralOperator(basis, n, power);
}

drift::ScalarF parse_scalar_f(const json& j, const std::string& where) {
    expect_keys(j, {"kind", "theta", "value"}, where);
    const std::string k = j.at("kind").get<std::string>();
    drift::ScalarF f;
    if (k == "power-holder") f.kind = drift::FKind::PowerHolder;
    else if (k == "bounded-holder") f.kind = drift::FKind::BoundedHolder;
    else if (k == "sine") f.kind = drift::FKind::Sine;
    else if (k == "const") f.kind = drift::FKind::Const;
    else throw ConfigError(where + ".kind: unknown scalar function '" + k + "'");
    f.theta = j.value("theta", 0.5);
    f.c = j.value("value", 0.0);
    if ((f.kind == drift::FKind::PowerHolder || f.kind == drift::FKind::BoundedHolder) &&
        (f.theta <= 0.0 || f.theta >= 1.0))
        throw ConfigError(where + ".theta must lie in (0,1)");
    return f;
}

drift::DriftSpec parse_drift(const json& j) {
    expect_keys(j, {"kind", "f", "mu", "nu", "f1", "f2"}, "drift");
    const std::string k = j.at("kind").get<std::string>();
    if (k == "zero") return drift::DriftSpec::zero();
    if (k == "composition") {
        if (!j.contains("f")) throw ConfigError("drift: composition requires 'f'");
        return drift::DriftSpec::composition(parse_scalar_f(j.at("f"), "drift.f"),
                                             j.contains("mu") ? parse_rational(j.at("mu"), "drift.mu") : Rational(0),
                                             j.contains("nu") ? parse_rational(j.at("nu"), "drift.nu") : Rational(0));
    }
    if (k == "burgers") return drift::DriftSpec::burgers();
    if (k == "cahn-hilliard" || k == "reaction-diffusion") {
        if (!j.contains("f1")) throw ConfigError("drift: '" + k + "' requires 'f1'");
        std::vector<double> f1 = j.at("f1").get<std::vector<double>>();
        drift::ScalarF f2{drift::FKind::Const, 0.5, 0.0};
        if (j.contains("f2")) f2 = parse_scalar_f(j.at("f2"), "drift.f2");
        return k == "cahn-hilliard" ? drift::DriftSpec::cahn_hilliard(std::move(f1), f2)
                                    : drift::DriftSpec::reaction_diffusion(std::move(f1), f2);
    }
    throw ConfigError("drift.kind: unknown drift '" + k + "'");
}

solver::SimConfig parse_sim(const json& j) {
    expect_keys(j,
                {"experiment", "operator", "drift", "noise", "time", "initial", "initial_y",
                 "ensemble", "seed", "blowup_bound", "substeps", "rough_alpha", "levels",
                 "perturb_mode", "magnitudes"},
                "config");
    solver::SimConfig cfg{parse_operator(j.at("operator"))};
    cfg.drift_spec = parse_drift(j.at("drift"));
    if (j.contains("noise")) {
        expect_keys(j.at("noise"), {"delta", "disabled"}, "noise");
        cfg.delta = j.at("noise").value("delta", 0.0);
        cfg.no_noise = j.at("noise").value("disabled", false);
    }
    const json& t = j.at("time");
    expect_keys(t, {"horizon", "step", "save_times"}, "time");
    cfg.horizon = t.at("horizon").get<double>();
    cfg.step = t.at("step").get<double>();
    if (t.contains("save_times")) cfg.save_times = t.at("save_times").get<std::vector<double>>();
    else cfg.save_times = {cfg.horizon};

    const json& init = j.at("initial");
    expect_keys(init, {"coeffs", "sobolev_index", "mode", "amplitude"}, "initial");
    if (init.contains("coeffs")) {
        cfg.initial.coeffs = init.at("coeffs").get<std::vector<double>>();
        cfg.initial.sobolev_index = init.value("sobolev_index", 0.0);
    } else {
        cfg.initial = cfg.op.mode(init.at("mode").get<std::size_t>(), init.value("amplitude", 1.0));
    }
    if (init.contains("sobolev_index") && init.at("sobolev_index").get<double>() < 0.0)
        cfg.rough_alpha = -init.at("sobolev_index").get<double>();
    if (j.contains("rough_alpha")) cfg.rough_alpha = j.at("rough_alpha").get<double>();

    cfg.ensemble = j.value("ensemble", std::size_t{1});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.blowup_bound = j.value("blowup_bound", 1e6);
    cfg.noise_substeps = j.value("substeps", 1);
    return cfg;
}

json verdict_to_json(const regime::RegimeVerdict& v) {
    json out;
    out["weak_daalpha"] = v.weak_DAalpha;
    out["weak_h"] = v.weak_H;
    out["pathwise_daalpha"] = v.pathwise_DAalpha;
    out["pathwise_h"] = v.pathwise_H;
    out["critical"] = v.critical;
    out["failed"] = json::array();
    for (const auto& f : v.failed_conditions) out["failed"].push_back(f.name + ": " + f.rendered);
    out["notes"] = v.notes;
    return out;
}

json params_to_json(const regime::RegimeParams& p) {
    json out;
    out["class"] = regime::to_string(p.example_class);
    out["d"] = p.d;
    out["gamma"] = p.gamma.str();
    out["theta"] = p.theta.str();
    out["mu"] = p.mu.str();
    out["nu"] = p.nu.str();
    out["rho"] = p.rho.str();
    out["drift_bounded"] = p.drift_bounded;
    if (p.example_class == regime::ExampleClass::ReactionDiffusion) {
        out["p"] = p.p.str();
        out["r"] = p.r.str();
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

std::string sim_csv(const solver::Ensemble& e) {
    std::string csv = "t,mean_norm,mean_norm_sq,se_norm_sq,min_norm,max_norm\n";
    for (const auto& s : e.stats) {
        csv += fmt(s.t) + "," + fmt(s.mean_norm) + "," + fmt(s.mean_norm_sq) + "," +
               fmt(s.se_norm_sq) + "," + fmt(s.min_norm) + "," + fmt(s.max_norm) + "\n";
    }
    return csv;
}

json sim_summary(const solver::SimConfig& cfg, const solver::Ensemble& e, const json& config_echo) {
    json out;
    out["config"] = config_echo;
    out["regime"] = json::object();
    try {
        const regime::RegimeParams rp = solver::regime_params_for(cfg);
        out["regime"]["params"] = params_to_json(rp);
        out["regime"]["verdict"] = verdict_to_json(regime::check(rp));
    } catch (const std::exception& ex) {
        out["regime"]["error"] = ex.what();
    }
    if (!e.regime_warning.empty()) out["warning"] = e.regime_warning;
    std::uint64_t checksum = 0;
    std::uint64_t draws = 0;
    bool truncated = false;
    for (const auto& t : e.trajectories) {
        checksum ^= t.draw_checksum;
        draws += t.draw_count;
        truncated = truncated || t.truncated;
    }
    out["draw_checksum"] = checksum;
    out["draw_count"] = draws;
    out["any_truncated"] = truncated;
    return out;
}

int run_parsed(const json& cfg_json, const std::filesystem::path& out,
               std::optional<std::uint64_t> seed_override, const std::string& format);

}  // namespace

DemoResult nonuniqueness_demo(double theta, double horizon, std::size_t grid_points) {
    if (theta <= 0.0 || theta >= 1.0) throw spectral::ParamError("theta must lie in (0,1)");
    if (horizon <= 0.0 || grid_points < 2) throw spectral::ParamError("bad demo grid");
    DemoResult r;
    r.theta = theta;
    r.horizon = horizon;
    r.grid = grid_points;

    const double p = 1.0 / (1.0 - theta);
    auto x_closed = [&](double t) { return std::pow((1.0 - theta) * t, p); };
    auto x_prime = [&](double t) { return std::pow((1.0 - theta) * t, p - 1.0); };

    double worst_analytic = 0.0, worst_fd = 0.0;
    const double h = horizon / static_cast<double>(grid_points);
    for (std::size_t i = 1; i <= grid_points; ++i) {
        const double t = h * static_cast<double>(i);
        const double x = x_closed(t);
        // analytic: x'(t) = ((1-theta) t)^{theta/(1-theta)} = x^theta exactly
        worst_analytic = std::max(worst_analytic, std::abs(x_prime(t) - std::pow(x, theta)));
        if (i < grid_points) {
            const double fd = (x_closed(t + h) - x_closed(t - h)) / (2.0 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - std::pow(x, theta)));
        }
    }
    r.residual_zero = 0.0;  // x == 0: 0' - |0|^theta = 0 identically
    r.residual_closed_form = worst_analytic;
    r.residual_fd = worst_fd;
    r.terminal_separation = x_closed(horizon);
    return r;
}

ContinuousDependenceReport continuous_dependence(const solver::SimConfig& base,
                                                 std::size_t perturb_mode,
                                                 const std::vector<double>& magnitudes) {
    if (magnitudes.empty()) throw spectral::ParamError("empty magnitude ladder");
    ContinuousDependenceReport rep;
    const regime::RegimeParams rp = solver::regime_params_for(base);
    rep.verdict = regime::check(rp);
    if (!rep.verdict.pathwise_DAalpha || !rp.drift_bounded) {
        std::string why = "continuous dependence requires a pathwise-admissible tuple with "
                          "bounded drift;";
        for (const auto& f : rep.verdict.failed_conditions)
            why += " [" + f.name + "] " + f.rendered;
        if (!rp.drift_bounded) why += " [drift] unbounded drift";
        throw std::runtime_error(why);
    }

    for (double m : magnitudes) {
        spectral::ModeVector x = base.initial;
        x.coeffs.resize(base.op.n_modes(), 0.0);
        spectral::ModeVector y = x;
        y.coeffs[perturb_mode - 1] += m;
        const solver::CouplingReport c = solver::couple(base, x, y);
        rep.rows.push_back(LadderRow{m, c.ratio, c.sup_rms_diff, c.zero_numerator});
        rep.max_ratio = std::max(rep.max_ratio, c.ratio);
    }
    return rep;
}

namespace {

int run_parsed(const json& cfg_json, const std::filesystem::path& out,
               std::optional<std::uint64_t> seed_override, const std::string& format) {
    const std::string kind = cfg_json.at("experiment").get<std::string>();

    if (kind == "regime-table") {
        expect_keys(cfg_json, {"experiment", "class", "scenario", "offset"}, "config");
        const std::string cls_s = cfg_json.at("class").get<std::string>();
        regime::ExampleClass cls;
        if (cls_s == "fractional-heat" || cls_s == "heat")
            cls = regime::ExampleClass::AbstractFractionalHeat;
        else if (cls_s == "burgers") cls = regime::ExampleClass::Burgers;
        else if (cls_s == "navier-stokes") cls = regime::ExampleClass::NavierStokes;
        else throw ConfigError("regime-table: class must be heat/fractional-heat/burgers/navier-stokes");
        const std::string sc = cfg_json.at("scenario").get<std::string>();
        regime::TableScenario scenario;
        if (sc == "weak") scenario = regime::TableScenario::Weak;
        else if (sc == "pathwise-theta-high") scenario = regime::TableScenario::PathwiseThetaHigh;
        else if (sc == "pathwise-theta-low") scenario = regime::TableScenario::PathwiseThetaLow;
        else throw ConfigError("regime-table: scenario must be weak/pathwise-theta-high/pathwise-theta-low");
        const Rational off = cfg_json.contains("offset")
                                 ? parse_rational(cfg_json.at("offset"), "offset")
                                 : Rational(1, 100);
        const regime::TableResult table = regime::emit_table(cls, scenario, off);
        std::string body = format == "csv" ? regime::render_csv(table)
                           : format == "json" ? regime::render_json(table)
                                              : regime::render_markdown(table);
        write_file(out / ("table." + (format == "markdown" ? std::string("md") : format)), body);
        std::cout << body;
        return 0;
    }

    if (kind == "nonuniqueness") {
        expect_keys(cfg_json, {"experiment", "theta", "T", "grid"}, "config");
        const DemoResult r = nonuniqueness_demo(cfg_json.value("theta", 0.5),
                                                cfg_json.value("T", 1.0),
                                                cfg_json.value("grid", std::size_t{1000}));
        json s;
        s["theta"] = r.theta;
        s["T"] = r.horizon;
        s["grid"] = r.grid;
        s["residual_zero_solution"] = r.residual_zero;
        s["residual_closed_form"] = r.residual_closed_form;
        s["residual_finite_difference"] = r.residual_fd;
        s["terminal_separation"] = r.terminal_separation;
        write_file(out / "nonuniqueness.json", s.dump(2) + "\n");
        std::cout << s.dump(2) << "\n";
        return 0;
    }

    if (kind == "simulate" || kind == "couple" || kind == "galerkin" ||
        kind == "continuous-dependence") {
        solver::SimConfig cfg = parse_sim(cfg_json);
        if (seed_override) cfg.seed = *seed_override;
        json echo = cfg_json;
        if (seed_override) echo["seed"] = *seed_override;

        if (kind == "simulate") {
            const solver::Ensemble e = solver::simulate(cfg);
            write_file(out / "simulate.csv", sim_csv(e));
            write_file(out / "summary.json", sim_summary(cfg, e, echo).dump(2) + "\n");
            if (!e.regime_warning.empty()) std::cerr << "warning: " << e.regime_warning << "\n";
            return 0;
        }
        if (kind == "couple") {
            spectral::ModeVector y = cfg.initial;
            if (cfg_json.contains("initial_y")) {
                const json& jy = cfg_json.at("initial_y");
                expect_keys(jy, {"coeffs", "sobolev_index", "mode", "amplitude"}, "initial_y");
                if (jy.contains("coeffs")) y.coeffs = jy.at("coeffs").get<std::vector<double>>();
                else y = cfg.op.mode(jy.at("mode").get<std::size_t>(), jy.value("amplitude", 1.0));
            }
            const solver::CouplingReport rep = solver::couple(cfg, cfg.initial, y);
            std::string csv = "t,rms_diff_alpha,semigroup_part,remainder_part\n";
            for (std::size_t i = 0; i < rep.save_times.size(); ++i)
                csv += fmt(rep.save_times[i]) + "," + fmt(rep.rms_diff_alpha[i]) + "," +
                       fmt(rep.semigroup_part[i]) + "," + fmt(rep.remainder_part[i]) + "\n";
            write_file(out / "couple.csv", csv);
            json s;
            s["config"] = echo;
            s["alpha"] = rep.alpha;
            s["initial_distance"] = rep.initial_distance;
            s["sup_rms_diff"] = rep.sup_rms_diff;
            s["ratio"] = rep.ratio;
            s["zero_numerator"] = rep.zero_numerator;
            s["checksums_equal"] = rep.checksums_equal;
            const regime::RegimeParams rp = solver::regime_params_for(cfg);
            s["regime"]["params"] = params_to_json(rp);
            s["regime"]["verdict"] = verdict_to_json(regime::check(rp));
            write_file(out / "summary.json", s.dump(2) + "\n");
            return 0;
        }
        if (kind == "galerkin") {
            if (!cfg_json.contains("levels")) throw ConfigError("galerkin: 'levels' required");
            const auto levels = cfg_json.at("levels").get<std::vector<std::size_t>>();
            const solver::GalerkinStudy st = solver::galerkin_study(cfg, levels);
            std::string csv = "n_modes,sup_weighted_error,sup_error_sq,se_error_sq,analytic_tail\n";
            for (const auto& l : st.levels)
                csv += std::to_string(l.n_modes) + "," + fmt(l.sup_weighted_error) + "," +
                       fmt(l.sup_error_sq) + "," + fmt(l.se_error_sq) + "," +
                       fmt(l.analytic_tail) + "\n";
            write_file(out / "galerkin.csv", csv);
            json s;
            s["config"] = echo;
            s["reference"] = st.reference;
            const regime::RegimeParams rp = solver::regime_params_for(cfg);
            s["regime"]["params"] = params_to_json(rp);
            s["regime"]["verdict"] = verdict_to_json(regime::check(rp));
            write_file(out / "summary.json", s.dump(2) + "\n");
            return 0;
        }
        // continuous-dependence
        if (!cfg_json.contains("magnitudes")) throw ConfigError("continuous-dependence: 'magnitudes' required");
        const auto mags = cfg_json.at("magnitudes").get<std::vector<double>>();
        const std::size_t pm = cfg_json.value("perturb_mode", std::size_t{1});
        const ContinuousDependenceReport rep = continuous_dependence(cfg, pm, mags);
        std::string csv = "magnitude,ratio,sup_rms,zero_numerator\n";
        for (const auto& row : rep.rows)
            csv += fmt(row.magnitude) + "," + fmt(row.ratio) + "," + fmt(row.sup_rms) + "," +
                   (row.zero_numerator ? "1" : "0") + "\n";
        write_file(out / "ladder.csv", csv);
        json s;
        s["config"] = echo;
        s["max_ratio"] = rep.max_ratio;
        const regime::RegimeParams rp = solver::regime_params_for(cfg);
        s["regime"]["params"] = params_to_json(rp);
        s["regime"]["verdict"] = verdict_to_json(rep.verdict);
        write_file(out / "summary.json", s.dump(2) + "\n");
        return 0;
    }

    if (kind == "kolmogorov-solve" || kind == "kolmogorov-monitor") {
        expect_keys(cfg_json,
                    {"experiment", "operator", "delta", "drift", "forcing", "k", "cbar", "z0",
                     "grid", "quad", "mc", "tol", "max_iter", "seed", "theta", "C_B", "M",
                     "n_sweep", "k_sweep", "gamma1", "gamma2", "safety"},
                    "config");
        const spectral::SpectralOperator op = parse_operator(cfg_json.at("operator"));
        const double delta = cfg_json.value("delta", 0.0);
        drift::DriftSpec spec = cfg_json.contains("drift") ? parse_drift(cfg_json.at("drift"))
                                                           : drift::DriftSpec::zero();
        kolmogorov::GridSpec grid;
        if (cfg_json.contains("grid")) {
            expect_keys(cfg_json.at("grid"), {"radius", "nodes"}, "grid");
            grid.radius = cfg_json.at("grid").value("radius", 1.0);
            grid.nodes_per_axis = cfg_json.at("grid").value("nodes", std::size_t{9});
        }
        kolmogorov::QuadOptions quad;
        if (cfg_json.contains("quad")) {
            expect_keys(cfg_json.at("quad"), {"nodes", "grading", "tol"}, "quad");
            quad.n_nodes = cfg_json.at("quad").value("nodes", 64);
            quad.grading = cfg_json.at("quad").value("grading", 2.0);
            quad.tol = cfg_json.at("quad").value("tol", 1e-4);
        }
        kolmogorov::McOptions mc;
        if (cfg_json.contains("mc")) {
            expect_keys(cfg_json.at("mc"), {"samples", "antithetic", "deterministic", "gh_nodes"},
                        "mc");
            mc.samples = cfg_json.at("mc").value("samples", std::size_t{2000});
            mc.antithetic = cfg_json.at("mc").value("antithetic", true);
            mc.deterministic = cfg_json.at("mc").value("deterministic", false);
            mc.gh_nodes = cfg_json.at("mc").value("gh_nodes", std::size_t{20});
        }
        mc.seed = seed_override.value_or(cfg_json.value("seed", std::uint64_t{0}));
        const double tol = cfg_json.value("tol", 1e-4);
        const std::size_t max_iter = cfg_json.value("max_iter", std::size_t{20});

        if (kind == "kolmogorov-monitor") {
            const double theta = cfg_json.value("theta", 0.5);
            const double C_B = cfg_json.value("C_B", 1.0);
            const double M = cfg_json.value("M", 1.0);
            const auto n_sweep = cfg_json.at("n_sweep").get<std::vector<std::size_t>>();
            const auto k_sweep = cfg_json.at("k_sweep").get<std::vector<std::size_t>>();
            const auto g1 = cfg_json.value("gamma1", std::vector<double>{0.0});
            const auto g2 = cfg_json.value("gamma2", std::vector<double>{});
            const auto rep = kolmogorov::estimate_monitor(op, delta, spec, theta, C_B, M, n_sweep,
                                                          k_sweep, g1, g2, grid, quad, mc, tol,
                                                          max_iter, cfg_json.value("safety", 2.0));
            std::string csv = "n,k,cbar,est0";
            for (double gm : rep.gamma1) csv += ",est1_gamma_" + fmt(gm);
            for (double gp : rep.gamma2) csv += ",est2_gamma_" + fmt(gp);
            csv += "\n";
            for (const auto& e : rep.entries) {
                csv += std::to_string(e.n) + "," + std::to_string(e.k) + "," + fmt(e.cbar) + "," +
                       fmt(e.est0);
                for (double v : e.est1) csv += "," + fmt(v);
                for (double v : e.est2) csv += "," + fmt(v);
                csv += "\n";
            }
            write_file(out / "monitor.csv", csv);
            json s;
            s["config"] = cfg_json;
            try {
                solver::SimConfig pseudo{op};
                pseudo.drift_spec = spec;
                pseudo.delta = delta;
                const regime::RegimeParams rp = solver::regime_params_for(pseudo);
                s["regime"]["params"] = params_to_json(rp);
                s["regime"]["verdict"] = verdict_to_json(regime::check(rp));
            } catch (const std::exception& ex) {
                s["regime"]["error"] = ex.what();
            }
            s["uniform_est0"] = rep.uniform_est0;
            s["uniform_est1"] = rep.uniform_est1;
            write_file(out / "summary.json", s.dump(2) + "\n");
            std::cout << csv;
            return 0;
        }

        kolmogorov::KolmogorovProblem pb{op, delta, spec, {}, 1, 1.0, false, {}};
        if (cfg_json.contains("forcing")) {
            const json& f = cfg_json.at("forcing");
            expect_keys(f, {"type", "value", "j", "k"}, "forcing");
            const std::string ft = f.at("type").get<std::string>();
            if (ft == "constant") pb.forcing.type = kolmogorov::ForcingType::Constant;
            else if (ft == "coordinate") pb.forcing.type = kolmogorov::ForcingType::Coordinate;
            else if (ft == "coordinate-squared")
                pb.forcing.type = kolmogorov::ForcingType::CoordinateSquared;
            else if (ft == "mode-projection")
                pb.forcing.type = kolmogorov::ForcingType::ModeProjection;
            else throw ConfigError("forcing.type unknown");
            pb.forcing.value = f.value("value", 1.0);
            pb.forcing.j = f.value("j", std::size_t{1});
            pb.forcing.k = f.value("k", std::size_t{1});
        }
        pb.k = cfg_json.value("k", std::size_t{1});
        if (cfg_json.contains("z0")) {
            pb.z0 = cfg_json.at("z0").get<std::vector<double>>();
            pb.critical = true;
        }
        if (cfg_json.contains("cbar")) {
            const json& c = cfg_json.at("cbar");
            if (c.is_number()) {
                pb.cbar = c.get<double>();
            } else {
                expect_keys(c, {"C_B", "M", "theta", "beta", "C_Btilde", "safety"}, "cbar");
                const double beta = c.value("beta", 0.0);
                const double theta = c.value("theta", 0.5);
                const double C_B = c.value("C_B", 1.0);
                const double M = c.value("M", 1.0);
                const double safety = c.value("safety", 2.0);
                pb.cbar = pb.critical
                              ? kolmogorov::cbar_bound_critical(beta, delta, theta, C_B,
                                                                c.value("C_Btilde", 0.0), M,
                                                                op.eigenvalue(1), safety)
                              : kolmogorov::cbar_bound(beta, delta, theta, C_B, M,
                                                       op.eigenvalue(1), safety);
            }
        }
        const kolmogorov::KolmogorovIterate it =
            kolmogorov::solve_u(pb, grid, quad, tol, max_iter, mc);
        json s;
        s["config"] = cfg_json;
        try {
            solver::SimConfig pseudo{op};
            pseudo.drift_spec = spec;
            pseudo.delta = delta;
            const regime::RegimeParams rp = solver::regime_params_for(pseudo);
            s["regime"]["params"] = params_to_json(rp);
            s["regime"]["verdict"] = verdict_to_json(regime::check(rp));
        } catch (const std::exception& ex) {
            s["regime"]["error"] = ex.what();
        }
        s["cbar"] = pb.cbar;
        s["converged"] = it.converged;
        s["sweeps"] = it.sweep_deltas.size();
        s["sweep_deltas"] = it.sweep_deltas;
        s["contraction_ratios"] = it.contraction_ratios;
        s["sup_u"] = it.sup_u;
        s["mc_se"] = it.mc_se;
        s["generator_residual"] = kolmogorov::generator_residual(pb, it);
        write_file(out / "kolmogorov.json", s.dump(2) + "\n");
        std::cout << s.dump(2) << "\n";
        return 0;
    }

    throw ConfigError("unknown experiment kind '" + kind + "'");
}

}  // namespace

int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override, const std::string& format,
                   const std::string& expected_kind) {
    json cfg_json;
    try {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("cannot open config file " + config_path);
        cfg_json = json::parse(is);
        if (!cfg_json.is_object() || !cfg_json.contains("experiment"))
            throw ConfigError("config must be an object with an 'experiment' key");
        if (!expected_kind.empty()) {
            const std::string kind = cfg_json.at("experiment").get<std::string>();
            const bool ok = kind == expected_kind ||
                            (expected_kind == "couple" && kind == "continuous-dependence");
            if (!ok)
                throw ConfigError("config is a '" + kind + "' experiment, but the '" +
                                  expected_kind + "' subcommand was invoked");
        }
    } catch (const json::parse_error& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::filesystem::path out(out_dir);
        std::filesystem::create_directories(out);
        return run_parsed(cfg_json, out, seed_override, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sselab::experiments
