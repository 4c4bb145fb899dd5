#include "sselab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sselab::solver {

using spectral::ModeVector;

double phi1(double z) {
    if (z < 1e-8) return 1.0 - 0.5 * z + z * z / 6.0;
    return -std::expm1(-z) / z;
}

namespace {

std::size_t snap_index(double t, double h, std::size_t n_steps) {
    double idx = t / h;
    auto i = static_cast<std::size_t>(std::llround(idx));
    return std::min(i, n_steps);
}

struct RunResult {
    Trajectory traj;
};

// Runs one trajectory, recording the state at the requested step indices.
RunResult run_trajectory(const SimConfig& cfg, const ModeVector& x0, std::uint32_t trajectory_id,
                         const std::vector<std::size_t>& save_steps) {
    noise::NoiseStream stream{cfg.seed, trajectory_id, 0, 0};
    const std::size_t n_steps = save_steps.empty() ? 0 : save_steps.back();

    RunResult r;
    r.traj.states.reserve(save_steps.size());
    ModeVector state = x0;
    state.coeffs.resize(cfg.op.n_modes(), 0.0);

    std::size_t next_save = 0;
    auto record_if_due = [&](std::size_t step_idx) {
        while (next_save < save_steps.size() && save_steps[next_save] == step_idx) {
            r.traj.states.push_back(state);
            ++next_save;
        }
    };
    record_if_due(0);

    for (std::size_t m = 0; m < n_steps; ++m) {
        if (!r.traj.truncated) {
            state = step(cfg, state, stream, m);
            double norm = spectral::sobolev_norm(cfg.op, 0.0, state);
            if (!std::isfinite(norm)) {
                throw std::runtime_error("non-finite state at step " + std::to_string(m));
            }
            if (norm > cfg.blowup_bound) {
                r.traj.truncated = true;
                r.traj.truncated_at_step = m;
            }
        }
        record_if_due(m + 1);
    }
    r.traj.draw_count = stream.draw_count;
    r.traj.draw_checksum = stream.checksum;
    return r;
}

std::vector<std::size_t> save_steps_of(const SimConfig& cfg) {
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(cfg.horizon / cfg.step));
    std::vector<std::size_t> steps;
    for (double t : cfg.save_times) steps.push_back(snap_index(t, cfg.step, n_steps));
    std::sort(steps.begin(), steps.end());
    return steps;
}

}  // namespace

ModeVector step(const SimConfig& cfg, const ModeVector& state, noise::NoiseStream& stream,
                std::size_t step_index) {
    if (cfg.step <= 0.0) throw spectral::ParamError("step size must be positive");
    const std::size_t n = cfg.op.n_modes();
    if (state.size() != n) throw spectral::DimensionError("state dimension != n_modes");

    const ModeVector b = drift::eval(cfg.drift_spec, cfg.op, state);
    ModeVector out = state;
    const double h = cfg.step;
    const int S = std::max(1, cfg.noise_substeps);
    const double hf = h / S;

    for (std::size_t k = 0; k < n; ++k) {
        const double lam = cfg.op.eigenvalue(k + 1);
        double v = std::exp(-lam * h) * state.coeffs[k] + h * phi1(lam * h) * b.coeffs[k];
        if (!cfg.no_noise) {
            // fine-grid increments composed exactly through the semigroup
            const double sd = std::sqrt(noise::convolution_variance(lam, cfg.delta, hf));
            double z = 0.0;
            for (int s = 0; s < S; ++s) {
                const double decay = std::exp(-lam * hf * static_cast<double>(S - 1 - s));
                const auto fine_index =
                    static_cast<std::uint32_t>(step_index * static_cast<std::size_t>(S) + s);
                z = z + decay * sd * stream.gaussian(fine_index, static_cast<std::uint32_t>(k + 1));
            }
            v += z;
        }
        out.coeffs[k] = v;
    }
    out.sobolev_index = 0.0;
    return out;
}

regime::RegimeParams regime_params_for(const SimConfig& cfg) {
    using drift::DriftKind;
    const drift::DriftMetadata md = drift::metadata(cfg.drift_spec, cfg.op);
    auto gamma = Rational(1);
    {
        auto g = from_double(cfg.op.power(), 64);
        if (!g) throw spectral::ParamError("operator power is not a small rational");
        gamma = *g;
    }
    auto snap = [](double v) {
        auto r = from_double(v, 1024);
        if (!r) throw spectral::ParamError("parameter is not a small rational");
        return *r;
    };
    const Rational theta = md.theta.value_or(Rational(1, 2));
    const Rational delta = snap(cfg.delta);

    switch (cfg.drift_spec.kind) {
        case DriftKind::Zero:
        case DriftKind::Composition:
            return regime::RegimeParams::fractional_heat(1, gamma, theta, md.alpha * gamma,
                                                         md.beta * gamma, delta * gamma,
                                                         md.bounded);
        case DriftKind::Burgers1d:
            return regime::RegimeParams::burgers(1, gamma, theta, cfg.drift_spec.mu,
                                                 cfg.drift_spec.nu, delta * gamma);
        case DriftKind::CahnHilliard1d:
            return regime::RegimeParams::cahn_hilliard(1, theta, delta * Rational(2));
        case DriftKind::ReactionDiffusion1d: {
            const auto degree = static_cast<std::int64_t>(cfg.drift_spec.f1_coeffs.size()) - 1;
            const Rational p(degree + 1);
            const Rational r = Rational(2) * (p - Rational(1));
            return regime::RegimeParams::reaction_diffusion(1, theta, delta, p, r);
        }
    }
    throw spectral::ParamError("unknown drift kind");
}

namespace {

// The unbounded power-law drift needs initial data declared in D(A^alpha);
// pairing it with plain H data is a configuration mistake, not an experiment.
void reject_unbounded_h_data(const SimConfig& cfg) {
    if (cfg.drift_spec.kind != drift::DriftKind::Composition) return;
    if (cfg.drift_spec.F.kind != drift::FKind::PowerHolder) return;
    const double alpha = drift::metadata(cfg.drift_spec, cfg.op).alpha.to_double();
    if (alpha > 0.0 && cfg.initial.sobolev_index < alpha)
        throw drift::ConfigError(
            "power-law drift with mu > 0 requires initial data declared in D(A^alpha); "
            "select the bounded truncation or raise the data's sobolev_index");
}

}  // namespace

Ensemble simulate(const SimConfig& cfg) {
    if (cfg.ensemble == 0) throw spectral::ParamError("ensemble must be >= 1");
    if (cfg.step <= 0.0 || cfg.horizon <= 0.0) throw spectral::ParamError("bad time grid");
    drift::validate(cfg.drift_spec, cfg.op);
    reject_unbounded_h_data(cfg);

    Ensemble out;
    out.save_times = cfg.save_times;
    try {
        regime::RegimeVerdict v = regime::check(regime_params_for(cfg));
        if (!v.weak_DAalpha) {
            out.regime_warning = "tuple is not weakly admissible (exploratory run):";
            for (const auto& f : v.failed_conditions)
                out.regime_warning += " [" + f.name + "] " + f.rendered;
        }
    } catch (const std::exception& e) {
        out.regime_warning = std::string("regime check unavailable: ") + e.what();
    }

    const auto save_steps = save_steps_of(cfg);
    for (std::size_t t = 0; t < cfg.ensemble; ++t) {
        out.trajectories.push_back(
            run_trajectory(cfg, cfg.initial, static_cast<std::uint32_t>(t), save_steps).traj);
    }

    const std::size_t n_times = save_steps.size();
    out.stats.resize(n_times);
    for (std::size_t i = 0; i < n_times; ++i) {
        TimeStats& s = out.stats[i];
        s.t = static_cast<double>(save_steps[i]) * cfg.step;
        double sum = 0.0, sum_sq = 0.0, sum_sq_sq = 0.0;
        s.min_norm = std::numeric_limits<double>::infinity();
        s.max_norm = 0.0;
        for (const auto& tr : out.trajectories) {
            const double nn = spectral::sobolev_norm(cfg.op, 0.0, tr.states[i]);
            sum += nn;
            sum_sq += nn * nn;
            sum_sq_sq += nn * nn * nn * nn;
            s.min_norm = std::min(s.min_norm, nn);
            s.max_norm = std::max(s.max_norm, nn);
        }
        const double N = static_cast<double>(cfg.ensemble);
        s.mean_norm = sum / N;
        s.mean_norm_sq = sum_sq / N;
        const double var = std::max(0.0, sum_sq_sq / N - s.mean_norm_sq * s.mean_norm_sq);
        s.se_norm_sq = std::sqrt(var / N);
    }
    return out;
}

GalerkinStudy galerkin_study(const SimConfig& cfg, const std::vector<std::size_t>& mode_levels) {
    if (mode_levels.size() < 2) throw spectral::ParamError("need at least two mode levels");
    for (std::size_t i = 1; i < mode_levels.size(); ++i)
        if (mode_levels[i] <= mode_levels[i - 1])
            throw spectral::ParamError("mode levels must increase");
    const std::size_t ref = mode_levels.back();
    if (ref > cfg.op.n_modes()) throw spectral::ParamError("reference exceeds operator modes");

    const auto save_steps = save_steps_of(cfg);
    const std::size_t n_times = save_steps.size();

    auto config_at_level = [&cfg](std::size_t n) {
        SimConfig c = cfg;
        c.op = spectral::SpectralOperator(cfg.op.basis(), n, cfg.op.power());
        c.initial = cfg.initial;
        c.initial.coeffs.resize(n, 0.0);
        return c;
    };

    // reference paths per trajectory
    const SimConfig ref_cfg = config_at_level(ref);
    std::vector<std::vector<ModeVector>> ref_paths(cfg.ensemble);
    for (std::size_t t = 0; t < cfg.ensemble; ++t)
        ref_paths[t] =
            run_trajectory(ref_cfg, ref_cfg.initial, static_cast<std::uint32_t>(t), save_steps)
                .traj.states;

    GalerkinStudy study;
    study.reference = ref;
    for (std::size_t i = 0; i < n_times; ++i)
        study.save_times.push_back(static_cast<double>(save_steps[i]) * cfg.step);

    for (std::size_t li = 0; li < mode_levels.size(); ++li) {
        const std::size_t n = mode_levels[li];
        const SimConfig lvl_cfg = config_at_level(n);
        GalerkinLevel lvl;
        lvl.n_modes = n;
        lvl.per_time_error.assign(n_times, 0.0);
        lvl.per_time_error_sq.assign(n_times, 0.0);
        lvl.per_time_se_sq.assign(n_times, 0.0);
        std::vector<double> sq_acc(n_times, 0.0), sq_sq_acc(n_times, 0.0), norm_acc(n_times, 0.0);

        for (std::size_t t = 0; t < cfg.ensemble; ++t) {
            const auto path =
                run_trajectory(lvl_cfg, lvl_cfg.initial, static_cast<std::uint32_t>(t), save_steps)
                    .traj.states;
            for (std::size_t i = 0; i < n_times; ++i) {
                double err_sq = 0.0;
                for (std::size_t k = 0; k < ref; ++k) {
                    const double a = k < n ? path[i].coeffs[k] : 0.0;
                    const double diff = a - ref_paths[t][i].coeffs[k];
                    err_sq += diff * diff;
                }
                norm_acc[i] += std::sqrt(err_sq);
                sq_acc[i] += err_sq;
                sq_sq_acc[i] += err_sq * err_sq;
            }
        }
        const double N = static_cast<double>(cfg.ensemble);
        for (std::size_t i = 0; i < n_times; ++i) {
            lvl.per_time_error[i] = norm_acc[i] / N;
            lvl.per_time_error_sq[i] = sq_acc[i] / N;
            const double var =
                std::max(0.0, sq_sq_acc[i] / N - lvl.per_time_error_sq[i] * lvl.per_time_error_sq[i]);
            lvl.per_time_se_sq[i] = std::sqrt(var / N);
        }
        for (std::size_t i = 0; i < n_times; ++i) {
            const double w =
                cfg.rough_alpha > 0.0 ? std::pow(study.save_times[i], cfg.rough_alpha) : 1.0;
            if (w * lvl.per_time_error[i] > lvl.sup_weighted_error)
                lvl.sup_weighted_error = w * lvl.per_time_error[i];
            if (lvl.per_time_error_sq[i] > lvl.sup_error_sq) {
                lvl.sup_error_sq = lvl.per_time_error_sq[i];
                lvl.se_error_sq = lvl.per_time_se_sq[i];
            }
        }
        // analytic tail sum_{k>n} lam_k^{-1-2 delta} over the reference modes
        for (std::size_t k = n + 1; k <= ref; ++k)
            lvl.analytic_tail += std::pow(cfg.op.eigenvalue(k), -1.0 - 2.0 * cfg.delta);
        study.levels.push_back(std::move(lvl));
    }
    return study;
}

CouplingReport couple(const SimConfig& cfg, const ModeVector& x, const ModeVector& y) {
    const auto save_steps = save_steps_of(cfg);
    const std::size_t n_times = save_steps.size();
    const drift::DriftMetadata md = drift::metadata(cfg.drift_spec, cfg.op);
    const double alpha = md.alpha.to_double();

    CouplingReport rep;
    rep.alpha = alpha;
    for (std::size_t i = 0; i < n_times; ++i)
        rep.save_times.push_back(static_cast<double>(save_steps[i]) * cfg.step);
    rep.rms_diff_alpha.assign(n_times, 0.0);

    ModeVector dx = x;
    dx.coeffs.resize(cfg.op.n_modes(), 0.0);
    {
        ModeVector yy = y;
        yy.coeffs.resize(cfg.op.n_modes(), 0.0);
        for (std::size_t k = 0; k < dx.size(); ++k) dx.coeffs[k] -= yy.coeffs[k];
    }
    rep.initial_distance = spectral::sobolev_norm(cfg.op, alpha, dx);

    // deterministic semigroup part e^{-tA}(x-y) of the difference
    rep.semigroup_part.assign(n_times, 0.0);
    rep.remainder_part.assign(n_times, 0.0);
    std::vector<ModeVector> sg(n_times, dx);
    for (std::size_t i = 0; i < n_times; ++i) {
        const double t = rep.save_times[i];
        for (std::size_t k = 0; k < dx.size(); ++k)
            sg[i].coeffs[k] = std::exp(-cfg.op.eigenvalue(k + 1) * t) * dx.coeffs[k];
        rep.semigroup_part[i] = spectral::sobolev_norm(cfg.op, alpha, sg[i]);
    }

    bool checksums_equal = true;
    std::uint64_t draws = 0;
    std::vector<double> acc(n_times, 0.0), acc_rem(n_times, 0.0);
    for (std::size_t t = 0; t < cfg.ensemble; ++t) {
        const auto rx = run_trajectory(cfg, x, static_cast<std::uint32_t>(t), save_steps);
        const auto ry = run_trajectory(cfg, y, static_cast<std::uint32_t>(t), save_steps);
        checksums_equal = checksums_equal && (rx.traj.draw_checksum == ry.traj.draw_checksum) &&
                          (rx.traj.draw_count == ry.traj.draw_count);
        draws = rx.traj.draw_count;
        for (std::size_t i = 0; i < n_times; ++i) {
            ModeVector diff = rx.traj.states[i];
            for (std::size_t k = 0; k < diff.size(); ++k)
                diff.coeffs[k] -= ry.traj.states[i].coeffs[k];
            const double d = spectral::sobolev_norm(cfg.op, alpha, diff);
            acc[i] += d * d;
            for (std::size_t k = 0; k < diff.size(); ++k) diff.coeffs[k] -= sg[i].coeffs[k];
            const double r = spectral::sobolev_norm(cfg.op, alpha, diff);
            acc_rem[i] += r * r;
        }
    }
    rep.checksums_equal = checksums_equal;
    rep.draws_per_trajectory = draws;
    for (std::size_t i = 0; i < n_times; ++i) {
        rep.rms_diff_alpha[i] = std::sqrt(acc[i] / static_cast<double>(cfg.ensemble));
        rep.remainder_part[i] = std::sqrt(acc_rem[i] / static_cast<double>(cfg.ensemble));
        rep.sup_rms_diff = std::max(rep.sup_rms_diff, rep.rms_diff_alpha[i]);
    }
    if (rep.initial_distance == 0.0) {
        rep.zero_numerator = rep.sup_rms_diff == 0.0;
        rep.ratio = 0.0;
    } else {
        rep.ratio = rep.sup_rms_diff / rep.initial_distance;
    }
    return rep;
}

}  // namespace sselab::solver
