#include "sselab/regime.hpp"

namespace sselab::regime {

namespace {

const Rational kHalf(1, 2);

struct Predicate {
    std::string name;
    std::string pretty;
    Rational margin;  // holds iff margin > 0 (strict) or margin >= 0
    bool strict = true;
    int level = 0;  // 0 weak, 1 pathwise, 2 pathwise_H
};

// Effective coordinates of the hypothesis system. The composite classes are
// folded into (gamma, mu, nu, rho) over their base operator, whose
// eigenvalue growth matches lam0_k ~ k^{2/d}; every trace criterion then
// reads gamma * (...) > d/2.
struct Effective {
    int d = 1;
    Rational gamma{1}, theta{1, 2}, mu{0}, nu{0}, rho{0};
    bool bounded = false;
    ExampleClass cls = ExampleClass::AbstractFractionalHeat;
    Rational p{0}, r{0};
};

Effective make_effective(const RegimeParams& in) {
    if (in.d < 1 || in.d > 3) throw ParamError("d must be 1, 2 or 3");
    if (!in.gamma.is_positive()) throw ParamError("gamma must be positive");
    Effective e;
    e.d = in.d;
    e.cls = in.example_class;
    e.theta = in.theta;
    e.bounded = in.drift_bounded;
    switch (in.example_class) {
        case ExampleClass::AbstractFractionalHeat:
            e.gamma = in.gamma;
            e.mu = in.mu;
            e.nu = in.nu;
            e.rho = in.rho;
            break;
        case ExampleClass::Burgers:
        case ExampleClass::NavierStokes:
            if (in.drift_bounded) throw ParamError("the Burgers/Navier-Stokes drift is unbounded");
            e.gamma = in.gamma;
            e.mu = in.mu;
            e.nu = in.nu;
            e.rho = in.rho;
            break;
        case ExampleClass::CahnHilliard:
            if (in.drift_bounded) throw ParamError("the Cahn-Hilliard drift is unbounded");
            e.gamma = Rational(2);
            e.mu = Rational(1);
            e.nu = Rational(0);
            e.rho = in.rho;
            break;
        case ExampleClass::CahnHilliardQuartic:
            if (in.drift_bounded) throw ParamError("the Cahn-Hilliard drift is unbounded");
            e.gamma = Rational(2);
            e.mu = kHalf;
            e.nu = Rational(1);
            e.rho = in.rho;
            break;
        case ExampleClass::ReactionDiffusion: {
            if (in.drift_bounded) throw ParamError("the reaction-diffusion drift is unbounded");
            if (!(in.p > Rational(2))) throw ParamError("reaction-diffusion needs p > 2");
            if (!in.r.is_positive()) throw ParamError("reaction-diffusion needs r > 0");
            e.gamma = Rational(1);
            e.p = in.p;
            e.r = in.r;
            const Rational d(in.d);
            e.mu = d * (in.r - Rational(2)) / (Rational(4) * in.r);
            e.nu = d * (Rational(2) * (in.p - Rational(1)) - in.r) / (Rational(4) * in.r);
            e.rho = in.rho;
            break;
        }
    }
    return e;
}

std::vector<Predicate> predicates(const Effective& e) {
    std::vector<Predicate> ps;
    const Rational dq(e.d);

    auto add = [&ps](std::string name, std::string pretty, Rational margin, bool strict,
                     int level) {
        ps.push_back(Predicate{std::move(name), std::move(pretty), margin, strict, level});
    };

    // H4: theta in (0,1)
    add("theta-range", "theta > 0", e.theta, true, 0);
    add("theta-range", "theta < 1", Rational(1) - e.theta, true, 0);

    // H2: alpha in [0,1), delta in (-1/2+alpha, 1/2], beta in [0, 1/2-delta]
    add("parameter-range", "mu >= 0", e.mu, false, 0);
    add("parameter-range", "mu < gamma", e.gamma - e.mu, true, 0);
    add("parameter-range", "rho > mu - gamma/2", e.rho - e.mu + e.gamma / Rational(2), true, 0);
    add("parameter-range", "rho <= gamma/2", e.gamma / Rational(2) - e.rho, false, 0);
    add("parameter-range", "nu >= 0", e.nu, false, 0);
    add("parameter-range", "nu + rho <= gamma/2", e.gamma / Rational(2) - e.nu - e.rho, false, 0);

    // H3: gamma (1 + 2 delta - 2 alpha) > d/2
    add("base-trace", "gamma + 2 rho - 2 mu > d/2", e.gamma + Rational(2) * e.rho - Rational(2) * e.mu - dq / Rational(2),
        true, 0);

    // trace condition: gamma (1 + theta - 2 beta - 2(1-theta) delta - 2 theta alpha) > d/2
    {
        Rational m = e.gamma * (Rational(1) + e.theta) - Rational(2) * e.nu -
                     Rational(2) * (Rational(1) - e.theta) * e.rho - Rational(2) * e.theta * e.mu -
                     dq / Rational(2);
        add("hoelder-trace", "gamma(1+theta) - 2 nu - 2(1-theta) rho - 2 theta mu > d/2", m, true, 1);
    }

    // theta alpha + (1-theta) delta < alpha + theta/2  (scaled by gamma)
    add("ineq-DAalpha", "theta mu + (1-theta) rho < mu + gamma theta/2",
        e.mu + e.gamma * e.theta / Rational(2) - e.theta * e.mu -
            (Rational(1) - e.theta) * e.rho,
        true, 1);

    // theta alpha + (1-theta) delta < theta/2  (scaled by gamma)
    add("ineq-H", "theta mu + (1-theta) rho < gamma theta/2",
        e.gamma * e.theta / Rational(2) - e.theta * e.mu - (Rational(1) - e.theta) * e.rho, true,
        2);

    // critical line is reachable only with a bounded drift (smallness condition)
    if (!e.bounded) {
        add("critical-smallness",
            "nu + rho < gamma/2 (unbounded drift cannot satisfy the smallness condition)",
            e.gamma / Rational(2) - e.nu - e.rho, true, 1);
    }

    // class structural constraints
    if (e.cls == ExampleClass::Burgers || e.cls == ExampleClass::NavierStokes) {
        if (e.d == 1) {
            add("structure", "mu > 0", e.mu, true, 0);
            add("structure", "nu >= 3/4 - 2 mu", e.nu - Rational(3, 4) + Rational(2) * e.mu, false,
                0);
        } else {
            add("structure", "mu >= 1/4", e.mu - Rational(1, 4), false, 0);
            add("structure", "mu <= 1/2", kHalf - e.mu, false, 0);
            add("structure", "nu >= 1/2 - mu", e.nu - kHalf + e.mu, false, 0);
            add("structure", "2 mu + nu > (d+2)/4",
                Rational(2) * e.mu + e.nu - (dq + Rational(2)) / Rational(4), true, 0);
        }
    } else if (e.cls == ExampleClass::ReactionDiffusion) {
        add("structure", "r >= 2", e.r - Rational(2), false, 0);
        add("structure", "r >= p - 1", e.r - e.p + Rational(1), false, 0);
        add("structure", "r <= 2(p-1)", Rational(2) * (e.p - Rational(1)) - e.r, false, 0);
    }
    return ps;
}

bool holds(const Predicate& p) {
    return p.strict ? p.margin.is_positive() : !p.margin.is_negative();
}

}  // namespace

std::string to_string(ExampleClass c) {
    switch (c) {
        case ExampleClass::AbstractFractionalHeat: return "fractional-heat";
        case ExampleClass::Burgers: return "burgers";
        case ExampleClass::NavierStokes: return "navier-stokes";
        case ExampleClass::CahnHilliard: return "cahn-hilliard";
        case ExampleClass::CahnHilliardQuartic: return "cahn-hilliard-quartic";
        case ExampleClass::ReactionDiffusion: return "reaction-diffusion";
    }
    return "?";
}

RegimeParams RegimeParams::fractional_heat(int d, Rational gamma, Rational theta, Rational mu,
                                           Rational nu, Rational rho, bool bounded) {
    RegimeParams p;
    p.example_class = ExampleClass::AbstractFractionalHeat;
    p.d = d;
    p.gamma = gamma;
    p.theta = theta;
    p.mu = mu;
    p.nu = nu;
    p.rho = rho;
    p.drift_bounded = bounded;
    return p;
}

RegimeParams RegimeParams::burgers(int d, Rational gamma, Rational theta, Rational mu, Rational nu,
                                   Rational rho) {
    RegimeParams p = fractional_heat(d, gamma, theta, mu, nu, rho, false);
    p.example_class = ExampleClass::Burgers;
    return p;
}

RegimeParams RegimeParams::navier_stokes(int d, Rational gamma, Rational theta, Rational mu,
                                         Rational nu, Rational rho) {
    RegimeParams p = fractional_heat(d, gamma, theta, mu, nu, rho, false);
    p.example_class = ExampleClass::NavierStokes;
    return p;
}

RegimeParams RegimeParams::cahn_hilliard(int d, Rational theta, Rational rho) {
    RegimeParams p;
    p.example_class = ExampleClass::CahnHilliard;
    p.d = d;
    p.gamma = Rational(2);
    p.theta = theta;
    p.mu = Rational(1);
    p.nu = Rational(0);
    p.rho = rho;
    return p;
}

RegimeParams RegimeParams::cahn_hilliard_quartic(int d, Rational theta, Rational rho) {
    RegimeParams p = cahn_hilliard(d, theta, rho);
    p.example_class = ExampleClass::CahnHilliardQuartic;
    p.mu = Rational(1, 2);
    p.nu = Rational(1);
    return p;
}

RegimeParams RegimeParams::reaction_diffusion(int d, Rational theta, Rational delta, Rational p_,
                                              Rational r_) {
    RegimeParams p;
    p.example_class = ExampleClass::ReactionDiffusion;
    p.d = d;
    p.gamma = Rational(1);
    p.theta = theta;
    p.rho = delta;
    p.p = p_;
    p.r = r_;
    return p;
}

RegimeVerdict check(const RegimeParams& params) {
    const Effective e = make_effective(params);
    const auto ps = predicates(e);

    RegimeVerdict v;
    bool weak_ok = true, path_ok = true, path_h_ok = true;
    for (const auto& p : ps) {
        const bool ok = holds(p);
        if (!ok) {
            v.failed_conditions.push_back(
                FailedCondition{p.name, p.pretty + " violated (margin " + p.margin.str() + ")"});
            if (p.level == 0) weak_ok = false;
            if (p.level <= 1) path_ok = false;
            path_h_ok = false;
        }
    }
    v.weak_DAalpha = weak_ok;
    v.weak_H = weak_ok && e.bounded;
    v.pathwise_DAalpha = weak_ok && path_ok;
    v.pathwise_H = v.pathwise_DAalpha && e.bounded && path_h_ok;

    v.critical = (e.nu + e.rho == e.gamma / Rational(2));
    if (v.critical) {
        v.notes.push_back(
            "critical regime beta + delta = 1/2: smallness condition on F required for the "
            "pathwise results; weak uniqueness does not need it");
    }
    if (params.example_class == ExampleClass::ReactionDiffusion) {
        const RdL2Verdict l2 = rd_l2_data_admissible(params.d, params.p, params.theta);
        v.notes.push_back(std::string("L2-data thresholds: weak ") + (l2.weak ? "yes" : "no") +
                          ", pathwise " + (l2.pathwise ? "yes" : "no"));
    }
    return v;
}

namespace {

// Affine margin of one predicate in one coordinate: evaluated at two points,
// interpolated exactly.
struct AffineMargin {
    Rational at0;
    Rational slope;
    bool strict;
    std::string name;
};

RegimeParams with_coord(RegimeParams p, Coord c, const Rational& x) {
    switch (c) {
        case Coord::Gamma: p.gamma = x; break;
        case Coord::Theta: p.theta = x; break;
        case Coord::Mu: p.mu = x; break;
        case Coord::Nu: p.nu = x; break;
        case Coord::Rho: p.rho = x; break;
    }
    return p;
}

}  // namespace

CoordInterval admissible_interval(const RegimeParams& params, Coord coord, bool pathwise_level) {
    // gamma = 0 is invalid, so sample the margins at two safe points
    const Rational x0 = (coord == Coord::Gamma) ? Rational(1) : Rational(0);
    const Rational x1 = (coord == Coord::Gamma) ? Rational(2) : Rational(1);

    const Effective e0 = make_effective(with_coord(params, coord, x0));
    const Effective e1 = make_effective(with_coord(params, coord, x1));
    const auto ps0 = predicates(e0);
    const auto ps1 = predicates(e1);

    CoordInterval out;
    const int max_level = pathwise_level ? 1 : 0;
    for (std::size_t i = 0; i < ps0.size(); ++i) {
        if (ps0[i].level > max_level) continue;
        const Rational m0 = ps0[i].margin;
        const Rational m1 = ps1[i].margin;
        const Rational slope = (m1 - m0) / (x1 - x0);
        const Rational at_zero = m0 - slope * x0;
        if (slope.is_zero()) {
            const bool ok = ps0[i].strict ? at_zero.is_positive() : !at_zero.is_negative();
            if (!ok) out.feasible = false;
            continue;
        }
        const Rational boundary = -at_zero / slope;  // margin(boundary) = 0
        if (slope.is_positive()) {
            // margin > 0 for x > boundary
            if (!out.lo || boundary > *out.lo ||
                (boundary == *out.lo && ps0[i].strict && !out.lo_open)) {
                if (!out.lo || boundary > *out.lo) {
                    out.lo = boundary;
                    out.lo_open = ps0[i].strict;
                } else {
                    out.lo_open = out.lo_open || ps0[i].strict;
                }
            }
        } else {
            if (!out.hi || boundary < *out.hi ||
                (boundary == *out.hi && ps0[i].strict && !out.hi_open)) {
                if (!out.hi || boundary < *out.hi) {
                    out.hi = boundary;
                    out.hi_open = ps0[i].strict;
                } else {
                    out.hi_open = out.hi_open || ps0[i].strict;
                }
            }
        }
    }
    if (out.lo && out.hi) {
        if (*out.lo > *out.hi || (*out.lo == *out.hi && (out.lo_open || out.hi_open)))
            out.feasible = false;
    }
    return out;
}

RhoIntervals admissible_rho(const RegimeParams& params) {
    RhoIntervals out;
    auto build = [&params](bool pathwise_level) -> std::vector<RatInterval> {
        CoordInterval ci = admissible_interval(params, Coord::Rho, pathwise_level);
        if (!ci.feasible) return {};
        // rho is always two-sided bounded (H2b/H2c above, H3 below)
        if (!ci.lo || !ci.hi) return {};
        RatInterval iv{*ci.lo, *ci.hi, ci.lo_open, ci.hi_open};
        if (iv.empty()) return {};
        return {iv};
    };
    out.weak = build(false);
    out.pathwise = build(true);
    return out;
}

RdL2Verdict rd_l2_data_admissible(int d, const Rational& p, const Rational& theta) {
    RdL2Verdict v;
    if (!(p > Rational(2))) return v;
    if (!(theta.is_positive() && theta < Rational(1))) return v;
    switch (d) {
        case 1:
            v.weak = p <= Rational(3);
            v.pathwise = v.weak;
            return v;
        case 2:
            v.weak = p <= Rational(3);
            v.pathwise = p <= Rational(2) + theta;
            return v;
        case 3:
            v.weak = p <= Rational(7, 3);
            v.pathwise = theta > Rational(2, 3) && p <= Rational(2) + theta - Rational(2, 3);
            return v;
        default:
            throw ParamError("d must be 1, 2 or 3");
    }
}

}  // namespace sselab::regime
