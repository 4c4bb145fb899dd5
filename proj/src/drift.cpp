#include "sselab/drift.hpp"

#include <cmath>

#include "sselab/noise.hpp"

namespace sselab::drift {

using spectral::Basis;
using spectral::GridField;
using spectral::ModeVector;
using spectral::SpectralOperator;

double ScalarF::operator()(double u) const {
    switch (kind) {
        case FKind::PowerHolder:
            return (u < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(u), theta);
        case FKind::BoundedHolder:
            return (u < 0.0 ? -1.0 : 1.0) * std::min(1.0, std::pow(std::abs(u), theta));
        case FKind::Sine:
            return std::sin(u);
        case FKind::Const:
            return c;
    }
    return 0.0;
}

DriftSpec DriftSpec::composition(ScalarF f, Rational mu, Rational nu) {
    if (mu.is_negative() || nu.is_negative()) throw ConfigError("mu, nu must be nonnegative");
    DriftSpec s;
    s.kind = DriftKind::Composition;
    s.F = f;
    s.mu = mu;
    s.nu = nu;
    return s;
}

DriftSpec DriftSpec::burgers() {
    DriftSpec s;
    s.kind = DriftKind::Burgers1d;
    return s;
}

DriftSpec DriftSpec::cahn_hilliard(std::vector<double> f1, ScalarF f2) {
    if (f1.empty()) throw ConfigError("Cahn-Hilliard needs F1 coefficients");
    DriftSpec s;
    s.kind = DriftKind::CahnHilliard1d;
    s.f1_coeffs = std::move(f1);
    s.F2 = f2;
    if (!s.F2.bounded()) throw ConfigError("F2 must be bounded");
    return s;
}

DriftSpec DriftSpec::reaction_diffusion(std::vector<double> f1, ScalarF f2) {
    if (f1.size() < 2) throw ConfigError("reaction-diffusion needs a polynomial F1");
    // dissipative odd polynomial, negative leading coefficient, degree p-1
    if (f1.size() % 2 != 0) throw ConfigError("F1 must have odd degree");
    if (f1.back() >= 0.0) throw ConfigError("F1 leading coefficient must be negative");
    for (std::size_t i = 0; i < f1.size(); i += 2)
        if (f1[i] != 0.0) throw ConfigError("F1 must be an odd polynomial");
    DriftSpec s;
    s.kind = DriftKind::ReactionDiffusion1d;
    s.f1_coeffs = std::move(f1);
    s.F2 = f2;
    if (!s.F2.bounded()) throw ConfigError("F2 must be bounded");
    return s;
}

void validate(const DriftSpec& spec, const SpectralOperator& op) {
    switch (spec.kind) {
        case DriftKind::Zero:
            return;
        case DriftKind::Composition:
            if (op.basis() == Basis::Custom) throw ConfigError("composition drift needs a collocation basis");
            return;
        case DriftKind::Burgers1d:
        case DriftKind::ReactionDiffusion1d:
            if (op.basis() != Basis::DirichletSine)
                throw ConfigError("drift requires the Dirichlet sine basis");
            return;
        case DriftKind::CahnHilliard1d:
            if (op.basis() != Basis::NeumannShiftedCosine)
                throw ConfigError("Cahn-Hilliard drift requires the shifted Neumann cosine basis");
            return;
    }
}

namespace {

double poly_eval(const std::vector<double>& coeffs, double u) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * u + coeffs[i];
    return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    std::vector<double> d(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = coeffs[i] * static_cast<double>(i);
    return d;
}

std::size_t dealiased_points(const SpectralOperator& op) { return 2 * op.n_modes(); }

ModeVector composition_eval(const DriftSpec& spec, const SpectralOperator& op,
                            const ModeVector& x) {
    const std::size_t m = dealiased_points(op);
    ModeVector shifted = spectral::frac_apply(op, spec.mu.to_double(), x);
    GridField g = spectral::to_collocation(op, shifted, m);
    for (double& v : g.values) v = spec.F(v);
    ModeVector coeffs = spectral::from_collocation(op, g, op.n_modes());
    ModeVector out = spectral::frac_apply(op, spec.nu.to_double(), coeffs);
    out.sobolev_index = -spec.nu.to_double() / op.power();
    return out;
}

ModeVector burgers_eval(const SpectralOperator& op, const ModeVector& x) {
    const std::size_t m = dealiased_points(op);
    GridField u = spectral::to_collocation(op, x, m);
    std::vector<double> ux = spectral::derivative_values(op, x, m);
    GridField prod;
    prod.grid = op.basis();
    prod.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) prod.values[j] = u.values[j] * ux[j];
    ModeVector out = spectral::from_collocation(op, prod, op.n_modes());
    out.sobolev_index = -0.75 / op.power();
    return out;
}

ModeVector cahn_hilliard_eval(const DriftSpec& spec, const SpectralOperator& op,
                              const ModeVector& x) {
    const std::size_t m = std::max<std::size_t>(dealiased_points(op), 4 * spec.f1_coeffs.size());
    GridField u = spectral::to_collocation(op, x, m);
    std::vector<double> up = spectral::derivative_values(op, x, m);
    std::vector<double> upp = spectral::second_derivative_values(op, x, m);
    const std::vector<double> f1p = poly_derivative(spec.f1_coeffs);
    const std::vector<double> f1pp = poly_derivative(f1p);

    // B2(u) - B1(u) on the grid, with B1 = -F1''(u)(u')^2 - F1'(u) u''
    GridField g;
    g.grid = op.basis();
    g.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double b1 = -poly_eval(f1pp, u.values[j]) * up[j] * up[j] -
                          poly_eval(f1p, u.values[j]) * upp[j];
        g.values[j] = spec.F2(u.values[j]) - b1;
    }
    ModeVector out = spectral::from_collocation(op, g, op.n_modes());
    // + phi - 2 Lap phi, diagonal in the cosine basis: Lap e_k = (1 - lam0_k) e_k
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lap = 1.0 - op.base_eigenvalue(k + 1);
        out.coeffs[k] += x.coeffs[k] - 2.0 * lap * x.coeffs[k];
    }
    out.sobolev_index = 0.0;
    return out;
}

ModeVector reaction_diffusion_eval(const DriftSpec& spec, const SpectralOperator& op,
                                   const ModeVector& x) {
    const std::size_t m = std::max<std::size_t>(dealiased_points(op), 2 * spec.f1_coeffs.size());
    GridField u = spectral::to_collocation(op, x, m);
    for (double& v : u.values) v = poly_eval(spec.f1_coeffs, v) + spec.F2(v);
    ModeVector out = spectral::from_collocation(op, u, op.n_modes());
    out.sobolev_index = 0.0;
    return out;
}

}  // namespace

ModeVector eval(const DriftSpec& spec, const SpectralOperator& op, const ModeVector& x) {
    validate(spec, op);
    if (x.size() > op.n_modes()) throw spectral::DimensionError("state longer than operator");
    switch (spec.kind) {
        case DriftKind::Zero: {
            ModeVector out = x;
            for (double& v : out.coeffs) v = 0.0;
            return out;
        }
        case DriftKind::Composition:
            return composition_eval(spec, op, x);
        case DriftKind::Burgers1d:
            return burgers_eval(op, x);
        case DriftKind::CahnHilliard1d:
            return cahn_hilliard_eval(spec, op, x);
        case DriftKind::ReactionDiffusion1d:
            return reaction_diffusion_eval(spec, op, x);
    }
    throw ConfigError("unknown drift kind");
}

DriftMetadata metadata(const DriftSpec& spec, const SpectralOperator& op) {
    DriftMetadata md;
    // operator power as a rational when it is one (the regime fields are exact)
    const double g = op.power();
    auto as_rational = [](double v) {
        // powers used by the lab are small rationals; snap to denominator <= 64
        for (std::int64_t d = 1; d <= 64; ++d) {
            double n = v * static_cast<double>(d);
            double r = std::round(n);
            if (std::abs(n - r) < 1e-12) return Rational(static_cast<std::int64_t>(r), d);
        }
        throw ConfigError("operator power is not a small rational");
    };
    const Rational gamma = as_rational(g);

    switch (spec.kind) {
        case DriftKind::Zero:
            md.bounded = true;
            md.C_B = 0.0;
            md.note = "zero drift";
            return md;
        case DriftKind::Composition: {
            md.alpha = spec.mu / gamma;
            md.beta = spec.nu / gamma;
            md.theta = as_rational(spec.F.kind == FKind::Sine ? 1.0
                                   : spec.F.kind == FKind::Const ? 1.0
                                                                 : spec.F.theta);
            md.bounded = spec.F.bounded();
            switch (spec.F.kind) {
                case FKind::Const:
                    md.C_B = std::max(1.0, std::abs(spec.F.c));
                    break;
                case FKind::Sine:
                    // sup |sin| = 1, theta-seminorm <= 2^{1-theta}
                    md.C_B = 1.0 + std::pow(2.0, 1.0 - spec.F.theta);
                    break;
                case FKind::BoundedHolder:
                    md.C_B = 1.0 + std::pow(2.0, 1.0 - spec.F.theta);
                    break;
                case FKind::PowerHolder:
                    md.C_B.reset();  // unbounded
                    break;
            }
            return md;
        }
        case DriftKind::Burgers1d:
            md.alpha = spec.mu / gamma;
            md.beta = spec.nu / gamma;
            md.theta.reset();
            md.bounded = false;
            md.note = "locally Lipschitz on the scale pair (V_{2mu}, V_{-2nu})";
            return md;
        case DriftKind::CahnHilliard1d:
            md.alpha = Rational(1, 2);
            md.beta = Rational(0);
            md.theta = as_rational(spec.F2.kind == FKind::BoundedHolder ? spec.F2.theta : 1.0);
            md.bounded = false;
            md.note = "B2 - B1 + phi - 2 Lap phi on D(A_N)";
            return md;
        case DriftKind::ReactionDiffusion1d:
            md.alpha = Rational(0);
            md.beta = Rational(0);
            md.theta = as_rational(spec.F2.kind == FKind::BoundedHolder ? spec.F2.theta : 1.0);
            md.bounded = false;
            md.note = "polynomial reaction term plus Hoelder perturbation";
            return md;
    }
    throw ConfigError("unknown drift kind");
}

double holder_estimate(const DriftSpec& spec, const SpectralOperator& op, double theta_test,
                       double radius, std::size_t n_pairs, std::uint64_t seed) {
    if (radius <= 0.0) throw spectral::ParamError("radius must be positive");
    if (n_pairs == 0) throw spectral::ParamError("n_pairs must be >= 1");
    validate(spec, op);
    const DriftMetadata md = metadata(spec, op);
    const double alpha = md.alpha.to_double();
    const double beta = md.beta.to_double();
    const std::size_t n = op.n_modes();

    auto sample_ball = [&](std::uint32_t pair, std::uint32_t which) {
        ModeVector v{std::vector<double>(n, 0.0), 0.0};
        for (std::size_t k = 0; k < n; ++k)
            v.coeffs[k] = noise::keyed_gaussian(seed, 2, pair, static_cast<std::uint32_t>(k), which);
        const double norm = spectral::sobolev_norm(op, alpha, v);
        const double u = noise::keyed_uniform(seed, 2, pair, 0xFFFFu, which);
        const double scale = norm > 0.0 ? radius * u / norm : 0.0;
        for (double& c : v.coeffs) c *= scale;
        return v;
    };

    double best = 0.0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        ModeVector x = sample_ball(static_cast<std::uint32_t>(p), 0);
        ModeVector y = sample_ball(static_cast<std::uint32_t>(p), 1);
        ModeVector dx = x;
        for (std::size_t k = 0; k < n; ++k) dx.coeffs[k] -= y.coeffs[k];
        const double dist = spectral::sobolev_norm(op, alpha, dx);
        if (dist == 0.0) continue;
        ModeVector bx = eval(spec, op, x);
        ModeVector by = eval(spec, op, y);
        for (std::size_t k = 0; k < n; ++k) bx.coeffs[k] -= by.coeffs[k];
        const double num = spectral::sobolev_norm(op, -beta, bx);
        best = std::max(best, num / std::pow(dist, theta_test));
    }
    return best;
}

}  // namespace sselab::drift
