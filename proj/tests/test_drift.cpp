#include <doctest.h>

#include <cmath>

#include "sselab/drift.hpp"
#include "sselab/noise.hpp"

using namespace sselab;
using drift::DriftSpec;
using drift::FKind;
using drift::ScalarF;
using spectral::Basis;
using spectral::ModeVector;
using spectral::SpectralOperator;

namespace {
constexpr double kPi = 3.14159265358979323846;

// composite Simpson on [0,1]
template <typename F>
double integrate(F f, std::size_t panels = 4000) {
    double acc = 0.0;
    const double h = 1.0 / static_cast<double>(panels);
    for (std::size_t i = 0; i < panels; ++i) {
        const double a = h * static_cast<double>(i);
        acc += (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h)) * h / 6.0;
    }
    return acc;
}
}  // namespace

TEST_CASE("zero drift maps to zero") {
    const SpectralOperator op(Basis::DirichletSine, 8, 1.0);
    ModeVector x = op.mode(1, 2.5);
    const ModeVector b = drift::eval(DriftSpec::zero(), op, x);
    for (double v : b.coeffs) CHECK(v == 0.0);
}

TEST_CASE("Burgers quadratic interaction of the ground mode") {
    // u = sqrt(2) sin(pi x): u u_x = pi sin(2 pi x), coefficient pi/sqrt(2) on e_2
    const SpectralOperator op(Basis::DirichletSine, 8, 1.0);
    const ModeVector b = drift::eval(DriftSpec::burgers(), op, op.mode(1));
    CHECK(b.coeffs[1] == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-10));
    for (std::size_t k = 0; k < 8; ++k)
        if (k != 1) CHECK(std::abs(b.coeffs[k]) < 1e-10);
}

TEST_CASE("Burgers basis mismatch is a configuration error") {
    const SpectralOperator neu(Basis::NeumannShiftedCosine, 8, 1.0);
    CHECK_THROWS_AS(drift::eval(DriftSpec::burgers(), neu, neu.mode(1)), drift::ConfigError);
}

TEST_CASE("constant composition drift expands the constant function") {
    const SpectralOperator op(Basis::DirichletSine, 16, 1.0);
    const double c = 0.7;
    const DriftSpec spec = DriftSpec::composition(ScalarF{FKind::Const, 0.5, c}, Rational(0), Rational(0));
    const ModeVector b = drift::eval(spec, op, op.zero());
    // analytic sine coefficients of the constant, cross-checked by quadrature
    for (std::size_t k = 1; k <= 5; ++k) {
        const double analytic = c * std::sqrt(2.0) * (1.0 - std::pow(-1.0, k)) / (kPi * k);
        const double quad = integrate([&](double x) {
            return c * std::sqrt(2.0) * std::sin(kPi * static_cast<double>(k) * x);
        });
        CHECK(analytic == doctest::Approx(quad).epsilon(1e-8));
        if (k % 2 == 0) {
            CHECK(std::abs(b.coeffs[k - 1]) < 1e-12);
        } else {
            // discrete projection aliases the tail at O(k / n_points)
            CHECK(b.coeffs[k - 1] == doctest::Approx(analytic).epsilon(0.03));
        }
    }
}

TEST_CASE("composition duality pairing matches the quadrature integral") {
    const SpectralOperator op(Basis::DirichletSine, 16, 1.0);
    const DriftSpec spec =
        DriftSpec::composition(ScalarF{FKind::Sine, 0.5, 0.0}, Rational(1, 8), Rational(1, 8));
    ModeVector x = op.zero();
    x.coeffs[0] = 0.4;
    x.coeffs[1] = -0.2;
    x.coeffs[2] = 0.1;
    ModeVector z = op.zero();
    z.coeffs[0] = 0.3;
    z.coeffs[1] = 0.5;

    const ModeVector bx = drift::eval(spec, op, x);
    const double lhs = spectral::dot(bx, z);

    const ModeVector ax = spectral::frac_apply(op, spec.mu.to_double(), x);
    const ModeVector az = spectral::frac_apply(op, spec.nu.to_double(), z);
    const double rhs = integrate([&](double xi) {
        double u = 0.0, w = 0.0;
        for (std::size_t k = 0; k < op.n_modes(); ++k) {
            u += ax.coeffs[k] * op.basis_value(k + 1, xi);
            w += az.coeffs[k] * op.basis_value(k + 1, xi);
        }
        return std::sin(u) * w;
    });
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("Burgers energy conservation") {
    const SpectralOperator op(Basis::DirichletSine, 16, 1.0);
    ModeVector u = op.zero();
    for (std::size_t k = 0; k < op.n_modes(); ++k)
        u.coeffs[k] = noise::keyed_gaussian(3, 3, 1, static_cast<std::uint32_t>(k), 0) /
                      static_cast<double>((k + 1) * (k + 1));
    const ModeVector b = drift::eval(DriftSpec::burgers(), op, u);
    CHECK(std::abs(spectral::dot(b, u)) < 1e-9);
}

TEST_CASE("composition linearization at the origin") {
    // For F = sine, D B(0) = diag(lam_k^{mu+nu}): finite differences around 0.
    const SpectralOperator op(Basis::DirichletSine, 6, 1.0);
    const DriftSpec spec =
        DriftSpec::composition(ScalarF{FKind::Sine, 0.5, 0.0}, Rational(1, 4), Rational(1, 8));
    const double h = 1e-6;
    for (std::size_t k = 1; k <= 3; ++k) {
        const ModeVector bp = drift::eval(spec, op, op.mode(k, h));
        const ModeVector bm = drift::eval(spec, op, op.mode(k, -h));
        const double fd = (bp.coeffs[k - 1] - bm.coeffs[k - 1]) / (2.0 * h);
        const double expected = std::pow(op.eigenvalue(k), 0.25 + 0.125);
        CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
        // no first-order coefficient mixing
        for (std::size_t j = 1; j <= 6; ++j) {
            if (j == k) continue;
            const double cross = (bp.coeffs[j - 1] - bm.coeffs[j - 1]) / (2.0 * h);
            CHECK(std::abs(cross) < 1e-6 * expected + 1e-8);
        }
    }
}

TEST_CASE("metadata hands the regime checker the right tuple") {
    const SpectralOperator op(Basis::DirichletSine, 8, 1.0);
    SUBCASE("zero") {
        const auto md = drift::metadata(DriftSpec::zero(), op);
        CHECK(md.bounded);
        CHECK(md.C_B.value() == 0.0);
        CHECK(md.alpha == Rational(0));
    }
    SUBCASE("bounded composition") {
        const auto md = drift::metadata(
            DriftSpec::composition(ScalarF{FKind::BoundedHolder, 0.5, 0.0}, Rational(0), Rational(0)),
            op);
        CHECK(md.alpha == Rational(0));
        CHECK(md.beta == Rational(0));
        CHECK(md.theta.value() == Rational(1, 2));
        CHECK(md.bounded);
        // C_B = max{1, sup + seminorm} with sup = 1, seminorm <= 2^{1-theta}
        CHECK(md.C_B.value() == doctest::Approx(1.0 + std::sqrt(2.0)));
    }
    SUBCASE("power-holder is unbounded") {
        const auto md = drift::metadata(
            DriftSpec::composition(ScalarF{FKind::PowerHolder, 0.5, 0.0}, Rational(0), Rational(0)),
            op);
        CHECK_FALSE(md.bounded);
        CHECK_FALSE(md.C_B.has_value());
    }
    SUBCASE("Burgers pair mu, nu with a locally-Lipschitz note") {
        DriftSpec b = DriftSpec::burgers();
        b.mu = Rational(1, 4);
        b.nu = Rational(1, 4) + Rational(1, 100);
        const auto md = drift::metadata(b, op);
        CHECK(md.alpha == Rational(1, 4));
        CHECK(md.beta == Rational(1, 4) + Rational(1, 100));
        CHECK_FALSE(md.theta.has_value());
        CHECK_FALSE(md.bounded);
        CHECK(md.note.find("Lipschitz") != std::string::npos);
    }
}

TEST_CASE("holder_estimate") {
    SUBCASE("zero drift has zero seminorm") {
        const SpectralOperator op(Basis::DirichletSine, 4, 1.0);
        CHECK(drift::holder_estimate(DriftSpec::zero(), op, 0.5, 1.0, 100, 5) == 0.0);
    }
    SUBCASE("scalar power-holder sanity band") {
        const SpectralOperator op(Basis::DirichletSine, 1, 1.0);
        const DriftSpec spec = DriftSpec::composition(ScalarF{FKind::PowerHolder, 0.5, 0.0},
                                                      Rational(0), Rational(0));
        const double est = drift::holder_estimate(spec, op, 0.5, 1.0, 10000, 7);
        CHECK(est >= 1.0);
        CHECK(est <= 2.0);
    }
    SUBCASE("sine is 1-Lipschitz") {
        const SpectralOperator op(Basis::DirichletSine, 6, 1.0);
        const DriftSpec spec =
            DriftSpec::composition(ScalarF{FKind::Sine, 0.5, 0.0}, Rational(0), Rational(0));
        const double est = drift::holder_estimate(spec, op, 1.0, 2.0, 4000, 9);
        CHECK(est <= 1.0 + 1e-9);
        CHECK(est > 0.5);
    }
    SUBCASE("statistically monotone in the radius") {
        const SpectralOperator op(Basis::DirichletSine, 4, 1.0);
        const DriftSpec spec = DriftSpec::composition(ScalarF{FKind::BoundedHolder, 0.5, 0.0},
                                                      Rational(0), Rational(0));
        const double small = drift::holder_estimate(spec, op, 0.5, 0.5, 4000, 13);
        const double large = drift::holder_estimate(spec, op, 0.5, 2.0, 4000, 14);
        CHECK(large >= 0.95 * small);
    }
}

TEST_CASE("Cahn-Hilliard self-consistency on polynomials") {
    // Lap(F1(phi)) = F1''(phi)(phi')^2 + F1'(phi) phi'' = -B1(phi):
    // recover B1 from the assembled drift and compare with the spectral
    // Laplacian of the projected F1(phi).
    const SpectralOperator op(Basis::NeumannShiftedCosine, 12, 2.0);
    const DriftSpec spec = DriftSpec::cahn_hilliard({0.0, 0.0, 0.0, 1.0});  // F1(u) = u^3
    ModeVector phi = op.zero();
    phi.coeffs[0] = 0.3;
    phi.coeffs[1] = 0.5;
    phi.coeffs[2] = -0.2;

    const ModeVector b = drift::eval(spec, op, phi);
    // B = -B1 + phi - 2 Lap phi (F2 = 0), so B1 = phi - 2 Lap phi - B
    ModeVector b1 = op.zero();
    for (std::size_t k = 0; k < op.n_modes(); ++k) {
        const double lap = 1.0 - op.base_eigenvalue(k + 1);
        b1.coeffs[k] = phi.coeffs[k] - 2.0 * lap * phi.coeffs[k] - b.coeffs[k];
    }

    // spectral Laplacian of the projection of F1(phi): cubic of 3 cosine
    // modes lives on <= 7 modes, exactly representable here
    const std::size_t m = 48;
    auto grid = spectral::to_collocation(op, phi, m);
    for (double& v : grid.values) v = v * v * v;
    ModeVector f1phi = spectral::from_collocation(op, grid, op.n_modes());
    ModeVector lap_f1 = op.zero();
    for (std::size_t k = 0; k < op.n_modes(); ++k)
        lap_f1.coeffs[k] = (1.0 - op.base_eigenvalue(k + 1)) * f1phi.coeffs[k];

    for (std::size_t k = 0; k < op.n_modes(); ++k)
        CHECK(lap_f1.coeffs[k] == doctest::Approx(-b1.coeffs[k]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("reaction-diffusion drift validation") {
    CHECK_THROWS_AS(DriftSpec::reaction_diffusion({0.0, 1.0}), drift::ConfigError);   // positive lead
    CHECK_THROWS_AS(DriftSpec::reaction_diffusion({1.0, -1.0}), drift::ConfigError);  // even term
    const DriftSpec ok = DriftSpec::reaction_diffusion({0.0, 1.0, 0.0, -1.0});        // u - u^3
    const SpectralOperator op(Basis::DirichletSine, 8, 1.0);
    const ModeVector b = drift::eval(ok, op, op.zero());
    for (double v : b.coeffs) CHECK(v == 0.0);
}
