#include <doctest.h>

#include <cmath>

#include "sselab/noise.hpp"
#include "sselab/spectral.hpp"

using namespace sselab;
using spectral::Basis;
using spectral::ModeVector;
using spectral::SpectralOperator;

namespace {
constexpr double kPi = 3.14159265358979323846;

ModeVector random_vector(const SpectralOperator& op, std::uint64_t seed) {
    ModeVector v = op.zero();
    for (std::size_t k = 0; k < op.n_modes(); ++k)
        v.coeffs[k] = noise::keyed_gaussian(seed, 3, 7, static_cast<std::uint32_t>(k), 0);
    return v;
}
}  // namespace

TEST_CASE("eigenvalue laws of the interval bases") {
    const SpectralOperator dir(Basis::DirichletSine, 16, 1.0);
    CHECK(dir.eigenvalue(1) == doctest::Approx(kPi * kPi).epsilon(1e-14));
    CHECK(dir.eigenvalue(2) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
    const SpectralOperator neu(Basis::NeumannShiftedCosine, 16, 2.0);
    CHECK(neu.base_eigenvalue(1) == 1.0);
    CHECK(neu.eigenvalue(1) == 1.0);  // (1 + 0)^2
    CHECK(neu.base_eigenvalue(2) == doctest::Approx(1.0 + kPi * kPi));

    for (const auto& op : {dir, neu}) {
        for (std::size_t k = 2; k <= op.n_modes(); ++k)
            CHECK(op.eigenvalue(k) > op.eigenvalue(k - 1));  // strictly increasing
        CHECK(op.eigenvalue(op.n_modes()) > op.eigenvalue(1));
        CHECK(op.eigenvalue(1) > 0.0);
    }
}

TEST_CASE("custom spectra validate") {
    CHECK_THROWS_AS(SpectralOperator::custom({2.0, 1.0}, 2.0), spectral::ParamError);
    CHECK_THROWS_AS(SpectralOperator::custom({-1.0, 1.0}, 2.0), spectral::ParamError);
    auto op = SpectralOperator::custom({1.0, 3.0, 9.0}, 2.0);
    CHECK(op.eigenvalue(2) == 3.0);
}

TEST_CASE("frac_apply examples") {
    const SpectralOperator dir(Basis::DirichletSine, 8, 1.0);
    const ModeVector e1 = dir.mode(1);

    SUBCASE("sigma = 0 is the identity") {
        const ModeVector r = frac_apply(dir, 0.0, e1);
        CHECK(r.coeffs[0] == 1.0);
        CHECK(r.sobolev_index == e1.sobolev_index);
    }
    SUBCASE("negative power on the ground mode") {
        const ModeVector r = frac_apply(dir, -1.0, e1);
        CHECK(r.coeffs[0] == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-14));
        CHECK(r.sobolev_index == doctest::Approx(1.0));
    }
    SUBCASE("shifted cosine ground mode is fixed by every power") {
        const SpectralOperator neu(Basis::NeumannShiftedCosine, 8, 2.0);
        const ModeVector r = frac_apply(neu, 0.5, neu.mode(1));
        CHECK(r.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("frac_apply composes additively") {
    const SpectralOperator op(Basis::DirichletSine, 24, 1.5);
    const ModeVector v = random_vector(op, 11);
    const double s1 = 0.35, s2 = -0.8;
    const ModeVector a = frac_apply(op, s1, frac_apply(op, s2, v));
    const ModeVector b = frac_apply(op, s1 + s2, v);
    for (std::size_t k = 0; k < op.n_modes(); ++k)
        CHECK(a.coeffs[k] == doctest::Approx(b.coeffs[k]).epsilon(1e-12));
}

TEST_CASE("duality identity reassociates exactly") {
    const SpectralOperator op(Basis::DirichletSine, 16, 1.0);
    const ModeVector u = random_vector(op, 21), v = random_vector(op, 22);
    const double plain = spectral::dot(u, v);
    const double split = spectral::dot(frac_apply(op, -0.4, u), frac_apply(op, 0.4, v));
    CHECK(split == doctest::Approx(plain).epsilon(1e-14));
}

TEST_CASE("trace_power decisions and values") {
    const SpectralOperator dir(Basis::DirichletSine, 8, 1.0);

    SUBCASE("sigma = 1 sums to 1/6") {
        const auto t = trace_power(dir, 1.0, 1e-10);
        REQUIRE_FALSE(t.divergent);
        CHECK(t.value == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    }
    SUBCASE("boundary and identity are divergent") {
        CHECK(trace_power(dir, 0.5).divergent);
        CHECK(trace_power(dir, 0.0).divergent);
        CHECK(trace_power(dir, -1.0).divergent);
    }
    SUBCASE("the shifted cosine family matches a brute-force sum") {
        const SpectralOperator neu(Basis::NeumannShiftedCosine, 8, 1.0);
        const auto t = trace_power(neu, 1.0, 1e-10);
        REQUIRE_FALSE(t.divergent);
        double brute = 0.0;
        for (std::size_t k = 1; k <= 2'000'000; ++k) {
            const double m = static_cast<double>(k - 1);
            brute += 1.0 / (1.0 + kPi * kPi * m * m);
        }
        CHECK(t.value == doctest::Approx(brute).epsilon(1e-6));
    }
    SUBCASE("finiteness agrees with partial-sum doubling") {
        for (double sigma : {1.0, 1.5, 2.5}) {
            const auto t = trace_power(dir, sigma, 1e-6);
            REQUIRE_FALSE(t.divergent);
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t k = 1; k <= 2'000'000; ++k) {
                const double term = std::pow(kPi * kPi * k * k, -sigma);
                s2 += term;
                if (k <= 1'000'000) s1 += term;
            }
            CHECK(s2 - s1 < 1e-6);
            CHECK(t.value == doctest::Approx(s2).epsilon(1e-6));
        }
    }
}

TEST_CASE("collocation transforms") {
    const SpectralOperator op(Basis::DirichletSine, 8, 1.0);

    SUBCASE("e_1 samples the first basis function") {
        const ModeVector e1{{1.0}, 0.0};  // short vectors are fine, length <= n_modes
        const auto f = to_collocation(op, e1, 4);
        const auto xs = op.collocation_points(4);
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(f.values[j] == doctest::Approx(std::sqrt(2.0) * std::sin(kPi * xs[j])));
    }
    SUBCASE("round trip is the identity") {
        const ModeVector v = random_vector(op, 5);
        const auto f = to_collocation(op, v, 16);
        const ModeVector back = from_collocation(op, f, op.n_modes());
        for (std::size_t k = 0; k < op.n_modes(); ++k)
            CHECK(back.coeffs[k] == doctest::Approx(v.coeffs[k]).epsilon(1e-12));
    }
    SUBCASE("a pure sampled mode projects onto one coefficient") {
        const std::size_t m = 16;
        const auto xs = op.collocation_points(m);
        spectral::GridField f;
        f.grid = Basis::DirichletSine;
        for (double x : xs) f.values.push_back(std::sqrt(2.0) * std::sin(2.0 * kPi * x));
        const ModeVector v = from_collocation(op, f, op.n_modes());
        for (std::size_t k = 0; k < op.n_modes(); ++k)
            CHECK(v.coeffs[k] == doctest::Approx(k == 1 ? 1.0 : 0.0).epsilon(1e-12));
    }
    SUBCASE("Parseval under the quadrature weight") {
        for (auto basis : {Basis::DirichletSine, Basis::NeumannShiftedCosine}) {
            const SpectralOperator o(basis, 12, 1.0);
            const ModeVector v = random_vector(o, 9);
            const std::size_t m = 24;
            const auto f = to_collocation(o, v, m);
            double disc = 0.0;
            for (double val : f.values) disc += val * val * o.quadrature_weight(m);
            CHECK(std::sqrt(disc) == doctest::Approx(sobolev_norm(o, 0.0, v)).epsilon(1e-12));
        }
    }
    SUBCASE("dimension errors") {
        CHECK_THROWS_AS(to_collocation(op, random_vector(op, 1), 4), spectral::DimensionError);
    }
}

TEST_CASE("sobolev_norm examples") {
    const SpectralOperator op(Basis::DirichletSine, 8, 1.0);
    CHECK(sobolev_norm(op, 0.7, op.zero()) == 0.0);
    CHECK(sobolev_norm(op, 0.5, op.mode(1)) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(sobolev_norm(op, -1.0, op.mode(2)) ==
          doctest::Approx(1.0 / (4.0 * kPi * kPi)).epsilon(1e-14));
}
