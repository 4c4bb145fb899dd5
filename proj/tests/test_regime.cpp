#include <doctest.h>

#include <cmath>

#include "sselab/noise.hpp"
#include "sselab/regime.hpp"
#include "sselab/regime_tables.hpp"

using namespace sselab;
using regime::Coord;
using regime::ExampleClass;
using regime::RegimeParams;
using regime::RegimeVerdict;
using regime::TableScenario;

namespace {

Rational rand_rational(std::uint64_t seed, std::uint32_t i, std::uint32_t j, int lo_num,
                       int hi_num, int max_den) {
    const double u = noise::keyed_uniform(seed, 3, i, j, 0);
    const double v = noise::keyed_uniform(seed, 3, i, j, 1);
    const std::int64_t den = 1 + static_cast<std::int64_t>(v * max_den);
    const std::int64_t num =
        lo_num + static_cast<std::int64_t>(u * static_cast<double>(hi_num - lo_num + 1));
    return Rational(num, den);
}

}  // namespace

TEST_CASE("heat baseline tuple is fully admissible") {
    const auto p = RegimeParams::fractional_heat(1, Rational(1), Rational(1, 2), Rational(0),
                                                 Rational(0), Rational(0), true);
    const RegimeVerdict v = regime::check(p);
    CHECK(v.weak_DAalpha);
    CHECK(v.weak_H);
    CHECK(v.pathwise_DAalpha);
    CHECK(v.pathwise_H);
    CHECK_FALSE(v.critical);
    CHECK(v.failed_conditions.empty());
}

TEST_CASE("Burgers d=3 hyperviscous tuple from the theta-high table") {
    // gamma = 7/4 + 1/100, theta = 1 - 1e-8, mu = 1/4, nu = 3/4 + 1e-4, rho = 1/8 - 1e-6
    const auto p = RegimeParams::burgers(
        3, Rational(7, 4) + Rational(1, 100), Rational(1) - Rational(1, 100000000),
        Rational(1, 4), Rational(3, 4) + Rational(1, 10000), Rational(1, 8) - Rational(1, 1000000));
    const RegimeVerdict v = regime::check(p);
    CHECK(v.pathwise_DAalpha);
    CHECK_FALSE(v.critical);
}

TEST_CASE("Burgers boundary: rho at the trace-forbidden value fails pathwise") {
    // same anchors with rho on the wrong side of the H3 bound
    const auto p = RegimeParams::burgers(3, Rational(9, 5), Rational(99, 100), Rational(1, 4),
                                         Rational(4, 5), Rational(1, 10));
    const RegimeVerdict v = regime::check(p);
    CHECK_FALSE(v.pathwise_DAalpha);  // H3 needs rho > 1/10 strictly, and the trace fails
    bool saw_h3 = false;
    for (const auto& f : v.failed_conditions) saw_h3 = saw_h3 || f.name == "base-trace";
    CHECK(saw_h3);
}

TEST_CASE("Cahn-Hilliard endpoints of rho in (d/4, 1]") {
    SUBCASE("rho = d/4 is excluded") {
        const RegimeVerdict v = regime::check(
            RegimeParams::cahn_hilliard(2, Rational(1, 2), Rational(1, 2)));
        CHECK_FALSE(v.weak_DAalpha);
        bool saw_h3 = false;
        for (const auto& f : v.failed_conditions) saw_h3 = saw_h3 || f.name == "base-trace";
        CHECK(saw_h3);
    }
    SUBCASE("rho = 1 is the included critical endpoint (weak only)") {
        const RegimeVerdict v = regime::check(
            RegimeParams::cahn_hilliard(2, Rational(1, 2), Rational(1)));
        CHECK(v.weak_DAalpha);
        CHECK(v.critical);
        CHECK_FALSE(v.pathwise_DAalpha);  // unbounded drift cannot reach the critical line
    }
    SUBCASE("interior rho with enough Hoelder regularity is pathwise") {
        // (1 - theta) rho < 1 - d/4 = 1/2 at d = 2
        const RegimeVerdict v = regime::check(
            RegimeParams::cahn_hilliard(2, Rational(3, 4), Rational(3, 4)));
        CHECK(v.weak_DAalpha);
        CHECK(v.pathwise_DAalpha);
    }
    SUBCASE("theta too small for the trace condition") {
        // (1-theta) rho >= 1 - d/4: theta = 1/3, rho = 9/10, d = 2
        const RegimeVerdict v = regime::check(
            RegimeParams::cahn_hilliard(2, Rational(1, 3), Rational(9, 10)));
        CHECK(v.weak_DAalpha);
        CHECK_FALSE(v.pathwise_DAalpha);
    }
}

TEST_CASE("admissible_rho reproduces the printed intervals") {
    SUBCASE("d=1 heat with nu = 3/4 - 2 eps") {
        const Rational eps(1, 100);
        auto p = RegimeParams::fractional_heat(1, Rational(1), Rational(1, 2), Rational(0),
                                               Rational(3, 4) - Rational(2) * eps, Rational(0),
                                               false);
        const auto iv = regime::admissible_rho(p);
        REQUIRE(iv.weak.size() == 1);
        CHECK(iv.weak[0].lo == Rational(-1, 4));
        CHECK(iv.weak[0].lo_open);
        CHECK(iv.weak[0].hi == Rational(-1, 4) + Rational(2) * eps);
        CHECK_FALSE(iv.weak[0].hi_open);
    }
    SUBCASE("mu + nu >= gamma - d/4 leaves nothing") {
        auto p = RegimeParams::fractional_heat(1, Rational(1), Rational(1, 2), Rational(0),
                                               Rational(3, 4), Rational(0), false);
        const auto iv = regime::admissible_rho(p);
        CHECK(iv.weak.empty());
        CHECK(iv.pathwise.empty());
    }
    SUBCASE("Burgers d=1 ground pair gives (0, 1/4)") {
        auto p = RegimeParams::burgers(1, Rational(1), Rational(1, 2), Rational(1, 4),
                                       Rational(1, 4), Rational(0));
        const auto iv = regime::admissible_rho(p);
        REQUIRE(iv.pathwise.size() == 1);
        CHECK(iv.pathwise[0].lo == Rational(0));
        CHECK(iv.pathwise[0].lo_open);
        CHECK(iv.pathwise[0].hi == Rational(1, 4));
        CHECK(iv.pathwise[0].hi_open);
        // min{1, theta/(1-theta)} kicks in below theta = 1/2
        p.theta = Rational(1, 3);
        const auto iv2 = regime::admissible_rho(p);
        REQUIRE(iv2.pathwise.size() == 1);
        CHECK(iv2.pathwise[0].hi == Rational(1, 8));  // theta/(4(1-theta)) = 1/8
    }
}

TEST_CASE("pathwise implies weak on random tuples") {
    std::size_t checked = 0;
    for (std::uint32_t i = 0; i < 10000; ++i) {
        RegimeParams p;
        p.example_class = (i % 3 == 0) ? ExampleClass::Burgers : ExampleClass::AbstractFractionalHeat;
        p.d = 1 + static_cast<int>(i % 3);
        p.gamma = rand_rational(77, i, 0, 1, 24, 8);   // (0, 3]
        p.theta = rand_rational(77, i, 1, 1, 31, 32);  // (0, 1) after clamp
        if (!(p.theta < Rational(1))) p.theta = Rational(31, 32);
        p.mu = rand_rational(77, i, 2, 0, 8, 8);
        p.nu = rand_rational(77, i, 3, 0, 8, 8);
        p.rho = rand_rational(77, i, 4, -8, 8, 8);
        p.drift_bounded = (p.example_class == ExampleClass::AbstractFractionalHeat) && (i % 2 == 0);
        const RegimeVerdict v = regime::check(p);
        if (v.pathwise_DAalpha) CHECK(v.weak_DAalpha);
        if (v.pathwise_H) CHECK(v.weak_H);
        if (v.weak_H) CHECK(v.weak_DAalpha);
        ++checked;
    }
    CHECK(checked == 10000);
}

TEST_CASE("pathwise condition is monotone in theta") {
    // if the combined inequality holds at theta0, it holds for theta in [theta0, 1)
    // whenever rho >= 0 and mu <= gamma/2
    std::size_t tested = 0;
    for (std::uint32_t i = 0; i < 300 && tested < 40; ++i) {
        RegimeParams p;
        p.example_class = ExampleClass::AbstractFractionalHeat;
        p.d = 1 + static_cast<int>(i % 3);
        p.gamma = rand_rational(91, i, 0, 2, 16, 4);
        p.theta = rand_rational(91, i, 1, 1, 15, 16);
        if (!(p.theta < Rational(1))) continue;
        p.mu = rand_rational(91, i, 2, 0, 4, 8);
        if (p.mu > p.gamma / Rational(2)) continue;
        p.nu = rand_rational(91, i, 3, 0, 4, 8);
        p.rho = rand_rational(91, i, 4, 0, 6, 8);
        p.drift_bounded = true;
        if (!regime::check(p).pathwise_DAalpha) continue;
        ++tested;
        for (int step = 1; step <= 8; ++step) {
            RegimeParams q = p;
            q.theta = p.theta + (Rational(1) - p.theta) * Rational(step, 9);
            if (!(q.theta < Rational(1))) continue;
            CHECK(regime::check(q).pathwise_DAalpha);
        }
    }
    CHECK(tested >= 20);
}

TEST_CASE("admissible_rho agrees with pointwise checks") {
    std::size_t nonempty = 0;
    for (std::uint32_t i = 0; i < 1000; ++i) {
        RegimeParams p;
        p.example_class = ExampleClass::AbstractFractionalHeat;
        p.d = 1 + static_cast<int>(i % 3);
        p.gamma = rand_rational(55, i, 0, 1, 24, 8);
        p.theta = rand_rational(55, i, 1, 1, 15, 16);
        if (!(p.theta < Rational(1))) p.theta = Rational(15, 16);
        p.mu = rand_rational(55, i, 2, 0, 6, 8);
        p.nu = rand_rational(55, i, 3, 0, 6, 8);
        p.drift_bounded = i % 2 == 0;
        const auto iv = regime::admissible_rho(p);

        auto verdict_at = [&p](const Rational& rho, bool pathwise) {
            RegimeParams q = p;
            q.rho = rho;
            const RegimeVerdict v = regime::check(q);
            return pathwise ? v.pathwise_DAalpha : v.weak_DAalpha;
        };
        const Rational tick(1, 1000000);
        for (bool pathwise : {false, true}) {
            const auto& set = pathwise ? iv.pathwise : iv.weak;
            if (set.empty()) continue;
            ++nonempty;
            const auto& r = set[0];
            for (int s = 0; s < 100; ++s) {
                const Rational x = r.lo + (r.hi - r.lo) * Rational(s + 1, 102);
                if (r.contains(x)) CHECK(verdict_at(x, pathwise));
            }
            CHECK_FALSE(verdict_at(r.lo - tick, pathwise));
            CHECK_FALSE(verdict_at(r.hi + tick, pathwise));
            CHECK(verdict_at(r.hi, pathwise) == !r.hi_open);
            CHECK(verdict_at(r.lo, pathwise) == !r.lo_open);
        }
    }
    CHECK(nonempty > 100);
}

TEST_CASE("all built-in tables validate at 1/100 and 1/1000") {
    for (auto cls : {ExampleClass::AbstractFractionalHeat, ExampleClass::Burgers,
                     ExampleClass::NavierStokes}) {
        for (auto sc : {TableScenario::Weak, TableScenario::PathwiseThetaHigh,
                        TableScenario::PathwiseThetaLow}) {
            for (auto off : {Rational(1, 100), Rational(1, 1000)}) {
                const auto t = regime::emit_table(cls, sc, off);
                CHECK(t.rows.size() >= 3);
                for (const auto& r : t.rows) CHECK(r.verdict.admissible(t.pathwise_level));
            }
        }
    }
}

TEST_CASE("oversized offsets are reported per row") {
    CHECK_THROWS_AS(
        regime::emit_table(ExampleClass::AbstractFractionalHeat, TableScenario::PathwiseThetaLow,
                           Rational(1, 2)),
        regime::TableError);
    try {
        regime::emit_table(ExampleClass::AbstractFractionalHeat, TableScenario::PathwiseThetaLow,
                           Rational(1, 2));
    } catch (const regime::TableError& e) {
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
}

TEST_CASE("boundary perturbations flip a verdict on every coordinate") {
    for (auto cls : {ExampleClass::AbstractFractionalHeat, ExampleClass::Burgers}) {
        for (auto sc : {TableScenario::Weak, TableScenario::PathwiseThetaHigh,
                        TableScenario::PathwiseThetaLow}) {
            const auto t = regime::emit_table(cls, sc, Rational(1, 100));
            for (const auto& row : t.rows) {
                const auto perts =
                    regime::boundary_perturbations(row.params, t.pathwise_level, Rational(1, 1000000));
                CHECK(perts.size() == 5);
                for (const auto& pert : perts) {
                    RegimeParams q = row.params;
                    switch (pert.coord) {
                        case Coord::Gamma: q.gamma = pert.value; break;
                        case Coord::Theta: q.theta = pert.value; break;
                        case Coord::Mu: q.mu = pert.value; break;
                        case Coord::Nu: q.nu = pert.value; break;
                        case Coord::Rho: q.rho = pert.value; break;
                    }
                    CHECK_FALSE(regime::check(q).admissible(t.pathwise_level));
                }
            }
        }
    }
}

TEST_CASE("reaction-diffusion structural constraints and thresholds") {
    SUBCASE("r outside [max{2,p-1}, 2(p-1)] fails") {
        const auto p = RegimeParams::reaction_diffusion(1, Rational(1, 2), Rational(1, 4),
                                                        Rational(3), Rational(5));
        const RegimeVerdict v = regime::check(p);
        CHECK_FALSE(v.weak_DAalpha);  // r = 5 > 2(p-1) = 4
    }
    SUBCASE("d=3 pathwise needs theta > 2/3: empty rho set at the boundary") {
        // p close to 2 and r maximal minimize alpha + beta; even so theta = 2/3
        // leaves no admissible noise colour
        const Rational p_small(101, 50);
        const Rational r = Rational(2) * (p_small - Rational(1));
        auto at = [&](const Rational& theta) {
            const auto params =
                RegimeParams::reaction_diffusion(3, theta, Rational(0), p_small, r);
            return regime::admissible_rho(params).pathwise;
        };
        CHECK(at(Rational(2, 3)).empty());
        CHECK_FALSE(at(Rational(2, 3) + Rational(1, 20)).empty());
    }
    SUBCASE("printed L2-data thresholds, boundary equalities as printed") {
        using regime::rd_l2_data_admissible;
        CHECK(rd_l2_data_admissible(1, Rational(3), Rational(1, 2)).weak);        // p <= 3
        CHECK_FALSE(rd_l2_data_admissible(1, Rational(31, 10), Rational(1, 2)).weak);
        CHECK(rd_l2_data_admissible(3, Rational(7, 3), Rational(1, 2)).weak);     // p <= 7/3
        CHECK_FALSE(rd_l2_data_admissible(3, Rational(7, 3), Rational(2, 3)).pathwise);
        // d=3 pathwise: theta > 2/3 and p <= 2 + (theta - 2/3), inclusive
        const Rational th(3, 4);
        CHECK(rd_l2_data_admissible(3, Rational(2) + th - Rational(2, 3), th).pathwise);
        CHECK_FALSE(
            rd_l2_data_admissible(3, Rational(2) + th - Rational(2, 3) + Rational(1, 100), th)
                .pathwise);
        // d=2 pathwise boundary p = 2 + theta inclusive
        CHECK(rd_l2_data_admissible(2, Rational(2) + th, th).pathwise);
        CHECK_FALSE(rd_l2_data_admissible(2, Rational(2) + th + Rational(1, 100), th).pathwise);
    }
}

TEST_CASE("class/extra inconsistencies are parameter errors") {
    RegimeParams p = RegimeParams::burgers(1, Rational(1), Rational(1, 2), Rational(1, 4),
                                           Rational(1, 4), Rational(1, 8));
    p.drift_bounded = true;  // Burgers drift is never bounded
    CHECK_THROWS_AS(regime::check(p), regime::ParamError);
    CHECK_THROWS_AS(regime::check(RegimeParams::reaction_diffusion(
                        1, Rational(1, 2), Rational(0), Rational(2), Rational(2))),
                    regime::ParamError);  // p > 2 required
    RegimeParams bad = RegimeParams::fractional_heat(4, Rational(1), Rational(1, 2), Rational(0),
                                                     Rational(0), Rational(0), false);
    CHECK_THROWS_AS(regime::check(bad), regime::ParamError);
}
