#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sselab/rational.hpp"
#include "sselab/spectral.hpp"

namespace sselab::drift {

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Scalar function library for the composition drifts A^nu F(A^mu .).
//   PowerHolder(t):   u -> sign(u) |u|^t          (unbounded)
//   BoundedHolder(t): u -> sign(u) min(1, |u|^t)
//   Sine:             u -> sin(u)
//   Const(c):         u -> c
enum class FKind { PowerHolder, BoundedHolder, Sine, Const };

struct ScalarF {
    FKind kind = FKind::BoundedHolder;
    double theta = 0.5;  // Hoelder exponent for the power families
    double c = 0.0;      // Const value

    double operator()(double u) const;
    bool bounded() const { return kind != FKind::PowerHolder; }
};

enum class DriftKind { Zero, Composition, Burgers1d, CahnHilliard1d, ReactionDiffusion1d };

// Analytic description handed to the regime checker.
struct DriftMetadata {
    Rational alpha{0};
    Rational beta{0};
    std::optional<Rational> theta;  // absent for the locally-Lipschitz kinds
    bool bounded = false;
    std::optional<double> C_B;  // max{1, ||B||_{C^theta_b}} when known in closed form
    std::string note;
};

struct DriftSpec {
    DriftKind kind = DriftKind::Zero;

    // Composition A^nu F(A^mu .)
    ScalarF F;
    Rational mu{0};
    Rational nu{0};

    // Cahn-Hilliard / reaction-diffusion polynomial F1 (coefficients by
    // ascending degree); F2 is a bounded Hoelder perturbation from the
    // scalar library applied pointwise to u.
    std::vector<double> f1_coeffs;
    ScalarF F2{FKind::Const, 0.5, 0.0};

    static DriftSpec zero() { return DriftSpec{}; }
    static DriftSpec composition(ScalarF f, Rational mu, Rational nu);
    static DriftSpec burgers();
    static DriftSpec cahn_hilliard(std::vector<double> f1_coeffs, ScalarF f2 = {FKind::Const, 0.5, 0.0});
    static DriftSpec reaction_diffusion(std::vector<double> f1_coeffs,
                                        ScalarF f2 = {FKind::Const, 0.5, 0.0});
};

// Validates the drift description against the operator it will act on (basis,
// exponents, boundedness rules). Throws ConfigError on mismatch.
void validate(const DriftSpec& spec, const spectral::SpectralOperator& op);

// B(x) in mode coefficients. Composition: y = A^mu x -> F pointwise on the
// dealiased grid -> back projection -> lam^nu. Burgers: u u_x. Cahn-Hilliard:
// B2(u) - B1(u) + u - 2 Lap u with B1 = -F1''(u)(u')^2 - F1'(u) u''.
// Reaction-diffusion: F1(u) + F2(u) pointwise.
spectral::ModeVector eval(const DriftSpec& spec, const spectral::SpectralOperator& op,
                          const spectral::ModeVector& x);

DriftMetadata metadata(const DriftSpec& spec, const spectral::SpectralOperator& op);

// Sampled lower bound on the local theta_test-Hoelder seminorm of B over the
// D(A^alpha) ball of the given radius:
//   max over pairs of ||B(x)-B(y)||_{-beta} / ||x-y||_alpha^theta_test.
double holder_estimate(const DriftSpec& spec, const spectral::SpectralOperator& op,
                       double theta_test, double radius, std::size_t n_pairs, std::uint64_t seed);

}  // namespace sselab::drift
