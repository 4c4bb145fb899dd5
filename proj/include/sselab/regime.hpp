#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sselab/rational.hpp"

namespace sselab::regime {

class ParamError : public std::invalid_argument {
public:
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

enum class ExampleClass {
    AbstractFractionalHeat,
    Burgers,
    NavierStokes,
    CahnHilliard,
    CahnHilliardQuartic,
    ReactionDiffusion,
};

std::string to_string(ExampleClass c);

// The full parameter tuple (d, gamma, theta, mu, nu, rho) of the equation
//   dX + A_D^gamma X dt = A_D^nu F(A_D^mu X) dt + A_D^-rho dW
// in exact rationals, normalized so that (alpha, beta, delta) =
// (mu, nu, rho)/gamma. The composite classes fix some of the fields:
// Cahn-Hilliard maps to (gamma, mu, nu) = (2, 1, 0) over I + A_N (quartic
// variant (2, 1/2, 1)), reaction-diffusion derives (mu, nu) from (p, r).
struct RegimeParams {
    ExampleClass example_class = ExampleClass::AbstractFractionalHeat;
    int d = 1;
    Rational gamma{1};
    Rational theta{1, 2};
    Rational mu{0};
    Rational nu{0};
    Rational rho{0};
    bool drift_bounded = false;

    // reaction-diffusion extras
    Rational p{0};
    Rational r{0};

    static RegimeParams fractional_heat(int d, Rational gamma, Rational theta, Rational mu,
                                        Rational nu, Rational rho, bool bounded);
    static RegimeParams burgers(int d, Rational gamma, Rational theta, Rational mu, Rational nu,
                                Rational rho);
    static RegimeParams navier_stokes(int d, Rational gamma, Rational theta, Rational mu,
                                      Rational nu, Rational rho);
    static RegimeParams cahn_hilliard(int d, Rational theta, Rational rho);
    static RegimeParams cahn_hilliard_quartic(int d, Rational theta, Rational rho);
    static RegimeParams reaction_diffusion(int d, Rational theta, Rational delta, Rational p,
                                           Rational r);

    Rational alpha() const { return mu / gamma; }
    Rational beta() const { return nu / gamma; }
    Rational delta() const { return rho / gamma; }
};

struct FailedCondition {
    std::string name;      // H2 / H3 / trace / ineq-DAalpha / ...
    std::string rendered;  // exact inequality with the violating margin
};

struct RegimeVerdict {
    bool weak_DAalpha = false;
    bool weak_H = false;
    bool pathwise_DAalpha = false;
    bool pathwise_H = false;
    bool critical = false;  // beta + delta = 1/2 exactly
    std::vector<FailedCondition> failed_conditions;
    std::vector<std::string> notes;

    bool admissible(bool pathwise_level) const {
        return pathwise_level ? pathwise_DAalpha : weak_DAalpha;
    }
};

// Evaluates the hypothesis system exactly: H2 ranges, H3 and the trace
// condition as strict power-sum inequalities, the two pathwise inequalities,
// and the class structural constraints. Throws ParamError for malformed
// tuples (wrong d, nonpositive gamma, inconsistent class extras).
RegimeVerdict check(const RegimeParams& params);

struct RatInterval {
    Rational lo;
    Rational hi;
    bool lo_open = true;
    bool hi_open = false;

    bool contains(const Rational& x) const {
        if (lo_open ? !(x > lo) : !(x >= lo)) return false;
        if (hi_open ? !(x < hi) : !(x <= hi)) return false;
        return true;
    }
    bool empty() const { return lo > hi || (lo == hi && (lo_open || hi_open)); }
};

struct RhoIntervals {
    std::vector<RatInterval> weak;      // 0 or 1 interval
    std::vector<RatInterval> pathwise;  // 0 or 1 interval
};

// Exact admissible noise-colour interval with open/closed endpoints, all
// other fields fixed (params.rho is ignored).
RhoIntervals admissible_rho(const RegimeParams& params);

enum class Coord { Gamma, Theta, Mu, Nu, Rho };

// Admissible interval of one coordinate with the others held fixed, at the
// weak or pathwise level. Every predicate is affine in each coordinate, so
// the set is an interval; absent bounds are reported as none.
struct CoordInterval {
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    bool lo_open = true;
    bool hi_open = true;
    bool feasible = true;  // false when a coordinate-independent predicate already fails
};

CoordInterval admissible_interval(const RegimeParams& params, Coord coord, bool pathwise_level);

// Printed compound conditions of the reaction-diffusion bullets for L^2 data,
// with the <=''s taken exactly as printed.
struct RdL2Verdict {
    bool weak = false;
    bool pathwise = false;
};
RdL2Verdict rd_l2_data_admissible(int d, const Rational& p, const Rational& theta);

}  // namespace sselab::regime
