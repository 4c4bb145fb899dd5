#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sselab/drift.hpp"
#include "sselab/spectral.hpp"

namespace sselab::kolmogorov {

// Numerical study of the scaled finite-dimensional elliptic equation
//   cbar lam_k u - 1/2 Tr[A_n^{-2 delta} D^2 u] + <A_n x, Du> = <B_n, Du> + g
// through its mild form
//   u(x) = int_0^inf e^{-cbar lam_k t} R_{n,t}[<B_n, Du> + g](x) dt,
// solved by Picard iteration on a tensor grid with the gradient carried by
// the Gaussian integration-by-parts weight (never by grid differencing).

struct McOptions {
    std::size_t samples = 2000;  // per grid node and sweep, shared across quad nodes
    bool antithetic = true;
    bool deterministic = false;  // tensor Gauss-Hermite instead of MC (n <= 4)
    std::size_t gh_nodes = 20;
    std::uint64_t seed = 0;
};

struct QuadOptions {
    int n_nodes = 64;
    double grading = 2.0;   // t = t_max * s^grading, midpoint in s
    double tol = 1e-4;      // fixes t_max via e^{-cbar lam_k t_max} = tol/10
};

struct GridSpec {
    double radius = 1.0;
    std::size_t nodes_per_axis = 9;
};

enum class ForcingType { Constant, Coordinate, CoordinateSquared, ModeProjection, Callback };

struct Forcing {
    ForcingType type = ForcingType::Constant;
    double value = 1.0;   // Constant
    std::size_t j = 1;    // Coordinate / CoordinateSquared (1-based)
    std::size_t k = 1;    // ModeProjection: g_k(x) = <B(x), e_k>
    std::function<double(const std::vector<double>&)> fn;
};

struct KolmogorovProblem {
    spectral::SpectralOperator op;  // n <= 4 active modes
    double delta = 0.0;
    drift::DriftSpec drift_spec;    // Zero or a bounded composition drift
    Forcing forcing;
    std::size_t k = 1;              // resolvent scaling mode
    double cbar = 1.0;

    bool critical = false;          // beta + delta = 1/2: shifted semigroup R^{z0}
    std::vector<double> z0;
};

struct OuEstimate {
    double value = 0.0;
    double se = 0.0;
};

// (R_{n,t} phi)(x) by averaging phi(e^{-tA} x + Y), Y ~ N(0, Q_{n,t}).
OuEstimate ou_expect(const spectral::SpectralOperator& op, double delta, double t,
                     const std::function<double(const std::vector<double>&)>& phi,
                     const std::vector<double>& x, const McOptions& mc);

// A_n^gamma-weighted gradient of R_{n,t} phi at x: component j estimates
//   lam_j^gamma e^{-t lam_j} / q_j(t) * E[ Y_j (phi(e^{-tA}x + Y) - phi(e^{-tA}x)) ].
struct OuGradient {
    std::vector<double> value;
    std::vector<double> se;
};
OuGradient ou_gradient(const spectral::SpectralOperator& op, double delta, double t,
                       const std::function<double(const std::vector<double>&)>& phi,
                       const std::vector<double>& x, double gamma_weight, const McOptions& mc);

// Lower bounds on the resolvent scaling constant. Sub-critical:
//   max{ 4 C_B / lam_1, [4 M C_B Gamma(1/2 - beta - delta)]^{1/(1/2-beta-delta)} / lam_1 },
// critical: the Gamma(theta(1-beta)) analogue plus 8 C_B / lam_1.
// Returns the bound times the safety factor.
double cbar_bound(double beta, double delta, double theta, double C_B, double M, double lambda1,
                  double safety = 2.0);
double cbar_bound_critical(double beta, double delta, double theta, double C_B, double C_Btilde,
                           double M, double lambda1, double safety = 2.0);
// Smallness threshold of the critical regime (the alpha = 0 form).
double smallness_threshold(double beta, double theta, double M);

struct KolmogorovIterate {
    GridSpec grid;
    std::size_t n = 0;
    std::vector<double> axis;       // shared per-axis nodes
    std::vector<double> u;          // nodes^n values
    std::vector<double> du;         // nodes^n * n gradient components
    std::vector<double> sweep_deltas;
    std::vector<double> contraction_ratios;
    bool converged = false;
    double sup_u = 0.0;
    double mc_se = 0.0;             // typical standard error of the node estimates

    std::size_t node_count() const { return u.size(); }
};

class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

KolmogorovIterate solve_u(const KolmogorovProblem& problem, const GridSpec& grid,
                          const QuadOptions& quad, double tol, std::size_t max_iter,
                          const McOptions& mc);

// Finite-difference check of the elliptic equation at interior grid nodes:
// sup |cbar lam_k u - 1/2 sum lam_j^{-2d} d2_j u + sum lam_j x_j d_j u - <B_n,Du> - g|.
double generator_residual(const KolmogorovProblem& problem, const KolmogorovIterate& it);

struct MonitorEntry {
    std::size_t n = 0;
    std::size_t k = 1;
    double est0 = 0.0;                // sup|u| / ||g_k||-bound
    std::vector<double> est1;         // per requested gamma
    std::vector<double> est2;         // per requested gamma' (grid-differenced)
    double cbar = 0.0;
};

struct MonitorReport {
    std::vector<double> gamma1;
    std::vector<double> gamma2;
    std::vector<MonitorEntry> entries;
    bool uniform_est0 = true;  // max/min over n (per k) <= 2
    bool uniform_est1 = true;
};

// Sweeps the solver over n and k with g = g_k and reports the empirical
// constants of the three uniform estimates; gamma'_2 above the exponent
// ceiling theta/2 - delta(2-theta) is rejected.
MonitorReport estimate_monitor(const spectral::SpectralOperator& op_base, double delta,
                               const drift::DriftSpec& drift_spec, double theta, double C_B,
                               double M, const std::vector<std::size_t>& n_sweep,
                               const std::vector<std::size_t>& k_sweep,
                               const std::vector<double>& gamma1,
                               const std::vector<double>& gamma2, const GridSpec& grid,
                               const QuadOptions& quad, const McOptions& mc, double tol,
                               std::size_t max_iter, double safety = 2.0);

// Gauss-Hermite nodes/weights for int f(y) e^{-y^2} dy (physicists' form).
void gauss_hermite(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sselab::kolmogorov
