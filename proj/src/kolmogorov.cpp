#include "sselab/kolmogorov.hpp"

#include <algorithm>
#include <cmath>

#include "sselab/noise.hpp"

namespace sselab::kolmogorov {

using drift::ConfigError;
using spectral::ParamError;
using spectral::SpectralOperator;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void gauss_hermite(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ParamError("gauss_hermite needs n >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const std::size_t m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * nodes[1];
        } else {
            z = 2.0 * z - nodes[i - 2];
        }
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = std::pow(kPi, -0.25);
            double p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / static_cast<double>(j)) * p2 -
                     std::sqrt(static_cast<double>(j - 1) / static_cast<double>(j)) * p3;
            }
            pp = std::sqrt(2.0 * static_cast<double>(n)) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    // descending -> ascending
    std::reverse(nodes.begin(), nodes.end());
}

namespace {

// Fast evaluator for the bounded drifts allowed inside the fixed point:
// zero, or A^nu F(A^mu .) with bounded F. Collocation matrices are cached.
struct DriftCache {
    bool zero = true;
    std::size_t n = 0, m = 0;
    std::vector<double> lam_mu;   // lam_l^mu
    std::vector<double> lam_nu;   // lam_k^nu
    std::vector<double> S;        // m x n basis values at collocation points
    std::vector<double> P;        // n x m projection (quadrature weight folded)
    drift::ScalarF F;

    void eval(const double* y, double* out) const {
        if (zero) {
            for (std::size_t k = 0; k < n; ++k) out[k] = 0.0;
            return;
        }
        double grid[64];
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n; ++l) acc += S[j * n + l] * lam_mu[l] * y[l];
            grid[j] = F(acc);
        }
        for (std::size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += P[k * m + j] * grid[j];
            out[k] = lam_nu[k] * acc;
        }
    }
};

DriftCache make_drift_cache(const KolmogorovProblem& pb) {
    DriftCache c;
    c.n = pb.op.n_modes();
    if (pb.drift_spec.kind == drift::DriftKind::Zero) {
        c.zero = true;
        return c;
    }
    if (pb.drift_spec.kind != drift::DriftKind::Composition || !pb.drift_spec.F.bounded())
        throw ConfigError("the fixed point requires a bounded drift (zero or bounded composition)");
    c.zero = false;
    c.F = pb.drift_spec.F;
    c.m = 2 * c.n;
    if (c.m > 64) throw ConfigError("drift cache supports n <= 32");
    const auto xs = pb.op.collocation_points(c.m);
    const double w = pb.op.quadrature_weight(c.m);
    c.S.resize(c.m * c.n);
    c.P.resize(c.n * c.m);
    for (std::size_t j = 0; j < c.m; ++j)
        for (std::size_t l = 0; l < c.n; ++l) c.S[j * c.n + l] = pb.op.basis_value(l + 1, xs[j]);
    for (std::size_t k = 0; k < c.n; ++k)
        for (std::size_t j = 0; j < c.m; ++j) c.P[k * c.m + j] = w * c.S[j * c.n + k];
    c.lam_mu.resize(c.n);
    c.lam_nu.resize(c.n);
    for (std::size_t l = 0; l < c.n; ++l) {
        c.lam_mu[l] = std::pow(pb.op.eigenvalue(l + 1), pb.drift_spec.mu.to_double());
        c.lam_nu[l] = std::pow(pb.op.eigenvalue(l + 1), pb.drift_spec.nu.to_double());
    }
    return c;
}

struct GEval {
    const Forcing* forcing;
    const DriftCache* bcache;

    // b_out: scratch of size n holding B(y) when the forcing needs it
    double operator()(const double* y, std::size_t n, double* b_scratch, bool have_b) const {
        switch (forcing->type) {
            case ForcingType::Constant:
                return forcing->value;
            case ForcingType::Coordinate:
                return y[forcing->j - 1];
            case ForcingType::CoordinateSquared:
                return y[forcing->j - 1] * y[forcing->j - 1];
            case ForcingType::ModeProjection: {
                if (!have_b) bcache->eval(y, b_scratch);
                return b_scratch[forcing->k - 1];
            }
            case ForcingType::Callback: {
                std::vector<double> v(y, y + n);
                return forcing->fn(v);
            }
        }
        return 0.0;
    }
};

struct Quadrature {
    std::vector<double> t;        // panel midpoints, plus the tail node at t_max
    std::vector<double> weight;   // exact-exponential panel weights
    double t_max = 0.0;
};

Quadrature build_quadrature(double c, const QuadOptions& q) {
    if (q.n_nodes < 4) throw ParamError("need at least 4 quadrature nodes");
    if (q.tol <= 0.0) throw ParamError("quadrature tol must be positive");
    Quadrature out;
    out.t_max = std::log(10.0 / q.tol) / c;
    const int Q = q.n_nodes;
    const double g = q.grading;
    for (int i = 0; i < Q; ++i) {
        const double sa = static_cast<double>(i) / Q;
        const double sb = static_cast<double>(i + 1) / Q;
        const double ta = out.t_max * std::pow(sa, g);
        const double tb = out.t_max * std::pow(sb, g);
        const double tm = out.t_max * std::pow(0.5 * (sa + sb), g);
        out.t.push_back(tm);
        out.weight.push_back((std::exp(-c * ta) - std::exp(-c * tb)) / c);
    }
    // analytic tail: int_{t_max}^inf e^{-c t} R dt ~ e^{-c t_max}/c * R(t_max)
    out.t.push_back(out.t_max);
    out.weight.push_back(std::exp(-c * out.t_max) / c);
    return out;
}

struct TensorGrid {
    std::size_t n = 0;
    std::size_t P = 0;
    std::vector<double> axis;
    double lo = 0.0, h = 1.0;

    std::size_t count() const {
        std::size_t c = 1;
        for (std::size_t i = 0; i < n; ++i) c *= P;
        return c;
    }
    void coords(std::size_t flat, std::size_t* idx) const {
        for (std::size_t d = 0; d < n; ++d) {
            idx[d] = flat % P;
            flat /= P;
        }
    }
    void point(const std::size_t* idx, double* x) const {
        for (std::size_t d = 0; d < n; ++d) x[d] = axis[idx[d]];
    }
};

TensorGrid make_grid(std::size_t n, const GridSpec& spec) {
    if (spec.nodes_per_axis < 3) throw ParamError("need >= 3 nodes per axis");
    if (spec.radius <= 0.0) throw ParamError("grid radius must be positive");
    TensorGrid g;
    g.n = n;
    g.P = spec.nodes_per_axis;
    g.lo = -spec.radius;
    g.h = 2.0 * spec.radius / static_cast<double>(g.P - 1);
    for (std::size_t i = 0; i < g.P; ++i) g.axis.push_back(g.lo + g.h * static_cast<double>(i));
    return g;
}

// Multilinear interpolation of all gradient components at y (clamped to box).
void interp_du(const TensorGrid& g, const std::vector<double>& du, const double* y, double* out) {
    const std::size_t n = g.n;
    std::size_t base_idx[4];
    double frac[4];
    for (std::size_t d = 0; d < n; ++d) {
        double t = (y[d] - g.lo) / g.h;
        t = std::clamp(t, 0.0, static_cast<double>(g.P - 1));
        double fl = std::floor(t);
        std::size_t i0 = std::min(static_cast<std::size_t>(fl), g.P - 2);
        base_idx[d] = i0;
        frac[d] = t - static_cast<double>(i0);
    }
    for (std::size_t c = 0; c < n; ++c) out[c] = 0.0;
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t corner = 0; corner < corners; ++corner) {
        double w = 1.0;
        std::size_t flat = 0;
        std::size_t stride = 1;
        for (std::size_t d = 0; d < n; ++d) {
            const bool hi = (corner >> d) & 1u;
            w *= hi ? frac[d] : (1.0 - frac[d]);
            flat += (base_idx[d] + (hi ? 1 : 0)) * stride;
            stride *= g.P;
        }
        if (w == 0.0) continue;
        const double* src = du.data() + flat * n;
        for (std::size_t c = 0; c < n; ++c) out[c] += w * src[c];
    }
}

}  // namespace

OuEstimate ou_expect(const SpectralOperator& op, double delta, double t,
                     const std::function<double(const std::vector<double>&)>& phi,
                     const std::vector<double>& x, const McOptions& mc) {
    if (t <= 0.0) throw ParamError("t must be positive");
    const std::size_t n = op.n_modes();
    if (x.size() != n) throw spectral::DimensionError("point dimension != n_modes");
    std::vector<double> mean(n), sd(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = op.eigenvalue(j + 1);
        mean[j] = std::exp(-lam * t) * x[j];
        sd[j] = std::sqrt(noise::convolution_variance(lam, delta, t));
    }
    std::vector<double> y(n);

    if (mc.deterministic) {
        std::vector<double> nodes, weights;
        gauss_hermite(mc.gh_nodes, nodes, weights);
        const std::size_t G = nodes.size();
        std::size_t total = 1;
        for (std::size_t j = 0; j < n; ++j) total *= G;
        double acc = 0.0;
        std::vector<std::size_t> idx(n, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            double w = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                idx[j] = rem % G;
                rem /= G;
                w *= weights[idx[j]];
                y[j] = mean[j] + std::sqrt(2.0) * sd[j] * nodes[idx[j]];
            }
            acc += w * phi(y);
        }
        return OuEstimate{acc * std::pow(kPi, -0.5 * static_cast<double>(n)), 0.0};
    }

    const std::size_t N = std::max<std::size_t>(2, mc.samples);
    if (mc.antithetic) {
        const std::size_t pairs = (N + 1) / 2;
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t s = 0; s < pairs; ++s) {
            double vp, vm;
            std::vector<double> z(n);
            for (std::size_t j = 0; j < n; ++j)
                z[j] = noise::keyed_gaussian(mc.seed, 1, 0, static_cast<std::uint32_t>(s),
                                             static_cast<std::uint32_t>(j));
            for (std::size_t j = 0; j < n; ++j) y[j] = mean[j] + sd[j] * z[j];
            vp = phi(y);
            for (std::size_t j = 0; j < n; ++j) y[j] = mean[j] - sd[j] * z[j];
            vm = phi(y);
            const double v = 0.5 * (vp + vm);
            sum += v;
            sum_sq += v * v;
        }
        const double Np = static_cast<double>(pairs);
        const double m = sum / Np;
        const double var = std::max(0.0, sum_sq / Np - m * m);
        return OuEstimate{m, std::sqrt(var / Np)};
    }
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < N; ++s) {
        for (std::size_t j = 0; j < n; ++j)
            y[j] = mean[j] + sd[j] * noise::keyed_gaussian(mc.seed, 1, 0,
                                                           static_cast<std::uint32_t>(s),
                                                           static_cast<std::uint32_t>(j));
        const double v = phi(y);
        sum += v;
        sum_sq += v * v;
    }
    const double m = sum / static_cast<double>(N);
    const double var = std::max(0.0, sum_sq / static_cast<double>(N) - m * m);
    return OuEstimate{m, std::sqrt(var / static_cast<double>(N))};
}

OuGradient ou_gradient(const SpectralOperator& op, double delta, double t,
                       const std::function<double(const std::vector<double>&)>& phi,
                       const std::vector<double>& x, double gamma_weight, const McOptions& mc) {
    if (t <= 0.0) throw ParamError("t must be positive");
    const std::size_t n = op.n_modes();
    if (x.size() != n) throw spectral::DimensionError("point dimension != n_modes");
    std::vector<double> mean(n), sd(n), factor(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = op.eigenvalue(j + 1);
        const double q = noise::convolution_variance(lam, delta, t);
        mean[j] = std::exp(-lam * t) * x[j];
        sd[j] = std::sqrt(q);
        factor[j] = std::pow(lam, gamma_weight) * std::exp(-lam * t) / q;
    }
    OuGradient out;
    out.value.assign(n, 0.0);
    out.se.assign(n, 0.0);
    std::vector<double> y(n);

    if (mc.deterministic) {
        std::vector<double> nodes, weights;
        gauss_hermite(mc.gh_nodes, nodes, weights);
        const std::size_t G = nodes.size();
        std::size_t total = 1;
        for (std::size_t j = 0; j < n; ++j) total *= G;
        std::vector<double> acc(n, 0.0);
        std::vector<std::size_t> idx(n, 0);
        std::vector<double> dev(n);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            double w = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                idx[j] = rem % G;
                rem /= G;
                w *= weights[idx[j]];
                dev[j] = std::sqrt(2.0) * sd[j] * nodes[idx[j]];
                y[j] = mean[j] + dev[j];
            }
            const double v = w * phi(y);
            for (std::size_t j = 0; j < n; ++j) acc[j] += v * dev[j];
        }
        const double norm = std::pow(kPi, -0.5 * static_cast<double>(n));
        for (std::size_t j = 0; j < n; ++j) out.value[j] = factor[j] * acc[j] * norm;
        return out;
    }

    const std::size_t N = std::max<std::size_t>(2, mc.samples);
    const std::size_t pairs = mc.antithetic ? (N + 1) / 2 : N;
    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0), dev(n);
    // control variate: phi at the shifted mean
    const double center = mc.antithetic ? 0.0 : phi(mean);
    for (std::size_t s = 0; s < pairs; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
            dev[j] = sd[j] * noise::keyed_gaussian(mc.seed, 1, 1, static_cast<std::uint32_t>(s),
                                                   static_cast<std::uint32_t>(j));
            y[j] = mean[j] + dev[j];
        }
        const double vp = phi(y);
        double diff;
        if (mc.antithetic) {
            for (std::size_t j = 0; j < n; ++j) y[j] = mean[j] - dev[j];
            diff = 0.5 * (vp - phi(y));
        } else {
            diff = vp - center;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double c = dev[j] * diff;
            sum[j] += c;
            sum_sq[j] += c * c;
        }
    }
    const double Np = static_cast<double>(pairs);
    for (std::size_t j = 0; j < n; ++j) {
        const double m = sum[j] / Np;
        const double var = std::max(0.0, sum_sq[j] / Np - m * m);
        out.value[j] = factor[j] * m;
        out.se[j] = factor[j] * std::sqrt(var / Np);
    }
    return out;
}

double cbar_bound(double beta, double delta, double theta, double C_B, double M, double lambda1,
                  double safety) {
    const double s = 0.5 - beta - delta;
    if (s <= 0.0)
        throw ParamError("beta + delta = 1/2 is the critical regime: use cbar_bound_critical");
    if (C_B <= 0.0) return 0.0;
    const double a = 4.0 * C_B / lambda1;
    const double b = std::pow(4.0 * M * C_B * std::tgamma(s), 1.0 / s) / lambda1;
    (void)theta;
    return safety * std::max(a, b);
}

double smallness_threshold(double beta, double theta, double M) {
    return theta * (1.0 - theta) * (1.0 - beta) / (4.0 * M * (2.0 - theta));
}

double cbar_bound_critical(double beta, double delta, double theta, double C_B, double C_Btilde,
                           double M, double lambda1, double safety) {
    if (std::abs(beta + delta - 0.5) > 1e-12)
        throw ParamError("cbar_bound_critical requires beta + delta = 1/2");
    const double e = theta * (1.0 - beta);
    const double csum = C_Btilde + C_B;
    const double inner = 1.0 + 2.0 * M * (2.0 - theta) / (theta * (1.0 - theta) * (1.0 - beta)) * csum;
    const double main = std::pow(16.0 * M * std::tgamma(e) * csum * inner, 1.0 / e) / lambda1;
    return safety * (main + 8.0 * C_B / lambda1);
}

KolmogorovIterate solve_u(const KolmogorovProblem& pb, const GridSpec& grid,
                          const QuadOptions& quad, double tol, std::size_t max_iter,
                          const McOptions& mc) {
    const std::size_t n = pb.op.n_modes();
    if (n > 4) throw ParamError("the tensor-grid solver caps at n <= 4 modes");
    if (pb.cbar <= 0.0) throw ParamError("cbar must be positive");
    if (pb.k < 1 || pb.k > n) throw ParamError("mode index k out of range");
    if (pb.critical && pb.z0.size() != n) throw ParamError("critical regime needs z0 of length n");
    const DriftCache bc = make_drift_cache(pb);
    GEval geval{&pb.forcing, &bc};
    if (pb.forcing.type == ForcingType::ModeProjection && pb.forcing.k > n)
        throw ParamError("forcing mode projection index out of range");

    const double c = pb.cbar * pb.op.eigenvalue(pb.k);
    const Quadrature Q = build_quadrature(c, quad);
    const std::size_t nq = Q.t.size();

    // per-(quad, mode) tables
    std::vector<double> decay(nq * n), sd(nq * n), gfac(nq * n), shift(nq * n, 0.0);
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double lam = pb.op.eigenvalue(j + 1);
            const double t = Q.t[i];
            const double q = noise::convolution_variance(lam, pb.delta, t);
            decay[i * n + j] = std::exp(-lam * t);
            sd[i * n + j] = std::sqrt(q);
            gfac[i * n + j] = std::exp(-lam * t) / q;
            if (pb.critical) shift[i * n + j] = (1.0 - std::exp(-lam * t)) / lam * pb.z0[j];
        }
    }

    const TensorGrid g = make_grid(n, grid);
    const std::size_t nodes = g.count();

    KolmogorovIterate it;
    it.grid = grid;
    it.n = n;
    it.axis = g.axis;
    it.u.assign(nodes, 0.0);
    it.du.assign(nodes * n, 0.0);

    // Gauss-Hermite tables for the deterministic path
    std::vector<double> gh_x, gh_w;
    std::size_t gh_total = 1;
    if (mc.deterministic) {
        gauss_hermite(mc.gh_nodes, gh_x, gh_w);
        for (std::size_t j = 0; j < n; ++j) gh_total *= gh_x.size();
    }

    const std::size_t samples_per_quad =
        std::max<std::size_t>(2, mc.samples / static_cast<std::size_t>(quad.n_nodes));
    const std::size_t pairs = mc.antithetic ? (samples_per_quad + 1) / 2 : samples_per_quad;

    std::vector<double> u_new(nodes), du_new(nodes * n);
    double prev_delta = 0.0;
    int rising = 0;

    // psi(y) = <B~(y), Du(y)> + g(y); B~ = B - z0 in the critical regime
    std::vector<double> bvec(n), duv(n), y(n), dev(n), xpt(n);
    std::size_t idx[4];

    for (std::size_t sweep = 0; sweep < max_iter; ++sweep) {
        double se_acc = 0.0;
        for (std::size_t node = 0; node < nodes; ++node) {
            g.coords(node, idx);
            g.point(idx, xpt.data());

            double u_acc = 0.0;
            std::vector<double> du_acc(n, 0.0);
            double node_var = 0.0;

            for (std::size_t qi = 0; qi < nq; ++qi) {
                const double* dq = &decay[qi * n];
                const double* sq = &sd[qi * n];
                const double* fq = &gfac[qi * n];
                const double* zq = &shift[qi * n];
                const double w = Q.weight[qi];

                auto psi = [&](const double* yy) {
                    bc.eval(yy, bvec.data());
                    double val = geval(yy, n, bvec.data(), true);
                    if (!bc.zero) {
                        interp_du(g, it.du, yy, duv.data());
                        for (std::size_t j = 0; j < n; ++j) {
                            const double bj = pb.critical ? bvec[j] - pb.z0[j] : bvec[j];
                            val += bj * duv[j];
                        }
                    }
                    return val;
                };

                if (mc.deterministic) {
                    double acc = 0.0;
                    std::vector<double> gacc(n, 0.0);
                    for (std::size_t flat = 0; flat < gh_total; ++flat) {
                        std::size_t rem = flat;
                        double wgh = 1.0;
                        for (std::size_t j = 0; j < n; ++j) {
                            const std::size_t gi = rem % gh_x.size();
                            rem /= gh_x.size();
                            wgh *= gh_w[gi];
                            dev[j] = std::sqrt(2.0) * sq[j] * gh_x[gi];
                            y[j] = dq[j] * xpt[j] + zq[j] + dev[j];
                        }
                        const double v = wgh * psi(y.data());
                        acc += v;
                        for (std::size_t j = 0; j < n; ++j) gacc[j] += v * dev[j];
                    }
                    const double norm = std::pow(kPi, -0.5 * static_cast<double>(n));
                    u_acc += w * acc * norm;
                    for (std::size_t j = 0; j < n; ++j)
                        du_acc[j] += w * fq[j] * gacc[j] * norm;
                } else {
                    double sum = 0.0, sum_sq = 0.0;
                    std::vector<double> gsum(n, 0.0);
                    for (std::size_t s = 0; s < pairs; ++s) {
                        for (std::size_t j = 0; j < n; ++j) {
                            dev[j] = sq[j] * noise::keyed_gaussian(
                                                 mc.seed, 1, static_cast<std::uint32_t>(node),
                                                 static_cast<std::uint32_t>(s),
                                                 static_cast<std::uint32_t>(j));
                            y[j] = dq[j] * xpt[j] + zq[j] + dev[j];
                        }
                        const double vp = psi(y.data());
                        double vm = vp;
                        if (mc.antithetic) {
                            for (std::size_t j = 0; j < n; ++j)
                                y[j] = dq[j] * xpt[j] + zq[j] - dev[j];
                            vm = psi(y.data());
                        }
                        const double vavg = mc.antithetic ? 0.5 * (vp + vm) : vp;
                        const double vdiff = mc.antithetic ? 0.5 * (vp - vm) : vp;
                        sum += vavg;
                        sum_sq += vavg * vavg;
                        for (std::size_t j = 0; j < n; ++j) gsum[j] += dev[j] * vdiff;
                    }
                    const double Np = static_cast<double>(pairs);
                    const double m = sum / Np;
                    const double var = std::max(0.0, sum_sq / Np - m * m);
                    u_acc += w * m;
                    node_var += w * w * var / Np;
                    for (std::size_t j = 0; j < n; ++j)
                        du_acc[j] += w * fq[j] * gsum[j] / Np;
                }
            }
            u_new[node] = u_acc;
            for (std::size_t j = 0; j < n; ++j) du_new[node * n + j] = du_acc[j];
            se_acc += std::sqrt(node_var);
        }

        double sup_delta = 0.0, sup_val = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            sup_delta = std::max(sup_delta, std::abs(u_new[i] - it.u[i]));
            sup_val = std::max(sup_val, std::abs(u_new[i]));
        }
        if (!std::isfinite(sup_delta))
            throw DivergenceError("Picard sweep produced non-finite values: cbar too small");
        it.u = u_new;
        it.du = du_new;
        it.sweep_deltas.push_back(sup_delta);
        it.mc_se = se_acc / static_cast<double>(nodes);
        const double fp_floor = 1e-15 * (1.0 + sup_val);
        if (sweep > 0 && prev_delta > fp_floor) {
            const double ratio = sup_delta / prev_delta;
            it.contraction_ratios.push_back(ratio);
            if (ratio >= 1.0 && sup_delta > fp_floor) {
                if (++rising >= 3)
                    throw DivergenceError("Picard sweeps not contracting (ratio >= 1 three times): "
                                          "cbar too small or M-configuration too optimistic");
            } else {
                rising = 0;
            }
        }
        prev_delta = sup_delta;
        if (sup_delta < tol || sup_delta <= fp_floor) {
            it.converged = true;
            break;
        }
    }
    for (double v : it.u) it.sup_u = std::max(it.sup_u, std::abs(v));
    return it;
}

double generator_residual(const KolmogorovProblem& pb, const KolmogorovIterate& it) {
    const std::size_t n = it.n;
    const TensorGrid g = [&] {
        TensorGrid t;
        t.n = n;
        t.P = it.grid.nodes_per_axis;
        t.axis = it.axis;
        t.lo = it.axis.front();
        t.h = it.axis[1] - it.axis[0];
        return t;
    }();
    const DriftCache bc = make_drift_cache(pb);
    GEval geval{&pb.forcing, &bc};
    const double clk = pb.cbar * pb.op.eigenvalue(pb.k);

    std::vector<double> bvec(n), xpt(n);
    std::size_t idx[4];
    double worst = 0.0;
    const std::size_t nodes = g.count();
    for (std::size_t node = 0; node < nodes; ++node) {
        g.coords(node, idx);
        bool interior = true;
        for (std::size_t d = 0; d < n; ++d)
            if (idx[d] == 0 || idx[d] + 1 == g.P) interior = false;
        if (!interior) continue;
        g.point(idx, xpt.data());

        double lhs = clk * it.u[node];
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t stride = 1;
            for (std::size_t d = 0; d < j; ++d) stride *= g.P;
            const double up = it.u[node + stride];
            const double um = it.u[node - stride];
            const double d2 = (up - 2.0 * it.u[node] + um) / (g.h * g.h);
            const double lam = pb.op.eigenvalue(j + 1);
            lhs -= 0.5 * std::pow(lam, -2.0 * pb.delta) * d2;
            lhs += lam * xpt[j] * it.du[node * n + j];
        }
        bc.eval(xpt.data(), bvec.data());
        double rhs = geval(xpt.data(), n, bvec.data(), true);
        for (std::size_t j = 0; j < n; ++j) rhs += bvec[j] * it.du[node * n + j];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

MonitorReport estimate_monitor(const SpectralOperator& op_base, double delta,
                               const drift::DriftSpec& drift_spec, double theta, double C_B,
                               double M, const std::vector<std::size_t>& n_sweep,
                               const std::vector<std::size_t>& k_sweep,
                               const std::vector<double>& gamma1, const std::vector<double>& gamma2,
                               const GridSpec& grid, const QuadOptions& quad, const McOptions& mc,
                               double tol, std::size_t max_iter, double safety) {
    if (n_sweep.empty() || k_sweep.empty()) throw ParamError("empty monitor sweep");
    const drift::DriftMetadata md = drift::metadata(drift_spec, op_base);
    const double beta = md.beta.to_double();
    const double est2_ceiling = 0.5 * theta - delta * (2.0 - theta);
    for (double gp : gamma2) {
        if (gp >= est2_ceiling || gp < -delta)
            throw ParamError("gamma' outside [-delta, theta/2 - delta(2-theta))");
    }

    MonitorReport rep;
    rep.gamma1 = gamma1;
    rep.gamma2 = gamma2;

    for (std::size_t k : k_sweep) {
        double est0_min = 0.0, est0_max = 0.0, est1_min = 0.0, est1_max = 0.0;
        bool first = true;
        for (std::size_t n : n_sweep) {
            if (k > n) throw ParamError("monitor requires k <= n for every pair in the sweep");
            KolmogorovProblem pb{
                spectral::SpectralOperator(op_base.basis(), n, op_base.power()),
                delta,
                drift_spec,
                Forcing{ForcingType::ModeProjection, 0.0, 1, k, nullptr},
                k,
                0.0,
                false,
                {}};
            pb.cbar = cbar_bound(beta, delta, theta, C_B, M, pb.op.eigenvalue(1), safety);
            const KolmogorovIterate it = solve_u(pb, grid, quad, tol, max_iter, mc);

            MonitorEntry e;
            e.n = n;
            e.k = k;
            e.cbar = pb.cbar;
            const double lam_k = pb.op.eigenvalue(k);
            const double g_bound = C_B * std::pow(lam_k, beta);
            e.est0 = it.sup_u / g_bound;

            const double clk = pb.cbar * lam_k;
            for (double gm : gamma1) {
                double sup = 0.0;
                for (std::size_t node = 0; node < it.node_count(); ++node) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double w = std::pow(pb.op.eigenvalue(j + 1), 2.0 * gm);
                        s += w * it.du[node * n + j] * it.du[node * n + j];
                    }
                    sup = std::max(sup, std::sqrt(s));
                }
                const double expo = 0.5 * (1.0 + theta) - gm - (1.0 - theta) * delta;
                e.est1.push_back(sup * std::pow(clk, expo) / g_bound);
            }
            for (double gp : gamma2) {
                // grid-differenced D(A^gamma' Du), Frobenius norm over interior nodes
                const std::size_t P = grid.nodes_per_axis;
                const double h = it.axis[1] - it.axis[0];
                double sup = 0.0;
                std::size_t idx[4];
                const TensorGrid tg{n, P, it.axis, it.axis.front(), h};
                for (std::size_t node = 0; node < it.node_count(); ++node) {
                    tg.coords(node, idx);
                    bool interior = true;
                    for (std::size_t d = 0; d < n; ++d)
                        if (idx[d] == 0 || idx[d] + 1 == P) interior = false;
                    if (!interior) continue;
                    double fro = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double lamg = std::pow(pb.op.eigenvalue(j + 1), gp);
                        for (std::size_t l = 0; l < n; ++l) {
                            std::size_t stride = 1;
                            for (std::size_t d = 0; d < l; ++d) stride *= P;
                            const double dp = it.du[(node + stride) * n + j];
                            const double dm = it.du[(node - stride) * n + j];
                            const double der = lamg * (dp - dm) / (2.0 * h);
                            fro += der * der;
                        }
                    }
                    sup = std::max(sup, std::sqrt(fro));
                }
                const double expo = 0.5 * theta - gp - delta * (2.0 - theta);
                e.est2.push_back(sup * std::pow(clk, expo) / g_bound);
            }

            if (first) {
                est0_min = est0_max = e.est0;
                if (!e.est1.empty()) est1_min = est1_max = e.est1[0];
                first = false;
            } else {
                est0_min = std::min(est0_min, e.est0);
                est0_max = std::max(est0_max, e.est0);
                if (!e.est1.empty()) {
                    est1_min = std::min(est1_min, e.est1[0]);
                    est1_max = std::max(est1_max, e.est1[0]);
                }
            }
            rep.entries.push_back(std::move(e));
        }
        if (est0_min > 0.0 && est0_max / est0_min > 2.0) rep.uniform_est0 = false;
        if (est1_min > 0.0 && est1_max / est1_min > 2.0) rep.uniform_est1 = false;
    }
    return rep;
}

}  // namespace sselab::kolmogorov
