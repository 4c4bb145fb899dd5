#include "sselab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace sselab::spectral {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpectralOperator::SpectralOperator(Basis basis, std::size_t n_modes, double power)
    : basis_(basis), n_modes_(n_modes), power_(power) {
    if (basis == Basis::Custom) throw ParamError("use SpectralOperator::custom for explicit spectra");
    if (n_modes == 0) throw ParamError("n_modes must be positive");
    if (power <= 0.0) throw ParamError("operator power must be positive");
}

SpectralOperator SpectralOperator::custom(std::vector<double> eigenvalues, double growth_exponent) {
    if (eigenvalues.empty()) throw ParamError("empty eigenvalue sequence");
    if (eigenvalues.front() <= 0.0) throw ParamError("lambda_1 must be positive");
    for (std::size_t k = 1; k < eigenvalues.size(); ++k)
        if (eigenvalues[k] <= eigenvalues[k - 1]) throw ParamError("eigenvalues must increase strictly");
    if (growth_exponent <= 0.0) throw ParamError("growth exponent must be positive");
    SpectralOperator op;
    op.basis_ = Basis::Custom;
    op.n_modes_ = eigenvalues.size();
    op.power_ = 1.0;
    op.custom_eigenvalues_ = std::move(eigenvalues);
    op.growth_exponent_ = growth_exponent;
    return op;
}

double SpectralOperator::base_eigenvalue(std::size_t k) const {
    if (k == 0) throw ParamError("mode index is 1-based");
    switch (basis_) {
        case Basis::DirichletSine:
            return kPi * kPi * static_cast<double>(k) * static_cast<double>(k);
        case Basis::NeumannShiftedCosine: {
            double m = static_cast<double>(k - 1);
            return 1.0 + kPi * kPi * m * m;
        }
        case Basis::Custom:
            if (k > custom_eigenvalues_.size()) throw ParamError("mode index beyond custom spectrum");
            return custom_eigenvalues_[k - 1];
    }
    throw ParamError("unknown basis");
}

double SpectralOperator::eigenvalue(std::size_t k) const {
    if (basis_ == Basis::Custom) return base_eigenvalue(k);
    return std::pow(base_eigenvalue(k), power_);
}

ModeVector SpectralOperator::mode(std::size_t k, double amplitude) const {
    if (k == 0 || k > n_modes_) throw ParamError("mode index out of range");
    ModeVector v{std::vector<double>(n_modes_, 0.0), 0.0};
    v.coeffs[k - 1] = amplitude;
    return v;
}

double SpectralOperator::basis_value(std::size_t k, double x) const {
    switch (basis_) {
        case Basis::DirichletSine:
            return std::sqrt(2.0) * std::sin(static_cast<double>(k) * kPi * x);
        case Basis::NeumannShiftedCosine:
            if (k == 1) return 1.0;
            return std::sqrt(2.0) * std::cos(static_cast<double>(k - 1) * kPi * x);
        case Basis::Custom:
            throw ParamError("custom operators carry no collocation basis");
    }
    throw ParamError("unknown basis");
}

double SpectralOperator::basis_derivative(std::size_t k, double x) const {
    switch (basis_) {
        case Basis::DirichletSine: {
            double w = static_cast<double>(k) * kPi;
            return std::sqrt(2.0) * w * std::cos(w * x);
        }
        case Basis::NeumannShiftedCosine: {
            if (k == 1) return 0.0;
            double w = static_cast<double>(k - 1) * kPi;
            return -std::sqrt(2.0) * w * std::sin(w * x);
        }
        case Basis::Custom:
            throw ParamError("custom operators carry no collocation basis");
    }
    throw ParamError("unknown basis");
}

double SpectralOperator::basis_second_derivative(std::size_t k, double x) const {
    switch (basis_) {
        case Basis::DirichletSine: {
            double w = static_cast<double>(k) * kPi;
            return -w * w * basis_value(k, x);
        }
        case Basis::NeumannShiftedCosine: {
            if (k == 1) return 0.0;
            double w = static_cast<double>(k - 1) * kPi;
            return -w * w * basis_value(k, x);
        }
        case Basis::Custom:
            throw ParamError("custom operators carry no collocation basis");
    }
    throw ParamError("unknown basis");
}

std::vector<double> SpectralOperator::collocation_points(std::size_t n_points) const {
    std::vector<double> xs(n_points);
    switch (basis_) {
        case Basis::DirichletSine:
            for (std::size_t j = 0; j < n_points; ++j)
                xs[j] = static_cast<double>(j + 1) / static_cast<double>(n_points + 1);
            return xs;
        case Basis::NeumannShiftedCosine:
            for (std::size_t j = 0; j < n_points; ++j)
                xs[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n_points);
            return xs;
        case Basis::Custom:
            throw ParamError("custom operators carry no collocation basis");
    }
    throw ParamError("unknown basis");
}

double SpectralOperator::quadrature_weight(std::size_t n_points) const {
    switch (basis_) {
        case Basis::DirichletSine:
            return 1.0 / static_cast<double>(n_points + 1);
        case Basis::NeumannShiftedCosine:
            return 1.0 / static_cast<double>(n_points);
        case Basis::Custom:
            throw ParamError("custom operators carry no collocation basis");
    }
    throw ParamError("unknown basis");
}

double SpectralOperator::growth_exponent() const {
    if (basis_ == Basis::Custom) return growth_exponent_;
    return 2.0 * power_;
}

ModeVector frac_apply(const SpectralOperator& op, double sigma, const ModeVector& v) {
    if (v.size() > op.n_modes()) throw DimensionError("vector longer than operator");
    ModeVector out = v;
    if (sigma == 0.0) return out;
    for (std::size_t k = 0; k < v.size(); ++k)
        out.coeffs[k] = std::pow(op.eigenvalue(k + 1), sigma) * v.coeffs[k];
    out.sobolev_index = v.sobolev_index - sigma;
    return out;
}

namespace {

// Euler-Maclaurin tail of sum_{m > N} m^{-s} for s > 1:
//   N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12 + remainder,
// |remainder| <= s(s+1)(s+2) N^{-s-3}/720.
struct PowerTail {
    double value;
    double error_bound;
};

PowerTail power_tail(double s, double n) {
    PowerTail t;
    t.value = std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s) +
              s * std::pow(n, -s - 1.0) / 12.0;
    t.error_bound = s * (s + 1.0) * (s + 2.0) * std::pow(n, -s - 3.0) / 720.0;
    return t;
}

}  // namespace

TraceResult trace_power(const SpectralOperator& op, double sigma, double tail_tol) {
    if (tail_tol <= 0.0) throw ParamError("tail_tol must be positive");
    // lam_k^{-sigma} ~ c k^{-s} with s = growth_exponent * sigma; convergent iff s > 1.
    const double s = op.growth_exponent() * sigma;
    if (s <= 1.0) return TraceResult{true, 0.0};

    auto term = [&op, sigma](std::size_t k) { return std::pow(op.eigenvalue(k), -sigma); };
    const double a = op.power() * sigma;  // base-eigenvalue exponent, s = 2a for the interval bases

    if (op.basis() == Basis::Custom) {
        double sum = 0.0;
        for (std::size_t k = 1; k <= op.n_modes(); ++k) sum += term(k);
        // declared growth: lam_k >= lam_N (k/N)^g beyond the listed spectrum
        const double n = static_cast<double>(op.n_modes());
        const double bound = term(op.n_modes()) * n / (s - 1.0);
        return TraceResult{false, sum + bound};
    }

    // Tail after N explicit terms, via the Euler-Maclaurin power-law expansion.
    // DirichletSine is an exact power law; the shifted-cosine law is expanded
    // as (pi^2 m^2)^{-a} (1 - a/(pi^2 m^2) + r), |r| <= a(a+1)/(2 pi^4 m^4).
    auto tail = [&](std::size_t last) -> PowerTail {
        const double c = std::pow(kPi, -2.0 * a);
        if (op.basis() == Basis::DirichletSine) {
            PowerTail t = power_tail(s, static_cast<double>(last));
            return PowerTail{c * t.value, c * t.error_bound};
        }
        // Neumann: modes k > last correspond to m = k-1 > last-1.
        const double m = static_cast<double>(last - 1);
        PowerTail t0 = power_tail(s, m);
        PowerTail t2 = power_tail(s + 2.0, m);
        PowerTail t4 = power_tail(s + 4.0, m);
        double value = c * (t0.value - (a / (kPi * kPi)) * t2.value);
        double err = c * (t0.error_bound + (a / (kPi * kPi)) * t2.error_bound +
                          0.5 * a * (a + 1.0) / std::pow(kPi, 4.0) * (t4.value + t4.error_bound));
        return PowerTail{value, err};
    };

    double sum = 0.0;
    std::size_t k = 1;
    const std::size_t cap = 200'000;
    for (; k <= cap; ++k) {
        sum += term(k);
        if (k >= 16) {
            PowerTail t = tail(k);
            if (t.error_bound < tail_tol) return TraceResult{false, sum + t.value};
        }
    }
    PowerTail t = tail(cap);
    return TraceResult{false, sum + t.value};
}

double sobolev_norm(const SpectralOperator& op, double sigma, const ModeVector& v) {
    if (v.size() > op.n_modes()) throw DimensionError("vector longer than operator");
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        double w = std::pow(op.eigenvalue(k + 1), 2.0 * sigma);
        s += w * v.coeffs[k] * v.coeffs[k];
    }
    return std::sqrt(s);
}

GridField to_collocation(const SpectralOperator& op, const ModeVector& v, std::size_t n_points) {
    if (n_points < v.size()) throw DimensionError("n_points < n_modes");
    const auto xs = op.collocation_points(n_points);
    GridField f;
    f.grid = op.basis();
    f.values.assign(n_points, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v.coeffs[k] == 0.0) continue;
        for (std::size_t j = 0; j < n_points; ++j)
            f.values[j] += v.coeffs[k] * op.basis_value(k + 1, xs[j]);
    }
    return f;
}

ModeVector from_collocation(const SpectralOperator& op, const GridField& f, std::size_t n_modes) {
    if (f.grid != op.basis()) throw ParamError("grid/basis mismatch");
    if (f.size() < n_modes) throw DimensionError("n_points < n_modes");
    const std::size_t n_points = f.size();
    const auto xs = op.collocation_points(n_points);
    const double w = op.quadrature_weight(n_points);
    ModeVector v{std::vector<double>(n_modes, 0.0), 0.0};
    for (std::size_t k = 0; k < n_modes; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_points; ++j)
            acc += f.values[j] * op.basis_value(k + 1, xs[j]);
        v.coeffs[k] = acc * w;
    }
    return v;
}

std::vector<double> derivative_values(const SpectralOperator& op, const ModeVector& v,
                                      std::size_t n_points) {
    if (n_points < v.size()) throw DimensionError("n_points < n_modes");
    const auto xs = op.collocation_points(n_points);
    std::vector<double> out(n_points, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v.coeffs[k] == 0.0) continue;
        for (std::size_t j = 0; j < n_points; ++j)
            out[j] += v.coeffs[k] * op.basis_derivative(k + 1, xs[j]);
    }
    return out;
}

std::vector<double> second_derivative_values(const SpectralOperator& op, const ModeVector& v,
                                             std::size_t n_points) {
    if (n_points < v.size()) throw DimensionError("n_points < n_modes");
    const auto xs = op.collocation_points(n_points);
    std::vector<double> out(n_points, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v.coeffs[k] == 0.0) continue;
        for (std::size_t j = 0; j < n_points; ++j)
            out[j] += v.coeffs[k] * op.basis_second_derivative(k + 1, xs[j]);
    }
    return out;
}

}  // namespace sselab::spectral
