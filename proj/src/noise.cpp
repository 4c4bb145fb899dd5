#include "sselab/noise.hpp"

#include <bit>
#include <cmath>

namespace sselab::noise {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

struct Block {
    std::uint32_t c[4];
};

Block philox4x32_10(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3,
                    std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c0, hi0, lo0);
        mulhilo(kPhiloxM1, c2, hi1, lo1);
        std::uint32_t n0 = hi1 ^ c1 ^ k0;
        std::uint32_t n1 = lo1;
        std::uint32_t n2 = hi0 ^ c3 ^ k1;
        std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return Block{{c0, c1, c2, c3}};
}

inline double u64_to_unit(std::uint64_t x) {
    // (0,1): 53 mantissa bits, shifted off zero so log() is safe
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t philox_bits(std::uint64_t seed, std::uint32_t purpose, std::uint32_t i,
                          std::uint32_t j, std::uint32_t k, std::uint64_t* second) {
    Block b = philox4x32_10(i, j, k, purpose, static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32));
    std::uint64_t first = (static_cast<std::uint64_t>(b.c[0]) << 32) | b.c[1];
    if (second != nullptr) *second = (static_cast<std::uint64_t>(b.c[2]) << 32) | b.c[3];
    return first;
}

double keyed_uniform(std::uint64_t seed, std::uint32_t purpose, std::uint32_t i, std::uint32_t j,
                     std::uint32_t k) {
    return u64_to_unit(philox_bits(seed, purpose, i, j, k));
}

double keyed_gaussian(std::uint64_t seed, std::uint32_t purpose, std::uint32_t i, std::uint32_t j,
                      std::uint32_t k) {
    std::uint64_t w2 = 0;
    std::uint64_t w1 = philox_bits(seed, purpose, i, j, k, &w2);
    double u1 = u64_to_unit(w1);
    double u2 = u64_to_unit(w2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double convolution_variance(double lambda, double delta, double t) {
    if (lambda <= 0.0) throw spectral::ParamError("lambda must be positive");
    if (t < 0.0) throw spectral::ParamError("t must be nonnegative");
    if (t == 0.0) return 0.0;
    const double z = lambda * t;
    const double color = std::pow(lambda, -2.0 * delta);
    if (z < 1e-8) {
        // (1 - e^{-2z})/(2 lam) = t (1 - z + 2 z^2/3 - ...)
        return color * t * (1.0 - z + 2.0 * z * z / 3.0);
    }
    return color * (-std::expm1(-2.0 * z)) / (2.0 * lambda);
}

double NoiseStream::gaussian(std::uint32_t step, std::uint32_t mode) {
    double z = keyed_gaussian(seed, 0, mode, step, trajectory_id);
    ++draw_count;
    checksum ^= std::bit_cast<std::uint64_t>(z) + 0x9E3779B97F4A7C15ull * draw_count;
    return z;
}

spectral::ModeVector ou_step(const spectral::SpectralOperator& op, double delta, double h,
                             const spectral::ModeVector& state, NoiseStream& stream,
                             std::uint32_t step_index) {
    if (h <= 0.0) throw spectral::ParamError("step size must be positive");
    spectral::ModeVector out = state;
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double lam = op.eigenvalue(k + 1);
        const double decay = std::exp(-lam * h);
        const double sd = std::sqrt(convolution_variance(lam, delta, h));
        out.coeffs[k] = decay * state.coeffs[k] +
                        sd * stream.gaussian(step_index, static_cast<std::uint32_t>(k + 1));
    }
    return out;
}

}  // namespace sselab::noise
