#pragma once

#include <cstdint>

#include "sselab/spectral.hpp"

namespace sselab::noise {

// Counter-based generation: every draw is a pure function of
// (seed, purpose, i, j, k), so trajectories, modes and steps can be sampled
// in any order (or truncated) without changing shared draws. Backed by
// Philox4x32-10.
//
// Purpose spaces keep the consumers apart:
//   0 solver mode increments   (i = mode, j = fine step, k = trajectory)
//   1 kolmogorov MC            (i = node, j = quad node, k = sample)
//   2 drift sampling           (i = pair index, j = component, k = 0/1)
//   3 generic scratch
std::uint64_t philox_bits(std::uint64_t seed, std::uint32_t purpose, std::uint32_t i,
                          std::uint32_t j, std::uint32_t k, std::uint64_t* second = nullptr);

double keyed_uniform(std::uint64_t seed, std::uint32_t purpose, std::uint32_t i, std::uint32_t j,
                     std::uint32_t k);

// Standard normal, Box-Muller on the two 64-bit halves of one Philox block.
double keyed_gaussian(std::uint64_t seed, std::uint32_t purpose, std::uint32_t i, std::uint32_t j,
                      std::uint32_t k);

// Exact variance of the stochastic convolution mode:
//   v(lam, delta, t) = lam^{-2 delta} (1 - e^{-2 lam t}) / (2 lam),
// with the small-lam*t series branch. lam > 0, t >= 0.
double convolution_variance(double lambda, double delta, double t);

// A reproducible per-trajectory view into the counter-based source, plus
// draw accounting so coupled runs can assert they consumed the same noise.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint32_t trajectory_id = 0;
    std::uint64_t draw_count = 0;
    std::uint64_t checksum = 0;

    // Gaussian for (mode k, fine step j) of this trajectory; 1-based mode.
    double gaussian(std::uint32_t step, std::uint32_t mode);
};

// One exact Ornstein-Uhlenbeck transition of step h for every mode:
//   state'_k = e^{-lam_k h} state_k + zeta_k,   zeta_k ~ N(0, v_k(h)).
// Iterating from zero reproduces W_A(t) in law at every grid time.
spectral::ModeVector ou_step(const spectral::SpectralOperator& op, double delta, double h,
                             const spectral::ModeVector& state, NoiseStream& stream,
                             std::uint32_t step_index);

}  // namespace sselab::noise
