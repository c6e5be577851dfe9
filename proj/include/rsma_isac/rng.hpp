#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace rsma_isac {

/**
 * @brief Seeded random stream.
 *
 * A stream is identified by (seed, stream_id). Two Rng objects built from the
 * same pair produce bit-identical draws, so parallel work can be split across
 * stream ids without depending on scheduling order.
 */
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Independent child stream; deterministic in (seed, stream_id, sub).
    Rng split(std::uint64_t sub) const {
        return Rng(seed_, stream_id_ * 0x9E3779B97F4A7C15ULL + sub + 1);
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double uniform_phase() {
        return std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(engine_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    std::complex<double> complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                          0x5253u};
        return std::mt19937_64(seq);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

// Stream ids used by the simulator. Kept in one place so that two call sites
// never draw from the same stream by accident.
namespace streams {
inline constexpr std::uint64_t channels = 1;
inline constexpr std::uint64_t symbols = 2;
inline constexpr std::uint64_t radar_noise = 3;
inline constexpr std::uint64_t clutter = 4;
inline constexpr std::uint64_t background_noise = 5;
inline constexpr std::uint64_t calibration = 6;
inline constexpr std::uint64_t sweep_points = 1000;
}  // namespace streams

}  // namespace rsma_isac
