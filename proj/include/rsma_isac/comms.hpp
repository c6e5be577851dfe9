#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "rsma_isac/channels.hpp"
#include "rsma_isac/precoder.hpp"

namespace rsma_isac {

/// Bandwidth left for data after cyclic-prefix and guard/pilot overheads.
struct EffectiveBandwidth {
    double total_hz = 0.0;
    int n_subcarriers = 0;
    int cp_samples = 0;
    int data_subcarriers = 0;
    double value_hz = 0.0;
};

inline EffectiveBandwidth effective_bandwidth(double total_hz, int n_subcarriers, int cp_samples,
                                              int data_subcarriers) {
    if (!(total_hz > 0.0) || n_subcarriers <= 0 || cp_samples < 0 || data_subcarriers <= 0 ||
        data_subcarriers > n_subcarriers)
        throw ConfigError("effective_bandwidth: invalid OFDM numerology");
    EffectiveBandwidth b{total_hz, n_subcarriers, cp_samples, data_subcarriers, 0.0};
    b.value_hz = total_hz * (static_cast<double>(n_subcarriers) / (n_subcarriers + cp_samples)) *
                 (static_cast<double>(data_subcarriers) / n_subcarriers);
    return b;
}

/// 100 MHz, 512 subcarriers, 128-sample CP, 468 data subcarriers.
inline EffectiveBandwidth default_bandwidth() { return effective_bandwidth(100e6, 512, 128, 468); }

struct McsLevel {
    int index = 0;
    int bits_per_symbol = 1;
    int rate_num = 1;
    int rate_den = 2;

    double code_rate() const { return static_cast<double>(rate_num) / rate_den; }
    double spectral_efficiency() const { return bits_per_symbol * code_rate(); }
    double data_rate_bps(const EffectiveBandwidth& b) const { return b.value_hz * spectral_efficiency(); }

    bool operator==(const McsLevel&) const = default;
};

/// The ten permitted MCS levels, BPSK 1/2 through 256QAM 5/6.
inline const std::array<McsLevel, 10>& mcs_table() {
    static const std::array<McsLevel, 10> table{{
        {0, 1, 1, 2},
        {1, 1, 3, 4},
        {2, 2, 1, 2},
        {3, 2, 3, 4},
        {4, 4, 1, 2},
        {5, 4, 3, 4},
        {6, 6, 2, 3},
        {7, 6, 3, 4},
        {8, 8, 3, 4},
        {9, 8, 5, 6},
    }};
    return table;
}

/// Highest MCS whose m*r is strictly below the achievable spectral efficiency.
/// The efficiency should already carry any SNR-gap penalty (see stream_efficiency).
inline std::optional<McsLevel> max_mcs(double efficiency) {
    std::optional<McsLevel> best;
    for (const auto& lvl : mcs_table())
        if (lvl.spectral_efficiency() < efficiency) best = lvl;
    return best;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// mean_k log2(1 + SINR[k] / gap), the Gaussian-codebook efficiency with the
/// SNR-gap penalty applied per subcarrier.
inline double stream_efficiency(std::span<const double> sinr, double gap_db = 0.0) {
    if (sinr.empty()) return 0.0;
    const double gap = db_to_linear(gap_db);
    double acc = 0.0;
    for (double s : sinr) acc += std::log2(1.0 + s / gap);
    return acc / static_cast<double>(sinr.size());
}

namespace detail {
// |h^H p|^2 per subcarrier.
inline Eigen::ArrayXd projection_power(const CGrid& h, const CGrid& p) {
    return (h.conjugate().cwiseProduct(p)).colwise().sum().cwiseAbs2().transpose().array();
}

inline std::vector<double> to_vector(const Eigen::ArrayXd& a) { return {a.data(), a.data() + a.size()}; }
}  // namespace detail

/// Common-stream SINR at UE `ue` (1 or 2). The sensing stream is known and
/// removed beforehand, so only the private streams interfere.
inline std::vector<double> sinr_common(const ChannelSet& ch, const PrecoderSet& ps, int ue, double noise) {
    const CGrid& h = ch.true_channels[ue - 1];
    const auto sig = detail::projection_power(h, ps.p_c);
    const Eigen::ArrayXd intf = detail::projection_power(h, ps.p_1) + detail::projection_power(h, ps.p_2);
    return detail::to_vector(sig / (intf + noise));
}

/// Private-stream SINR at UE `ue` after the common stream has been cancelled.
inline std::vector<double> sinr_private(const ChannelSet& ch, const PrecoderSet& ps, int ue, double noise) {
    const CGrid& h = ch.true_channels[ue - 1];
    const auto sig = detail::projection_power(h, ps.private_stream(ue));
    const auto intf = detail::projection_power(h, ps.private_stream(ue == 1 ? 2 : 1));
    return detail::to_vector(sig / (intf + noise));
}

struct ThroughputReport {
    double t_common = 0.0;
    std::array<double, 2> t_private{0.0, 0.0};
    double t_sum = 0.0;
    std::optional<McsLevel> mcs_common;
    std::array<std::optional<McsLevel>, 2> mcs_private;
    /// Per-UE efficiencies (bits/s/Hz, gap applied) for diagnostics.
    std::array<double, 2> eff_common{0.0, 0.0};
    std::array<double, 2> eff_private{0.0, 0.0};
    bool common_active = false;
    bool collapsed = false;
};

/// Sum throughput rule: RSMA with a common stream only counts the private
/// streams once the common stream is decodable; without a common stream the
/// private throughputs add directly.
inline double sum_throughput(bool common_active, double t_common, double t1, double t2) {
    if (!common_active) return t1 + t2;
    return t_common + (t_common > 0.0 ? t1 + t2 : 0.0);
}

/// MCS-limited throughput of every stream and the resulting sum.
inline ThroughputReport throughput(const ChannelSet& ch, const PrecoderSet& ps, const ScenarioConfig& cfg,
                                   const EffectiveBandwidth& bw = default_bandwidth()) {
    ThroughputReport r;
    const double noise = cfg.noise_power_comms;
    const double gap = cfg.shannon_gap_db;

    for (int ue = 1; ue <= 2; ++ue) {
        if (!is_zero(ps.private_stream(ue))) {
            r.eff_private[ue - 1] = stream_efficiency(sinr_private(ch, ps, ue, noise), gap);
            r.mcs_private[ue - 1] = max_mcs(r.eff_private[ue - 1]);
            if (r.mcs_private[ue - 1]) r.t_private[ue - 1] = r.mcs_private[ue - 1]->data_rate_bps(bw);
        }
    }

    r.common_active = !is_zero(ps.p_c);
    if (r.common_active) {
        for (int ue = 1; ue <= 2; ++ue)
            r.eff_common[ue - 1] = stream_efficiency(sinr_common(ch, ps, ue, noise), gap);
        r.mcs_common = max_mcs(std::min(r.eff_common[0], r.eff_common[1]));
        if (r.mcs_common) {
            r.t_common = r.mcs_common->data_rate_bps(bw);
        } else {
            r.collapsed = true;
        }
    }
    r.t_sum = sum_throughput(r.common_active, r.t_common, r.t_private[0], r.t_private[1]);
    return r;
}

}  // namespace rsma_isac
