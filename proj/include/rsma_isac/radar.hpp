#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "rsma_isac/error.hpp"
#include "rsma_isac/geometry.hpp"
#include "rsma_isac/precoder.hpp"
#include "rsma_isac/rng.hpp"

namespace rsma_isac {

enum class SymbolModel {
    UnitModulus,  // random QPSK; every symbol has energy exactly 1
    Gaussian,     // CN(0, 1); unit energy only on average
};

/// Transmit grid x[k] = p_c s_c + p_1 s_1 + p_2 s_2 + p_r s_r, with the drawn symbols.
struct TxGrid {
    CGrid x;
    /// s_c, s_1, s_2, s_r, one entry per subcarrier.
    std::array<CVector, 4> symbols;

    int n_subcarriers() const { return static_cast<int>(x.cols()); }
};

/// Known BPSK sensing sequence. It is fixed (independent of any run seed) so a
/// receiver can subtract it.
inline CVector sensing_sequence(int n_subcarriers) {
    Rng rng(0x53454E53ULL, 0);
    CVector s(n_subcarriers);
    for (int k = 0; k < n_subcarriers; ++k) s(k) = (rng.next_u64() & 1ULL) ? 1.0 : -1.0;
    return s;
}

inline TxGrid synthesize_tx(const PrecoderSet& ps, Rng rng, SymbolModel model = SymbolModel::UnitModulus) {
    const int nc = ps.n_subcarriers();
    TxGrid tx;
    for (int s = 0; s < 3; ++s) {
        CVector sym(nc);
        for (int k = 0; k < nc; ++k) {
            if (model == SymbolModel::UnitModulus) {
                const auto q = static_cast<double>(rng.next_u64() & 3ULL);
                sym(k) = std::polar(1.0, std::numbers::pi / 4.0 + q * std::numbers::pi / 2.0);
            } else {
                sym(k) = rng.complex_normal(1.0);
            }
        }
        tx.symbols[s] = std::move(sym);
    }
    tx.symbols[3] = sensing_sequence(nc);

    tx.x = ps.p_c * tx.symbols[0].asDiagonal();
    tx.x += ps.p_1 * tx.symbols[1].asDiagonal();
    tx.x += ps.p_2 * tx.symbols[2].asDiagonal();
    tx.x += ps.p_r * tx.symbols[3].asDiagonal();
    return tx;
}

/// a^H x[k] for every subcarrier.
inline CVector beam_response(const CGrid& x, const CVector& a) { return (a.adjoint() * x).transpose(); }

/// |a^H x[k]|^2 for every subcarrier.
inline Eigen::ArrayXd broadside_profile(const TxGrid& tx, const CVector& a) {
    return beam_response(tx.x, a).array().abs2();
}

/// E_s |a^H x[k]|^2 over independent unit-energy symbols: sum of per-stream powers.
inline Eigen::ArrayXd expected_broadside_profile(const PrecoderSet& ps, const CVector& a) {
    Eigen::ArrayXd out = beam_response(ps.p_c, a).array().abs2();
    out += beam_response(ps.p_1, a).array().abs2();
    out += beam_response(ps.p_2, a).array().abs2();
    out += beam_response(ps.p_r, a).array().abs2();
    return out;
}

/// G_0 = sum_k |a_0^H x[k]|^2, power radiated toward the target direction.
inline double broadside_gain(const TxGrid& tx, const ArrayGeometry& geom, double angle_deg = 0.0) {
    return broadside_profile(tx, steering_vector(geom, angle_deg)).sum();
}

/// G_0 averaged over the data symbols; a function of the precoders only.
inline double expected_broadside_gain(const PrecoderSet& ps, const CVector& a) {
    return expected_broadside_profile(ps, a).sum();
}

/// Static reflectors plus TX->RX leakage: clutter[k] = c[k] (a_0^H x[k]) with
/// c[k] ~ CN(0, gain_var) fixed by `seed`.
struct ClutterModel {
    std::uint64_t seed = 0;
    double gain_var = 0.0;

    CVector gains(int n_subcarriers) const {
        Rng rng(seed, streams::clutter);
        CVector c(n_subcarriers);
        for (int k = 0; k < n_subcarriers; ++k) c(k) = rng.complex_normal(gain_var);
        return c;
    }
};

/// Clutter whose power is `ratio` times the target echo power (white over subcarriers).
inline ClutterModel clutter_relative_to_echo(std::uint64_t seed, double beta, double ratio = 10.0) {
    return ClutterModel{seed, ratio * beta * beta};
}

struct RadarObservation {
    CVector y_r;
    std::optional<CVector> clutter_only;
    int n0_true = 0;
    double beta = 0.0;
    double sigma_r2 = 0.0;

    int n_subcarriers() const { return static_cast<int>(y_r.size()); }
};

/// Monostatic return y_r[k] = beta (a_0^H x[k]) e^{j 2 pi n0 k / N_c} [+ clutter[k]] + n_r[k].
inline RadarObservation radar_return(const TxGrid& tx, const CVector& a0, int n0, double beta, double sigma_r2,
                                     Rng rng, const std::optional<ClutterModel>& clutter = std::nullopt) {
    const int nc = tx.n_subcarriers();
    if (n0 < 0 || n0 >= nc) throw ConfigError("radar_return: delay bin out of range");
    if (sigma_r2 < 0.0) throw ConfigError("radar_return: negative noise variance");

    const CVector g = beam_response(tx.x, a0);
    RadarObservation obs;
    obs.n0_true = n0;
    obs.beta = beta;
    obs.sigma_r2 = sigma_r2;
    obs.y_r.resize(nc);
    for (int k = 0; k < nc; ++k) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n0) * k / nc;
        obs.y_r(k) = beta * g(k) * std::polar(1.0, phase);
    }
    if (clutter) {
        const CVector c = clutter->gains(nc).cwiseProduct(g);
        obs.y_r += c;
        obs.clutter_only = c;
    }
    if (sigma_r2 > 0.0)
        for (int k = 0; k < nc; ++k) obs.y_r(k) += rng.complex_normal(sigma_r2);
    return obs;
}

/// Target-free capture of the same waveform (clutter and noise only).
inline RadarObservation capture_background(const TxGrid& tx, const CVector& a0, double sigma_r2, Rng rng,
                                           const std::optional<ClutterModel>& clutter) {
    return radar_return(tx, a0, 0, 0.0, sigma_r2, rng, clutter);
}

inline RadarObservation background_subtract(const RadarObservation& with_target,
                                            const RadarObservation& without_target) {
    if (with_target.n_subcarriers() != without_target.n_subcarriers())
        throw ConfigError("background_subtract: observation lengths differ");
    RadarObservation out = with_target;
    out.y_r = with_target.y_r - without_target.y_r;
    out.clutter_only.reset();
    return out;
}

/// Range profile |Y_r[n]| and the derived post-processing metrics.
struct RangeProfile {
    std::vector<double> magnitudes;
    int peak_bin = 0;
    double snr_rad = 0.0;  // linear
    double snr_rad_db = 0.0;
    double crb_bins2 = 0.0;
};

namespace detail {
inline int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline double crb_from_profile(const Eigen::ArrayXd& profile, double beta, double sigma2) {
    const auto nc = static_cast<double>(profile.size());
    double weighted = 0.0;
    for (Eigen::Index k = 0; k < profile.size(); ++k) weighted += static_cast<double>(k * k) * profile(k);
    const double info_scale = beta * beta * weighted;
    if (!(info_scale > 0.0)) throw ZeroInformationError("delay CRB undefined: no Fisher information");
    return sigma2 * nc * nc / (8.0 * std::numbers::pi * std::numbers::pi * info_scale);
}
}  // namespace detail

/// Matched-filter DFT Y_r[n] = sum_k y_r[k] (x^H[k] a_0) e^{-j 2 pi n k / N_c}.
inline CVector matched_filter(const RadarObservation& obs, const TxGrid& tx, const CVector& a0) {
    const int nc = obs.n_subcarriers();
    if (tx.n_subcarriers() != nc) throw ConfigError("matched_filter: grid length mismatch");
    const CVector z = obs.y_r.cwiseProduct(beam_response(tx.x, a0).conjugate());
    CVector twiddle(nc);
    for (int m = 0; m < nc; ++m) twiddle(m) = std::polar(1.0, -2.0 * std::numbers::pi * m / nc);
    CVector y(nc);
    for (int n = 0; n < nc; ++n) {
        Complex acc{0.0, 0.0};
        for (int k = 0; k < nc; ++k) acc += z(k) * twiddle((static_cast<long>(n) * k) % nc);
        y(n) = acc;
    }
    return y;
}

/// Peak-bin SNR from a matched-filter output: |Y[peak]|^2 over the mean of the other bins.
inline double peak_snr(const CVector& y, int peak) {
    const int nc = static_cast<int>(y.size());
    double off = 0.0;
    for (int n = 0; n < nc; ++n)
        if (n != peak) off += std::norm(y(n));
    off /= static_cast<double>(nc - 1);
    const double on = std::norm(y(peak));
    return off > 0.0 ? on / off : std::numeric_limits<double>::infinity();
}

inline RangeProfile range_profile(const RadarObservation& obs, const TxGrid& tx, const CVector& a0) {
    const CVector y = matched_filter(obs, tx, a0);
    RangeProfile rp;
    rp.magnitudes.resize(y.size());
    for (Eigen::Index n = 0; n < y.size(); ++n) rp.magnitudes[n] = std::abs(y(n));
    if (std::all_of(rp.magnitudes.begin(), rp.magnitudes.end(), [](double m) { return m == 0.0; }))
        throw NumericError("range profile is identically zero (no energy toward the target)");
    rp.peak_bin = detail::argmax_lowest(rp.magnitudes);
    rp.snr_rad = peak_snr(y, rp.peak_bin);
    rp.snr_rad_db = 10.0 * std::log10(rp.snr_rad);
    try {
        rp.crb_bins2 = detail::crb_from_profile(broadside_profile(tx, a0), obs.beta, obs.sigma_r2);
    } catch (const ZeroInformationError&) {
        rp.crb_bins2 = std::numeric_limits<double>::infinity();
    }
    return rp;
}

/// Noise variance per time-domain sample when the receiver DFT carries a 1/N_c
/// normalisation, i.e. N_c times the per-subcarrier variance sigma_r^2.
inline double sample_noise_variance(double sigma_r2, int n_subcarriers) { return sigma_r2 * n_subcarriers; }

/// beta^2 (N_c - 1) sum_k |a_0^H x[k]|^2 / sigma^2, with sigma^2 the per-sample
/// noise variance (see sample_noise_variance).
inline double snr_rad_closed_form(const Eigen::ArrayXd& profile, double beta, double sample_noise_var) {
    const double nc = static_cast<double>(profile.size());
    return beta * beta * (nc - 1.0) * profile.sum() / sample_noise_var;
}

inline double snr_rad_closed_form(const TxGrid& tx, const CVector& a0, double beta, double sample_noise_var) {
    return snr_rad_closed_form(broadside_profile(tx, a0), beta, sample_noise_var);
}

/// Fisher information of the delay (in bins) under the Gaussian echo model.
inline double fisher_information(const Eigen::ArrayXd& profile, double beta, double sigma_r2) {
    const double nc = static_cast<double>(profile.size());
    double weighted = 0.0;
    for (Eigen::Index k = 0; k < profile.size(); ++k) weighted += static_cast<double>(k * k) * profile(k);
    return 8.0 * std::numbers::pi * std::numbers::pi * beta * beta * weighted / (sigma_r2 * nc * nc);
}

/// Cramer-Rao bound on the delay, in bins^2.
inline double crb(const TxGrid& tx, const CVector& a0, double beta, double sigma_r2) {
    return detail::crb_from_profile(broadside_profile(tx, a0), beta, sigma_r2);
}

inline double crb(const Eigen::ArrayXd& profile, double beta, double sigma_r2) {
    return detail::crb_from_profile(profile, beta, sigma_r2);
}

inline double delay_bins_to_meters(double bins, double bandwidth_hz = 100e6) {
    return bins * 299792458.0 / (2.0 * bandwidth_hz);
}

// --- Monte Carlo measurement chain -------------------------------------------

struct RadarTrialConfig {
    int n0 = 1;
    double beta = 0.1;
    double sigma_r2 = 1e-4;
    int trials = 100;
    /// Two captures of the same waveform (with and without target) and subtraction.
    bool background_subtraction = false;
    double clutter_to_echo = 10.0;
    SymbolModel symbols = SymbolModel::UnitModulus;
};

struct RadarTrialStats {
    int trials = 0;
    int peak_hits = 0;
    double mean_snr = 0.0;  // linear mean of per-trial SNR_rad
    std::vector<double> mean_bin_snr;  // per bin, |Y[n]|^2 over the off-peak mean, averaged
    double mean_closed_form = 0.0;     // closed form with the time-domain noise convention

    double hit_rate() const { return trials > 0 ? static_cast<double>(peak_hits) / trials : 0.0; }
};

/// Runs `cfg.trials` independent transmissions through the radar chain. Trial t
/// uses child stream t of `rng`, so results do not depend on evaluation order.
inline RadarTrialStats run_radar_trials(const PrecoderSet& ps, const CVector& a0, const RadarTrialConfig& cfg,
                                        const Rng& rng) {
    RadarTrialStats st;
    st.trials = cfg.trials;
    const int nc = ps.n_subcarriers();
    st.mean_bin_snr.assign(nc, 0.0);
    if (cfg.trials <= 0) return st;

    std::optional<ClutterModel> clutter;
    if (cfg.background_subtraction)
        clutter = clutter_relative_to_echo(rng.seed(), cfg.beta, cfg.clutter_to_echo);

    for (int t = 0; t < cfg.trials; ++t) {
        const Rng trial = rng.split(static_cast<std::uint64_t>(t));
        const TxGrid tx = synthesize_tx(ps, trial.split(streams::symbols), cfg.symbols);
        RadarObservation obs =
            radar_return(tx, a0, cfg.n0, cfg.beta, cfg.sigma_r2, trial.split(streams::radar_noise), clutter);
        if (cfg.background_subtraction) {
            const RadarObservation bg =
                capture_background(tx, a0, cfg.sigma_r2, trial.split(streams::background_noise), clutter);
            obs = background_subtract(obs, bg);
        }
        const CVector y = matched_filter(obs, tx, a0);
        std::vector<double> mag(nc);
        for (int n = 0; n < nc; ++n) mag[n] = std::abs(y(n));
        const int peak = detail::argmax_lowest(mag);
        double off = 0.0;
        for (int n = 0; n < nc; ++n)
            if (n != peak) off += std::norm(y(n));
        off /= static_cast<double>(nc - 1);
        st.peak_hits += peak == cfg.n0 ? 1 : 0;
        st.mean_snr += peak_snr(y, peak);
        for (int n = 0; n < nc; ++n) st.mean_bin_snr[n] += std::norm(y(n)) / off;
        st.mean_closed_form +=
            snr_rad_closed_form(broadside_profile(tx, a0), cfg.beta, sample_noise_variance(cfg.sigma_r2, nc));
    }
    st.mean_snr /= cfg.trials;
    st.mean_closed_form /= cfg.trials;
    for (double& v : st.mean_bin_snr) v /= cfg.trials;
    return st;
}

}  // namespace rsma_isac
