#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rsma_isac/error.hpp"

namespace rsma_isac {

/**
 * @brief Link-level scenario: OFDM grid, power budget, noise, UE and target geometry.
 *
 * All powers are linear. The per-subcarrier transmit power is total_power / n_subcarriers.
 */
struct ScenarioConfig {
    int n_subcarriers = 512;
    double total_power = 1.0;          // 23 dBm in the measured setup; only ratios matter
    double noise_power_comms = 1e-5;   // per subcarrier, at each UE
    double noise_power_radar = 1e-4;   // per subcarrier, at the radar receiver
    std::array<double, 2> ue_angles_deg{-30.0, 30.0};
    std::array<double, 2> ue_gains{1.0, 1.0};
    double target_angle_deg = 0.0;
    int target_delay_bins = 3;
    double target_attenuation = 0.1;
    double csit_error_var = 0.0;
    double shannon_gap_db = 0.0;
    std::uint64_t seed = 7;

    void validate() const {
        if (n_subcarriers < 2) throw ConfigError("n_subcarriers must be >= 2");
        if (!(total_power > 0.0)) throw ConfigError("total_power must be > 0");
        if (!(noise_power_comms > 0.0)) throw ConfigError("noise_power_comms must be > 0");
        if (!(noise_power_radar > 0.0)) throw ConfigError("noise_power_radar must be > 0");
        for (double a : ue_angles_deg)
            if (!(a >= -90.0 && a <= 90.0)) throw ConfigError("ue_angles_deg must lie in [-90, 90]");
        if (!(target_angle_deg >= -90.0 && target_angle_deg <= 90.0))
            throw ConfigError("target_angle_deg must lie in [-90, 90]");
        for (double g : ue_gains)
            if (!(g > 0.0)) throw ConfigError("ue_gains must be > 0");
        const double ratio = ue_gains[0] / ue_gains[1];
        if (ratio > 2.0 || ratio < 0.5)
            throw ConfigError("ue_gains must be within a factor of 2 of each other");
        if (target_delay_bins < 0 || target_delay_bins >= n_subcarriers)
            throw ConfigError("target_delay_bins must lie in [0, n_subcarriers)");
        if (!std::isfinite(target_attenuation)) throw ConfigError("target_attenuation must be finite");
        if (!(csit_error_var >= 0.0)) throw ConfigError("csit_error_var must be >= 0");
        if (!(shannon_gap_db >= 0.0)) throw ConfigError("shannon_gap_db must be >= 0");
    }

    /// Same scenario on a different subcarrier count. The UE noise is rescaled
    /// so that the per-subcarrier comms SNR is unchanged; the radar SNR depends
    /// only on total broadside energy and needs no rescaling.
    ScenarioConfig resized(int n) const {
        ScenarioConfig out = *this;
        out.noise_power_comms = noise_power_comms * static_cast<double>(n_subcarriers) / n;
        out.n_subcarriers = n;
        if (out.target_delay_bins >= n) out.target_delay_bins = n - 1;
        return out;
    }

    bool operator==(const ScenarioConfig&) const = default;
};

/// Synthetic stand-ins for the three measurement geometries.
///  S1: UEs and target mutually well separated.
///  S2: UEs close together, well separated from the target.
///  S3: UEs and target mutually close together.
inline ScenarioConfig scenario_preset(std::string_view name) {
    ScenarioConfig cfg;
    if (name == "S1") {
        // sin(30deg) - sin(-30deg) = 1 makes the two steering vectors of a
        // half-wavelength 2-element array orthogonal.
        cfg.ue_angles_deg = {-30.0, 30.0};
    } else if (name == "S2") {
        cfg.ue_angles_deg = {35.0, 45.0};
    } else if (name == "S3") {
        cfg.ue_angles_deg = {-5.0, 5.0};
    } else {
        throw ConfigError("unknown scenario preset '" + std::string(name) + "' (expected S1, S2 or S3)");
    }
    return cfg;
}

namespace detail {
inline const std::array<const char*, 12>& scenario_keys() {
    static const std::array<const char*, 12> keys{
        "n_subcarriers",   "total_power",      "noise_power_comms",  "noise_power_radar",
        "ue_angles_deg",   "ue_gains",         "target_angle_deg",   "target_delay_bins",
        "target_attenuation", "csit_error_var", "shannon_gap_db",    "seed"};
    return keys;
}
}  // namespace detail

inline void to_json(nlohmann::json& j, const ScenarioConfig& c) {
    j = nlohmann::json{{"n_subcarriers", c.n_subcarriers},
                       {"total_power", c.total_power},
                       {"noise_power_comms", c.noise_power_comms},
                       {"noise_power_radar", c.noise_power_radar},
                       {"ue_angles_deg", c.ue_angles_deg},
                       {"ue_gains", c.ue_gains},
                       {"target_angle_deg", c.target_angle_deg},
                       {"target_delay_bins", c.target_delay_bins},
                       {"target_attenuation", c.target_attenuation},
                       {"csit_error_var", c.csit_error_var},
                       {"shannon_gap_db", c.shannon_gap_db},
                       {"seed", c.seed}};
}

/// Strict parse: every field must be present and no other key is accepted.
inline void from_json(const nlohmann::json& j, ScenarioConfig& c) {
    if (!j.is_object()) throw ConfigError("scenario document must be a JSON object");
    const auto& keys = detail::scenario_keys();
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) throw ConfigError("unknown scenario key '" + key + "'");
    }
    for (const char* k : keys)
        if (!j.contains(k)) throw ConfigError(std::string("missing scenario key '") + k + "'");
    try {
        c.n_subcarriers = j.at("n_subcarriers").get<int>();
        c.total_power = j.at("total_power").get<double>();
        c.noise_power_comms = j.at("noise_power_comms").get<double>();
        c.noise_power_radar = j.at("noise_power_radar").get<double>();
        c.ue_angles_deg = j.at("ue_angles_deg").get<std::array<double, 2>>();
        c.ue_gains = j.at("ue_gains").get<std::array<double, 2>>();
        c.target_angle_deg = j.at("target_angle_deg").get<double>();
        c.target_delay_bins = j.at("target_delay_bins").get<int>();
        c.target_attenuation = j.at("target_attenuation").get<double>();
        c.csit_error_var = j.at("csit_error_var").get<double>();
        c.shannon_gap_db = j.at("shannon_gap_db").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scenario document: ") + e.what());
    }
}

}  // namespace rsma_isac
