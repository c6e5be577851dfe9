#pragma once

#include <array>
#include <cmath>

#include "rsma_isac/error.hpp"
#include "rsma_isac/geometry.hpp"
#include "rsma_isac/rng.hpp"
#include "rsma_isac/scenario.hpp"

namespace rsma_isac {

/// Per-subcarrier UE channels. Each grid is N_T x N_c (column k = subcarrier k).
struct ChannelSet {
    std::array<CGrid, 2> true_channels;
    std::array<CGrid, 2> est_channels;
    std::array<CGrid, 2> unit_est;
    CVector broadside_unit;

    int n_tx() const { return static_cast<int>(broadside_unit.size()); }
    int n_subcarriers() const { return static_cast<int>(true_channels[0].cols()); }
};

namespace detail {
inline CGrid unit_columns(const CGrid& h) {
    CGrid u(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
        const double n = h.col(k).norm();
        if (!(n > 0.0)) throw NumericError("estimated channel has zero norm (check csit_error_var)");
        u.col(k) = h.col(k) / n;
    }
    return u;
}
}  // namespace detail

/// Assemble a ChannelSet from explicit channel grids; fills the unit vectors.
inline ChannelSet make_channel_set(std::array<CGrid, 2> true_channels, std::array<CGrid, 2> est_channels,
                                   const CVector& sensing_direction) {
    ChannelSet cs;
    cs.true_channels = std::move(true_channels);
    cs.est_channels = std::move(est_channels);
    for (int i = 0; i < 2; ++i) cs.unit_est[i] = detail::unit_columns(cs.est_channels[i]);
    cs.broadside_unit = sensing_direction.normalized();
    return cs;
}

/**
 * @brief Single-path LoS channels with an i.i.d. per-subcarrier phase per UE.
 *
 * h_i[k] = g_i a(theta_i) exp(j phi_{i,k}); the CSIT estimate adds CN(0, csit_error_var)
 * to every antenna component. The sensing direction u_0 points at target_angle_deg.
 */
inline ChannelSet generate_channels(const ScenarioConfig& cfg, const ArrayGeometry& geom, Rng rng) {
    cfg.validate();
    geom.validate();
    const int nc = cfg.n_subcarriers;
    std::array<CGrid, 2> h;
    std::array<CGrid, 2> h_est;
    for (int i = 0; i < 2; ++i) {
        const CVector a = steering_vector(geom, cfg.ue_angles_deg[i]) * cfg.ue_gains[i];
        h[i].resize(geom.n_tx, nc);
        for (int k = 0; k < nc; ++k) h[i].col(k) = a * std::polar(1.0, rng.uniform_phase());
    }
    for (int i = 0; i < 2; ++i) {
        h_est[i] = h[i];
        if (cfg.csit_error_var > 0.0) {
            for (int k = 0; k < nc; ++k)
                for (int g = 0; g < geom.n_tx; ++g) h_est[i](g, k) += rng.complex_normal(cfg.csit_error_var);
        }
    }
    return make_channel_set(std::move(h), std::move(h_est), steering_vector(geom, cfg.target_angle_deg));
}

}  // namespace rsma_isac
