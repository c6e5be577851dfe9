#pragma once

#include <cmath>
#include <numbers>

#include "rsma_isac/error.hpp"
#include "rsma_isac/geometry.hpp"
#include "rsma_isac/rng.hpp"

namespace rsma_isac {

/// Per-RF-chain phase offsets plus the anchor used to measure them.
struct RfImpairment {
    Eigen::MatrixXd phase_offsets;  // N_T x N_c, radians in (-pi, pi]
    int anchor_delay_bins = 0;
    double anchor_angle_deg = 0.0;

    void validate() const {
        for (Eigen::Index i = 0; i < phase_offsets.size(); ++i) {
            const double p = phase_offsets.data()[i];
            if (!(p > -std::numbers::pi && p <= std::numbers::pi))
                throw ConfigError("RfImpairment: phase offsets must lie in (-pi, pi]");
        }
        if (anchor_delay_bins < 0) throw ConfigError("RfImpairment: anchor delay must be >= 0");
    }

    int n_tx() const { return static_cast<int>(phase_offsets.rows()); }
    int n_subcarriers() const { return static_cast<int>(phase_offsets.cols()); }
};

inline double wrap_phase(double p) {
    double w = std::remainder(p, 2.0 * std::numbers::pi);
    if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
    return w;
}

/// Constant offset per chain (column-independent).
inline RfImpairment constant_impairment(const Eigen::VectorXd& per_chain, int n_subcarriers) {
    RfImpairment imp;
    imp.phase_offsets = per_chain.unaryExpr([](double p) { return wrap_phase(p); }).replicate(1, n_subcarriers);
    return imp;
}

/// I.i.d. uniform offsets on every chain and subcarrier.
inline RfImpairment random_impairment(int n_tx, int n_subcarriers, Rng rng) {
    RfImpairment imp;
    imp.phase_offsets.resize(n_tx, n_subcarriers);
    for (int k = 0; k < n_subcarriers; ++k)
        for (int g = 0; g < n_tx; ++g) imp.phase_offsets(g, k) = wrap_phase(rng.uniform_phase());
    return imp;
}

/// Channel from each TX element to the anchor:
/// h_g[k] = beta exp(j 2 pi n_a k / N_c) exp(j phi_{g,k}) exp(j 2 pi (d/lambda) g sin(theta_a)).
inline CGrid anchor_channels(const RfImpairment& imp, const ArrayGeometry& geom, double beta) {
    imp.validate();
    if (imp.n_tx() != geom.n_tx) throw ConfigError("anchor_channels: impairment and array sizes differ");
    const int nc = imp.n_subcarriers();
    const CVector steer = steering_vector(geom, imp.anchor_angle_deg);
    CGrid h(geom.n_tx, nc);
    for (int k = 0; k < nc; ++k) {
        const Complex delay = std::polar(1.0, 2.0 * std::numbers::pi * imp.anchor_delay_bins * k / nc);
        for (int g = 0; g < geom.n_tx; ++g)
            h(g, k) = beta * delay * std::polar(1.0, imp.phase_offsets(g, k)) * steer(g);
    }
    return h;
}

/**
 * @brief Phase difference between element 0 and element 1 seen by the anchor.
 *
 * Returns delta_phi, the circular mean over subcarriers of phi_0[k] - phi_1[k]
 * (the argument of sum_k h_0[k] conj(h_1[k])). The correction for element 1 is
 * -delta_phi; see apply_phase_correction for how it is applied.
 */
inline double estimate_phase_correction(const CGrid& anchor) {
    if (anchor.rows() != 2) throw ConfigError("phase calibration supports exactly two TX elements");
    Complex acc{0.0, 0.0};
    for (Eigen::Index k = 0; k < anchor.cols(); ++k) {
        const Complex h0 = anchor(0, k);
        const Complex h1 = anchor(1, k);
        if (h0 == Complex{} || h1 == Complex{}) continue;
        // Unit phasors so every subcarrier carries equal weight.
        acc += (h0 / std::abs(h0)) * std::conj(h1 / std::abs(h1));
    }
    if (std::abs(acc) == 0.0) throw NumericError("phase calibration: anchor phases have no defined mean");
    return std::arg(acc);
}

/// The correction is a phase lag on element 1: its signal is multiplied by
/// exp(-j * correction) with correction = -delta_phi, which cancels a constant
/// offset of -delta_phi on that chain.
inline double correction_from_delta(double delta_phi) { return -delta_phi; }

inline CGrid apply_phase_correction(const CGrid& grid, double correction) {
    if (grid.rows() != 2) throw ConfigError("phase calibration supports exactly two TX elements");
    CGrid out = grid;
    out.row(1) *= std::polar(1.0, -correction);
    return out;
}

}  // namespace rsma_isac
