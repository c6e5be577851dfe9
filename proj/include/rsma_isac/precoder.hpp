#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/SVD>

#include "rsma_isac/channels.hpp"
#include "rsma_isac/error.hpp"
#include "rsma_isac/scenario.hpp"

namespace rsma_isac {

enum class Family { MRT, ZF };

inline std::string to_string(Family f) { return f == Family::MRT ? "MRT" : "ZF"; }

inline Family parse_family(std::string_view s) {
    if (s == "MRT" || s == "mrt") return Family::MRT;
    if (s == "ZF" || s == "zf") return Family::ZF;
    throw ConfigError("unknown precoder family '" + std::string(s) + "'");
}

/**
 * @brief The four power/priority knobs of the ISAC precoder plus the private-stream family.
 *
 * t_comms: fraction of power for communications (the rest feeds the dedicated sensing precoder).
 * t_p:     fraction of the comms power given to the two private streams.
 * alpha_c: comms priority of the common-stream precoder (1 - alpha_c goes to the target direction).
 * alpha_p: same for the private-stream precoders.
 */
struct ParameterPoint {
    double t_comms = 1.0;
    double t_p = 1.0;
    double alpha_c = 1.0;
    double alpha_p = 1.0;
    Family family = Family::MRT;

    void validate() const {
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in_unit(t_comms) || !in_unit(t_p) || !in_unit(alpha_c) || !in_unit(alpha_p))
            throw ConfigError("precoder parameters must lie in [0, 1]");
    }

    bool operator==(const ParameterPoint&) const = default;
};

/// Per-subcarrier precoders, each N_T x N_c.
struct PrecoderSet {
    CGrid p_c;
    CGrid p_1;
    CGrid p_2;
    CGrid p_r;

    const CGrid& private_stream(int ue) const { return ue == 1 ? p_1 : p_2; }

    double total_power() const {
        return p_c.squaredNorm() + p_1.squaredNorm() + p_2.squaredNorm() + p_r.squaredNorm();
    }

    int n_subcarriers() const { return static_cast<int>(p_c.cols()); }
};

inline bool is_zero(const CGrid& g) {
    return (g.array() == Complex(0.0, 0.0)).all();
}

/// Equi-weighted MRT direction toward both UEs, unit norm per subcarrier.
inline CGrid common_direction(const ChannelSet& ch) {
    CGrid uc = ch.unit_est[0] + ch.unit_est[1];
    for (Eigen::Index k = 0; k < uc.cols(); ++k) {
        const double n = uc.col(k).norm();
        if (n < 1e-12)
            throw DegenerateDirectionError("common direction undefined: u_1 + u_2 vanishes at subcarrier " +
                                           std::to_string(k));
        uc.col(k) /= n;
    }
    return uc;
}

/// Private-stream directions. MRT uses u_i directly; ZF uses the columns of the
/// pseudo-inverse H (H^H H)^{-1}, renormalised to unit length.
inline std::array<CGrid, 2> private_directions(const ChannelSet& ch, Family family) {
    if (family == Family::MRT) return ch.unit_est;

    const int nt = ch.n_tx();
    const int nc = ch.n_subcarriers();
    if (nt < 2) throw RankDeficientError("zero-forcing needs at least two transmit antennas");
    std::array<CGrid, 2> out{CGrid(nt, nc), CGrid(nt, nc)};
    Eigen::MatrixXcd h(nt, 2);
    for (int k = 0; k < nc; ++k) {
        h.col(0) = ch.est_channels[0].col(k);
        h.col(1) = ch.est_channels[1].col(k);
        const Eigen::VectorXd sv = h.jacobiSvd().singularValues();
        if (!(sv(1) >= 1e-9 * sv(0)))
            throw RankDeficientError("zero-forcing channel matrix is rank deficient at subcarrier " +
                                     std::to_string(k));
        const Eigen::Matrix2cd gram = h.adjoint() * h;
        const Eigen::MatrixXcd pinv_cols = h * gram.inverse();
        for (int i = 0; i < 2; ++i) out[i].col(k) = pinv_cols.col(i).normalized();
    }
    return out;
}

namespace detail {
// sqrt(power) * (sqrt(a) d[k] + sqrt(1-a) u0) / sqrt(sum_k' ||...||^2); exact zeros for zero power.
inline CGrid weighted_precoder(double power, double alpha, const CGrid& direction, const CVector& u0) {
    CGrid v = std::sqrt(alpha) * direction;
    v.colwise() += std::sqrt(1.0 - alpha) * u0;
    const double energy = v.squaredNorm();
    if (!(energy > 0.0))
        throw DegenerateDirectionError("precoder combination has zero energy");
    return v * std::sqrt(power / energy);
}
}  // namespace detail

/// Builds {p_c, p_1, p_2, p_r} for one parameter point. Streams with zero
/// power are exact zero grids; their directions are never evaluated.
inline PrecoderSet build_precoders(const ParameterPoint& pp, const ChannelSet& ch, const ScenarioConfig& cfg) {
    pp.validate();
    const int nt = ch.n_tx();
    const int nc = ch.n_subcarriers();
    const double pt = cfg.total_power;
    const CVector& u0 = ch.broadside_unit;

    PrecoderSet ps;
    const double common_power = pt * pp.t_comms * (1.0 - pp.t_p);
    const double private_power = pt * pp.t_comms * pp.t_p / 2.0;
    const double sensing_power = pt * (1.0 - pp.t_comms);

    if (common_power > 0.0) {
        ps.p_c = detail::weighted_precoder(common_power, pp.alpha_c, common_direction(ch), u0);
    } else {
        ps.p_c = CGrid::Zero(nt, nc);
    }

    if (private_power > 0.0) {
        const auto dirs = private_directions(ch, pp.family);
        ps.p_1 = detail::weighted_precoder(private_power, pp.alpha_p, dirs[0], u0);
        ps.p_2 = detail::weighted_precoder(private_power, pp.alpha_p, dirs[1], u0);
    } else {
        ps.p_1 = CGrid::Zero(nt, nc);
        ps.p_2 = CGrid::Zero(nt, nc);
    }

    if (sensing_power > 0.0) {
        ps.p_r = u0.replicate(1, nc) * std::sqrt(sensing_power / nc);
    } else {
        ps.p_r = CGrid::Zero(nt, nc);
    }
    return ps;
}

enum class SpecialCase {
    RSMA_NoSense_General,
    RSMA_NoSense_Soft,
    SDMA_Sense_General,
    SDMA_Sense_Hard,
    SDMA_NoSense,
    General,
};

inline std::string to_string(SpecialCase c) {
    switch (c) {
        case SpecialCase::RSMA_NoSense_General: return "RSMA_NoSense_General";
        case SpecialCase::RSMA_NoSense_Soft: return "RSMA_NoSense_Soft";
        case SpecialCase::SDMA_Sense_General: return "SDMA_Sense_General";
        case SpecialCase::SDMA_Sense_Hard: return "SDMA_Sense_Hard";
        case SpecialCase::SDMA_NoSense: return "SDMA_NoSense";
        case SpecialCase::General: return "General";
    }
    return "General";
}

inline SpecialCase parse_special_case(std::string_view s) {
    for (auto c : {SpecialCase::RSMA_NoSense_General, SpecialCase::RSMA_NoSense_Soft,
                   SpecialCase::SDMA_Sense_General, SpecialCase::SDMA_Sense_Hard, SpecialCase::SDMA_NoSense,
                   SpecialCase::General})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown special case '" + std::string(s) + "'");
}

/// Most specific special case whose parameter constraints hold.
inline SpecialCase classify_special_case(const ParameterPoint& pp) {
    constexpr double tol = 1e-9;
    auto eq = [](double a, double b) { return std::abs(a - b) <= tol; };
    auto open_unit = [](double v) { return v > tol && v < 1.0 - tol; };

    const bool comms_only = eq(pp.t_comms, 1.0);
    const bool no_common = eq(pp.t_p, 1.0);

    if (comms_only && no_common && open_unit(pp.alpha_p)) return SpecialCase::SDMA_NoSense;
    if (no_common && open_unit(pp.t_comms)) {
        if (eq(pp.alpha_p, 1.0)) return SpecialCase::SDMA_Sense_Hard;
        if (open_unit(pp.alpha_p)) return SpecialCase::SDMA_Sense_General;
    }
    if (comms_only) {
        if (eq(pp.alpha_c, 1.0 - pp.alpha_p) && pp.alpha_p >= 0.5 - tol) return SpecialCase::RSMA_NoSense_Soft;
        return SpecialCase::RSMA_NoSense_General;
    }
    return SpecialCase::General;
}

}  // namespace rsma_isac
