#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "rsma_isac/error.hpp"

namespace rsma_isac {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
/// One column per subcarrier; rows are antenna elements.
using CGrid = Eigen::MatrixXcd;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Uniform linear transmit array.
struct ArrayGeometry {
    int n_tx = 2;
    double spacing_wavelengths = 0.5;

    void validate() const {
        if (n_tx < 1) throw ConfigError("ArrayGeometry: n_tx must be >= 1");
        if (!(spacing_wavelengths > 0.0))
            throw ConfigError("ArrayGeometry: spacing_wavelengths must be > 0");
    }
};

/// Array response toward `angle_deg` (0 = broadside); element g is
/// exp(j 2 pi (d/lambda) g sin(theta)).
inline CVector steering_vector(const ArrayGeometry& geom, double angle_deg) {
    geom.validate();
    const double s = std::sin(deg_to_rad(angle_deg));
    CVector a(geom.n_tx);
    for (int g = 0; g < geom.n_tx; ++g) {
        a(g) = std::polar(1.0, 2.0 * std::numbers::pi * geom.spacing_wavelengths * g * s);
    }
    return a;
}

/// Unit-norm broadside direction a_0 / sqrt(N_T).
inline CVector broadside_unit(const ArrayGeometry& geom) {
    return steering_vector(geom, 0.0) / std::sqrt(static_cast<double>(geom.n_tx));
}

}  // namespace rsma_isac
