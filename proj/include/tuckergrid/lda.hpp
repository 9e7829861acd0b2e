#pragma once

#include <cmath>

namespace tuckergrid::lda {

// Unpolarized LDA: Dirac exchange plus Perdew-Zunger 1981 correlation.
// Densities at or below zero (approximation noise) evaluate to zero.

inline double rs_of_density(double rho) {
    return std::cbrt(3.0 / (4.0 * M_PI * rho));
}

inline double exchange_energy_density(double rho) {
    if (rho <= 0.0) return 0.0;
    return -0.75 * std::cbrt(3.0 / M_PI) * std::cbrt(rho);
}

inline double exchange_potential(double rho) {
    if (rho <= 0.0) return 0.0;
    return -std::cbrt(3.0 / M_PI * rho);
}

inline double correlation_energy_density(double rho) {
    if (rho <= 0.0) return 0.0;
    const double rs = rs_of_density(rho);
    if (rs >= 1.0) {
        const double g = -0.1423, b1 = 1.0529, b2 = 0.3334;
        return g / (1.0 + b1 * std::sqrt(rs) + b2 * rs);
    }
    const double a = 0.0311, b = -0.048, c = 0.0020, d = -0.0116;
    return a * std::log(rs) + b + c * rs * std::log(rs) + d * rs;
}

inline double correlation_potential(double rho) {
    if (rho <= 0.0) return 0.0;
    const double rs = rs_of_density(rho);
    if (rs >= 1.0) {
        const double g = -0.1423, b1 = 1.0529, b2 = 0.3334;
        const double x = std::sqrt(rs);
        const double denom = 1.0 + b1 * x + b2 * rs;
        return g / denom * (1.0 + 7.0 / 6.0 * b1 * x + 4.0 / 3.0 * b2 * rs) / denom;
    }
    const double a = 0.0311, b = -0.048, c = 0.0020, d = -0.0116;
    return a * std::log(rs) + (b - a / 3.0) + 2.0 / 3.0 * c * rs * std::log(rs) +
           (2.0 * d - c) / 3.0 * rs;
}

inline double xc_energy_density(double rho) {
    return exchange_energy_density(rho) + correlation_energy_density(rho);
}

inline double xc_potential(double rho) {
    return exchange_potential(rho) + correlation_potential(rho);
}

}  // namespace tuckergrid::lda
