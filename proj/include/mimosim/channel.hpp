#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mimosim/constellation.hpp"

namespace mimosim {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// One fading realization: the true channel H, the receiver's estimate
/// H_hat = H + gamma*Delta, and the impairment parameters that produced it.
struct ChannelRealization {
    CMatrix h;     // N x K true channel
    CMatrix h_hat; // N x K receiver-side estimate
    double gamma = 0.0;
    double psi = 0.0;
    double rician_phi = 0.0;
    double noise_variance = 0.0; // sigma^2, set by the transmit step
};

struct TransmitFrame {
    std::vector<std::uint8_t> bits; // K x m, row-major
    CVector symbols;                // length K
    CVector received;               // length N
};

inline double snr_db_to_noise_variance(double snr_db) {
    return std::pow(10.0, -snr_db / 10.0); // K*E_s = 1
}

/// Draws an N x K channel. Entries of the base matrix have real and imaginary
/// parts ~ N(mu_ric, var_ric) with mu_ric = sqrt(phi/(2(phi+1))) and
/// var_ric = 1/(2(phi+1)); phi = 0 reduces to unit-variance Rayleigh fading.
/// Receive-side spatial correlation is applied as H <- Q^{1/2} H with
/// Q_ij = psi^|i-j|, and the receiver's estimate is H + gamma*Delta with
/// Delta i.i.d. unit-variance complex Gaussian, independent of H.
ChannelRealization draw_channel(int n_rx, int n_tx, double psi, double rician_phi,
                                double gamma, std::uint64_t seed);

/// Maps bits (K rows of m) onto symbols and produces y = H x + eps with eps
/// complex Gaussian of per-entry variance sigma2. Also records sigma2 in the
/// channel realization for downstream consumers.
TransmitFrame transmit(const std::vector<std::uint8_t>& bits, const Constellation& cons,
                       ChannelRealization& chan, double sigma2, std::uint64_t seed);

/// Exponential correlation matrix Q_ij = psi^|i-j|.
Eigen::MatrixXd exponential_correlation(int n, double psi);

std::vector<std::uint8_t> random_bits(int count, std::uint64_t seed);

} // namespace mimosim
