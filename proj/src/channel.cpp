#include "mimosim/channel.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

#include "mimosim/rng.hpp"

namespace mimosim {

Eigen::MatrixXd exponential_correlation(int n, double psi) {
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = std::pow(psi, std::abs(i - j));
    return q;
}

ChannelRealization draw_channel(int n_rx, int n_tx, double psi, double rician_phi,
                                double gamma, std::uint64_t seed) {
    if (n_rx < n_tx || n_tx < 1)
        throw std::invalid_argument("draw_channel: require N >= K >= 1");
    if (psi < 0.0 || psi >= 1.0)
        throw std::invalid_argument("draw_channel: psi must be in [0,1)");
    if (rician_phi < 0.0)
        throw std::invalid_argument("draw_channel: rician factor must be nonnegative");
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("draw_channel: gamma must be in [0,1]");

    Rng rng(seed);
    ChannelRealization out;
    out.psi = psi;
    out.rician_phi = rician_phi;
    out.gamma = gamma;

    const double mu_ric = std::sqrt(rician_phi / (2.0 * (rician_phi + 1.0)));
    const double sd_ric = std::sqrt(1.0 / (2.0 * (rician_phi + 1.0)));

    out.h.resize(n_rx, n_tx);
    for (int i = 0; i < n_rx; ++i)
        for (int j = 0; j < n_tx; ++j)
            out.h(i, j) = cplx(rng.normal(mu_ric, sd_ric), rng.normal(mu_ric, sd_ric));

    if (psi > 0.0) {
        // Any factor with Q = R R^H yields the target covariance; the
        // Cholesky factor of the SPD Toeplitz Q is used.
        Eigen::LLT<Eigen::MatrixXd> llt(exponential_correlation(n_rx, psi));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("draw_channel: correlation matrix not SPD");
        out.h = llt.matrixL() * out.h;
    }

    out.h_hat = out.h;
    if (gamma > 0.0) {
        for (int i = 0; i < n_rx; ++i)
            for (int j = 0; j < n_tx; ++j) out.h_hat(i, j) += gamma * rng.cgauss(1.0);
    }
    return out;
}

TransmitFrame transmit(const std::vector<std::uint8_t>& bits, const Constellation& cons,
                       ChannelRealization& chan, double sigma2, std::uint64_t seed) {
    const int k = static_cast<int>(chan.h.cols());
    const int m = cons.bits_per_symbol;
    if (static_cast<int>(bits.size()) != k * m)
        throw std::invalid_argument("transmit: bit matrix shape mismatch");
    if (sigma2 < 0.0) throw std::invalid_argument("transmit: negative noise variance");

    chan.noise_variance = sigma2;

    TransmitFrame frame;
    frame.bits = bits;
    frame.symbols.resize(k);
    for (int u = 0; u < k; ++u) frame.symbols(u) = cons.map_bits(&bits[u * m]);

    frame.received = chan.h * frame.symbols;
    if (sigma2 > 0.0) {
        Rng rng(seed);
        for (int i = 0; i < frame.received.size(); ++i) frame.received(i) += rng.cgauss(sigma2);
    }
    return frame;
}

std::vector<std::uint8_t> random_bits(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    return bits;
}

} // namespace mimosim
