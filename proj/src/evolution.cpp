#include "mimosim/evolution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimosim {

namespace {

constexpr int kQuadratureNodes = 40;
constexpr int kMaxEvolutionIters = 1000;

const GaussHermite& quadrature() {
    static const GaussHermite gh(kQuadratureNodes);
    return gh;
}

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace

GaussHermite::GaussHermite(int count) {
    // Golub-Welsch on the Hermite Jacobi matrix.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
    for (int i = 1; i < count; ++i) {
        const double b = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    nodes.resize(count);
    weights.resize(count);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < count; ++i) {
        nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = sqrt_pi * v0 * v0;
    }
}

double v_initial(int n_rx, int n_tx, double sigma2, EvolutionVariant variant) {
    if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("v_initial: bad dimensions");
    if (variant == EvolutionVariant::B)
        return (n_tx - 1 + n_tx * sigma2) / n_rx;
    const double alpha = static_cast<double>(n_tx) / n_rx;
    const double b = alpha * sigma2 + (alpha - 1.0);
    return (b + std::sqrt(b * b + 4.0 * alpha * sigma2)) / 2.0;
}

double v_update(int n_rx, int n_tx, double sigma2, double v_mse) {
    return ((n_tx - 1) * v_mse + sigma2) / n_rx;
}

namespace {

// Per-axis posterior mean for the two-level case: E[x_r | z] = a tanh(2az/v).
double mse_4qam(double v, double a) {
    const auto& gh = quadrature();
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    const double sv = std::sqrt(v);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double z = a + sv * gh.nodes[i];
        const double err = a - a * std::tanh(2.0 * a * z / v);
        acc += gh.weights[i] * err * err;
    }
    return 2.0 * acc * inv_sqrt_pi; // both axes
}

double mse_tensor(double v, const Constellation& cons) {
    const auto& gh = quadrature();
    const double inv_pi = 1.0 / M_PI;
    const double s = std::sqrt(v / 2.0); // per-dimension scale of sqrt(2)*node
    double acc = 0.0;
    for (int x = 0; x < cons.order; ++x) {
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
            for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
                const cplx obs = cons.points[x] +
                                 cplx(s * std::sqrt(2.0) * gh.nodes[i],
                                      s * std::sqrt(2.0) * gh.nodes[j]);
                // posterior mean over the constellation at variance v
                double lmax = -std::numeric_limits<double>::infinity();
                double logits[64];
                for (int a = 0; a < cons.order; ++a) {
                    logits[a] = -std::norm(obs - cons.points[a]) / v;
                    lmax = std::max(lmax, logits[a]);
                }
                double zsum = 0.0;
                cplx num(0.0, 0.0);
                for (int a = 0; a < cons.order; ++a) {
                    const double w = std::exp(logits[a] - lmax);
                    zsum += w;
                    num += cons.points[a] * w;
                }
                acc += gh.weights[i] * gh.weights[j] * std::norm(cons.points[x] - num / zsum);
            }
        }
    }
    return acc * inv_pi / cons.order;
}

} // namespace

double mse_update(double v, const Constellation& cons) {
    if (v <= 0.0) throw std::invalid_argument("mse_update: v must be positive");
    if (cons.order == 4) {
        const double a = std::sqrt(cons.energy / 2.0);
        return mse_4qam(v, a);
    }
    return mse_tensor(v, cons);
}

double ber_from_sinr(double sinr, int order) {
    const double m_bits = std::log2(order);
    return (4.0 / m_bits) * (1.0 - 1.0 / std::sqrt(double(order))) *
           q_func(std::sqrt(3.0 * sinr / (order - 1)));
}

EvolutionResult run_evolution(int n_rx, int n_tx, double sigma2, EvolutionVariant variant,
                              const Constellation& cons, double zeta) {
    if (zeta <= 0.0) throw std::invalid_argument("run_evolution: zeta must be positive");
    const Constellation unit = make_constellation(cons.order, 1);
    // Unit-energy symbols carry noise sigma2/E_s = K*sigma2.
    const double sigma2_norm = n_tx * sigma2;

    EvolutionResult out;
    double v = v_initial(n_rx, n_tx, sigma2, variant);
    out.converged = false;
    int t = 0;
    while (t < kMaxEvolutionIters) {
        ++t;
        const double v_mse = mse_update(v, unit);
        const double v_next = v_update(n_rx, n_tx, sigma2_norm, v_mse);
        const bool done = std::abs(v_next - v) <= zeta / 8.0;
        v = v_next;
        if (done) {
            out.converged = true;
            break;
        }
    }
    out.v = v;
    out.iterations = t;
    out.ber = ber_from_sinr(1.0 / v, cons.order);
    return out;
}

} // namespace mimosim
