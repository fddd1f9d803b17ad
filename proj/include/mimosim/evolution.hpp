#pragma once

#include <vector>

#include "mimosim/constellation.hpp"

namespace mimosim {

enum class EvolutionVariant { B, Ib };

struct EvolutionResult {
    double v = 0.0;       // converged interference-plus-noise variance
    int iterations = 0;   // updates performed
    double ber = 0.0;     // closed-form BER at the final SINR
    bool converged = true; // false when the 1000-iteration cap was hit
};

/// Physicists' Gauss-Hermite rule: integral of f(x) exp(-x^2) dx.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussHermite(int count);
};

/// First-iteration variance. The B form is the matched-filter MSE, the IB
/// form the MMSE large-system MSE; both take the physical noise variance and
/// are expressed for unit-energy symbols.
double v_initial(int n_rx, int n_tx, double sigma2, EvolutionVariant variant);

/// Interference-plus-noise recursion v = ((K-1) V + sigma2) / N.
double v_update(int n_rx, int n_tx, double sigma2, double v_mse);

/// Mean square error of the posterior-mean estimator for a unit-variance
/// Gaussian-perturbed symbol: E |x - E[x | x + e, v]|^2 with e ~ CN(0, v),
/// x uniform over the constellation. Deterministic quadrature; 4-QAM uses the
/// per-axis reduction, larger orders a 2-D tensor rule.
double mse_update(double v, const Constellation& cons);

/// Uncoded BER of square M-QAM hard detection at a given per-symbol SINR
/// (leading-term expression; exact for M = 4).
double ber_from_sinr(double sinr, int order);

/// Iterates the variance recursion from v_initial until successive values
/// differ by at most zeta (cap 1000 iterations). The symbol prior is the
/// unit-energy constellation of the same order as `cons`; the recursion's
/// noise term is the symbol-normalized K*sigma2, which makes the update
/// consistent with both v_initial forms.
EvolutionResult run_evolution(int n_rx, int n_tx, double sigma2, EvolutionVariant variant,
                              const Constellation& cons, double zeta = 1e-4);

} // namespace mimosim
