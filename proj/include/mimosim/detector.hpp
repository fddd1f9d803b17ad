#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/constellation.hpp"

namespace mimosim {

enum class DetectorVariant { BPicDsc, IbPicDsc, PicDsc, Mmse, MatchedFilter, Ml };

const char* detector_name(DetectorVariant v);
DetectorVariant detector_from_name(const std::string& name);

struct DetectorConfig {
    DetectorVariant variant = DetectorVariant::BPicDsc;
    int t_max = 10;
    double zeta = 1e-4;
    bool exact_sigma = false;  // full interference-aware PIC variance
    bool collect_trace = false;
};

/// Per-iteration snapshot of the PIC-DSC loop.
struct DetectorState {
    int iteration = 0;
    CVector x_pic;   // PIC symbol estimates
    RVector sigma;   // PIC estimate variances
    CVector x_hat;   // Bayesian (or sliced) symbol estimates
    RVector v;       // Bayesian estimate variances
    CVector x_dsc;   // combined estimates
    RVector v_dsc;   // combined variances
    RVector rho;     // combining weights
    RVector err;     // instantaneous squared errors
    bool converged = false;
};

struct DetectionResult {
    CVector soft_symbols;  // final PIC estimates (after the feedback assignment)
    RVector soft_variances;
    std::vector<int> hard_symbols;
    std::vector<std::uint8_t> hard_bits; // K x m, row-major
    int iterations_used = 0;
    std::vector<DetectorState> trace; // filled when collect_trace is set
    std::uint64_t flop_count = 0;     // multiplication-equivalents
};

struct BseResult {
    CVector mean;
    RVector var;
    Eigen::MatrixXd posterior; // K x M, rows sum to 1
};

struct DscResult {
    CVector x_dsc;
    RVector v_dsc;
    RVector rho;
};

/// Per-user matched filter h_k^H y / ||h_k||^2. Throws on a zero-norm column.
CVector matched_filter(const CVector& y, const CMatrix& h);

/// (H^H H + sigma2 I)^{-1} H^H y. Throws if the regularized Gram matrix is
/// not positive definite (sigma2 = 0 with a rank-deficient channel).
CVector mmse_detect(const CVector& y, const CMatrix& h, double sigma2);

/// Rows w_k^H of the MMSE filter (H^H H + sigma2 I)^{-1} H^H, as a K x N matrix.
CMatrix mmse_filter_rows(const CMatrix& h, double sigma2);

/// One PIC update: soft estimates with the k-th prior zeroed, plus their
/// variances (either the noise-only approximation or the full
/// interference-aware form when exact_sigma is set).
std::pair<CVector, RVector> bso_step(const CVector& y, const CMatrix& h,
                                     const CVector& prior_x, const RVector& prior_v,
                                     double sigma2, bool exact_sigma = false);

/// Posterior mean/variance over the constellation for Gaussian observations
/// x_pic with variances sigma. Computed in log domain with per-user max
/// subtraction; degenerate variances collapse onto the nearest point.
BseResult bse_step(const CVector& x_pic, const RVector& sigma, const Constellation& cons);

/// SINR-optimal combination of two consecutive estimates with weights
/// rho_k = e_prev_k / (e_k + e_prev_k); a zero denominator yields rho = 1.
DscResult dsc_step(const CVector& x_hat, const RVector& v, const CVector& x_hat_prev,
                   const RVector& v_prev, const RVector& err, const RVector& err_prev);

/// e_k = |w_k^H (y - H x_hat)|^2 for filter rows w_k^H (K x N).
RVector instantaneous_error(const CVector& y, const CMatrix& h, const CVector& x_hat,
                            const CMatrix& filter_rows);

/// Exact maximum-likelihood solution argmin_x ||y - H x||^2 over the K-fold
/// constellation product, via depth-first search with exact pruning.
/// Throws when M^K exceeds 2^20.
std::vector<int> ml_oracle(const CVector& y, const CMatrix& h, const Constellation& cons);

/// Initial loop state, exposed so detector variants that differ only in their
/// first-iteration estimates can share one update path.
struct PicDscInit {
    CVector x0;          // iteration-0 symbol priors
    RVector v0;          // iteration-0 variance priors
    CMatrix filter_rows; // rows used by the instantaneous-error filter
    bool bayesian = true; // false: slicer replaces the posterior estimator
};

DetectionResult run_pic_dsc_loop(const CVector& y, const CMatrix& h, double sigma2,
                                 const Constellation& cons, const DetectorConfig& cfg,
                                 const PicDscInit& init);

/// Unified entry point: (y, H_hat, sigma2, constellation, config) -> result.
DetectionResult detect(const CVector& y, const CMatrix& h, double sigma2,
                       const Constellation& cons, const DetectorConfig& cfg);

} // namespace mimosim
