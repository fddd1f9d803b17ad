#include "mimosim/demapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimosim {

namespace {

double log_sum_exp(const double* vals, const std::vector<int>& idx) {
    double vmax = -std::numeric_limits<double>::infinity();
    for (int i : idx) vmax = std::max(vmax, vals[i]);
    double acc = 0.0;
    for (int i : idx) acc += std::exp(vals[i] - vmax);
    return vmax + std::log(acc);
}

} // namespace

std::vector<double> demap_llr(const CVector& soft_symbols, const RVector& soft_variances,
                              const Constellation& cons) {
    const int k_users = static_cast<int>(soft_symbols.size());
    if (soft_variances.size() != k_users)
        throw std::invalid_argument("demap_llr: variance length mismatch");
    const int m = cons.bits_per_symbol;

    std::vector<double> llrs(static_cast<std::size_t>(k_users) * m);
    double logits[64];
    for (int k = 0; k < k_users; ++k) {
        const double s = std::max(soft_variances(k), 1e-300);
        for (int a = 0; a < cons.order; ++a)
            logits[a] = -std::norm(soft_symbols(k) - cons.points[a]) / s;
        for (int q = 0; q < m; ++q) {
            const double l0 = log_sum_exp(logits, cons.bit_subsets[q][0]);
            const double l1 = log_sum_exp(logits, cons.bit_subsets[q][1]);
            llrs[k * m + q] = std::clamp(l0 - l1, -kLlrClip, kLlrClip);
        }
    }
    return llrs;
}

} // namespace mimosim
