#pragma once

#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/constellation.hpp"

namespace mimosim {

inline constexpr double kLlrClip = 50.0;

/// Per-bit LLRs log p(bit=0)/p(bit=1) from Gaussian soft-symbol statistics,
/// via log-sum-exp over the per-bit constellation subsets; clipped to +/-50.
/// Output index (k*m + q) is bit q of user k.
std::vector<double> demap_llr(const CVector& soft_symbols, const RVector& soft_variances,
                              const Constellation& cons);

} // namespace mimosim
