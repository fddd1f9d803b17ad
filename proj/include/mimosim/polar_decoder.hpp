#pragma once

#include <cstdint>
#include <vector>

#include "mimosim/polar_code.hpp"

namespace mimosim {

/// Path-score bias: survival probabilities of the not-yet-visited frozen
/// subchannels, kept in log domain. log_omega[i] covers positions >= i.
struct BiasTable {
    std::vector<double> error_prob; // P_j per subchannel
    std::vector<double> log_omega;  // size eta+1, non-decreasing, last entry 0
};

/// Gaussian-approximation bias probabilities for a detector-output channel of
/// interference-plus-noise variance v (per-bit LLR mean 2/v).
BiasTable make_bias_table(const PolarCodeSpec& spec, double v);

enum class DecodeOutcome { CrcPass, CrcFail, StackExhausted };

struct DecodeStats {
    std::uint64_t iterations = 0; // queue pops that advance a path
    std::uint64_t additions = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t multiplications = 0;
    DecodeOutcome outcome = DecodeOutcome::CrcPass;
};

struct DecodeResult {
    std::vector<std::uint8_t> u; // length eta, frozen positions zero
    DecodeStats stats;
};

/// Plain successive cancellation (exact bit metrics).
DecodeResult decode_sc(const PolarCodeSpec& spec, const std::vector<double>& llrs);

/// Stack decoding with the exact log-probability path metric and list size L.
/// Stack capacity defaults to L*eta paths.
DecodeResult decode_scs(const PolarCodeSpec& spec, const std::vector<double>& llrs, int list_size,
                        int capacity = 0);

/// Stack decoding with the max-log path score plus the bias function;
/// log-domain additions and comparisons only, no multiplications.
DecodeResult decode_sequential(const PolarCodeSpec& spec, const std::vector<double>& llrs,
                               const BiasTable& bias, int list_size, int capacity = 0);

} // namespace mimosim
