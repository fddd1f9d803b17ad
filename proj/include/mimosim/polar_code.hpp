#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mimosim/crc.hpp"

namespace mimosim {

/// A CRC-concatenated polar code: length eta = 2^mu, kappa input positions
/// carrying payload+CRC bits, the rest frozen to zero.
struct PolarCodeSpec {
    int eta = 0;
    int mu = 0;
    int kappa = 0;
    CrcSpec crc;
    std::vector<int> frozen;            // sorted, 0-based
    std::vector<std::uint8_t> is_frozen; // size eta
    std::vector<int> info_positions;     // sorted, size kappa
    std::uint64_t interleaver_seed = 0;

    int payload_bits() const { return kappa - crc.length; }
    double rate() const { return static_cast<double>(payload_bits()) / eta; }
};

enum class FrozenSource { Ga, File };

/// Gaussian-approximation density evolution over subchannel LLR means.
double ga_phi(double x);
double ga_phi_inv(double y);
/// Subchannel LLR means in decoding order for a root channel of mean `mean0`.
std::vector<double> ga_subchannel_means(int eta, double mean0);
/// Per-subchannel error probabilities Q(sqrt(mean/2)) at root mean `mean0`.
std::vector<double> ga_error_probs(int eta, double mean0);

/// Builds the code. With FrozenSource::Ga the eta-kappa least reliable
/// subchannels at design variance `design_v` are frozen (root LLR mean
/// 2/design_v, the per-bit mean of a Gray 4-QAM detector-output channel).
/// With FrozenSource::File, `reliability_file` lists 0-based subchannel
/// indices one per line, most reliable first.
PolarCodeSpec construct_polar_code(int eta, int kappa, const CrcSpec& crc, double design_v,
                                   FrozenSource source = FrozenSource::Ga,
                                   const std::string& reliability_file = "",
                                   std::uint64_t interleaver_seed = 0);

/// Loads {eta, kappa, crc_len, crc_poly_hex, frozen_source, frozen_file,
/// interleaver_seed[, design_v]} from a JSON file.
PolarCodeSpec load_code_spec(const std::string& path, double default_design_v);

std::vector<int> bit_reversal_permutation(int eta);

/// c = u B G2^{x mu} over GF(2). Throws if a frozen position is nonzero.
std::vector<std::uint8_t> polar_encode(const PolarCodeSpec& spec,
                                       const std::vector<std::uint8_t>& u);

/// Scatters kappa payload+CRC bits into the info positions (zeros elsewhere).
std::vector<std::uint8_t> place_info_bits(const PolarCodeSpec& spec,
                                          const std::vector<std::uint8_t>& info);
/// Gathers the kappa info-position bits of u.
std::vector<std::uint8_t> extract_info_bits(const PolarCodeSpec& spec,
                                            const std::vector<std::uint8_t>& u);

/// Seeded uniform permutation and its inverse; round trip is the identity.
std::vector<int> interleaver_permutation(int eta, std::uint64_t seed);
std::vector<std::uint8_t> interleave(const std::vector<std::uint8_t>& bits,
                                     std::uint64_t seed);
std::vector<double> deinterleave(const std::vector<double>& llrs, std::uint64_t seed);

} // namespace mimosim
