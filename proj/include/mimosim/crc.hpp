#pragma once

#include <cstdint>
#include <vector>

namespace mimosim {

/// CRC over GF(2), MSB-first. `poly` includes the leading x^length term,
/// e.g. the TS 38.212 uplink CRC-11 x^11+x^10+x^9+x^5+1 is {11, 0xE21}.
struct CrcSpec {
    int length = 0;
    std::uint64_t poly = 0;
};

inline constexpr CrcSpec kCrc11{11, 0xE21};

/// Appends `length` parity bits to the message.
std::vector<std::uint8_t> crc_attach(const std::vector<std::uint8_t>& message,
                                     const CrcSpec& crc);

/// Remainder-zero test over message+parity.
bool crc_check(const std::vector<std::uint8_t>& bits, const CrcSpec& crc);

} // namespace mimosim
