#include "mimosim/crc.hpp"

#include <stdexcept>

namespace mimosim {

namespace {

std::vector<std::uint8_t> crc_remainder(const std::vector<std::uint8_t>& padded,
                                        const CrcSpec& crc) {
    std::vector<std::uint8_t> reg = padded;
    const int s = crc.length;
    for (std::size_t i = 0; i + s < reg.size(); ++i) {
        if (!reg[i]) continue;
        for (int b = 0; b <= s; ++b)
            reg[i + b] ^= static_cast<std::uint8_t>((crc.poly >> (s - b)) & 1);
    }
    return {reg.end() - s, reg.end()};
}

} // namespace

std::vector<std::uint8_t> crc_attach(const std::vector<std::uint8_t>& message,
                                     const CrcSpec& crc) {
    if (crc.length <= 0) return message;
    if (((crc.poly >> crc.length) & 1) == 0)
        throw std::invalid_argument("crc_attach: polynomial lacks the leading term");
    std::vector<std::uint8_t> padded = message;
    padded.insert(padded.end(), crc.length, 0);
    const std::vector<std::uint8_t> rem = crc_remainder(padded, crc);
    std::vector<std::uint8_t> out = message;
    out.insert(out.end(), rem.begin(), rem.end());
    return out;
}

bool crc_check(const std::vector<std::uint8_t>& bits, const CrcSpec& crc) {
    if (crc.length <= 0) return true;
    if (static_cast<int>(bits.size()) < crc.length)
        throw std::invalid_argument("crc_check: input shorter than the parity field");
    for (std::uint8_t b : crc_remainder(bits, crc))
        if (b) return false;
    return true;
}

} // namespace mimosim
