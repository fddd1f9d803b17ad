#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mimosim {

/// Closed-form multiplication counts for the detector family.
struct ComplexitySpec {
    std::string detector;
    std::int64_t n = 0; // receive antennas
    std::int64_t k = 0; // users
    std::int64_t m = 4; // constellation order
    std::int64_t t = 1; // iterations
    std::int64_t n_c = 1; // cluster antennas (d-ep only)
    std::int64_t c = 1;   // cluster count (d-ep only)
};

/// Exact evaluation of the closed form for the named detector.
/// Throws std::invalid_argument for unknown names or invalid parameters.
std::int64_t multiplication_count(const ComplexitySpec& spec);

/// All detector names the calculator knows, in canonical order.
const std::vector<std::string>& complexity_detectors();

} // namespace mimosim
