#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace mimosim {

using cplx = std::complex<double>;

/// Square Gray-mapped M-QAM point set with per-bit index subsets.
///
/// Labels are per-axis reflected Gray codes: the first m/2 bits of a symbol
/// select the in-phase level, the remaining m/2 bits the quadrature level.
/// Points are scaled so the average symbol energy equals `energy`.
struct Constellation {
    int order = 0;           // M
    int bits_per_symbol = 0; // m = log2 M
    double energy = 0.0;     // E_s, average |point|^2
    std::vector<cplx> points;
    std::vector<double> point_energy; // |points[i]|^2
    // bit_subsets[q][b] = indices of points whose q-th bit equals b.
    std::vector<std::vector<std::vector<int>>> bit_subsets;

    // Bits of point index `idx`, MSB-first: bit q is ((idx >> (m-1-q)) & 1).
    int bit_of(int idx, int q) const { return (idx >> (bits_per_symbol - 1 - q)) & 1; }

    cplx map_bits(const std::uint8_t* bits) const {
        int idx = 0;
        for (int q = 0; q < bits_per_symbol; ++q) idx = (idx << 1) | (bits[q] & 1);
        return points[idx];
    }

    int nearest_index(cplx z) const {
        int best = 0;
        double best_d = std::norm(z - points[0]);
        for (int i = 1; i < order; ++i) {
            const double d = std::norm(z - points[i]);
            if (d < best_d) { // ties keep the lowest index
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    void bits_of_index(int idx, std::uint8_t* out) const {
        for (int q = 0; q < bits_per_symbol; ++q)
            out[q] = static_cast<std::uint8_t>(bit_of(idx, q));
    }
};

/// Builds the square M-QAM constellation for a K-user system, normalized so
/// the total transmit energy K*E_s equals one (E_s = 1/K).
/// Throws std::invalid_argument for unsupported M or K < 1.
Constellation make_constellation(int order, int user_count);

} // namespace mimosim
