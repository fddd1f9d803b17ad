#include "mimosim/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace mimosim {

namespace {

int gray_to_binary(int g) {
    int b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

} // namespace

Constellation make_constellation(int order, int user_count) {
    if (order != 4 && order != 16 && order != 64)
        throw std::invalid_argument("make_constellation: unsupported modulation order");
    if (user_count < 1)
        throw std::invalid_argument("make_constellation: user count must be positive");

    Constellation c;
    c.order = order;
    c.bits_per_symbol = static_cast<int>(std::lround(std::log2(order)));
    c.energy = 1.0 / user_count;

    const int axis_levels = 1 << (c.bits_per_symbol / 2); // sqrt(M)
    // PAM levels {+/-1, +/-3, ...} scaled so 2*(L^2-1)/3 * a^2 = E_s.
    const double a = std::sqrt(3.0 * c.energy / (2.0 * (order - 1)));

    c.points.resize(order);
    c.point_energy.resize(order);
    const int half_bits = c.bits_per_symbol / 2;
    for (int idx = 0; idx < order; ++idx) {
        const int gi = idx >> half_bits;          // leading bits: in-phase Gray label
        const int gq = idx & (axis_levels - 1);   // trailing bits: quadrature Gray label
        const int li = gray_to_binary(gi);
        const int lq = gray_to_binary(gq);
        const double re = (2 * li - (axis_levels - 1)) * a;
        const double im = (2 * lq - (axis_levels - 1)) * a;
        c.points[idx] = {re, im};
        c.point_energy[idx] = std::norm(c.points[idx]);
    }

    c.bit_subsets.assign(c.bits_per_symbol, {std::vector<int>{}, std::vector<int>{}});
    for (int q = 0; q < c.bits_per_symbol; ++q)
        for (int idx = 0; idx < order; ++idx)
            c.bit_subsets[q][c.bit_of(idx, q)].push_back(idx);

    return c;
}

} // namespace mimosim
