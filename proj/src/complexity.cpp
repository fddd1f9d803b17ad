#include "mimosim/complexity.hpp"

#include <stdexcept>

namespace mimosim {

const std::vector<std::string>& complexity_detectors() {
    static const std::vector<std::string> names = {
        "ami-gs", "hf-admm", "hi",  "mmse",      "mmse-sic",   "pic-dsc", "amp",
        "oamp",   "b-pic-dsc", "ib-pic-dsc", "ep-nsa", "epa", "d-ep",    "ep"};
    return names;
}

std::int64_t multiplication_count(const ComplexitySpec& spec) {
    const std::int64_t n = spec.n, k = spec.k, m = spec.m, t = spec.t;
    if (n < 1 || k < 1 || m < 2 || t < 1)
        throw std::invalid_argument("multiplication_count: invalid parameters");
    const std::string& d = spec.detector;

    if (d == "ami-gs") return (4 * n + 4 * t - 2) * k * k + 2 * (n - 2 * t + 1) * k;
    if (d == "hf-admm") return 2 * n * k * k + (n + 1) * k + (n * k * k + 9 * k * k) * t;
    if (d == "hi") return 5 * k * k + k - 6 + (2 * k * k + 8 * k + 6) * t;
    if (d == "mmse") return (n + 1) * k * k + n * n * k + n * k;
    if (d == "mmse-sic") {
        std::int64_t total = 0;
        for (std::int64_t i = 0; i <= k; ++i)
            total += (n + 1) * i * i + n * n * i + n * i;
        return total;
    }
    if (d == "pic-dsc") return 4 * (n + 1) * k * t;
    if (d == "amp") return (4 * n * k + 8 * n + 6 * k + 4 * m * k) * t;
    if (d == "oamp")
        return (k - 1) * n * k +
               (2 * n * n * k + n * k * k + 2 * n * k + 12 * k + 4 * m * k + 8) * t;
    if (d == "b-pic-dsc")
        return (4 * n * k + 12 * k + 4 * m * k) * t - (n * k + 5 * k);
    if (d == "ib-pic-dsc")
        return n * n * k + n * k * k - 4 * k - 2 * n * k + (4 * n * k + 12 * k + 4 * m * k) * t;
    if (d == "ep-nsa")
        return (n + 1) * k * k + (n * n + n + 1) * k +
               ((k + 1) * 2 * k * k + (4 * n + 4 * m + 14) * k) * t;
    if (d == "epa")
        return (n + 1) * k * k + (n * n - 1) * k + (2 * n + 4 * m + 8) * k * t;
    if (d == "d-ep") {
        const std::int64_t nc = spec.n_c, c = spec.c;
        if (nc < 1 || c < 1)
            throw std::invalid_argument("multiplication_count: d-ep needs cluster parameters");
        return (k * k + k) * nc * c + (nc * nc * c + k * c + 3 * c + 4 * m + 17) * k * t;
    }
    if (d == "ep")
        return n * k * k + (n - 1) * k + (n * n * k + k * k + 19 * k + 4 * m * k) * t;

    throw std::invalid_argument("multiplication_count: unknown detector " + d);
}

} // namespace mimosim
