#include "mimosim/polar_code.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "mimosim/rng.hpp"

namespace mimosim {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace

double ga_phi(double x) {
    // Piecewise fit of 1 - E[tanh(L/2)], L ~ N(x, 2x).
    if (x <= 0.0) return 1.0;
    if (x < 10.0) return std::exp(-0.4527 * std::pow(x, 0.86) + 0.0218);
    return std::sqrt(M_PI / x) * std::exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x));
}

double ga_phi_inv(double y) {
    if (y >= 1.0) return 0.0;
    if (y <= 0.0) throw std::invalid_argument("ga_phi_inv: y must be in (0,1]");
    double lo = 0.0, hi = 1.0;
    while (ga_phi(hi) > y) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ga_phi(mid) > y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> ga_subchannel_means(int eta, double mean0) {
    if (!is_power_of_two(eta)) throw std::invalid_argument("ga: eta must be a power of two");
    if (mean0 <= 0.0) throw std::invalid_argument("ga: root mean must be positive");
    std::vector<double> means = {mean0};
    while (static_cast<int>(means.size()) < eta) {
        std::vector<double> next(means.size() * 2);
        for (std::size_t i = 0; i < means.size(); ++i) {
            const double p = ga_phi(means[i]);
            next[2 * i] = ga_phi_inv(1.0 - (1.0 - p) * (1.0 - p));
            next[2 * i + 1] = 2.0 * means[i];
        }
        means = std::move(next);
    }
    return means;
}

std::vector<double> ga_error_probs(int eta, double mean0) {
    std::vector<double> probs = ga_subchannel_means(eta, mean0);
    for (double& m : probs) m = q_func(std::sqrt(m / 2.0));
    return probs;
}

PolarCodeSpec construct_polar_code(int eta, int kappa, const CrcSpec& crc, double design_v,
                                   FrozenSource source, const std::string& reliability_file,
                                   std::uint64_t interleaver_seed) {
    if (!is_power_of_two(eta))
        throw std::invalid_argument("construct_polar_code: eta must be a power of two");
    if (kappa < 1 || kappa > eta)
        throw std::invalid_argument("construct_polar_code: kappa out of range");
    if (kappa <= crc.length)
        throw std::invalid_argument("construct_polar_code: kappa must exceed the CRC length");

    PolarCodeSpec spec;
    spec.eta = eta;
    spec.mu = static_cast<int>(std::lround(std::log2(eta)));
    spec.kappa = kappa;
    spec.crc = crc;
    spec.interleaver_seed = interleaver_seed;

    std::vector<int> reliability(eta); // most reliable first
    if (source == FrozenSource::Ga) {
        if (design_v <= 0.0)
            throw std::invalid_argument("construct_polar_code: design variance must be positive");
        const std::vector<double> probs = ga_error_probs(eta, 2.0 / design_v);
        std::iota(reliability.begin(), reliability.end(), 0);
        std::stable_sort(reliability.begin(), reliability.end(),
                         [&](int a, int b) { return probs[a] < probs[b]; });
    } else {
        std::ifstream in(reliability_file);
        if (!in) throw std::runtime_error("construct_polar_code: cannot open " + reliability_file);
        std::vector<std::uint8_t> seen(eta, 0);
        int idx, count = 0;
        while (in >> idx) {
            if (idx < 0 || idx >= eta || seen[idx] || count >= eta)
                throw std::runtime_error("construct_polar_code: malformed reliability sequence");
            seen[idx] = 1;
            reliability[count++] = idx;
        }
        if (count != eta)
            throw std::runtime_error("construct_polar_code: reliability sequence incomplete");
    }

    spec.info_positions.assign(reliability.begin(), reliability.begin() + kappa);
    std::sort(spec.info_positions.begin(), spec.info_positions.end());
    spec.frozen.assign(reliability.begin() + kappa, reliability.end());
    std::sort(spec.frozen.begin(), spec.frozen.end());
    spec.is_frozen.assign(eta, 1);
    for (int pos : spec.info_positions) spec.is_frozen[pos] = 0;
    return spec;
}

PolarCodeSpec load_code_spec(const std::string& path, double default_design_v) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_code_spec: cannot open " + path);
    nlohmann::json j;
    in >> j;

    CrcSpec crc;
    crc.length = j.value("crc_len", 0);
    if (j.contains("crc_poly_hex"))
        crc.poly = std::stoull(j["crc_poly_hex"].get<std::string>(), nullptr, 16);
    else if (crc.length == 11)
        crc.poly = kCrc11.poly;
    else if (crc.length != 0)
        throw std::runtime_error("load_code_spec: crc_poly_hex required for this CRC length");

    const std::string source = j.value("frozen_source", std::string("ga"));
    const double design_v = j.value("design_v", default_design_v);
    return construct_polar_code(j.at("eta").get<int>(), j.at("kappa").get<int>(), crc, design_v,
                                source == "file" ? FrozenSource::File : FrozenSource::Ga,
                                j.value("frozen_file", std::string{}),
                                j.value("interleaver_seed", std::uint64_t{0}));
}

std::vector<int> bit_reversal_permutation(int eta) {
    const int mu = static_cast<int>(std::lround(std::log2(eta)));
    std::vector<int> perm(eta);
    for (int i = 0; i < eta; ++i) {
        int r = 0;
        for (int b = 0; b < mu; ++b) r |= ((i >> b) & 1) << (mu - 1 - b);
        perm[i] = r;
    }
    return perm;
}

std::vector<std::uint8_t> polar_encode(const PolarCodeSpec& spec,
                                       const std::vector<std::uint8_t>& u) {
    if (static_cast<int>(u.size()) != spec.eta)
        throw std::invalid_argument("polar_encode: input length mismatch");
    for (int pos : spec.frozen)
        if (u[pos]) throw std::invalid_argument("polar_encode: nonzero frozen bit");

    const std::vector<int> rev = bit_reversal_permutation(spec.eta);
    std::vector<std::uint8_t> c(spec.eta);
    for (int i = 0; i < spec.eta; ++i) c[i] = u[rev[i]];
    for (int step = 1; step < spec.eta; step <<= 1)
        for (int i = 0; i < spec.eta; i += 2 * step)
            for (int j = i; j < i + step; ++j) c[j] ^= c[j + step];
    return c;
}

std::vector<std::uint8_t> place_info_bits(const PolarCodeSpec& spec,
                                          const std::vector<std::uint8_t>& info) {
    if (static_cast<int>(info.size()) != spec.kappa)
        throw std::invalid_argument("place_info_bits: expected kappa bits");
    std::vector<std::uint8_t> u(spec.eta, 0);
    for (int i = 0; i < spec.kappa; ++i) u[spec.info_positions[i]] = info[i];
    return u;
}

std::vector<std::uint8_t> extract_info_bits(const PolarCodeSpec& spec,
                                            const std::vector<std::uint8_t>& u) {
    std::vector<std::uint8_t> info(spec.kappa);
    for (int i = 0; i < spec.kappa; ++i) info[i] = u[spec.info_positions[i]];
    return info;
}

std::vector<int> interleaver_permutation(int eta, std::uint64_t seed) {
    std::vector<int> perm(eta);
    std::iota(perm.begin(), perm.end(), 0);
    // Explicit Fisher-Yates on raw engine output keeps the permutation
    // reproducible independently of library distribution internals.
    std::mt19937_64 engine(derive_seed(seed, 0x17e41eaf));
    for (int i = eta - 1; i > 0; --i) {
        const int j = static_cast<int>(engine() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

std::vector<std::uint8_t> interleave(const std::vector<std::uint8_t>& bits,
                                     std::uint64_t seed) {
    const std::vector<int> perm = interleaver_permutation(static_cast<int>(bits.size()), seed);
    std::vector<std::uint8_t> out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[perm[i]] = bits[i];
    return out;
}

std::vector<double> deinterleave(const std::vector<double>& llrs, std::uint64_t seed) {
    const std::vector<int> perm = interleaver_permutation(static_cast<int>(llrs.size()), seed);
    std::vector<double> out(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) out[i] = llrs[perm[i]];
    return out;
}

} // namespace mimosim
