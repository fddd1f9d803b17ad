#include "mimosim/polar_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>

namespace mimosim {

namespace {

struct PathState {
    std::vector<double> llr;     // levels 1..mu, sizes eta/2 .. 1
    std::vector<std::uint8_t> c; // partial sums, two slots per node
    std::vector<std::uint8_t> u; // decisions
    int depth = 0;
    double pm = 0.0;
    double score = 0.0;
};

// Successive-cancellation butterfly shared by all decoders. The codeword is
// u B G2^{x mu}, so adjacent channel pairs combine at the deepest level.
class ScGraph {
  public:
    ScGraph(const PolarCodeSpec& spec, const std::vector<double>& channel, bool exact,
            DecodeStats* stats)
        : eta_(spec.eta), mu_(spec.mu), channel_(channel), exact_(exact), stats_(stats) {
        if (static_cast<int>(channel.size()) != eta_)
            throw std::invalid_argument("polar decoder: expected eta channel LLRs");
        llr_offset_.resize(mu_ + 1, 0);
        c_offset_.resize(mu_ + 1, 0);
        int loff = 0, coff = 0;
        for (int lambda = 1; lambda <= mu_; ++lambda) {
            llr_offset_[lambda] = loff;
            c_offset_[lambda] = coff;
            loff += eta_ >> lambda;
            coff += 2 * (eta_ >> lambda);
        }
        llr_size_ = loff;
        c_size_ = coff;
    }

    void init(PathState& st) const {
        st.llr.assign(llr_size_, 0.0);
        st.c.assign(c_size_, 0);
        st.u.assign(eta_, 0);
        st.depth = 0;
        st.pm = 0.0;
        st.score = 0.0;
    }

    double decision_llr(PathState& st) const {
        compute(st, mu_, st.depth);
        return st.llr[llr_offset_[mu_]];
    }

    void apply_decision(PathState& st, std::uint8_t bit, double llr) const {
        st.u[st.depth] = bit;
        st.pm += penalty(llr, bit);
        c_at(st, mu_)[st.depth & 1] = bit;
        if (st.depth & 1) propagate(st, mu_, st.depth);
        ++st.depth;
    }

  private:
    double f(double a, double b) const {
        if (exact_) {
            // log((1+e^{a+b})/(e^a+e^b)) in a numerically stable form; the
            // correction terms are the probability-domain products the
            // max-log recursion drops.
            const double s = ((a < 0) != (b < 0)) ? -1.0 : 1.0;
            const double mag = std::min(std::abs(a), std::abs(b));
            const double out = s * mag + std::log1p(std::exp(-std::abs(a + b))) -
                               std::log1p(std::exp(-std::abs(a - b)));
            if (stats_) {
                stats_->multiplications += 2;
                stats_->additions += 3;
                stats_->comparisons += 1;
            }
            return out;
        }
        const double s = ((a < 0) != (b < 0)) ? -1.0 : 1.0;
        if (stats_) stats_->comparisons += 1;
        return s * std::min(std::abs(a), std::abs(b));
    }

    double g(double a, double b, std::uint8_t u_bit) const {
        if (stats_) stats_->additions += 1;
        return u_bit ? b - a : b + a;
    }

    double penalty(double llr, std::uint8_t bit) const {
        if (exact_) {
            const double x = bit ? -llr : llr;
            if (stats_) {
                stats_->multiplications += 1;
                stats_->additions += 1;
            }
            return -std::log1p(std::exp(-x));
        }
        if (stats_) stats_->comparisons += 1;
        const bool disagree = bit ? llr > 0.0 : llr < 0.0;
        if (!disagree) return 0.0;
        if (stats_) stats_->additions += 1;
        return -std::abs(llr);
    }

    double* llr_at(PathState& st, int lambda) const { return st.llr.data() + llr_offset_[lambda]; }
    std::uint8_t* c_at(PathState& st, int lambda) const { return st.c.data() + c_offset_[lambda]; }

    void compute(PathState& st, int lambda, int phase) const {
        if (lambda == 0) return;
        if ((phase & 1) == 0) compute(st, lambda - 1, phase >> 1);
        const int count = eta_ >> lambda;
        double* out = llr_at(st, lambda);
        const double* in = lambda == 1 ? channel_.data() : llr_at(st, lambda - 1);
        if ((phase & 1) == 0) {
            for (int b = 0; b < count; ++b) out[b] = f(in[2 * b], in[2 * b + 1]);
        } else {
            const std::uint8_t* sums = c_at(st, lambda);
            for (int b = 0; b < count; ++b) out[b] = g(in[2 * b], in[2 * b + 1], sums[2 * b]);
        }
    }

    void propagate(PathState& st, int lambda, int phase) const {
        if (lambda == 1) return; // nothing reads channel-level partial sums
        const int count = eta_ >> lambda;
        const int parent_phase = phase >> 1;
        const int slot = parent_phase & 1;
        const std::uint8_t* cur = c_at(st, lambda);
        std::uint8_t* below = c_at(st, lambda - 1);
        for (int b = 0; b < count; ++b) {
            below[2 * (2 * b) + slot] = cur[2 * b] ^ cur[2 * b + 1];
            below[2 * (2 * b + 1) + slot] = cur[2 * b + 1];
        }
        if (parent_phase & 1) propagate(st, lambda - 1, parent_phase);
    }

    int eta_;
    int mu_;
    const std::vector<double>& channel_;
    bool exact_;
    DecodeStats* stats_;
    std::vector<int> llr_offset_, c_offset_;
    int llr_size_ = 0, c_size_ = 0;
};

DecodeOutcome crc_outcome(const PolarCodeSpec& spec, const std::vector<std::uint8_t>& u) {
    if (spec.crc.length == 0) return DecodeOutcome::CrcPass;
    return crc_check(extract_info_bits(spec, u), spec.crc) ? DecodeOutcome::CrcPass
                                                           : DecodeOutcome::CrcFail;
}

struct PathOrder {
    // Ascending: *begin() is the worst path. Higher score wins, then longer
    // depth, then the lexicographically smaller prefix.
    bool operator()(const PathState* a, const PathState* b) const {
        if (a->score != b->score) return a->score < b->score;
        if (a->depth != b->depth) return a->depth < b->depth;
        return std::lexicographical_compare(b->u.begin(), b->u.begin() + b->depth, a->u.begin(),
                                            a->u.begin() + a->depth);
    }
};

DecodeResult decode_stack(const PolarCodeSpec& spec, const std::vector<double>& llrs,
                          int list_size, int capacity, bool exact, const BiasTable* bias) {
    if (list_size < 1) throw std::invalid_argument("polar decoder: list size must be >= 1");
    if (capacity <= 0) capacity = list_size * spec.eta;
    if (bias && static_cast<int>(bias->log_omega.size()) != spec.eta + 1)
        throw std::invalid_argument("polar decoder: bias table size mismatch");

    DecodeResult res;
    res.u.assign(spec.eta, 0);
    ScGraph graph(spec, llrs, exact, &res.stats);

    std::vector<std::unique_ptr<PathState>> pool;
    std::vector<PathState*> free_list;
    auto acquire = [&]() -> PathState* {
        if (!free_list.empty()) {
            PathState* p = free_list.back();
            free_list.pop_back();
            return p;
        }
        pool.push_back(std::make_unique<PathState>());
        return pool.back().get();
    };

    std::multiset<PathState*, PathOrder> queue;
    auto push = [&](PathState* p) {
        p->score = p->pm + (bias ? bias->log_omega[p->depth] : 0.0);
        queue.insert(p);
        if (static_cast<int>(queue.size()) > capacity) {
            auto worst = queue.begin();
            free_list.push_back(*worst);
            queue.erase(worst);
        }
    };

    std::vector<int> length_counts(spec.eta + 1, 0);
    int min_depth = 0;

    PathState* root = acquire();
    graph.init(*root);
    push(root);

    const std::uint64_t pop_cap =
        4ull * static_cast<std::uint64_t>(list_size) * spec.eta + 2ull * spec.eta;
    std::uint64_t advanced = 0;

    while (!queue.empty()) {
        auto best_it = std::prev(queue.end());
        PathState* best = *best_it;
        queue.erase(best_it);
        if (best->depth < min_depth) { // eliminated by the list rule
            free_list.push_back(best);
            continue;
        }
        if (best->depth == spec.eta) {
            res.u = best->u;
            res.stats.iterations = advanced;
            res.stats.outcome = crc_outcome(spec, res.u);
            return res;
        }
        if (++advanced > pop_cap) break;

        const double llr = graph.decision_llr(*best);
        const int child_depth = best->depth + 1;
        if (spec.is_frozen[best->depth]) {
            graph.apply_decision(*best, 0, llr);
            if (bias) res.stats.additions += 1; // score bias add
            push(best);
        } else {
            PathState* sibling = acquire();
            *sibling = *best;
            graph.apply_decision(*best, 0, llr);
            graph.apply_decision(*sibling, 1, llr);
            if (bias) res.stats.additions += 2;
            push(best);
            push(sibling);
        }
        length_counts[child_depth] += spec.is_frozen[child_depth - 1] ? 1 : 2;
        if (length_counts[child_depth] >= list_size && child_depth > min_depth)
            min_depth = child_depth;
    }

    res.stats.iterations = advanced;
    res.stats.outcome = DecodeOutcome::StackExhausted;
    return res;
}

} // namespace

BiasTable make_bias_table(const PolarCodeSpec& spec, double v) {
    if (v <= 0.0) throw std::invalid_argument("make_bias_table: v must be positive");
    BiasTable table;
    table.error_prob = ga_error_probs(spec.eta, 2.0 / v);
    table.log_omega.assign(spec.eta + 1, 0.0);
    for (int i = spec.eta - 1; i >= 0; --i) {
        double term = 0.0;
        if (spec.is_frozen[i])
            term = std::log1p(-std::min(table.error_prob[i], 1.0 - 1e-12));
        table.log_omega[i] = table.log_omega[i + 1] + term;
    }
    return table;
}

DecodeResult decode_sc(const PolarCodeSpec& spec, const std::vector<double>& llrs) {
    DecodeResult res;
    ScGraph graph(spec, llrs, /*exact=*/true, &res.stats);
    PathState st;
    graph.init(st);
    for (int phase = 0; phase < spec.eta; ++phase) {
        const double llr = graph.decision_llr(st);
        std::uint8_t bit = 0;
        if (!spec.is_frozen[phase]) bit = llr < 0.0 ? 1 : 0;
        graph.apply_decision(st, bit, llr);
    }
    res.u = st.u;
    res.stats.iterations = spec.eta;
    res.stats.outcome = crc_outcome(spec, res.u);
    return res;
}

DecodeResult decode_scs(const PolarCodeSpec& spec, const std::vector<double>& llrs, int list_size,
                        int capacity) {
    return decode_stack(spec, llrs, list_size, capacity, /*exact=*/true, nullptr);
}

DecodeResult decode_sequential(const PolarCodeSpec& spec, const std::vector<double>& llrs,
                               const BiasTable& bias, int list_size, int capacity) {
    return decode_stack(spec, llrs, list_size, capacity, /*exact=*/false, &bias);
}

} // namespace mimosim
