#include "mimosim/harness.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mimosim/channel.hpp"
#include "mimosim/complexity.hpp"
#include "mimosim/demapper.hpp"
#include "mimosim/polar_code.hpp"
#include "mimosim/polar_decoder.hpp"
#include "mimosim/rng.hpp"

namespace mimosim {

namespace {

constexpr std::uint64_t kBatchSize = 64;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Deterministic parallel map over trial batches. Batches are computed by a
// worker pool but consumed strictly in index order, so aggregate results and
// the early-stop decision are independent of the thread count.
template <typename Result>
void run_batches(std::uint64_t total_trials, int threads,
                 const std::function<Result(std::uint64_t, std::uint64_t)>& worker,
                 const std::function<bool(const Result&, std::uint64_t)>& consume) {
    const std::uint64_t n_batches = (total_trials + kBatchSize - 1) / kBatchSize;
    if (n_batches == 0) return;

    std::vector<std::optional<Result>> results(n_batches);
    std::vector<char> ready(n_batches, 0);
    std::mutex mtx;
    std::condition_variable cv;
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> limit{n_batches};
    std::exception_ptr error;

    auto work = [&] {
        while (true) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= std::min<std::uint64_t>(n_batches, limit.load())) return;
            const std::uint64_t first = b * kBatchSize;
            const std::uint64_t count = std::min<std::uint64_t>(kBatchSize, total_trials - first);
            try {
                Result r = worker(first, count);
                std::lock_guard<std::mutex> lk(mtx);
                results[b] = std::move(r);
                ready[b] = 1;
            } catch (...) {
                std::lock_guard<std::mutex> lk(mtx);
                if (!error) error = std::current_exception();
                limit.store(0);
                std::fill(ready.begin(), ready.end(), 1);
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    const int n_threads = std::max(1, threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);

    for (std::uint64_t b = 0; b < n_batches; ++b) {
        std::unique_lock<std::mutex> lk(mtx);
        cv.wait(lk, [&] { return ready[b] != 0; });
        if (error) break;
        Result r = std::move(*results[b]);
        results[b].reset();
        lk.unlock();
        const std::uint64_t first = b * kBatchSize;
        const std::uint64_t count = std::min<std::uint64_t>(kBatchSize, total_trials - first);
        if (!consume(r, count)) {
            limit.store(b);
            break;
        }
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::pair<std::string, std::string>> common_meta(const SimConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("experiment", experiment_name(cfg.experiment));
    meta.emplace_back("n", std::to_string(cfg.n_rx));
    meta.emplace_back("k", std::to_string(cfg.n_tx));
    meta.emplace_back("mod", std::to_string(cfg.mod_order));
    meta.emplace_back("tmax", std::to_string(cfg.t_max));
    meta.emplace_back("zeta", fmt(cfg.zeta));
    meta.emplace_back("psi", fmt(cfg.psi));
    meta.emplace_back("phi", fmt(cfg.rician_phi));
    meta.emplace_back("gamma", fmt(cfg.gamma));
    meta.emplace_back("seed", std::to_string(cfg.seed));
    meta.emplace_back("trials_cap", std::to_string(cfg.trials));
    meta.emplace_back("stop_errors", std::to_string(cfg.stop_errors));
    return meta;
}

struct DetCounters {
    std::uint64_t bit_errors = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t iterations = 0;
    std::uint64_t add = 0, cmp = 0, mul = 0;
};

// One uncoded Monte-Carlo point shared by ber-sim and the ber-approx overlay.
std::vector<PointStats> simulate_uncoded_point(const SimConfig& cfg, int n_rx, int n_tx,
                                               double snr_db, std::uint64_t stream,
                                               const std::vector<DetectorConfig>& dcfgs) {
    const Constellation cons = make_constellation(cfg.mod_order, n_tx);
    const int m = cons.bits_per_symbol;
    const double sigma2 = snr_db_to_noise_variance(snr_db);
    const std::size_t n_det = dcfgs.size();

    auto worker = [&](std::uint64_t first, std::uint64_t count) {
        std::vector<DetCounters> acc(n_det);
        for (std::uint64_t t = first; t < first + count; ++t) {
            Rng trng(derive_seed(cfg.seed, stream, t));
            const std::uint64_t s_chan = trng.next_u64();
            const std::uint64_t s_bits = trng.next_u64();
            const std::uint64_t s_noise = trng.next_u64();
            ChannelRealization chan =
                draw_channel(n_rx, n_tx, cfg.psi, cfg.rician_phi, cfg.gamma, s_chan);
            const std::vector<std::uint8_t> bits = random_bits(n_tx * m, s_bits);
            const TransmitFrame frame = transmit(bits, cons, chan, sigma2, s_noise);
            for (std::size_t d = 0; d < n_det; ++d) {
                const DetectionResult res =
                    detect(frame.received, chan.h_hat, sigma2, cons, dcfgs[d]);
                std::uint64_t errs = 0;
                for (std::size_t i = 0; i < bits.size(); ++i)
                    errs += bits[i] != res.hard_bits[i];
                acc[d].bit_errors += errs;
                acc[d].frame_errors += errs > 0;
                acc[d].iterations += res.iterations_used;
                acc[d].mul += res.flop_count;
            }
        }
        return acc;
    };

    std::vector<PointStats> stats(n_det);
    for (std::size_t d = 0; d < n_det; ++d) {
        stats[d].snr_db = snr_db;
        stats[d].label = detector_name(dcfgs[d].variant);
    }
    auto consume = [&](const std::vector<DetCounters>& batch, std::uint64_t count) {
        std::uint64_t min_err = UINT64_MAX;
        for (std::size_t d = 0; d < n_det; ++d) {
            stats[d].trials += count;
            stats[d].total_bits += count * static_cast<std::uint64_t>(n_tx) * m;
            stats[d].bit_errors += batch[d].bit_errors;
            stats[d].frame_errors += batch[d].frame_errors;
            stats[d].iteration_sum += batch[d].iterations;
            stats[d].mul_sum += batch[d].mul;
            min_err = std::min(min_err, stats[d].bit_errors);
        }
        return cfg.stop_errors == 0 || min_err < cfg.stop_errors;
    };
    run_batches<std::vector<DetCounters>>(cfg.trials, resolve_threads(cfg.threads), worker,
                                          consume);
    return stats;
}

std::vector<DetectorConfig> detector_configs(const SimConfig& cfg) {
    std::vector<DetectorConfig> dcfgs;
    for (std::size_t i = 0; i < cfg.detectors.size(); ++i) {
        DetectorConfig d;
        d.variant = cfg.detectors[i];
        d.t_max = cfg.t_max;
        d.zeta = cfg.zeta;
        d.exact_sigma = cfg.exact_sigma;
        dcfgs.push_back(d);
    }
    return dcfgs;
}

} // namespace

Experiment experiment_from_name(const std::string& name) {
    if (name == "ber-sim") return Experiment::BerSim;
    if (name == "ber-approx") return Experiment::BerApprox;
    if (name == "fer-sim") return Experiment::FerSim;
    if (name == "complexity") return Experiment::Complexity;
    if (name == "correlation") return Experiment::Correlation;
    throw ConfigError("unknown experiment: " + name);
}

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::BerSim: return "ber-sim";
        case Experiment::BerApprox: return "ber-approx";
        case Experiment::FerSim: return "fer-sim";
        case Experiment::Complexity: return "complexity";
        case Experiment::Correlation: return "correlation";
    }
    return "?";
}

double PointStats::ci95_halfwidth(bool frame_stat) const {
    const double n = frame_stat ? double(trials) : double(total_bits);
    if (n <= 0) return 0.0;
    const std::uint64_t e = frame_stat ? frame_errors : bit_errors;
    if (e == 0) return 3.0 / n; // rule-of-three upper bound
    const double p = double(e) / n;
    return 1.96 * std::sqrt(p * (1.0 - p) / n);
}

void validate_config(const SimConfig& cfg) {
    if (cfg.n_tx < 1 || cfg.n_rx < cfg.n_tx)
        throw ConfigError("require N >= K >= 1");
    if (cfg.mod_order != 4 && cfg.mod_order != 16 && cfg.mod_order != 64)
        throw ConfigError("mod must be 4, 16 or 64");
    if (cfg.t_max < 1) throw ConfigError("tmax must be >= 1");
    if (cfg.zeta <= 0.0) throw ConfigError("zeta must be positive");
    if (cfg.psi < 0.0 || cfg.psi >= 1.0) throw ConfigError("psi must be in [0,1)");
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
    if (cfg.rician_phi < 0.0) throw ConfigError("phi must be nonnegative");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.snr_db.empty()) throw ConfigError("at least one SNR point required");
    if (cfg.detectors.empty()) throw ConfigError("at least one detector required");
    if (cfg.list_size < 1) throw ConfigError("list size must be >= 1");
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");

    for (DetectorVariant v : cfg.detectors)
        if (v == DetectorVariant::Ml &&
            std::pow(double(cfg.mod_order), cfg.n_tx) > double(1 << 20))
            throw ConfigError("ml detector: M^K exceeds 2^20");

    switch (cfg.experiment) {
        case Experiment::FerSim:
            if (cfg.code_spec_path.empty()) throw ConfigError("fer-sim requires --code-spec");
            if (cfg.decoder != "sc" && cfg.decoder != "scs" && cfg.decoder != "seq")
                throw ConfigError("decoder must be sc, scs or seq");
            break;
        case Experiment::BerApprox: {
            const DetectorVariant v = cfg.detectors.front();
            if (v != DetectorVariant::BPicDsc && v != DetectorVariant::IbPicDsc)
                throw ConfigError("ber-approx supports b-pic-dsc and ib-pic-dsc");
            for (double a : cfg.alphas)
                if (a <= 0.0 || a > 1.0) throw ConfigError("alpha values must be in (0,1]");
            break;
        }
        case Experiment::Correlation: {
            if (cfg.snr_db.size() != 1)
                throw ConfigError("correlation runs a single SNR point");
            const DetectorVariant v = cfg.detectors.front();
            if (v != DetectorVariant::BPicDsc && v != DetectorVariant::IbPicDsc &&
                v != DetectorVariant::PicDsc)
                throw ConfigError("correlation requires an iterative detector");
            break;
        }
        default: break;
    }
}

SweepResult run_ber_sim(const SimConfig& cfg) {
    validate_config(cfg);
    SweepResult out;
    out.schema = "sweep.ber.v1";
    out.meta = common_meta(cfg);
    const std::vector<DetectorConfig> dcfgs = detector_configs(cfg);
    for (std::size_t p = 0; p < cfg.snr_db.size(); ++p) {
        std::vector<PointStats> pts =
            simulate_uncoded_point(cfg, cfg.n_rx, cfg.n_tx, cfg.snr_db[p], p, dcfgs);
        out.points.insert(out.points.end(), pts.begin(), pts.end());
    }
    return out;
}

ApproxResult run_ber_approx(const SimConfig& cfg) {
    validate_config(cfg);
    ApproxResult out;
    out.schema = "ber-approx.v1";
    out.meta = common_meta(cfg);
    const EvolutionVariant variant = cfg.detectors.front() == DetectorVariant::IbPicDsc
                                         ? EvolutionVariant::Ib
                                         : EvolutionVariant::B;
    std::uint64_t stream = 0;
    for (double snr : cfg.snr_db) {
        const double sigma2 = snr_db_to_noise_variance(snr);
        std::vector<int> k_grid;
        if (cfg.alphas.empty()) {
            k_grid.push_back(cfg.n_tx);
        } else {
            for (double a : cfg.alphas)
                k_grid.push_back(std::max(1, static_cast<int>(std::lround(a * cfg.n_rx))));
        }
        for (int k : k_grid) {
            const Constellation cons = make_constellation(cfg.mod_order, k);
            const EvolutionResult evo =
                run_evolution(cfg.n_rx, k, sigma2, variant, cons, cfg.zeta);
            ApproxPoint pt;
            pt.snr_db = snr;
            pt.alpha = static_cast<double>(k) / cfg.n_rx;
            pt.n_rx = cfg.n_rx;
            pt.n_tx = k;
            pt.v = evo.v;
            pt.evolution_iterations = evo.iterations;
            pt.converged = evo.converged;
            pt.ber_ap = evo.ber;
            if (cfg.overlay_sim) {
                const std::vector<PointStats> sim = simulate_uncoded_point(
                    cfg, cfg.n_rx, k, snr, 4096 + stream, {detector_configs(cfg).front()});
                pt.ber_sim = sim.front().ber();
                pt.sim_trials = sim.front().trials;
            }
            out.points.push_back(pt);
            ++stream;
        }
    }
    return out;
}

SweepResult run_fer_sim(const SimConfig& cfg) {
    validate_config(cfg);
    SweepResult out;
    out.schema = "sweep.fer.v1";
    out.meta = common_meta(cfg);
    out.meta.emplace_back("decoder", cfg.decoder);
    out.meta.emplace_back("list_size", std::to_string(cfg.list_size));

    const Constellation cons = make_constellation(cfg.mod_order, cfg.n_tx);
    const int m = cons.bits_per_symbol;
    const DetectorConfig dcfg = detector_configs(cfg).front();
    const EvolutionVariant evar = dcfg.variant == DetectorVariant::IbPicDsc
                                      ? EvolutionVariant::Ib
                                      : EvolutionVariant::B;

    for (std::size_t p = 0; p < cfg.snr_db.size(); ++p) {
        const double snr = cfg.snr_db[p];
        const double sigma2 = snr_db_to_noise_variance(snr);
        const EvolutionResult evo =
            run_evolution(cfg.n_rx, cfg.n_tx, sigma2, evar, cons, cfg.zeta);
        const PolarCodeSpec spec = load_code_spec(cfg.code_spec_path, evo.v);
        if (spec.eta % (m * cfg.n_tx) != 0)
            throw ConfigError("fer-sim: eta must be a multiple of m*K");
        const int theta = spec.eta / (m * cfg.n_tx);
        const BiasTable bias = make_bias_table(spec, evo.v);

        PointStats stats;
        stats.snr_db = snr;
        stats.label = std::string(detector_name(dcfg.variant)) + "+" + cfg.decoder;

        auto worker = [&](std::uint64_t first, std::uint64_t count) {
            DetCounters acc;
            std::vector<double> llr_full(spec.eta);
            for (std::uint64_t t = first; t < first + count; ++t) {
                Rng trng(derive_seed(cfg.seed, p, t));
                const std::vector<std::uint8_t> payload =
                    random_bits(spec.payload_bits(), trng.next_u64());
                const std::vector<std::uint8_t> info = crc_attach(payload, spec.crc);
                const std::vector<std::uint8_t> u = place_info_bits(spec, info);
                const std::vector<std::uint8_t> code = polar_encode(spec, u);
                const std::vector<std::uint8_t> inter = interleave(code, spec.interleaver_seed);

                for (int slot = 0; slot < theta; ++slot) {
                    const std::vector<std::uint8_t> slot_bits(
                        inter.begin() + slot * m * cfg.n_tx,
                        inter.begin() + (slot + 1) * m * cfg.n_tx);
                    ChannelRealization chan = draw_channel(
                        cfg.n_rx, cfg.n_tx, cfg.psi, cfg.rician_phi, cfg.gamma, trng.next_u64());
                    const TransmitFrame frame =
                        transmit(slot_bits, cons, chan, sigma2, trng.next_u64());
                    const DetectionResult det =
                        detect(frame.received, chan.h_hat, sigma2, cons, dcfg);
                    const std::vector<double> llrs =
                        demap_llr(det.soft_symbols, det.soft_variances, cons);
                    std::copy(llrs.begin(), llrs.end(), llr_full.begin() + slot * m * cfg.n_tx);
                }
                const std::vector<double> r = deinterleave(llr_full, spec.interleaver_seed);

                DecodeResult dec;
                if (cfg.decoder == "sc") dec = decode_sc(spec, r);
                else if (cfg.decoder == "scs") dec = decode_scs(spec, r, cfg.list_size);
                else dec = decode_sequential(spec, r, bias, cfg.list_size);

                const std::vector<std::uint8_t> got = extract_info_bits(spec, dec.u);
                std::uint64_t errs = 0;
                for (int i = 0; i < spec.payload_bits(); ++i) errs += got[i] != payload[i];
                const bool fail =
                    dec.stats.outcome == DecodeOutcome::StackExhausted || errs > 0;
                acc.bit_errors += errs;
                acc.frame_errors += fail;
                acc.iterations += dec.stats.iterations;
                acc.add += dec.stats.additions;
                acc.cmp += dec.stats.comparisons;
                acc.mul += dec.stats.multiplications;
            }
            return acc;
        };
        auto consume = [&](const DetCounters& batch, std::uint64_t count) {
            stats.trials += count;
            stats.total_bits += count * static_cast<std::uint64_t>(spec.payload_bits());
            stats.bit_errors += batch.bit_errors;
            stats.frame_errors += batch.frame_errors;
            stats.iteration_sum += batch.iterations;
            stats.add_sum += batch.add;
            stats.cmp_sum += batch.cmp;
            stats.mul_sum += batch.mul;
            return cfg.stop_errors == 0 || stats.frame_errors < cfg.stop_errors;
        };
        run_batches<DetCounters>(cfg.trials, resolve_threads(cfg.threads), worker, consume);
        out.points.push_back(stats);
    }
    return out;
}

CorrelationResult run_correlation(const SimConfig& cfg) {
    validate_config(cfg);
    CorrelationResult out;
    out.schema = "correlation.v1";
    out.meta = common_meta(cfg);
    out.snr_db = cfg.snr_db.front();
    DetectorConfig dcfg = detector_configs(cfg).front();
    dcfg.collect_trace = true;
    dcfg.zeta = 1e-300; // trace the full iteration budget
    out.label = detector_name(dcfg.variant);

    const Constellation cons = make_constellation(cfg.mod_order, cfg.n_tx);
    const int m = cons.bits_per_symbol;
    const double sigma2 = snr_db_to_noise_variance(out.snr_db);

    struct Sums {
        std::uint64_t n = 0;
        double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    };
    using Batch = std::vector<Sums>; // index t-2

    auto worker = [&](std::uint64_t first, std::uint64_t count) {
        Batch acc(std::max(0, cfg.t_max - 1));
        for (std::uint64_t t = first; t < first + count; ++t) {
            Rng trng(derive_seed(cfg.seed, 0, t));
            const std::uint64_t s_chan = trng.next_u64();
            const std::uint64_t s_bits = trng.next_u64();
            const std::uint64_t s_noise = trng.next_u64();
            ChannelRealization chan = draw_channel(cfg.n_rx, cfg.n_tx, cfg.psi, cfg.rician_phi,
                                                   cfg.gamma, s_chan);
            const std::vector<std::uint8_t> bits = random_bits(cfg.n_tx * m, s_bits);
            const TransmitFrame frame = transmit(bits, cons, chan, sigma2, s_noise);
            const DetectionResult res = detect(frame.received, chan.h_hat, sigma2, cons, dcfg);
            for (std::size_t i = 1; i < res.trace.size(); ++i) {
                Sums& s = acc[i - 1];
                const CVector& a = res.trace[i].x_hat;
                const CVector& b = res.trace[i - 1].x_hat;
                for (int k = 0; k < a.size(); ++k) {
                    for (double pair[2] : {std::array<double, 2>{a(k).real(), b(k).real()},
                                           std::array<double, 2>{a(k).imag(), b(k).imag()}}) {
                        s.n += 1;
                        s.sa += pair[0];
                        s.sb += pair[1];
                        s.sab += pair[0] * pair[1];
                        s.saa += pair[0] * pair[0];
                        s.sbb += pair[1] * pair[1];
                    }
                }
            }
        }
        return acc;
    };

    Batch total(std::max(0, cfg.t_max - 1));
    auto consume = [&](const Batch& batch, std::uint64_t) {
        for (std::size_t i = 0; i < total.size(); ++i) {
            total[i].n += batch[i].n;
            total[i].sa += batch[i].sa;
            total[i].sb += batch[i].sb;
            total[i].sab += batch[i].sab;
            total[i].saa += batch[i].saa;
            total[i].sbb += batch[i].sbb;
        }
        return true;
    };
    run_batches<Batch>(cfg.trials, resolve_threads(cfg.threads), worker, consume);

    for (std::size_t i = 0; i < total.size(); ++i) {
        CorrelationRow row;
        row.iteration = static_cast<int>(i) + 2;
        row.samples = total[i].n;
        if (total[i].n > 1) {
            const double n = double(total[i].n);
            const double cov = total[i].sab - total[i].sa * total[i].sb / n;
            const double va = total[i].saa - total[i].sa * total[i].sa / n;
            const double vb = total[i].sbb - total[i].sb * total[i].sb / n;
            if (va > 0.0 && vb > 0.0) row.correlation = cov / std::sqrt(va * vb);
        }
        out.rows.push_back(row);
    }
    return out;
}

ComplexityResult run_complexity(const SimConfig& cfg) {
    validate_config(cfg);
    ComplexityResult out;
    out.schema = "complexity.v1";
    out.meta = common_meta(cfg);
    for (const std::string& name : complexity_detectors()) {
        ComplexitySpec spec;
        spec.detector = name;
        spec.n = cfg.n_rx;
        spec.k = cfg.n_tx;
        spec.m = cfg.mod_order;
        spec.t = cfg.t_max;
        spec.c = cfg.dep_clusters;
        spec.n_c = std::max<std::int64_t>(1, cfg.n_rx / cfg.dep_clusters);
        out.rows.push_back(
            {name, spec.n, spec.k, spec.m, spec.t, multiplication_count(spec)});
    }
    return out;
}

namespace {

void append_meta(std::ostringstream& os, const std::string& schema,
                 const std::vector<std::pair<std::string, std::string>>& meta) {
    os << "# schema=" << schema << "\n";
    for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
}

} // namespace

std::string to_csv(const SweepResult& r) {
    std::ostringstream os;
    append_meta(os, r.schema, r.meta);
    const bool frame_stat = r.schema == "sweep.fer.v1";
    os << "snr_db,detector,trials,bit_errors,ber,frame_errors,fer,avg_iterations,"
          "avg_flops_add,avg_flops_cmp,avg_flops_mul,ci95_halfwidth\n";
    for (const PointStats& p : r.points) {
        os << fmt(p.snr_db) << ',' << p.label << ',' << p.trials << ',' << p.bit_errors << ','
           << fmt(p.ber()) << ',' << p.frame_errors << ',' << fmt(p.fer()) << ','
           << fmt(p.avg_iterations()) << ',' << fmt(p.avg_add()) << ',' << fmt(p.avg_cmp())
           << ',' << fmt(p.avg_mul()) << ',' << fmt(p.ci95_halfwidth(frame_stat)) << "\n";
    }
    return os.str();
}

std::string to_csv(const ApproxResult& r) {
    std::ostringstream os;
    append_meta(os, r.schema, r.meta);
    os << "snr_db,alpha,n,k,v,evo_iterations,converged,ber_ap,ber_sim,sim_trials\n";
    for (const ApproxPoint& p : r.points) {
        os << fmt(p.snr_db) << ',' << fmt(p.alpha) << ',' << p.n_rx << ',' << p.n_tx << ','
           << fmt(p.v) << ',' << p.evolution_iterations << ',' << (p.converged ? 1 : 0) << ','
           << fmt(p.ber_ap) << ',';
        if (p.ber_sim) os << fmt(*p.ber_sim);
        os << ',' << p.sim_trials << "\n";
    }
    return os.str();
}

std::string to_csv(const CorrelationResult& r) {
    std::ostringstream os;
    append_meta(os, r.schema, r.meta);
    os << "iteration,samples,correlation\n";
    for (const CorrelationRow& row : r.rows) {
        os << row.iteration << ',' << row.samples << ',';
        if (row.correlation) os << fmt(*row.correlation);
        else os << "null";
        os << "\n";
    }
    return os.str();
}

std::string to_csv(const ComplexityResult& r) {
    std::ostringstream os;
    append_meta(os, r.schema, r.meta);
    os << "detector,n,k,m,t,multiplications\n";
    for (const ComplexityRow& row : r.rows)
        os << row.detector << ',' << row.n << ',' << row.k << ',' << row.m << ',' << row.t << ','
           << row.multiplications << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
}

std::string run_experiment(const SimConfig& cfg) {
    std::string csv;
    switch (cfg.experiment) {
        case Experiment::BerSim: csv = to_csv(run_ber_sim(cfg)); break;
        case Experiment::BerApprox: csv = to_csv(run_ber_approx(cfg)); break;
        case Experiment::FerSim: csv = to_csv(run_fer_sim(cfg)); break;
        case Experiment::Complexity: csv = to_csv(run_complexity(cfg)); break;
        case Experiment::Correlation: csv = to_csv(run_correlation(cfg)); break;
    }
    if (!cfg.out_path.empty()) write_file(cfg.out_path, csv);
    return csv;
}

SimConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    SimConfig cfg;
    if (j.contains("experiment")) cfg.experiment = experiment_from_name(j["experiment"]);
    cfg.n_rx = j.value("n", cfg.n_rx);
    cfg.n_tx = j.value("k", cfg.n_tx);
    cfg.mod_order = j.value("mod", cfg.mod_order);
    if (j.contains("detector")) {
        cfg.detectors.clear();
        if (j["detector"].is_string())
            cfg.detectors.push_back(detector_from_name(j["detector"]));
        else
            for (const auto& d : j["detector"]) cfg.detectors.push_back(detector_from_name(d));
    }
    cfg.decoder = j.value("decoder", cfg.decoder);
    cfg.t_max = j.value("tmax", cfg.t_max);
    cfg.zeta = j.value("zeta", cfg.zeta);
    cfg.psi = j.value("psi", cfg.psi);
    cfg.rician_phi = j.value("phi", cfg.rician_phi);
    cfg.gamma = j.value("gamma", cfg.gamma);
    if (j.contains("snr")) cfg.snr_db = j["snr"].get<std::vector<double>>();
    cfg.trials = j.value("trials", cfg.trials);
    cfg.stop_errors = j.value("stop_errors", cfg.stop_errors);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.code_spec_path = j.value("code_spec", cfg.code_spec_path);
    cfg.list_size = j.value("list_size", cfg.list_size);
    cfg.out_path = j.value("out", cfg.out_path);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.exact_sigma = j.value("exact_sigma", cfg.exact_sigma);
    if (j.contains("alpha")) cfg.alphas = j["alpha"].get<std::vector<double>>();
    cfg.overlay_sim = j.value("overlay_sim", cfg.overlay_sim);
    cfg.dep_clusters = j.value("dep_clusters", cfg.dep_clusters);
    return cfg;
}

} // namespace mimosim
