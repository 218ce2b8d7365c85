#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "container.hpp"
#include "mbr.hpp"
#include "msr.hpp"

namespace ecrg {

// Counter-based generator keyed by (master seed, grid point, trial), so every
// trial draws an independent, order-free stream and sweeps are reproducible
// bit for bit regardless of execution order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
        state_ = mix(seed ^ mix(point + 0x9E3779B97F4A7C15ull) ^ mix(trial + 0xD1B54A32D192ED03ull));
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
};

enum class CorruptionKind { full_share, per_symbol };

struct SimConfig {
    Scheme scheme = Scheme::msr;
    std::size_t n = 20, k = 10, d = 18;
    unsigned m = 5;
    Elem gamma = 1;
    std::vector<double> p_grid;
    std::size_t runs = 1000;
    std::uint64_t master_seed = 1;
    CorruptionKind corruption = CorruptionKind::full_share;
    double symbol_rate = 0.5;  // per-symbol mode only
};

struct TrialOutcome {
    bool success = false;
    std::size_t nodes_accessed = 0;
    std::size_t byzantine_count = 0;
};

struct SweepRow {
    double p = 0;
    double failure_rate = 0;
    double avg_accesses = 0;
    double avg_byzantine = 0;
};

// Byzantine answer model. Full-share mode replaces the whole share with
// uniform symbols (resampled once if the draw equals the original);
// per-symbol mode replaces each symbol independently with the given rate.
inline std::vector<Elem> corrupt_share(std::span<const Elem> share, CounterRng& rng,
                                       CorruptionKind kind, double rate, unsigned m) {
    const auto mask = static_cast<Elem>((1u << m) - 1);
    std::vector<Elem> out(share.begin(), share.end());
    if (kind == CorruptionKind::full_share) {
        for (int attempt = 0; attempt < 2; ++attempt) {
            for (auto& s : out) s = static_cast<Elem>(rng.below(mask + 1ull));
            if (!std::equal(out.begin(), out.end(), share.begin())) break;
        }
        return out;
    }
    for (auto& s : out)
        if (rng.next_unit() < rate) s = static_cast<Elem>(rng.below(mask + 1ull));
    return out;
}

// Owns the built code and runs seeded trials against it.
class SimEngine {
  public:
    explicit SimEngine(SimConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.runs == 0) throw InvalidParameter("runs must be at least 1");
        if (cfg_.p_grid.empty()) throw InvalidParameter("empty probability grid");
        for (double p : cfg_.p_grid)
            if (p < 0.0 || p > 1.0) throw InvalidParameter("failure probability must be in [0,1]");
        if (cfg_.scheme == Scheme::msr) {
            msr_params_ = msr_params_new(cfg_.n, cfg_.k, cfg_.m, cfg_.gamma);
            if (cfg_.d != msr_params_->d) throw InvalidParameter("MSR requires d = 2k - 2");
            msr_gen_ = msr_build_generator(*msr_params_);
            message_len_ = msr_params_->message_len;
            share_len_ = msr_params_->alpha;
        } else {
            mbr_params_ = mbr_params_new(cfg_.n, cfg_.k, cfg_.d, cfg_.m);
            mbr_gen_ = mbr_build_generator(*mbr_params_);
            message_len_ = mbr_params_->message_len;
            share_len_ = mbr_params_->alpha;
        }
        const std::size_t capacity = message_len_ * cfg_.m / 8;
        if (capacity <= frame_overhead)
            throw InvalidParameter("codeword too small to carry a CRC-framed payload");
        payload_len_ = capacity - frame_overhead;
    }

    const SimConfig& config() const { return cfg_; }

    TrialOutcome run_trial(std::size_t point_index, std::size_t trial_index) const {
        const double p = cfg_.p_grid.at(point_index);
        CounterRng rng(cfg_.master_seed, point_index, trial_index);

        std::vector<std::uint8_t> byz(cfg_.n, 0);
        std::size_t byz_count = 0;
        for (std::size_t i = 0; i < cfg_.n; ++i)
            if (rng.next_unit() < p) {
                byz[i] = 1;
                ++byz_count;
            }

        std::vector<std::uint8_t> payload(payload_len_);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(256));
        const auto framed = frame_with_crc(payload);
        std::vector<Elem> message = pack_symbols(framed, cfg_.m);
        message.resize(message_len_, 0);

        std::vector<std::optional<std::vector<Elem>>> canned(cfg_.n);
        if (cfg_.scheme == Scheme::msr) {
            const auto shares = msr_encode(*msr_params_, *msr_gen_, message);
            for (std::size_t i = 0; i < cfg_.n; ++i) canned[i] = shares[i].symbols;
        } else {
            const auto shares = mbr_encode(*mbr_params_, *mbr_gen_, message);
            for (std::size_t i = 0; i < cfg_.n; ++i) canned[i] = shares[i].symbols;
        }
        for (std::size_t i = 0; i < cfg_.n; ++i)
            if (byz[i]) canned[i] = corrupt_share(*canned[i], rng, cfg_.corruption, cfg_.symbol_rate, cfg_.m);

        std::vector<std::size_t> order(cfg_.n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = cfg_.n; i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);

        MemoryOracle oracle(std::move(canned));
        const auto integrity = crc_framed_integrity(cfg_.m, payload_len_);
        std::optional<ReconstructResult> res;
        if (cfg_.scheme == Scheme::msr)
            res = msr_reconstruct(*msr_params_, *msr_gen_, oracle, integrity, order);
        else
            res = mbr_reconstruct(*mbr_params_, *mbr_gen_, oracle, integrity, order);

        TrialOutcome out;
        out.byzantine_count = byz_count;
        out.success = res.has_value() && res->message == message;
        out.nodes_accessed = res ? res->nodes_accessed : oracle.fetch_count();
        return out;
    }

    std::vector<SweepRow> run_sweep() const {
        std::vector<SweepRow> rows;
        rows.reserve(cfg_.p_grid.size());
        for (std::size_t pt = 0; pt < cfg_.p_grid.size(); ++pt) {
            SweepRow row;
            row.p = cfg_.p_grid[pt];
            std::size_t failures = 0, accesses = 0, byz = 0;
            for (std::size_t t = 0; t < cfg_.runs; ++t) {
                const TrialOutcome o = run_trial(pt, t);
                failures += o.success ? 0 : 1;
                accesses += o.nodes_accessed;
                byz += o.byzantine_count;
            }
            const auto runs = static_cast<double>(cfg_.runs);
            row.failure_rate = static_cast<double>(failures) / runs;
            row.avg_accesses = static_cast<double>(accesses) / runs;
            row.avg_byzantine = static_cast<double>(byz) / runs;
            rows.push_back(row);
        }
        return rows;
    }

  private:
    SimConfig cfg_;
    std::optional<MsrParams> msr_params_;
    std::optional<MsrGenerator> msr_gen_;
    std::optional<MbrParams> mbr_params_;
    std::optional<MbrGenerator> mbr_gen_;
    std::size_t message_len_ = 0;
    std::size_t share_len_ = 0;
    std::size_t payload_len_ = 0;
};

inline std::string sweep_csv(const SimConfig& cfg, std::span<const SweepRow> rows) {
    std::string out = "p,failure_rate,avg_accesses,avg_byzantine,runs,scheme,n,k,d,m,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,%.6f,%zu,%s,%zu,%zu,%zu,%u,%llu\n", r.p,
                      r.failure_rate, r.avg_accesses, r.avg_byzantine, cfg.runs, scheme_name(cfg.scheme),
                      cfg.n, cfg.k, cfg.d, cfg.m, static_cast<unsigned long long>(cfg.master_seed));
        out += buf;
    }
    return out;
}

inline std::string sweep_json(const SimConfig& cfg, std::span<const SweepRow> rows) {
    std::string out = "{\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "  \"scheme\": \"%s\", \"n\": %zu, \"k\": %zu, \"d\": %zu, \"m\": %u,"
                  " \"runs\": %zu, \"seed\": %llu,\n",
                  scheme_name(cfg.scheme), cfg.n, cfg.k, cfg.d, cfg.m, cfg.runs,
                  static_cast<unsigned long long>(cfg.master_seed));
    out += buf;
    out += "  \"rows\": [\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "    {\"p\": %g, \"failure_rate\": %.6f, \"avg_accesses\": %.6f,"
                      " \"avg_byzantine\": %.6f}%s\n",
                      rows[i].p, rows[i].failure_rate, rows[i].avg_accesses, rows[i].avg_byzantine,
                      i + 1 < rows.size() ? "," : "");
        out += buf;
    }
    out += "  ]\n}\n";
    return out;
}

}  // namespace ecrg
