// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Every tolerance is pinned in code next to the check it gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ecrg/ecrg.hpp"
#include "helpers.hpp"

using namespace ecrg;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d: %s — %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, label,
                detail.c_str(), seconds);
    if (!pass) ++failures;
}

template <typename Fn>
void criterion(int id, const char* label, Fn&& fn) {
    const auto start = Clock::now();
    bool pass = false;
    std::string detail;
    try {
        detail = fn(pass);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report(id, label, pass, detail, seconds);
}

std::vector<Elem> framed_random_message(std::mt19937_64& rng, std::size_t message_len, unsigned m) {
    const std::size_t payload_len = message_len * m / 8 - frame_overhead;
    std::vector<std::uint8_t> payload(payload_len);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    auto symbols = pack_symbols(frame_with_crc(payload), m);
    symbols.resize(message_len, 0);
    return symbols;
}

double binomial_tail_at_least(std::size_t n, double p, std::size_t lo) {
    double total = 0;
    for (std::size_t i = lo; i <= n; ++i) {
        double term = 1;
        for (std::size_t j = 0; j < i; ++j) term *= static_cast<double>(n - j) / static_cast<double>(j + 1);
        total += term * std::pow(p, static_cast<double>(i)) * std::pow(1 - p, static_cast<double>(n - i));
    }
    return total;
}

}  // namespace

int main() {
    const std::size_t n = 20, k = 10, d = 18;
    const unsigned m = 5;

    // 1. MSR capability: 500 trials per v in {0..5}, 100% success, exactly
    //    k + 2v' node accesses; under 2 minutes.
    criterion(1, "MSR capability and node-access count", [&](bool& pass) {
        const auto p = msr_params_new(n, k, m, 1);
        const auto gen = msr_build_generator(p);
        std::mt19937_64 rng(1001);
        const auto start = Clock::now();
        std::size_t ok = 0, total = 0;
        for (std::size_t v = 0; v <= 5; ++v) {
            for (int t = 0; t < 500; ++t) {
                ++total;
                const auto msg = framed_random_message(rng, p.message_len, m);
                auto shares = msr_encode(p, gen, msg);
                std::vector<std::size_t> nodes(n);
                std::iota(nodes.begin(), nodes.end(), 0);
                std::shuffle(nodes.begin(), nodes.end(), rng);
                std::vector<bool> byz(n, false);
                for (std::size_t i = 0; i < v; ++i) {
                    byz[nodes[i]] = true;
                    testutil::scramble(shares[nodes[i]].symbols, rng, m);
                }
                std::vector<std::optional<std::vector<Elem>>> canned(n);
                for (std::size_t i = 0; i < n; ++i) canned[i] = shares[i].symbols;
                std::vector<std::size_t> order(n);
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                MemoryOracle oracle(std::move(canned));
                const auto res = msr_reconstruct(p, gen, oracle,
                                                 crc_framed_integrity(m, p.message_len * m / 8 - 8), order);
                if (!res || res->message != msg) continue;
                std::size_t vprime = 0;
                for (auto a : res->accessed_nodes) vprime += byz[a];
                if (res->nodes_accessed == k + 2 * vprime) ++ok;
            }
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        pass = ok == total && seconds < 120.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%zu/%zu trials exact", ok, total);
        return std::string(buf);
    });

    // 2. Failure rate at p = 0.1 with 10^3 runs lies in [0.3%, 3.0%],
    //    bracketing the analytic P[Bin(20,0.1) >= 6] ~ 1.13%; under 1 minute.
    // 3. Average extra node accesses in the same sweep lies in [1.5, 3.5].
    {
        SimConfig cfg;
        cfg.scheme = Scheme::msr;
        cfg.n = n;
        cfg.k = k;
        cfg.d = d;
        cfg.m = m;
        cfg.p_grid = {0.1};
        cfg.runs = 1000;
        cfg.master_seed = 20260809;
        const auto start = Clock::now();
        const SimEngine engine(cfg);
        const auto rows = engine.run_sweep();
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        const double analytic = binomial_tail_at_least(n, 0.1, 6);
        {
            const bool pass =
                rows[0].failure_rate >= 0.003 && rows[0].failure_rate <= 0.030 && seconds < 60.0;
            char buf[160];
            std::snprintf(buf, sizeof(buf), "measured %.4f, analytic %.4f, bounds [0.003, 0.030]",
                          rows[0].failure_rate, analytic);
            report(2, "failure-rate reproduction at p=0.1", pass, buf, seconds);
        }
        {
            const double extra = rows[0].avg_accesses - static_cast<double>(k);
            const bool pass = extra >= 1.5 && extra <= 3.5;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "avg extra accesses %.3f, bounds [1.5, 3.5]", extra);
            report(3, "node-access reproduction at p=0.1", pass, buf, seconds);
        }
    }

    // 4. MBR capability: 500 trials per v in {0..5} whole-share corruptions
    //    plus 100 mixed trials (5 bottom-only + 2 top-only, all nodes
    //    accessible), every one successful.
    criterion(4, "MBR capability including the split-corruption pattern", [&](bool& pass) {
        const auto p = mbr_params_new(n, k, d, m);
        const auto gen = mbr_build_generator(p);
        std::mt19937_64 rng(4004);
        std::size_t ok = 0, total = 0;
        for (std::size_t v = 0; v <= 5; ++v) {
            for (int t = 0; t < 500; ++t) {
                ++total;
                const auto msg = framed_random_message(rng, p.message_len, m);
                auto shares = mbr_encode(p, gen, msg);
                std::vector<std::size_t> nodes(n);
                std::iota(nodes.begin(), nodes.end(), 0);
                std::shuffle(nodes.begin(), nodes.end(), rng);
                for (std::size_t i = 0; i < v; ++i) testutil::scramble(shares[nodes[i]].symbols, rng, m);
                std::vector<std::optional<std::vector<Elem>>> canned(n);
                for (std::size_t i = 0; i < n; ++i) canned[i] = shares[i].symbols;
                std::vector<std::size_t> order(n);
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                MemoryOracle oracle(std::move(canned));
                const auto res = mbr_reconstruct(p, gen, oracle,
                                                 crc_framed_integrity(m, p.message_len * m / 8 - 8), order);
                if (res && res->message == msg) ++ok;
            }
        }
        std::size_t mixed_ok = 0;
        for (int t = 0; t < 100; ++t) {
            const auto msg = framed_random_message(rng, p.message_len, m);
            auto shares = mbr_encode(p, gen, msg);
            std::vector<std::size_t> nodes(n);
            std::iota(nodes.begin(), nodes.end(), 0);
            std::shuffle(nodes.begin(), nodes.end(), rng);
            for (int i = 0; i < 5; ++i) {
                std::vector<Elem> bottom(shares[nodes[i]].symbols.begin() + k,
                                         shares[nodes[i]].symbols.end());
                testutil::scramble(bottom, rng, m);
                std::copy(bottom.begin(), bottom.end(), shares[nodes[i]].symbols.begin() + k);
            }
            for (int i = 5; i < 7; ++i) {
                std::vector<Elem> top(shares[nodes[i]].symbols.begin(),
                                      shares[nodes[i]].symbols.begin() + k);
                testutil::scramble(top, rng, m);
                std::copy(top.begin(), top.end(), shares[nodes[i]].symbols.begin());
            }
            std::vector<std::optional<std::vector<Elem>>> canned(n);
            for (std::size_t i = 0; i < n; ++i) canned[i] = shares[i].symbols;
            MemoryOracle oracle(std::move(canned));
            const auto res =
                mbr_reconstruct(p, gen, oracle, crc_framed_integrity(m, p.message_len * m / 8 - 8));
            if (res && res->message == msg) ++mixed_ok;
        }
        pass = ok == total && mixed_ok == 100;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%zu/%zu whole-share, %zu/100 split-corruption", ok, total,
                      mixed_ok);
        return std::string(buf);
    });

    // 5. Exact regeneration: every failed node, 20 random honest d-subsets,
    //    both schemes, byte-identical shares; under 1 minute.
    criterion(5, "exact regeneration for every node", [&](bool& pass) {
        std::mt19937_64 rng(5005);
        const auto start = Clock::now();
        std::size_t ok = 0, total = 0;

        const auto mp = msr_params_new(n, k, m, 1);
        const auto mgen = msr_build_generator(mp);
        const auto msr_msg = framed_random_message(rng, mp.message_len, m);
        const auto msr_shares = msr_encode(mp, mgen, msr_msg);

        const auto bp = mbr_params_new(n, k, d, m);
        const auto bgen = mbr_build_generator(bp);
        const auto mbr_msg = framed_random_message(rng, bp.message_len, m);
        const auto mbr_shares = mbr_encode(bp, bgen, mbr_msg);

        for (std::size_t f = 0; f < n; ++f) {
            std::vector<std::size_t> survivors;
            for (std::size_t i = 0; i < n; ++i)
                if (i != f) survivors.push_back(i);
            for (int t = 0; t < 20; ++t) {
                std::shuffle(survivors.begin(), survivors.end(), rng);
                std::vector<HelperSymbol> mh, bh;
                for (std::size_t i = 0; i < d; ++i) {
                    mh.push_back({survivors[i], msr_helper_symbol(mp, mgen, msr_shares[survivors[i]], f)});
                    bh.push_back({survivors[i], mbr_helper_symbol(bp, bgen, mbr_shares[survivors[i]], f)});
                }
                total += 2;
                if (msr_regenerate(mp, mgen, f, mh).symbols == msr_shares[f].symbols) ++ok;
                if (mbr_regenerate(bp, bgen, f, bh).symbols == mbr_shares[f].symbols) ++ok;
            }
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        pass = ok == total && seconds < 60.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%zu/%zu regenerations exact", ok, total);
        return std::string(buf);
    });

    // 6. Generator validity across every valid parameter set with n <= 31:
    //    all four MSR checks pass; every MBR generator has rank d.
    criterion(6, "generator validity sweep (n <= 31)", [&](bool& pass) {
        std::size_t msr_ok = 0, msr_total = 0;
        for (unsigned fm = 2; fm <= 5; ++fm) {
            const std::size_t q1 = (1u << fm) - 1;
            for (std::size_t nn = 2; nn <= std::min<std::size_t>(31, q1); ++nn) {
                for (std::size_t kk = 2; 2 * kk - 2 <= nn; ++kk) {
                    if (std::gcd(q1, kk - 1) != 1) continue;
                    ++msr_total;
                    const auto p = msr_params_new(nn, kk, fm, 1);
                    const auto gen = msr_build_generator(p);
                    if (msr_verify_generator(p, gen).all_pass()) ++msr_ok;
                }
            }
        }
        std::size_t mbr_ok = 0, mbr_total = 0;
        for (std::size_t nn = 3; nn <= 31; ++nn) {
            for (std::size_t kk = 2; kk < nn; ++kk) {
                for (std::size_t dd = kk; dd <= nn - 1; ++dd) {
                    ++mbr_total;
                    const auto p = mbr_params_new(nn, kk, dd, 5);
                    const auto gen = mbr_build_generator(p);
                    if (mat_rank(p.field, gen.g_full) == dd) ++mbr_ok;
                }
            }
        }
        pass = msr_ok == msr_total && mbr_ok == mbr_total;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "MSR %zu/%zu all-checks, MBR %zu/%zu rank-d", msr_ok, msr_total,
                      mbr_ok, mbr_total);
        return std::string(buf);
    });

    // 7. Update complexity: max row weight 12 (eta 0.60) for MSR and 11
    //    (eta 0.55) for MBR at [20,10,18].
    criterion(7, "update complexity of both generators", [&](bool& pass) {
        const auto mp = msr_params_new(n, k, m, 1);
        const auto muc = update_complexity(msr_build_generator(mp).g_full);
        const auto bp = mbr_params_new(n, k, d, m);
        const auto buc = update_complexity(mbr_build_generator(bp).g_full);
        pass = muc.max_row_weight == 12 && std::abs(muc.eta() - 0.60) < 1e-12 &&
               buc.max_row_weight == 11 && std::abs(buc.eta() - 0.55) < 1e-12;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "MSR %zu/20 (eta %.2f), MBR %zu/20 (eta %.2f)",
                      muc.max_row_weight, muc.eta(), buc.max_row_weight, buc.eta());
        return std::string(buf);
    });

    // 8. Decoder equivalence with the exhaustive nearest-codeword oracle on
    //    the [7,3] code, 10^4 random words with s + 2v <= 4; under 30 s.
    criterion(8, "RS decoder vs brute-force oracle", [&](bool& pass) {
        Field f(3);
        const RsCode code = make_rs_code(f, 7, 3, 0);
        const auto book = testutil::all_codewords(f, code);
        std::mt19937_64 rng(8008);
        const auto start = Clock::now();
        constexpr int combos[][2] = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0},
                                     {0, 1}, {1, 1}, {2, 1}, {0, 2}};
        std::size_t ok = 0;
        const int total = 10000;
        for (int t = 0; t < total; ++t) {
            const auto& cw = book[rng() % book.size()];
            const auto [s, v] = combos[rng() % std::size(combos)];
            std::vector<std::size_t> pos(7);
            std::iota(pos.begin(), pos.end(), 0);
            std::shuffle(pos.begin(), pos.end(), rng);
            ReceivedWord w;
            w.symbols.assign(cw.begin(), cw.end());
            w.erased.assign(7, 0);
            for (int i = 0; i < s; ++i) {
                w.erased[pos[i]] = 1;
                w.symbols[pos[i]] = 0;
            }
            for (int i = s; i < s + v; ++i)
                w.symbols[pos[i]] ^= static_cast<Elem>(1 + rng() % 7);
            const auto dec = rs_decode_ee(f, code, w);
            if (dec && dec->codeword == testutil::nearest_codeword(book, w) && dec->codeword == cw) ++ok;
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        pass = ok == static_cast<std::size_t>(total) && seconds < 30.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%zu/%d oracle agreements", ok, total);
        return std::string(buf);
    });

    // 9. Determinism: two sweeps with identical config are byte-identical.
    criterion(9, "simulation determinism", [&](bool& pass) {
        SimConfig cfg;
        cfg.scheme = Scheme::msr;
        cfg.n = n;
        cfg.k = k;
        cfg.d = d;
        cfg.m = m;
        cfg.p_grid = {0.0, 0.1, 0.2};
        cfg.runs = 200;
        cfg.master_seed = 99;
        const SimEngine a(cfg), b(cfg);
        const std::string csv_a = sweep_csv(cfg, a.run_sweep());
        const std::string csv_b = sweep_csv(cfg, b.run_sweep());
        pass = csv_a == csv_b && !csv_a.empty();
        return std::string(pass ? "identical CSV bytes" : "CSV output diverged");
    });

    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
