#pragma once

// Shared test utilities. The reference implementations here are deliberately
// independent of the library's table-driven arithmetic: carry-less polynomial
// multiplication for field products, generator-polynomial multiples for
// codeword enumeration, and plain Hamming distance for nearest-codeword
// search.

#include <cstdint>
#include <random>
#include <vector>

#include "ecrg/ecrg.hpp"

namespace testutil {

using ecrg::Elem;

// Bitwise GF(2^m) product reduced modulo the primitive polynomial.
inline Elem ref_gf_mul(Elem x, Elem y, unsigned m, std::uint32_t poly) {
    std::uint32_t acc = 0, a = x;
    for (unsigned i = 0; i < m; ++i)
        if (y >> i & 1) acc ^= a << i;
    for (int bit = 2 * m - 2; bit >= static_cast<int>(m); --bit)
        if (acc >> bit & 1) acc ^= poly << (bit - m);
    return static_cast<Elem>(acc);
}

inline std::vector<Elem> random_symbols(std::mt19937_64& rng, std::size_t count, unsigned m) {
    std::vector<Elem> out(count);
    for (auto& s : out) s = static_cast<Elem>(rng() & ((1u << m) - 1));
    return out;
}

// Every codeword of the code as multiples of its generator polynomial.
inline std::vector<std::vector<Elem>> all_codewords(const ecrg::Field& gf, const ecrg::RsCode& code) {
    std::vector<std::vector<Elem>> out;
    std::vector<Elem> u(code.dim, 0);
    const std::uint32_t q = gf.order();
    while (true) {
        ecrg::Poly up{std::vector<Elem>(u.begin(), u.end())};
        const ecrg::Poly c = poly_mul(gf, up, code.gen);
        std::vector<Elem> w(code.n, 0);
        for (std::size_t i = 0; i < c.coeffs.size(); ++i) w[i] = c.coeffs[i];
        out.push_back(std::move(w));
        std::size_t pos = 0;
        while (pos < u.size() && u[pos] == q - 1) u[pos++] = 0;
        if (pos == u.size()) break;
        ++u[pos];
    }
    return out;
}

inline std::size_t distance_non_erased(const std::vector<Elem>& cw, const ecrg::ReceivedWord& w) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < cw.size(); ++j)
        if (!w.erased[j] && cw[j] != w.symbols[j]) ++d;
    return d;
}

inline const std::vector<Elem>& nearest_codeword(const std::vector<std::vector<Elem>>& book,
                                                 const ecrg::ReceivedWord& w) {
    std::size_t best = SIZE_MAX, best_idx = 0;
    for (std::size_t i = 0; i < book.size(); ++i) {
        const std::size_t d = distance_non_erased(book[i], w);
        if (d < best) {
            best = d;
            best_idx = i;
        }
    }
    return book[best_idx];
}

inline ecrg::IntegrityCheck expect_message(std::vector<Elem> expected) {
    return [expected = std::move(expected)](std::span<const Elem> cand) {
        return std::equal(cand.begin(), cand.end(), expected.begin(), expected.end());
    };
}

// Replace a share with fresh uniform symbols, guaranteed different.
inline void scramble(std::vector<Elem>& symbols, std::mt19937_64& rng, unsigned m) {
    const std::vector<Elem> before = symbols;
    do {
        for (auto& s : symbols) s = static_cast<Elem>(rng() & ((1u << m) - 1));
    } while (symbols == before);
}

}  // namespace testutil
