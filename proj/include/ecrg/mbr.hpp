#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "msr.hpp"  // detail::FetchState
#include "node_oracle.hpp"
#include "rs.hpp"

namespace ecrg {

// Minimum-bandwidth regenerating code: alpha = d, B = kd - k(k-1)/2. One
// codeword stores the symmetric d x d information matrix U = [[A1, A2^T],
// [A2, 0]] encoded column-wise; node i keeps column i of U*G.
struct MbrParams {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 0;
    std::size_t alpha = 0;
    std::size_t message_len = 0;  // B = k(k+1)/2 + (d-k)*k
    unsigned m = 0;
    Field field;
};

inline MbrParams mbr_params_new(std::size_t n, std::size_t k, std::size_t d, unsigned m,
                                std::uint32_t primitive_poly = 0) {
    if (n < 2 || k == 0 || d == 0) throw InvalidParameter("n, k, d must be positive");
    if (k > d) throw InvalidParameter("k must not exceed d");
    if (d > n - 1) throw InvalidParameter("d must not exceed n - 1");
    MbrParams p{n, k, d, d, k * d - k * (k - 1) / 2, m, Field(m, primitive_poly)};
    if (n > p.field.order() - 1) throw InvalidParameter("n exceeds 2^m - 1");
    return p;
}

// g_k: systematic generator of the [n, k] code with roots a^1..a^(n-k);
// b_mat rows are the coefficients of x^i * f(x) where f generates the [n, d]
// code; g_full = [g_k; b_mat] has rank d and every row weight is n-k+1
// (top) or n-d+1 (bottom).
struct MbrGenerator {
    Matrix g_k;
    Matrix b_mat;
    Matrix g_full;
    Poly gen_g;        // [n, k] generator polynomial
    Poly gen_f;        // [n, d] generator polynomial
    RsCode top_code;   // [n, k], first root a^1
    RsCode full_code;  // [n, d], first root a^1
};

inline MbrGenerator mbr_build_generator(const MbrParams& p) {
    const Field& gf = p.field;
    MbrGenerator gen;
    gen.top_code = make_rs_code(gf, p.n, p.k, 1);
    gen.full_code = make_rs_code(gf, p.n, p.d, 1);
    gen.gen_g = gen.top_code.gen;
    gen.gen_f = gen.full_code.gen;
    gen.g_k = rs_generator_matrix(gf, gen.top_code, GenKind::systematic);
    gen.b_mat = Matrix(p.d - p.k, p.n);
    for (std::size_t r = 0; r < p.d - p.k; ++r)
        for (std::size_t i = 0; i < gen.gen_f.coeffs.size(); ++i)
            gen.b_mat(r, r + i) = gen.gen_f.coeffs[i];
    gen.g_full = Matrix(p.d, p.n);
    for (std::size_t c = 0; c < p.n; ++c) {
        for (std::size_t r = 0; r < p.k; ++r) gen.g_full(r, c) = gen.g_k(r, c);
        for (std::size_t r = 0; r < p.d - p.k; ++r) gen.g_full(p.k + r, c) = gen.b_mat(r, c);
    }
    return gen;
}

struct MbrShare {
    std::size_t node_index = 0;
    std::vector<Elem> symbols;  // d per codeword block

    bool operator==(const MbrShare&) const = default;
};

// message = packed A1 (k x k symmetric) followed by A2 ((d-k) x k, row-major).
inline std::vector<MbrShare> mbr_encode(const MbrParams& p, const MbrGenerator& gen,
                                        std::span<const Elem> message) {
    if (message.size() != p.message_len) throw DimensionError("message length must be kd - k(k-1)/2");
    const std::size_t a1_len = sym_packed_len(p.k);
    const Matrix a1 = unpack_symmetric({p.k, {message.begin(), message.begin() + a1_len}});
    Matrix u(p.d, p.d);
    for (std::size_t i = 0; i < p.k; ++i)
        for (std::size_t j = 0; j < p.k; ++j) u(i, j) = a1(i, j);
    for (std::size_t r = 0; r < p.d - p.k; ++r)
        for (std::size_t c = 0; c < p.k; ++c) {
            const Elem v = message[a1_len + r * p.k + c];
            u(p.k + r, c) = v;
            u(c, p.k + r) = v;
        }
    const Matrix cmat = mat_mul(p.field, u, gen.g_full);
    std::vector<MbrShare> shares(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        shares[i].node_index = i;
        shares[i].symbols.resize(p.d);
        for (std::size_t r = 0; r < p.d; ++r) shares[i].symbols[r] = cmat(r, i);
    }
    return shares;
}

inline Elem mbr_helper_symbol(const MbrParams& p, const MbrGenerator& gen, const MbrShare& share,
                              std::size_t failed_index) {
    if (failed_index >= p.n) throw InvalidParameter("failed node index out of range");
    if (failed_index == share.node_index) throw InvalidParameter("node cannot help regenerate itself");
    if (share.symbols.size() != p.d) throw DimensionError("share must hold d symbols");
    Elem acc = 0;
    for (std::size_t r = 0; r < p.d; ++r)
        acc ^= p.field.mul(gen.g_full(r, failed_index), share.symbols[r]);
    return acc;
}

// The helper symbols form the codeword (U g_f)^T g_full of the [n, d] code,
// and the solved message vector U g_f is exactly the failed node's share.
inline MbrShare mbr_regenerate(const MbrParams& p, const MbrGenerator& gen, std::size_t failed_index,
                               std::span<const HelperSymbol> helpers) {
    const Field& gf = p.field;
    if (failed_index >= p.n) throw InvalidParameter("failed node index out of range");
    ReceivedWord word = ReceivedWord::all_erased(p.n);
    std::size_t distinct = 0;
    for (const auto& h : helpers) {
        if (h.node_index >= p.n || h.node_index == failed_index)
            throw InvalidParameter("helper index invalid");
        if (word.erased[h.node_index]) ++distinct;
        word.set(h.node_index, h.value);
    }
    if (distinct < p.d) throw InsufficientHelpers("regeneration needs d helper symbols");

    auto dec = rs_decode_ee(gf, gen.full_code, word);
    if (!dec) throw RegenerationFailure("helper codeword decode failed");

    std::vector<std::size_t> cols(p.d);
    std::iota(cols.begin(), cols.end(), 0);
    const Matrix a = transpose(select_columns(gen.g_full, cols));
    Matrix rhs(p.d, 1);
    for (std::size_t i = 0; i < p.d; ++i) rhs(i, 0) = dec->codeword[cols[i]];
    const Matrix x = mat_mul(gf, mat_inv(gf, a), rhs);

    MbrShare share;
    share.node_index = failed_index;
    share.symbols.resize(p.d);
    for (std::size_t r = 0; r < p.d; ++r) share.symbols[r] = x(r, 0);
    return share;
}

// Progressive reconstruction. The bottom d-k rows of the codeword matrix are
// themselves [n, k] codewords (A2 * g_k), so they are decoded first; columns
// whose received bottom symbols disagree with the decoded codewords are
// provably corrupt and get deleted. The decoded A2 strips the b_mat
// contribution from the top rows, which are then decoded as A1 * g_k over the
// surviving columns. A node corrupted only in its top symbols survives the
// deletion and is handled as a residual error by the top decode.
inline std::optional<ReconstructResult> mbr_reconstruct(const MbrParams& p, const MbrGenerator& gen,
                                                        NodeOracle& oracle,
                                                        const IntegrityCheck& integrity,
                                                        std::span<const std::size_t> access_order = {}) {
    const Field& gf = p.field;
    detail::FetchState st(access_order, p.n);
    if (st.fetch(oracle, p.k, p.d) < p.k) return std::nullopt;

    while (true) {
        const std::size_t j = st.accessed.size();
        bool round_ok = true;
        std::vector<Elem> message;
        std::vector<std::size_t> corrected;

        for (std::size_t b = 0; b < st.blocks && round_ok; ++b) {
            Matrix y(p.d, j);
            for (std::size_t c = 0; c < j; ++c)
                for (std::size_t r = 0; r < p.d; ++r) y(r, c) = st.columns[c][b * p.d + r];

            // Bottom decode: recover the last d-k codeword rows.
            Matrix a2(p.d - p.k, p.k);
            std::vector<std::vector<Elem>> bottom(p.d - p.k);
            for (std::size_t r = 0; r < p.d - p.k && round_ok; ++r) {
                ReceivedWord word = ReceivedWord::all_erased(p.n);
                for (std::size_t c = 0; c < j; ++c) word.set(st.accessed[c], y(p.k + r, c));
                auto dec = rs_decode_ee(gf, gen.top_code, word);
                if (!dec) {
                    round_ok = false;
                    break;
                }
                bottom[r] = std::move(dec->codeword);
                for (std::size_t t = 0; t < p.k; ++t) a2(r, t) = bottom[r][p.n - p.k + t];
            }
            if (!round_ok) break;

            // Any bottom mismatch proves the column corrupt; delete it.
            std::vector<std::uint8_t> flagged(j, 0);
            std::size_t vflag = 0;
            for (std::size_t c = 0; c < j; ++c)
                for (std::size_t r = 0; r < p.d - p.k; ++r)
                    if (bottom[r][st.accessed[c]] != y(p.k + r, c)) {
                        if (!flagged[c]) ++vflag;
                        flagged[c] = 1;
                        break;
                    }
            if (j - vflag < p.k) {
                round_ok = false;
                break;
            }

            const Matrix strip = mat_mul(gf, transpose(a2), gen.b_mat);  // A2^T * B, k x n
            Matrix a1(p.k, p.k);
            for (std::size_t r = 0; r < p.k && round_ok; ++r) {
                ReceivedWord word = ReceivedWord::all_erased(p.n);
                for (std::size_t c = 0; c < j; ++c) {
                    if (flagged[c]) continue;
                    const std::size_t node = st.accessed[c];
                    word.set(node, static_cast<Elem>(y(r, c) ^ strip(r, node)));
                }
                auto dec = rs_decode_ee(gf, gen.top_code, word);
                if (!dec) {
                    round_ok = false;
                    break;
                }
                for (std::size_t t = 0; t < p.k; ++t) a1(r, t) = dec->codeword[p.n - p.k + t];
            }
            if (!round_ok) break;

            const SymPacked p1 = pack_symmetric(a1);
            message.insert(message.end(), p1.symbols.begin(), p1.symbols.end());
            for (std::size_t r = 0; r < p.d - p.k; ++r)
                for (std::size_t t = 0; t < p.k; ++t) message.push_back(a2(r, t));
            for (std::size_t c = 0; c < j; ++c)
                if (flagged[c] &&
                    std::find(corrected.begin(), corrected.end(), st.accessed[c]) == corrected.end())
                    corrected.push_back(st.accessed[c]);
        }

        if (round_ok && integrity(message)) {
            std::sort(corrected.begin(), corrected.end());
            return ReconstructResult{std::move(message), j, st.accessed, std::move(corrected)};
        }
        if (st.fetch(oracle, 2, p.d) == 0) return std::nullopt;
    }
}

}  // namespace ecrg
