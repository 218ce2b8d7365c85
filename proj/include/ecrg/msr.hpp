#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "node_oracle.hpp"
#include "rs.hpp"

namespace ecrg {

// Minimum-storage regenerating code with d = 2*alpha (equivalently d = 2k-2).
// Each node stores alpha symbols per codeword; one codeword carries
// B = k*alpha message symbols arranged as two packed symmetric matrices.
struct MsrParams {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 0;
    std::size_t alpha = 0;
    std::size_t message_len = 0;  // B = k * alpha
    unsigned m = 0;
    Elem gamma = 1;
    Field field;
};

inline MsrParams msr_params_new(std::size_t n, std::size_t k, unsigned m, Elem gamma = 1,
                                std::uint32_t primitive_poly = 0) {
    if (k < 2) throw InvalidParameter("k must be at least 2");
    if (gamma == 0) throw InvalidParameter("gamma must be nonzero");
    MsrParams p{n, k, 2 * k - 2, k - 1, k * (k - 1), m, gamma, Field(m, primitive_poly)};
    if (gamma >= p.field.order()) throw InvalidParameter("gamma outside the field");
    if (n > p.field.order() - 1) throw InvalidParameter("n exceeds 2^m - 1");
    if (p.d > n) throw InvalidParameter("d = 2k - 2 exceeds n");
    // gcd(2^m - 1, alpha) = 1 keeps the delta diagonal entries distinct.
    if (std::gcd(static_cast<std::size_t>(p.field.order() - 1), p.alpha) != 1)
        throw InvalidParameter("gcd(2^m - 1, k - 1) must be 1");
    return p;
}

// Encoding matrices: gbar is the systematic generator of the [n, alpha] code
// with roots a^0..a^(n-alpha-1); delta_diag holds b_i = gamma * (a^i)^alpha;
// g_full is the stacked [gbar; gbar * Delta], a generator of the [n, d] code.
struct MsrGenerator {
    Matrix gbar;
    std::vector<Elem> delta_diag;
    Matrix g_full;
    RsCode row_code;   // [n, alpha], first root a^0 — decodes rows of P and Q
    RsCode full_code;  // [n, d], first root a^0 — decodes helper codewords
};

inline MsrGenerator msr_build_generator(const MsrParams& p) {
    const Field& gf = p.field;
    MsrGenerator gen;
    gen.row_code = make_rs_code(gf, p.n, p.alpha, 0);
    gen.full_code = make_rs_code(gf, p.n, p.d, 0);
    gen.gbar = rs_generator_matrix(gf, gen.row_code, GenKind::systematic);
    gen.delta_diag.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        gen.delta_diag[i] = gf.mul(p.gamma, gf.pow(gf.alpha_pow(static_cast<long long>(i)),
                                                   static_cast<long long>(p.alpha)));
    gen.g_full = Matrix(p.d, p.n);
    for (std::size_t r = 0; r < p.alpha; ++r)
        for (std::size_t c = 0; c < p.n; ++c) {
            gen.g_full(r, c) = gen.gbar(r, c);
            gen.g_full(p.alpha + r, c) = gf.mul(gen.gbar(r, c), gen.delta_diag[c]);
        }
    return gen;
}

struct GeneratorReport {
    bool distinct_diagonal = false;
    bool coset_membership = false;
    bool full_rank = false;
    bool product_rows_in_code = false;

    bool all_pass() const {
        return distinct_diagonal && coset_membership && full_rank && product_rows_in_code;
    }
};

// Checks the generator hypotheses and conclusion: (a) the diagonal entries are
// pairwise distinct; (b) the diagonal, read as evaluations at a^0..a^(n-1),
// interpolates to a polynomial of degree exactly alpha (at full length this is
// the same as b(x) vanishing at a^1..a^(n-alpha-1) but not at a^(n-alpha));
// (c) the stacked matrix has rank d; (d) every row of gbar*Delta lies in the
// [n, d] code, i.e. vanishes at a^0..a^(n-d-1).
inline GeneratorReport msr_verify_generator(const MsrParams& p, const MsrGenerator& gen) {
    const Field& gf = p.field;
    GeneratorReport rep;

    rep.distinct_diagonal = true;
    for (std::size_t i = 0; i < p.n && rep.distinct_diagonal; ++i)
        for (std::size_t j = i + 1; j < p.n; ++j)
            if (gen.delta_diag[i] == gen.delta_diag[j]) {
                rep.distinct_diagonal = false;
                break;
            }

    {
        // Newton interpolation of (a^j, b_j); the divided differences live in
        // the same field, so the degree check is exact.
        std::vector<Elem> xs(p.n), coef(gen.delta_diag.begin(), gen.delta_diag.end());
        for (std::size_t j = 0; j < p.n; ++j) xs[j] = gf.alpha_pow(static_cast<long long>(j));
        bool ok = true;
        for (std::size_t level = 1; level < p.n && ok; ++level)
            for (std::size_t i = p.n - 1; i >= level; --i) {
                const Elem dx = static_cast<Elem>(xs[i] ^ xs[i - level]);
                if (dx == 0) {
                    ok = false;  // duplicate evaluation points (n > 2^m - 1 cannot happen here)
                    break;
                }
                coef[i] = gf.div(static_cast<Elem>(coef[i] ^ coef[i - 1]), dx);
                if (i == level) break;
            }
        std::size_t deg = 0;
        for (std::size_t i = 0; i < p.n; ++i)
            if (coef[i] != 0) deg = i;
        rep.coset_membership = ok && deg == p.alpha;
    }

    rep.full_rank = mat_rank(gf, gen.g_full) == p.d;

    rep.product_rows_in_code = true;
    for (std::size_t r = 0; r < p.alpha && rep.product_rows_in_code; ++r) {
        Poly row{std::vector<Elem>(gen.g_full.row(p.alpha + r).begin(), gen.g_full.row(p.alpha + r).end())};
        for (std::size_t i = 0; i + p.d < p.n; ++i)
            if (poly_eval(gf, row, gf.alpha_pow(static_cast<long long>(i))) != 0) {
                rep.product_rows_in_code = false;
                break;
            }
    }
    return rep;
}

struct MsrShare {
    std::size_t node_index = 0;
    std::vector<Elem> symbols;  // alpha per codeword block

    bool operator==(const MsrShare&) const = default;
};

// message = packed Z1 followed by packed Z2; node i stores
// Z1*g_i + b_i*Z2*g_i, the i-th column of U*g_full.
inline std::vector<MsrShare> msr_encode(const MsrParams& p, const MsrGenerator& gen,
                                        std::span<const Elem> message) {
    if (message.size() != p.message_len) throw DimensionError("message length must be k*(k-1)");
    const std::size_t half = sym_packed_len(p.alpha);
    const Matrix z1 = unpack_symmetric({p.alpha, {message.begin(), message.begin() + half}});
    const Matrix z2 = unpack_symmetric({p.alpha, {message.begin() + half, message.end()}});
    Matrix u(p.alpha, p.d);
    for (std::size_t i = 0; i < p.alpha; ++i)
        for (std::size_t j = 0; j < p.alpha; ++j) {
            u(i, j) = z1(i, j);
            u(i, p.alpha + j) = z2(i, j);
        }
    const Matrix c = mat_mul(p.field, u, gen.g_full);
    std::vector<MsrShare> shares(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        shares[i].node_index = i;
        shares[i].symbols.resize(p.alpha);
        for (std::size_t r = 0; r < p.alpha; ++r) shares[i].symbols[r] = c(r, i);
    }
    return shares;
}

// From the shares Y (alpha x j, columns in `accessed` order) recover the
// off-diagonal entries of P = Gbar_J^T Z1 Gbar and Q = Gbar_J^T Z2 Gbar.
// Entry (i,l) of Gbar_J^T Y is p + q*b_J(l) and entry (l,i) is p + q*b_J(i);
// distinct b values make the 2x2 system solvable. Rows come back as length-n
// received words, erased at non-accessed columns and at their own diagonal.
inline std::pair<std::vector<ReceivedWord>, std::vector<ReceivedWord>> msr_extract_pq(
    const MsrParams& p, const MsrGenerator& gen, const Matrix& y,
    std::span<const std::size_t> accessed) {
    const Field& gf = p.field;
    const std::size_t j = accessed.size();
    if (y.rows() != p.alpha || y.cols() != j) throw DimensionError("share matrix must be alpha x j");
    for (std::size_t i = 0; i < j; ++i) {
        if (accessed[i] >= p.n) throw InvalidParameter("accessed node index out of range");
        for (std::size_t l = i + 1; l < j; ++l)
            if (accessed[i] == accessed[l]) throw InvalidParameter("duplicate accessed node index");
    }
    const std::vector<std::size_t> idx(accessed.begin(), accessed.end());
    const Matrix m = mat_mul(gf, transpose(select_columns(gen.gbar, idx)), y);
    std::vector<ReceivedWord> pt(j, ReceivedWord::all_erased(p.n));
    std::vector<ReceivedWord> qt(j, ReceivedWord::all_erased(p.n));
    for (std::size_t r = 0; r < j; ++r)
        for (std::size_t c = 0; c < r; ++c) {
            const Elem br = gen.delta_diag[accessed[r]];
            const Elem bc = gen.delta_diag[accessed[c]];
            const Elem qv = gf.div(static_cast<Elem>(m(r, c) ^ m(c, r)), static_cast<Elem>(br ^ bc));
            const Elem pv = static_cast<Elem>(m(r, c) ^ gf.mul(qv, bc));
            pt[r].set(accessed[c], pv);
            pt[c].set(accessed[r], pv);
            qt[r].set(accessed[c], qv);
            qt[c].set(accessed[r], qv);
        }
    return {std::move(pt), std::move(qt)};
}

struct ColumnClasses {
    std::vector<std::size_t> bad;        // >= v+2 nonzeros: erroneous
    std::vector<std::size_t> good;       // <= v nonzeros: clean
    std::vector<std::size_t> ambiguous;  // exactly v+1: round cannot decide
};

// Classify accessed columns by the nonzero count in the error pattern
// E_P = decoded rows XOR observed rows (restricted to accessed columns,
// zero where a row failed to decode).
inline ColumnClasses msr_locate_bad_columns(const Matrix& e_p, std::size_t v,
                                            std::span<const std::size_t> accessed) {
    if (e_p.rows() != accessed.size() || e_p.cols() != accessed.size())
        throw DimensionError("error pattern must be j x j over accessed columns");
    ColumnClasses cls;
    for (std::size_t c = 0; c < accessed.size(); ++c) {
        std::size_t cnt = 0;
        for (std::size_t r = 0; r < accessed.size(); ++r)
            if (e_p(r, c) != 0) ++cnt;
        if (cnt >= v + 2)
            cls.bad.push_back(accessed[c]);
        else if (cnt <= v)
            cls.good.push_back(accessed[c]);
        else
            cls.ambiguous.push_back(accessed[c]);
    }
    return cls;
}

// One helper symbol for regenerating node `failed_index`: the inner product of
// the failed node's gbar column with this node's share. Over all helpers these
// form a codeword of the [n, d] code with message [Z1*g_f; Z2*g_f].
inline Elem msr_helper_symbol(const MsrParams& p, const MsrGenerator& gen, const MsrShare& share,
                              std::size_t failed_index) {
    if (failed_index >= p.n) throw InvalidParameter("failed node index out of range");
    if (failed_index == share.node_index) throw InvalidParameter("node cannot help regenerate itself");
    if (share.symbols.size() != p.alpha) throw DimensionError("share must hold alpha symbols");
    Elem acc = 0;
    for (std::size_t r = 0; r < p.alpha; ++r)
        acc ^= p.field.mul(gen.gbar(r, failed_index), share.symbols[r]);
    return acc;
}

inline MsrShare msr_regenerate(const MsrParams& p, const MsrGenerator& gen, std::size_t failed_index,
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

    // Solve [g_j | b_j g_j] x = c_j over any d columns for x = [Z1 g_f; Z2 g_f].
    std::vector<std::size_t> cols(p.d);
    std::iota(cols.begin(), cols.end(), 0);
    const Matrix a = transpose(select_columns(gen.g_full, cols));
    Matrix rhs(p.d, 1);
    for (std::size_t i = 0; i < p.d; ++i) rhs(i, 0) = dec->codeword[cols[i]];
    const Matrix x = mat_mul(gf, mat_inv(gf, a), rhs);

    MsrShare share;
    share.node_index = failed_index;
    share.symbols.resize(p.alpha);
    const Elem bf = gen.delta_diag[failed_index];
    for (std::size_t r = 0; r < p.alpha; ++r)
        share.symbols[r] = static_cast<Elem>(x(r, 0) ^ gf.mul(bf, x(p.alpha + r, 0)));
    return share;
}

namespace detail {

// Shared fetch loop: pull shares in the caller's order, skipping unavailable
// nodes, and derive the per-node block count from the first answer.
struct FetchState {
    std::vector<std::size_t> order;
    std::size_t cursor = 0;
    std::vector<std::size_t> accessed;
    std::vector<std::vector<Elem>> columns;
    std::size_t blocks = 0;

    FetchState(std::span<const std::size_t> caller_order, std::size_t n) {
        if (caller_order.empty()) {
            order.resize(n);
            std::iota(order.begin(), order.end(), 0);
        } else {
            order.assign(caller_order.begin(), caller_order.end());
            std::vector<std::uint8_t> seen(n, 0);
            for (auto idx : order) {
                if (idx >= n || seen[idx]) throw InvalidParameter("access order must be distinct node indices");
                seen[idx] = 1;
            }
        }
    }

    std::size_t fetch(NodeOracle& oracle, std::size_t want, std::size_t symbols_per_block) {
        std::size_t got = 0;
        while (got < want && cursor < order.size()) {
            const std::size_t idx = order[cursor++];
            auto share = oracle.fetch(idx);
            if (!share) continue;
            if (blocks == 0) {
                if (share->empty() || share->size() % symbols_per_block != 0)
                    throw DimensionError("share length must be a multiple of the per-block symbol count");
                blocks = share->size() / symbols_per_block;
            } else if (share->size() != blocks * symbols_per_block) {
                throw DimensionError("inconsistent share lengths across nodes");
            }
            accessed.push_back(idx);
            columns.push_back(std::move(*share));
            ++got;
        }
        return got;
    }
};

}  // namespace detail

// Progressive data reconstruction. Starts from k nodes and, on any decode or
// integrity failure, fetches two more and retries with the error budget v
// raised by one, up to v = floor((n-k+1)/2). Within a round every row of the
// extracted P and Q matrices is decoded against the [n, k-1] code, erroneous
// columns are located by the v+2 counting rule, the decoded matrix is
// re-symmetrized across the bad columns, and Z1/Z2 are recovered through two
// small inversions. The integrity check gates acceptance of each round.
inline std::optional<ReconstructResult> msr_reconstruct(const MsrParams& p, const MsrGenerator& gen,
                                                        NodeOracle& oracle,
                                                        const IntegrityCheck& integrity,
                                                        std::span<const std::size_t> access_order = {}) {
    const Field& gf = p.field;
    detail::FetchState st(access_order, p.n);
    if (st.fetch(oracle, p.k, p.alpha) < p.k) return std::nullopt;

    const std::size_t vmax = (p.n - p.k + 1) / 2;
    const std::vector<std::size_t> tail_nodes = [&] {
        std::vector<std::size_t> t(p.alpha);
        std::iota(t.begin(), t.end(), p.n - p.alpha);
        return t;
    }();

    for (std::size_t v = 0;; ++v) {
        if (v > vmax) break;
        const std::size_t j = st.accessed.size();
        bool round_ok = true;
        std::vector<Elem> message;
        std::vector<std::size_t> corrected;

        for (std::size_t b = 0; b < st.blocks && round_ok; ++b) {
            Matrix y(p.alpha, j);
            for (std::size_t c = 0; c < j; ++c)
                for (std::size_t r = 0; r < p.alpha; ++r) y(r, c) = st.columns[c][b * p.alpha + r];

            auto [pt, qt] = msr_extract_pq(p, gen, y, st.accessed);
            std::vector<std::optional<RsDecoded>> phat(j), qhat(j);
            for (std::size_t r = 0; r < j; ++r) {
                phat[r] = rs_decode_ee(gf, gen.row_code, pt[r]);
                qhat[r] = rs_decode_ee(gf, gen.row_code, qt[r]);
            }

            Matrix e_p(j, j);
            for (std::size_t r = 0; r < j; ++r) {
                if (!phat[r]) continue;
                for (std::size_t c = 0; c < j; ++c) {
                    if (c == r) continue;
                    e_p(r, c) = static_cast<Elem>(phat[r]->codeword[st.accessed[c]] ^
                                                  pt[r].symbols[st.accessed[c]]);
                }
            }
            ColumnClasses cls = msr_locate_bad_columns(e_p, v, st.accessed);
            std::sort(cls.good.begin(), cls.good.end());
            if (!cls.ambiguous.empty() || cls.bad.size() > v ||
                cls.good.size() < p.k + cls.bad.size() || cls.good.size() < p.alpha) {
                round_ok = false;
                break;
            }
            auto is_bad = [&](std::size_t node) {
                return std::find(cls.bad.begin(), cls.bad.end(), node) != cls.bad.end();
            };
            for (std::size_t r = 0; r < j && round_ok; ++r)
                if ((!phat[r] || !qhat[r]) && !is_bad(st.accessed[r])) round_ok = false;
            if (!round_ok) break;

            // Pick alpha good columns, preferring the systematic identity tail.
            std::vector<std::size_t> sel;
            if (std::includes(cls.good.begin(), cls.good.end(), tail_nodes.begin(), tail_nodes.end()))
                sel = tail_nodes;
            else
                sel.assign(cls.good.begin(), cls.good.begin() + static_cast<std::ptrdiff_t>(p.alpha));
            const bool sel_is_tail = sel == tail_nodes;

            std::vector<std::size_t> row_of(p.n, j);
            for (std::size_t r = 0; r < j; ++r) row_of[st.accessed[r]] = r;

            auto recover = [&](const std::vector<std::optional<RsDecoded>>& rows) {
                Matrix dec_sel(j, p.alpha);
                for (std::size_t r = 0; r < j; ++r) {
                    const bool row_bad = is_bad(st.accessed[r]);
                    for (std::size_t t = 0; t < p.alpha; ++t) {
                        if (!row_bad)
                            dec_sel(r, t) = rows[r]->codeword[sel[t]];
                        else  // symmetry: take the good column's decoded value at this node
                            dec_sel(r, t) = rows[row_of[sel[t]]]->codeword[st.accessed[r]];
                    }
                }
                const Matrix w = sel_is_tail
                                     ? dec_sel
                                     : mat_mul(gf, dec_sel, mat_inv(gf, select_columns(gen.gbar, sel)));
                // Any alpha good rows of Gbar_J^T are invertible; use the first.
                std::vector<std::size_t> rows_nodes(cls.good.begin(),
                                                    cls.good.begin() + static_cast<std::ptrdiff_t>(p.alpha));
                std::vector<std::size_t> rows_pos(p.alpha);
                for (std::size_t i = 0; i < p.alpha; ++i) rows_pos[i] = row_of[rows_nodes[i]];
                const Matrix a = transpose(select_columns(gen.gbar, rows_nodes));
                return mat_mul(gf, mat_inv(gf, a), select_rows(w, rows_pos));
            };
            const Matrix z1 = recover(phat);
            const Matrix z2 = recover(qhat);

            const SymPacked p1 = pack_symmetric(z1), p2 = pack_symmetric(z2);
            message.insert(message.end(), p1.symbols.begin(), p1.symbols.end());
            message.insert(message.end(), p2.symbols.begin(), p2.symbols.end());
            for (auto nidx : cls.bad)
                if (std::find(corrected.begin(), corrected.end(), nidx) == corrected.end())
                    corrected.push_back(nidx);
        }

        if (round_ok && integrity(message)) {
            std::sort(corrected.begin(), corrected.end());
            return ReconstructResult{std::move(message), j, st.accessed, std::move(corrected)};
        }
        if (v == vmax) break;
        if (st.fetch(oracle, 2, p.alpha) == 0) break;
    }
    return std::nullopt;
}

}  // namespace ecrg
