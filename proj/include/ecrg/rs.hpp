#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gf.hpp"
#include "matrix.hpp"

namespace ecrg {

// An [n, dim] Reed-Solomon code over GF(2^m) whose generator polynomial has
// roots a^s, a^(s+1), ..., a^(s+n-dim-1). Codeword position j corresponds to
// the evaluation point a^j. n below 2^m - 1 gives the shortened code.
struct RsCode {
    std::size_t n = 0;
    std::size_t dim = 0;
    unsigned first_root_exp = 0;
    Poly gen;
};

inline RsCode make_rs_code(const Field& gf, std::size_t n, std::size_t dim, unsigned first_root_exp) {
    if (n == 0 || n > gf.order() - 1) throw InvalidParameter("code length must be in [1, 2^m - 1]");
    if (dim == 0 || dim > n) throw InvalidParameter("code dimension must be in [1, n]");
    RsCode code;
    code.n = n;
    code.dim = dim;
    code.first_root_exp = first_root_exp;
    code.gen = gen_poly(gf, first_root_exp, n - dim);
    return code;
}

enum class GenKind { vandermonde, systematic };

// Generator matrix of the code. The systematic kind places the identity in
// the last dim columns and remainder polynomials in front; every row has
// Hamming weight exactly n - dim + 1. The vandermonde kind is the power-basis
// matrix (a^c)^(r + offset) at full length n = 2^m - 1; shortened codes have
// no power-basis generator, so there the rows are the cyclic shifts
// x^r * g(x) of the generator polynomial. Both kinds span the same code.
inline Matrix rs_generator_matrix(const Field& gf, const RsCode& code, GenKind kind) {
    const std::size_t n = code.n;
    const std::size_t dim = code.dim;
    Matrix g(dim, n);
    if (kind == GenKind::systematic) {
        for (std::size_t i = 0; i < dim; ++i) {
            auto [quot, rem] = poly_divmod(gf, poly_shift(Poly::one(), n - dim + i), code.gen);
            for (std::size_t j = 0; j < rem.coeffs.size(); ++j) g(i, j) = rem.coeffs[j];
            g(i, n - dim + i) = 1;
        }
        return g;
    }
    if (n == gf.order() - 1) {
        // Row exponents (1 - s + r) mod (2^m - 1) make each row vanish at all
        // generator-polynomial roots; s = 1 reproduces the plain Vandermonde.
        for (std::size_t r = 0; r < dim; ++r) {
            const long long exp_r = 1 - static_cast<long long>(code.first_root_exp) + static_cast<long long>(r);
            for (std::size_t c = 0; c < n; ++c)
                g(r, c) = gf.pow(gf.alpha_pow(static_cast<long long>(c)), exp_r);
        }
        return g;
    }
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t j = 0; j < code.gen.coeffs.size(); ++j) g(r, r + j) = code.gen.coeffs[j];
    return g;
}

inline std::vector<Elem> rs_encode(const Field& gf, const RsCode& code, std::span<const Elem> msg,
                                   GenKind kind = GenKind::systematic) {
    if (msg.size() != code.dim) throw DimensionError("message length must equal code dimension");
    if (kind == GenKind::systematic) {
        // c(x) = m(x) x^(n-dim) + (m(x) x^(n-dim) mod g), so the tail is the message.
        Poly shifted;
        shifted.coeffs.assign(code.n, 0);
        for (std::size_t i = 0; i < code.dim; ++i) shifted.coeffs[code.n - code.dim + i] = msg[i];
        shifted.normalize();
        auto [quot, rem] = poly_divmod(gf, shifted, code.gen);
        std::vector<Elem> out(code.n, 0);
        for (std::size_t j = 0; j < rem.coeffs.size(); ++j) out[j] = rem.coeffs[j];
        for (std::size_t i = 0; i < code.dim; ++i) out[code.n - code.dim + i] = msg[i];
        return out;
    }
    const Matrix g = rs_generator_matrix(gf, code, kind);
    std::vector<Elem> out(code.n, 0);
    for (std::size_t r = 0; r < code.dim; ++r) {
        if (msg[r] == 0) continue;
        for (std::size_t c = 0; c < code.n; ++c) out[c] ^= gf.mul(msg[r], g(r, c));
    }
    return out;
}

// Length-n word with per-position erasure flags; erased positions carry no
// symbol value.
struct ReceivedWord {
    std::vector<Elem> symbols;
    std::vector<std::uint8_t> erased;

    static ReceivedWord all_erased(std::size_t n) {
        ReceivedWord w;
        w.symbols.assign(n, 0);
        w.erased.assign(n, 1);
        return w;
    }

    void set(std::size_t pos, Elem value) {
        symbols[pos] = value;
        erased[pos] = 0;
    }

    std::size_t erasure_count() const {
        std::size_t e = 0;
        for (auto f : erased) e += f;
        return e;
    }
};

struct RsDecoded {
    std::vector<Elem> codeword;
    std::vector<Elem> msg;  // systematic framing: the last dim codeword symbols
};

// Error-and-erasure decoder: syndromes, erasure locator, Berlekamp-Massey on
// the Forney-modified syndromes, Chien search, Forney magnitudes, and a final
// full syndrome recheck. Succeeds whenever erasures + 2*errors <= n - dim;
// beyond that radius it returns nullopt or (rarely) another codeword, which
// callers must guard with their own integrity checks.
inline std::optional<RsDecoded> rs_decode_ee(const Field& gf, const RsCode& code, const ReceivedWord& w) {
    const std::size_t n = code.n;
    const std::size_t dim = code.dim;
    const std::size_t rho = n - dim;
    const unsigned s = code.first_root_exp;
    if (w.symbols.size() != n || w.erased.size() != n) throw DimensionError("received word length");

    std::vector<std::size_t> erasures;
    for (std::size_t j = 0; j < n; ++j)
        if (w.erased[j]) erasures.push_back(j);
    const std::size_t e = erasures.size();
    if (n - e < dim) return std::nullopt;

    std::vector<Elem> r(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        if (!w.erased[j]) r[j] = w.symbols[j];

    auto make_result = [&](std::vector<Elem> cw) {
        RsDecoded out;
        out.msg.assign(cw.end() - static_cast<std::ptrdiff_t>(dim), cw.end());
        out.codeword = std::move(cw);
        return out;
    };

    auto eval_coeffs = [&](const std::vector<Elem>& c, Elem x) {
        Elem acc = 0;
        for (std::size_t i = c.size(); i-- > 0;) acc = static_cast<Elem>(gf.mul(acc, x) ^ c[i]);
        return acc;
    };

    std::vector<Elem> synd(rho, 0);
    bool nonzero_synd = false;
    for (std::size_t i = 0; i < rho; ++i) {
        synd[i] = eval_coeffs(r, gf.alpha_pow(s + i));
        nonzero_synd = nonzero_synd || synd[i] != 0;
    }
    if (!nonzero_synd) return make_result(std::move(r));  // zeros at erasures already consistent

    // Erasure locator Gamma(x) = prod (1 - a^j x) over erased positions.
    std::vector<Elem> gamma{1};
    for (auto j : erasures) {
        std::vector<Elem> next(gamma.size() + 1, 0);
        const Elem loc = gf.alpha_pow(static_cast<long long>(j));
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            next[i] ^= gamma[i];
            next[i + 1] ^= gf.mul(gamma[i], loc);
        }
        gamma = std::move(next);
    }

    // Modified syndromes Xi = Gamma * S mod x^rho; the tail Xi_e.. feeds BM.
    std::vector<Elem> xi(rho, 0);
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        if (gamma[i] == 0) continue;
        for (std::size_t j = 0; j + i < rho && j < rho; ++j) xi[i + j] ^= gf.mul(gamma[i], synd[j]);
    }
    const std::size_t tau = rho - e;
    std::vector<Elem> t_seq(xi.begin() + static_cast<std::ptrdiff_t>(e), xi.end());

    // Berlekamp-Massey for the error locator.
    std::vector<Elem> lam{1}, prev{1};
    std::size_t ll = 0;
    std::size_t shift = 1;
    Elem bdisc = 1;
    for (std::size_t it = 0; it < tau; ++it) {
        Elem delta = 0;
        for (std::size_t i = 0; i < lam.size() && i <= it; ++i) delta ^= gf.mul(lam[i], t_seq[it - i]);
        if (delta == 0) {
            ++shift;
            continue;
        }
        std::vector<Elem> next = lam;
        next.resize(std::max(lam.size(), prev.size() + shift), 0);
        const Elem coef = gf.div(delta, bdisc);
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= gf.mul(coef, prev[i]);
        if (2 * ll <= it) {
            prev = lam;
            ll = it + 1 - ll;
            bdisc = delta;
            shift = 1;
        } else {
            ++shift;
        }
        lam = std::move(next);
    }
    while (!lam.empty() && lam.back() == 0) lam.pop_back();
    if (lam.empty()) return std::nullopt;
    const std::size_t vdeg = lam.size() - 1;
    if (vdeg != ll || 2 * vdeg > tau) return std::nullopt;

    // Chien search over non-erased positions.
    std::vector<std::size_t> errpos;
    for (std::size_t j = 0; j < n; ++j) {
        if (w.erased[j]) continue;
        if (eval_coeffs(lam, gf.alpha_pow(-static_cast<long long>(j))) == 0) errpos.push_back(j);
    }
    if (errpos.size() != vdeg) return std::nullopt;

    // Errata locator Psi = Lambda * Gamma, evaluator Omega = S * Psi mod x^rho.
    std::vector<Elem> psi(lam.size() + gamma.size() - 1, 0);
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (lam[i] == 0) continue;
        for (std::size_t j = 0; j < gamma.size(); ++j) psi[i + j] ^= gf.mul(lam[i], gamma[j]);
    }
    std::vector<Elem> omega(rho, 0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (psi[i] == 0) continue;
        for (std::size_t j = 0; i + j < rho && j < rho; ++j) omega[i + j] ^= gf.mul(psi[i], synd[j]);
    }
    std::vector<Elem> psi_deriv;
    if (psi.size() > 1) {
        psi_deriv.assign(psi.size() - 1, 0);
        for (std::size_t i = 1; i < psi.size(); i += 2) psi_deriv[i - 1] = psi[i];
    }

    // Forney: e_j = X_j^(1-s) * Omega(X_j^-1) / Psi'(X_j^-1).
    std::vector<Elem> chat = r;
    std::vector<std::size_t> errata = erasures;
    errata.insert(errata.end(), errpos.begin(), errpos.end());
    for (auto j : errata) {
        const Elem xinv = gf.alpha_pow(-static_cast<long long>(j));
        const Elem num = eval_coeffs(omega, xinv);
        const Elem den = psi_deriv.empty() ? 0 : eval_coeffs(psi_deriv, xinv);
        if (den == 0) return std::nullopt;
        const Elem factor = gf.pow(gf.alpha_pow(static_cast<long long>(j)), 1 - static_cast<long long>(s));
        chat[j] ^= gf.mul(factor, gf.div(num, den));
    }
    for (std::size_t i = 0; i < rho; ++i)
        if (eval_coeffs(chat, gf.alpha_pow(s + i)) != 0) return std::nullopt;
    return make_result(std::move(chat));
}

}  // namespace ecrg
