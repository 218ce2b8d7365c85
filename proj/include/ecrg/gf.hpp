#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ecrg {

// One code/storage symbol. Fields are capped at GF(2^16) so a symbol always
// fits in 16 bits, matching the on-disk shard format.
using Elem = std::uint16_t;

// Default primitive polynomials over GF(2), one per extension degree.
// Bit i is the coefficient of x^i, so 0x13 = x^4 + x + 1.
inline std::uint32_t default_primitive_poly(unsigned m) {
    switch (m) {
        case 2: return 0x7;
        case 3: return 0xB;
        case 4: return 0x13;
        case 5: return 0x25;
        case 6: return 0x43;
        case 7: return 0x83;
        case 8: return 0x11D;
        case 9: return 0x211;
        case 10: return 0x409;
        case 11: return 0x805;
        case 12: return 0x1053;
        case 13: return 0x201B;
        case 14: return 0x4443;
        case 15: return 0x8003;
        case 16: return 0x1100B;
        default: throw InvalidParameter("field degree must be in [2,16]");
    }
}

// GF(2^m) arithmetic backed by log/antilog tables built eagerly at
// construction. The element 2 (the polynomial x) is the canonical generator;
// every root exponent and locator in the codecs refers to powers of it.
// Immutable after construction, safe to share across threads.
class Field {
  public:
    explicit Field(unsigned m, std::uint32_t primitive_poly = 0) : m_(m) {
        if (m < 2 || m > 16) throw InvalidParameter("field degree must be in [2,16]");
        poly_ = primitive_poly ? primitive_poly : default_primitive_poly(m);
        const std::uint32_t q = 1u << m;
        if ((poly_ >> m) != 1u || (poly_ & 1u) == 0)
            throw InvalidParameter("primitive polynomial must have degree m and nonzero constant term");
        exp_.assign(2 * (q - 1), 0);
        log_.assign(q, 0);
        std::uint32_t b = 1;
        for (std::uint32_t i = 0; i < q - 1; ++i) {
            if (b == 1 && i > 0) throw InvalidParameter("polynomial is not primitive");
            exp_[i] = static_cast<Elem>(b);
            log_[b] = i;
            b <<= 1;
            if (b & q) b ^= poly_;
        }
        if (b != 1) throw InvalidParameter("polynomial is not primitive");
        for (std::uint32_t i = 0; i < q - 1; ++i) exp_[q - 1 + i] = exp_[i];
    }

    unsigned degree() const { return m_; }
    std::uint32_t order() const { return 1u << m_; }
    std::uint32_t primitive_poly() const { return poly_; }

    // The canonical generator a (the polynomial x).
    Elem generator() const { return 2; }

    static Elem add(Elem x, Elem y) { return x ^ y; }

    Elem mul(Elem x, Elem y) const {
        if (x == 0 || y == 0) return 0;
        return exp_[log_[x] + log_[y]];
    }

    Elem inv(Elem x) const {
        if (x == 0) throw DivisionByZero("inverse of zero");
        return exp_[order() - 1 - log_[x]];
    }

    Elem div(Elem x, Elem y) const {
        if (y == 0) throw DivisionByZero("division by zero");
        if (x == 0) return 0;
        return exp_[log_[x] + order() - 1 - log_[y]];
    }

    unsigned log(Elem x) const {
        if (x == 0) throw DivisionByZero("log of zero");
        return log_[x];
    }

    // a^e with e reduced mod 2^m - 1 (negative exponents allowed).
    Elem alpha_pow(long long e) const {
        const long long q1 = static_cast<long long>(order()) - 1;
        long long r = e % q1;
        if (r < 0) r += q1;
        return exp_[static_cast<std::size_t>(r)];
    }

    Elem pow(Elem x, long long e) const {
        if (x == 0) {
            if (e > 0) return 0;
            if (e == 0) return 1;
            throw DivisionByZero("negative power of zero");
        }
        const long long q1 = static_cast<long long>(order()) - 1;
        long long r = (static_cast<long long>(log_[x]) * (e % q1)) % q1;
        if (r < 0) r += q1;
        return exp_[static_cast<std::size_t>(r)];
    }

  private:
    unsigned m_;
    std::uint32_t poly_;
    std::vector<Elem> exp_;
    std::vector<std::uint32_t> log_;
};

// Univariate polynomial over GF(2^m). coeffs[i] multiplies x^i; the vector is
// kept normalized (no trailing zeros), so the zero polynomial is empty.
struct Poly {
    std::vector<Elem> coeffs;

    Poly() = default;
    explicit Poly(std::vector<Elem> c) : coeffs(std::move(c)) { normalize(); }

    static Poly zero() { return Poly{}; }
    static Poly one() { return Poly{{1}}; }

    bool is_zero() const { return coeffs.empty(); }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    void normalize() {
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    }
};

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly out;
    out.coeffs.resize(std::max(a.coeffs.size(), b.coeffs.size()), 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] = a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) out.coeffs[i] ^= b.coeffs[i];
    out.normalize();
    return out;
}

inline Poly poly_scale(const Field& gf, const Poly& a, Elem s) {
    if (s == 0) return Poly::zero();
    Poly out = a;
    for (auto& c : out.coeffs) c = gf.mul(c, s);
    return out;
}

inline Poly poly_mul(const Field& gf, const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly::zero();
    Poly out;
    out.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (a.coeffs[i] == 0) continue;
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            out.coeffs[i + j] ^= gf.mul(a.coeffs[i], b.coeffs[j]);
    }
    out.normalize();
    return out;
}

// Multiply by x^i.
inline Poly poly_shift(const Poly& a, std::size_t i) {
    if (a.is_zero()) return a;
    Poly out;
    out.coeffs.assign(a.coeffs.size() + i, 0);
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) out.coeffs[i + j] = a.coeffs[j];
    return out;
}

// Horner evaluation.
inline Elem poly_eval(const Field& gf, const Poly& p, Elem x) {
    Elem acc = 0;
    for (std::size_t i = p.coeffs.size(); i-- > 0;) acc = static_cast<Elem>(gf.mul(acc, x) ^ p.coeffs[i]);
    return acc;
}

inline std::pair<Poly, Poly> poly_divmod(const Field& gf, Poly num, const Poly& den) {
    if (den.is_zero()) throw DivisionByZero("polynomial division by zero");
    Poly quot;
    if (num.degree() < den.degree()) return {quot, num};
    quot.coeffs.assign(num.coeffs.size() - den.coeffs.size() + 1, 0);
    const Elem lead_inv = gf.inv(den.coeffs.back());
    for (std::size_t i = num.coeffs.size(); i-- >= den.coeffs.size();) {
        const Elem c = gf.mul(num.coeffs[i], lead_inv);
        if (c != 0) {
            quot.coeffs[i - den.coeffs.size() + 1] = c;
            for (std::size_t j = 0; j < den.coeffs.size(); ++j)
                num.coeffs[i - den.coeffs.size() + 1 + j] ^= gf.mul(c, den.coeffs[j]);
        }
        if (i == den.coeffs.size() - 1) break;
    }
    quot.normalize();
    num.normalize();
    return {quot, num};
}

// Formal derivative; in characteristic 2 only odd-degree terms survive.
inline Poly poly_derivative(const Poly& a) {
    Poly out;
    if (a.coeffs.size() < 2) return out;
    out.coeffs.assign(a.coeffs.size() - 1, 0);
    for (std::size_t i = 1; i < a.coeffs.size(); i += 2) out.coeffs[i - 1] = a.coeffs[i];
    out.normalize();
    return out;
}

// Monic polynomial with roots a^s, a^(s+1), ..., a^(s+num_roots-1).
inline Poly gen_poly(const Field& gf, unsigned first_root_exp, std::size_t num_roots) {
    if (num_roots > gf.order() - 1) throw InvalidParameter("root count exceeds field order");
    Poly g = Poly::one();
    for (std::size_t i = 0; i < num_roots; ++i)
        g = poly_mul(gf, g, Poly{{gf.alpha_pow(first_root_exp + i), 1}});
    return g;
}

}  // namespace ecrg
