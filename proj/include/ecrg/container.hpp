#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "gf.hpp"
#include "node_oracle.hpp"

namespace ecrg {

// Standard reflected CRC-32 (polynomial 0x04C11DB7, init and xorout
// 0xFFFFFFFF) — the integrity check that gates reconstruction rounds.
inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int b = 0; b < 8; ++b) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (auto byte : bytes) crc = table[(crc ^ byte) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

inline constexpr std::size_t frame_overhead = 8;  // u32 length + u32 crc

// length (u32 LE) || payload || crc32(length || payload) (u32 LE)
inline std::vector<std::uint8_t> frame_with_crc(std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> out;
    out.reserve(payload.size() + frame_overhead);
    const auto len = static_cast<std::uint32_t>(payload.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.insert(out.end(), payload.begin(), payload.end());
    const std::uint32_t crc = crc32({out.data(), out.size()});
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
    return out;
}

inline std::vector<std::uint8_t> verify_crc(std::span<const std::uint8_t> framed) {
    if (framed.size() < frame_overhead) throw IntegrityFailure("frame too short");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(framed[i]) << (8 * i);
    if (framed.size() != static_cast<std::size_t>(len) + frame_overhead)
        throw IntegrityFailure("frame length mismatch");
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= static_cast<std::uint32_t>(framed[framed.size() - 4 + i]) << (8 * i);
    if (crc32(framed.subspan(0, framed.size() - 4)) != stored)
        throw IntegrityFailure("crc mismatch");
    return {framed.begin() + 4, framed.end() - 4};
}

// MSB-first bitstream sliced into m-bit symbols; the final partial symbol is
// zero-padded on the right.
inline std::vector<Elem> pack_symbols(std::span<const std::uint8_t> bytes, unsigned m) {
    if (m < 2 || m > 16) throw InvalidParameter("symbol width must be in [2,16]");
    std::vector<Elem> out;
    out.reserve((bytes.size() * 8 + m - 1) / m);
    std::uint32_t acc = 0;
    unsigned bits = 0;
    for (auto byte : bytes) {
        acc = (acc << 8) | byte;
        bits += 8;
        while (bits >= m) {
            out.push_back(static_cast<Elem>((acc >> (bits - m)) & ((1u << m) - 1)));
            bits -= m;
        }
    }
    if (bits > 0) out.push_back(static_cast<Elem>((acc << (m - bits)) & ((1u << m) - 1)));
    return out;
}

inline std::vector<std::uint8_t> unpack_symbols(std::span<const Elem> symbols, unsigned m,
                                                std::size_t byte_len) {
    if (m < 2 || m > 16) throw InvalidParameter("symbol width must be in [2,16]");
    if (symbols.size() * m < byte_len * 8) throw DimensionError("not enough symbols for byte length");
    std::vector<std::uint8_t> out;
    out.reserve(byte_len);
    std::uint32_t acc = 0;
    unsigned bits = 0;
    for (auto sym : symbols) {
        acc = (acc << m) | (sym & ((1u << m) - 1));
        bits += m;
        while (bits >= 8 && out.size() < byte_len) {
            out.push_back(static_cast<std::uint8_t>((acc >> (bits - 8)) & 0xFFu));
            bits -= 8;
        }
        if (out.size() == byte_len) break;
    }
    return out;
}

// Split into fixed-size blocks, zero-padding the tail.
inline std::vector<std::vector<Elem>> stripe(std::span<const Elem> symbols, std::size_t block_len) {
    if (block_len == 0) throw InvalidParameter("block length must be positive");
    std::vector<std::vector<Elem>> blocks;
    for (std::size_t off = 0; off < symbols.size(); off += block_len) {
        std::vector<Elem> block(block_len, 0);
        const std::size_t take = std::min(block_len, symbols.size() - off);
        std::copy(symbols.begin() + static_cast<std::ptrdiff_t>(off),
                  symbols.begin() + static_cast<std::ptrdiff_t>(off + take), block.begin());
        blocks.push_back(std::move(block));
    }
    return blocks;
}

inline std::vector<Elem> unstripe(std::span<const std::vector<Elem>> blocks) {
    std::vector<Elem> out;
    for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
    return out;
}

enum class Scheme : std::uint8_t { msr = 1, mbr = 2 };

inline const char* scheme_name(Scheme s) { return s == Scheme::msr ? "msr" : "mbr"; }

// On-disk shard. Fixed little-endian layout:
//   "ECRG" | version u8 | scheme u8 | m u8 | reserved u8 | n u16 | k u16 |
//   d u16 | node_index u16 | gamma u16 | block_count u32 |
//   symbols_per_block u32 | original_byte_len u64 | symbols as u16 each.
struct ShardFile {
    Scheme scheme = Scheme::msr;
    unsigned m = 0;
    std::size_t n = 0, k = 0, d = 0;
    std::size_t node_index = 0;
    Elem gamma = 1;
    std::uint32_t block_count = 0;
    std::uint32_t symbols_per_block = 0;
    std::uint64_t original_byte_len = 0;
    std::vector<Elem> symbols;
};

inline constexpr char shard_magic[4] = {'E', 'C', 'R', 'G'};
inline constexpr std::uint8_t shard_version = 1;
inline constexpr std::size_t shard_header_len = 34;

inline std::vector<std::uint8_t> shard_to_bytes(const ShardFile& s) {
    if (s.symbols.size() != static_cast<std::size_t>(s.block_count) * s.symbols_per_block)
        throw DimensionError("shard symbol count does not match header");
    std::vector<std::uint8_t> out;
    out.reserve(shard_header_len + 2 * s.symbols.size());
    auto put16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    out.insert(out.end(), shard_magic, shard_magic + 4);
    out.push_back(shard_version);
    out.push_back(static_cast<std::uint8_t>(s.scheme));
    out.push_back(static_cast<std::uint8_t>(s.m));
    out.push_back(0);
    put16(static_cast<std::uint16_t>(s.n));
    put16(static_cast<std::uint16_t>(s.k));
    put16(static_cast<std::uint16_t>(s.d));
    put16(static_cast<std::uint16_t>(s.node_index));
    put16(s.gamma);
    put32(s.block_count);
    put32(s.symbols_per_block);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(s.original_byte_len >> (8 * i)));
    for (auto sym : s.symbols) put16(sym);
    return out;
}

inline ShardFile shard_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < shard_header_len) throw MalformedShard("shard truncated");
    if (!std::equal(shard_magic, shard_magic + 4, bytes.begin())) throw MalformedShard("bad magic");
    if (bytes[4] != shard_version) throw MalformedShard("unsupported shard version");
    ShardFile s;
    if (bytes[5] != 1 && bytes[5] != 2) throw MalformedShard("unknown scheme");
    s.scheme = static_cast<Scheme>(bytes[5]);
    s.m = bytes[6];
    if (s.m < 2 || s.m > 16) throw MalformedShard("field degree out of range");
    auto get16 = [&](std::size_t off) {
        return static_cast<std::uint16_t>(bytes[off] | (bytes[off + 1] << 8));
    };
    auto get32 = [&](std::size_t off) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[off + i]) << (8 * i);
        return v;
    };
    s.n = get16(8);
    s.k = get16(10);
    s.d = get16(12);
    s.node_index = get16(14);
    s.gamma = get16(16);
    s.block_count = get32(18);
    s.symbols_per_block = get32(22);
    for (int i = 0; i < 8; ++i)
        s.original_byte_len |= static_cast<std::uint64_t>(bytes[26 + i]) << (8 * i);
    const std::size_t count = static_cast<std::size_t>(s.block_count) * s.symbols_per_block;
    if (bytes.size() != shard_header_len + 2 * count) throw MalformedShard("shard payload size mismatch");
    s.symbols.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        s.symbols[i] = get16(shard_header_len + 2 * i);
        if (s.symbols[i] >= (1u << s.m)) throw MalformedShard("symbol outside the field");
    }
    return s;
}

inline void write_shard(const std::filesystem::path& path, const ShardFile& s) {
    const auto bytes = shard_to_bytes(s);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("write failed: " + path.string());
}

inline ShardFile read_shard(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MalformedShard("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return shard_from_bytes(bytes);
}

// Integrity predicate for reconstruction: the candidate message symbols must
// unpack to a valid CRC frame of the recorded byte length.
inline IntegrityCheck crc_framed_integrity(unsigned m, std::uint64_t original_byte_len) {
    const std::size_t framed_len = static_cast<std::size_t>(original_byte_len) + frame_overhead;
    return [m, framed_len, original_byte_len](std::span<const Elem> message) {
        if (message.size() * m < framed_len * 8) return false;
        try {
            const auto payload = verify_crc(unpack_symbols(message, m, framed_len));
            return payload.size() == original_byte_len;
        } catch (const IntegrityFailure&) {
            return false;
        }
    };
}

}  // namespace ecrg
