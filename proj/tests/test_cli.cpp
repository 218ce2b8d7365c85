#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = ECRG_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("ecrg_cli_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::uint8_t> read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    REQUIRE(f);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> random_bytes(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> out(count);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

// Overwrite the symbol region with different in-alphabet symbols so the file
// stays well-formed but the node turns Byzantine.
void corrupt_shard_symbols(const fs::path& p, unsigned m, std::uint64_t seed) {
    auto bytes = read_file(p);
    std::mt19937_64 rng(seed);
    REQUIRE(bytes.size() > 34);
    for (std::size_t off = 34; off + 1 < bytes.size(); off += 2) {
        const ecrg::Elem fresh = static_cast<ecrg::Elem>(rng() & ((1u << m) - 1));
        bytes[off] = static_cast<std::uint8_t>(fresh & 0xFF);
        bytes[off + 1] = static_cast<std::uint8_t>(fresh >> 8);
    }
    write_file(p, bytes);
}

}  // namespace

TEST_CASE("encode/reconstruct roundtrip with corrupted and missing shards", "[cli]") {
    for (const std::string scheme : {"msr", "mbr"}) {
        TempDir dir;
        const fs::path input = dir.path / "input.bin";
        const fs::path shards = dir.path / "shards";
        const fs::path output = dir.path / "out.bin";
        const auto payload = random_bytes(40000, 42);
        write_file(input, payload);

        const std::string dflag = scheme == "mbr" ? " --d 18" : "";
        REQUIRE(run("encode --scheme " + scheme + " --n 20 --k 10" + dflag +
                    " --m 5 --in " + input.string() + " --out " + shards.string()) == 0);
        for (int i = 0; i < 20; ++i) REQUIRE(fs::exists(shards / ("node_" + std::to_string(i) + ".ecrg")));

        SECTION("all shards intact: " + scheme) {
            REQUIRE(run("reconstruct --dir " + shards.string() + " --out " + output.string()) == 0);
            REQUIRE(read_file(output) == payload);
        }

        SECTION("five corrupted shards: " + scheme) {
            for (int i : {2, 5, 9, 13, 17})
                corrupt_shard_symbols(shards / ("node_" + std::to_string(i) + ".ecrg"), 5, 100 + i);
            REQUIRE(run("reconstruct --dir " + shards.string() + " --out " + output.string()) == 0);
            REQUIRE(read_file(output) == payload);
        }

        SECTION("below the reconstruction threshold: " + scheme) {
            for (int i = 0; i < 11; ++i) fs::remove(shards / ("node_" + std::to_string(i) + ".ecrg"));
            REQUIRE(run("reconstruct --dir " + shards.string() + " --out " + output.string()) == 1);
        }

        SECTION("regenerate a deleted shard byte-identically: " + scheme) {
            const fs::path victim = shards / "node_7.ecrg";
            const auto original = read_file(victim);
            fs::remove(victim);
            REQUIRE(run("regenerate --dir " + shards.string() + " --node 7") == 0);
            REQUIRE(read_file(victim) == original);

            // refuses to overwrite without --force
            REQUIRE(run("regenerate --dir " + shards.string() + " --node 7") == 2);
            REQUIRE(run("regenerate --dir " + shards.string() + " --node 7 --force") == 0);
            REQUIRE(read_file(victim) == original);
        }

        SECTION("regeneration with fewer than d survivors fails: " + scheme) {
            for (int i = 0; i < 3; ++i) fs::remove(shards / ("node_" + std::to_string(i) + ".ecrg"));
            REQUIRE(run("regenerate --dir " + shards.string() + " --node 0") == 1);
        }
    }
}

TEST_CASE("one-mebibyte file roundtrips through corrupted shards", "[cli]") {
    TempDir dir;
    const fs::path input = dir.path / "big.bin";
    const fs::path shards = dir.path / "shards";
    const fs::path output = dir.path / "out.bin";
    const auto payload = random_bytes(1u << 20, 1234);
    write_file(input, payload);
    REQUIRE(run("encode --scheme msr --n 20 --k 10 --m 5 --in " + input.string() + " --out " +
                shards.string()) == 0);
    for (int i : {3, 6, 11, 16, 18})
        corrupt_shard_symbols(shards / ("node_" + std::to_string(i) + ".ecrg"), 5, 500 + i);
    REQUIRE(run("reconstruct --dir " + shards.string() + " --out " + output.string()) == 0);
    REQUIRE(read_file(output) == payload);
}

TEST_CASE("empty input file roundtrips", "[cli]") {
    TempDir dir;
    const fs::path input = dir.path / "empty.bin";
    const fs::path shards = dir.path / "shards";
    const fs::path output = dir.path / "out.bin";
    write_file(input, {});
    REQUIRE(run("encode --scheme msr --n 20 --k 10 --m 5 --in " + input.string() + " --out " +
                shards.string()) == 0);
    REQUIRE(run("reconstruct --dir " + shards.string() + " --out " + output.string()) == 0);
    REQUIRE(read_file(output).empty());
}

TEST_CASE("invalid parameters exit with code 2", "[cli]") {
    TempDir dir;
    const fs::path input = dir.path / "input.bin";
    write_file(input, random_bytes(100, 3));
    // gcd(2^4 - 1, k - 1) = 3: rejected by the generator construction rule
    REQUIRE(run("encode --scheme msr --n 15 --k 4 --m 4 --in " + input.string() + " --out " +
                (dir.path / "s").string()) == 2);
    // n exceeds the field
    REQUIRE(run("encode --scheme msr --n 40 --k 10 --m 5 --in " + input.string() + " --out " +
                (dir.path / "s2").string()) == 2);
    // mbr without --d
    REQUIRE(run("encode --scheme mbr --n 20 --k 10 --m 5 --in " + input.string() + " --out " +
                (dir.path / "s3").string()) == 2);
    // unknown flag
    REQUIRE(run("encode --bogus 1") == 2);
    // reconstruct on an empty directory
    fs::create_directories(dir.path / "none");
    REQUIRE(run("reconstruct --dir " + (dir.path / "none").string() + " --out " +
                (dir.path / "o").string()) == 2);
}

TEST_CASE("mixed shard sets are rejected", "[cli]") {
    TempDir dir;
    const fs::path input = dir.path / "input.bin";
    write_file(input, random_bytes(200, 5));
    const fs::path a = dir.path / "a";
    const fs::path b = dir.path / "b";
    REQUIRE(run("encode --scheme msr --n 20 --k 10 --m 5 --in " + input.string() + " --out " +
                a.string()) == 0);
    REQUIRE(run("encode --scheme msr --n 21 --k 10 --m 5 --in " + input.string() + " --out " +
                b.string()) == 0);
    fs::copy_file(b / "node_0.ecrg", a / "node_0.ecrg", fs::copy_options::overwrite_existing);
    REQUIRE(run("reconstruct --dir " + a.string() + " --out " + (dir.path / "o").string()) == 2);

    // renamed shard: header index disagrees with the filename
    fs::copy_file(a / "node_1.ecrg", a / "node_0.ecrg", fs::copy_options::overwrite_existing);
    REQUIRE(run("reconstruct --dir " + a.string() + " --out " + (dir.path / "o").string()) == 2);
}

TEST_CASE("simulate is reproducible and honors trivial grids", "[cli]") {
    TempDir dir;
    const fs::path csv1 = dir.path / "a.csv";
    const fs::path csv2 = dir.path / "b.csv";
    const std::string flags =
        "simulate --scheme msr --n 20 --k 10 --m 5 --p 0:0.2:0.1 --runs 40 --seed 77";
    REQUIRE(run(flags + " --out " + csv1.string()) == 0);
    REQUIRE(run(flags + " --out " + csv2.string()) == 0);
    REQUIRE(read_file(csv1) == read_file(csv2));

    const fs::path csv3 = dir.path / "c.csv";
    REQUIRE(run("simulate --scheme msr --n 20 --k 10 --m 5 --p 0 --runs 10 --seed 1 --out " +
                csv3.string()) == 0);
    const auto bytes = read_file(csv3);
    const std::string text(bytes.begin(), bytes.end());
    REQUIRE(text.find("0,0.000000,10.000000") != std::string::npos);

    // seed is mandatory, bad grids exit 2
    REQUIRE(run("simulate --scheme msr --n 20 --k 10 --m 5 --p 0.1 --runs 5") == 2);
    REQUIRE(run("simulate --scheme msr --n 20 --k 10 --m 5 --p 2.0 --runs 5 --seed 1") == 2);
}

TEST_CASE("inspect prints and validates generators", "[cli]") {
    REQUIRE(run("inspect --scheme msr --n 20 --k 10 --m 5") == 0);
    REQUIRE(run("inspect --scheme mbr --n 20 --k 10 --d 18 --m 5") == 0);
    REQUIRE(run("inspect --scheme msr --n 15 --k 4 --m 4") == 2);
}
