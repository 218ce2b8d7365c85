// ecrg — encode files into regenerating-code shards, reconstruct them from
// (possibly Byzantine) shard sets, regenerate lost shards, inspect code
// properties, and run failure-rate simulations.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecrg/ecrg.hpp"

namespace fs = std::filesystem;
using namespace ecrg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_decode_failure = 1;
constexpr int exit_bad_input = 2;

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidParameter("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidParameter("cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw InvalidParameter("write failed: " + path.string());
}

fs::path shard_path(const fs::path& dir, std::size_t index) {
    return dir / ("node_" + std::to_string(index) + ".ecrg");
}

// Every node_<i>.ecrg in the directory, keyed by index. Header fields must
// agree across shards and with the embedded node index.
std::map<std::size_t, ShardFile> load_shard_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InvalidParameter("not a directory: " + dir.string());
    std::map<std::size_t, ShardFile> shards;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() < 11 || name.rfind("node_", 0) != 0 || name.substr(name.size() - 5) != ".ecrg")
            continue;
        const std::string digits = name.substr(5, name.size() - 10);
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
            continue;
        const std::size_t index = std::stoul(digits);
        ShardFile s = read_shard(entry.path());
        if (s.node_index != index)
            throw MalformedShard(name + ": header node index " + std::to_string(s.node_index) +
                                 " does not match filename");
        shards.emplace(index, std::move(s));
    }
    if (shards.empty()) throw MalformedShard("no node_<i>.ecrg shards in " + dir.string());
    const ShardFile& ref = shards.begin()->second;
    for (const auto& [idx, s] : shards) {
        if (s.scheme != ref.scheme || s.m != ref.m || s.n != ref.n || s.k != ref.k || s.d != ref.d ||
            s.gamma != ref.gamma || s.block_count != ref.block_count ||
            s.symbols_per_block != ref.symbols_per_block ||
            s.original_byte_len != ref.original_byte_len)
            throw MalformedShard("shard headers disagree (mixed shard sets?)");
        if (idx >= s.n) throw MalformedShard("shard index exceeds n");
    }
    return shards;
}

class ShardOracle : public NodeOracle {
  public:
    explicit ShardOracle(const std::map<std::size_t, ShardFile>& shards) : shards_(shards) {}

    std::optional<std::vector<Elem>> fetch(std::size_t node_index) override {
        auto it = shards_.find(node_index);
        if (it == shards_.end()) return std::nullopt;
        return it->second.symbols;
    }

  private:
    const std::map<std::size_t, ShardFile>& shards_;
};

struct CodeOptions {
    std::string scheme = "msr";
    std::size_t n = 0, k = 0, d = 0;
    unsigned m = 0;
    Elem gamma = 1;
};

void add_code_options(CLI::App* cmd, CodeOptions& opt, bool need_d_flag) {
    cmd->add_option("--scheme", opt.scheme, "Code family: msr or mbr")
        ->check(CLI::IsMember({"msr", "mbr"}));
    cmd->add_option("--n", opt.n, "Number of storage nodes")->required();
    cmd->add_option("--k", opt.k, "Reconstruction threshold")->required();
    if (need_d_flag)
        cmd->add_option("--d", opt.d, "Helper count (derived as 2k-2 for msr; required for mbr)");
    cmd->add_option("--m", opt.m, "Field degree, symbols live in GF(2^m)")->required();
    cmd->add_option("--gamma", opt.gamma, "MSR delta scale, nonzero field element (default 1)");
}

std::size_t resolve_d(const CodeOptions& opt) {
    if (opt.scheme == "msr") {
        const std::size_t derived = 2 * opt.k - 2;
        if (opt.d != 0 && opt.d != derived)
            throw InvalidParameter("msr derives d = 2k - 2; got --d " + std::to_string(opt.d));
        return derived;
    }
    if (opt.d == 0) throw InvalidParameter("mbr requires --d");
    return opt.d;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    const auto colon1 = text.find(':');
    if (colon1 != std::string::npos) {
        const auto colon2 = text.find(':', colon1 + 1);
        if (colon2 == std::string::npos) throw InvalidParameter("grid must be start:stop:step");
        const double start = std::stod(text.substr(0, colon1));
        const double stop = std::stod(text.substr(colon1 + 1, colon2 - colon1 - 1));
        const double step = std::stod(text.substr(colon2 + 1));
        if (step <= 0 || stop < start) throw InvalidParameter("bad grid range");
        const auto count = static_cast<std::size_t>((stop - start) / step + 0.5);
        for (std::size_t i = 0; i <= count; ++i) grid.push_back(start + static_cast<double>(i) * step);
        return grid;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) grid.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (grid.empty()) throw InvalidParameter("empty probability grid");
    return grid;
}

void print_matrix(const char* name, const Matrix& m) {
    std::printf("%s (%zux%zu):\n", name, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) std::printf("%s%u", j ? " " : "  ", m(i, j));
        std::printf("\n");
    }
}

int cmd_encode(const CodeOptions& opt, const fs::path& input, const fs::path& out_dir) {
    const std::size_t d = resolve_d(opt);
    const auto payload = read_file(input);
    const auto framed = frame_with_crc(payload);

    std::size_t message_len = 0, symbols_per_block = 0;
    std::optional<MsrParams> mp;
    std::optional<MsrGenerator> mg;
    std::optional<MbrParams> bp;
    std::optional<MbrGenerator> bg;
    UpdateComplexity uc;
    if (opt.scheme == "msr") {
        mp = msr_params_new(opt.n, opt.k, opt.m, opt.gamma);
        mg = msr_build_generator(*mp);
        message_len = mp->message_len;
        symbols_per_block = mp->alpha;
        uc = update_complexity(mg->g_full);
    } else {
        bp = mbr_params_new(opt.n, opt.k, d, opt.m);
        bg = mbr_build_generator(*bp);
        message_len = bp->message_len;
        symbols_per_block = bp->alpha;
        uc = update_complexity(bg->g_full);
    }

    const auto symbols = pack_symbols(framed, opt.m);
    const auto blocks = stripe(symbols, message_len);

    fs::create_directories(out_dir);
    std::vector<std::vector<Elem>> node_symbols(opt.n);
    for (const auto& block : blocks) {
        if (opt.scheme == "msr") {
            const auto shares = msr_encode(*mp, *mg, block);
            for (std::size_t i = 0; i < opt.n; ++i)
                node_symbols[i].insert(node_symbols[i].end(), shares[i].symbols.begin(),
                                       shares[i].symbols.end());
        } else {
            const auto shares = mbr_encode(*bp, *bg, block);
            for (std::size_t i = 0; i < opt.n; ++i)
                node_symbols[i].insert(node_symbols[i].end(), shares[i].symbols.begin(),
                                       shares[i].symbols.end());
        }
    }
    for (std::size_t i = 0; i < opt.n; ++i) {
        ShardFile s;
        s.scheme = opt.scheme == "msr" ? Scheme::msr : Scheme::mbr;
        s.m = opt.m;
        s.n = opt.n;
        s.k = opt.k;
        s.d = d;
        s.node_index = i;
        s.gamma = opt.scheme == "msr" ? opt.gamma : 0;
        s.block_count = static_cast<std::uint32_t>(blocks.size());
        s.symbols_per_block = static_cast<std::uint32_t>(symbols_per_block);
        s.original_byte_len = payload.size();
        s.symbols = std::move(node_symbols[i]);
        write_shard(shard_path(out_dir, i), s);
    }
    std::printf("scheme=%s n=%zu k=%zu d=%zu m=%u\n", opt.scheme.c_str(), opt.n, opt.k, d, opt.m);
    std::printf("B=%zu symbols per codeword, alpha=%zu symbols per node, blocks=%zu\n", message_len,
                symbols_per_block, blocks.size());
    std::printf("update complexity: max row weight %zu of %zu (eta=%.4f)\n", uc.max_row_weight,
                uc.row_len, uc.eta());
    std::printf("wrote %zu shards to %s\n", opt.n, out_dir.string().c_str());
    return exit_ok;
}

int cmd_reconstruct(const fs::path& dir, const fs::path& out_path) {
    const auto shards = load_shard_dir(dir);
    const ShardFile& ref = shards.begin()->second;
    ShardOracle oracle(shards);
    const auto integrity = crc_framed_integrity(ref.m, ref.original_byte_len);

    std::optional<ReconstructResult> res;
    if (ref.scheme == Scheme::msr) {
        const auto p = msr_params_new(ref.n, ref.k, ref.m, ref.gamma);
        if (ref.symbols_per_block != p.alpha) throw MalformedShard("symbols per block must equal alpha");
        const auto gen = msr_build_generator(p);
        res = msr_reconstruct(p, gen, oracle, integrity);
    } else {
        const auto p = mbr_params_new(ref.n, ref.k, ref.d, ref.m);
        if (ref.symbols_per_block != p.alpha) throw MalformedShard("symbols per block must equal d");
        const auto gen = mbr_build_generator(p);
        res = mbr_reconstruct(p, gen, oracle, integrity);
    }
    if (!res) {
        std::fprintf(stderr, "reconstruction failed: error capability or node supply exhausted\n");
        return exit_decode_failure;
    }
    const auto framed = unpack_symbols(res->message, ref.m, ref.original_byte_len + frame_overhead);
    const auto payload = verify_crc(framed);
    write_file(out_path, payload);
    std::printf("nodes accessed: %zu\n", res->nodes_accessed);
    std::printf("corrected nodes:");
    for (auto idx : res->corrected_nodes) std::printf(" %zu", idx);
    std::printf("%s\n", res->corrected_nodes.empty() ? " none" : "");
    std::printf("wrote %zu bytes to %s\n", payload.size(), out_path.string().c_str());
    return exit_ok;
}

int cmd_regenerate(const fs::path& dir, std::size_t failed_index, bool force) {
    const auto shards = load_shard_dir(dir);
    const ShardFile& ref = shards.begin()->second;
    if (failed_index >= ref.n) throw InvalidParameter("failed node index exceeds n");
    if (shards.count(failed_index) && !force)
        throw InvalidParameter("shard for node " + std::to_string(failed_index) +
                               " already exists; pass --force to overwrite");

    std::vector<std::size_t> helpers_idx;
    for (const auto& [idx, s] : shards)
        if (idx != failed_index) helpers_idx.push_back(idx);
    if (helpers_idx.size() < ref.d) {
        std::fprintf(stderr, "regeneration failed: %zu surviving shards, need %zu\n", helpers_idx.size(),
                     ref.d);
        return exit_decode_failure;
    }

    ShardFile out = ref;
    out.node_index = failed_index;
    out.symbols.clear();
    try {
        if (ref.scheme == Scheme::msr) {
            const auto p = msr_params_new(ref.n, ref.k, ref.m, ref.gamma);
            if (ref.symbols_per_block != p.alpha) throw MalformedShard("symbols per block must equal alpha");
            const auto gen = msr_build_generator(p);
            for (std::uint32_t b = 0; b < ref.block_count; ++b) {
                std::vector<HelperSymbol> helpers;
                for (auto idx : helpers_idx) {
                    MsrShare share{idx,
                                   {shards.at(idx).symbols.begin() + b * p.alpha,
                                    shards.at(idx).symbols.begin() + (b + 1) * p.alpha}};
                    helpers.push_back({idx, msr_helper_symbol(p, gen, share, failed_index)});
                }
                const auto share = msr_regenerate(p, gen, failed_index, helpers);
                out.symbols.insert(out.symbols.end(), share.symbols.begin(), share.symbols.end());
            }
        } else {
            const auto p = mbr_params_new(ref.n, ref.k, ref.d, ref.m);
            if (ref.symbols_per_block != p.d) throw MalformedShard("symbols per block must equal d");
            const auto gen = mbr_build_generator(p);
            for (std::uint32_t b = 0; b < ref.block_count; ++b) {
                std::vector<HelperSymbol> helpers;
                for (auto idx : helpers_idx) {
                    MbrShare share{idx,
                                   {shards.at(idx).symbols.begin() + b * p.d,
                                    shards.at(idx).symbols.begin() + (b + 1) * p.d}};
                    helpers.push_back({idx, mbr_helper_symbol(p, gen, share, failed_index)});
                }
                const auto share = mbr_regenerate(p, gen, failed_index, helpers);
                out.symbols.insert(out.symbols.end(), share.symbols.begin(), share.symbols.end());
            }
        }
    } catch (const InsufficientHelpers& e) {
        std::fprintf(stderr, "regeneration failed: %s\n", e.what());
        return exit_decode_failure;
    } catch (const RegenerationFailure& e) {
        std::fprintf(stderr, "regeneration failed: %s\n", e.what());
        return exit_decode_failure;
    }
    write_shard(shard_path(dir, failed_index), out);
    std::printf("regenerated node %zu from %zu helpers -> %s\n", failed_index, helpers_idx.size(),
                shard_path(dir, failed_index).string().c_str());
    return exit_ok;
}

int cmd_simulate(const CodeOptions& opt, const std::string& grid_text, std::size_t runs,
                 std::uint64_t seed, const std::string& mode, double rate, const std::string& out_file,
                 const std::string& json_file) {
    SimConfig cfg;
    cfg.scheme = opt.scheme == "msr" ? Scheme::msr : Scheme::mbr;
    cfg.n = opt.n;
    cfg.k = opt.k;
    cfg.d = resolve_d(opt);
    cfg.m = opt.m;
    cfg.gamma = opt.gamma;
    cfg.p_grid = parse_grid(grid_text);
    cfg.runs = runs;
    cfg.master_seed = seed;
    cfg.corruption = mode == "full" ? CorruptionKind::full_share : CorruptionKind::per_symbol;
    cfg.symbol_rate = rate;

    const SimEngine engine(cfg);
    const auto rows = engine.run_sweep();
    const std::string csv = sweep_csv(cfg, rows);
    if (out_file.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(out_file, std::ios::trunc);
        if (!f) throw InvalidParameter("cannot write " + out_file);
        f << csv;
    }
    if (!json_file.empty()) {
        std::ofstream f(json_file, std::ios::trunc);
        if (!f) throw InvalidParameter("cannot write " + json_file);
        f << sweep_json(cfg, rows);
    }
    return exit_ok;
}

int cmd_inspect(const CodeOptions& opt) {
    const std::size_t d = resolve_d(opt);
    if (opt.scheme == "msr") {
        const auto p = msr_params_new(opt.n, opt.k, opt.m, opt.gamma);
        const auto gen = msr_build_generator(p);
        std::printf("msr [n=%zu k=%zu d=%zu] m=%u gamma=%u alpha=%zu B=%zu\n", p.n, p.k, p.d, p.m,
                    p.gamma, p.alpha, p.message_len);
        print_matrix("Gbar", gen.gbar);
        std::printf("delta diagonal:");
        for (auto b : gen.delta_diag) std::printf(" %u", b);
        std::printf("\n");
        print_matrix("G = [Gbar; Gbar*Delta]", gen.g_full);
        const auto uc = update_complexity(gen.g_full);
        std::printf("update complexity: max row weight %zu of %zu (eta=%.4f)\n", uc.max_row_weight,
                    uc.row_len, uc.eta());
        const auto rep = msr_verify_generator(p, gen);
        std::printf("generator checks: distinct_diagonal=%s coset_membership=%s full_rank=%s "
                    "product_rows_in_code=%s\n",
                    rep.distinct_diagonal ? "pass" : "FAIL", rep.coset_membership ? "pass" : "FAIL",
                    rep.full_rank ? "pass" : "FAIL", rep.product_rows_in_code ? "pass" : "FAIL");
        return rep.all_pass() ? exit_ok : exit_decode_failure;
    }
    const auto p = mbr_params_new(opt.n, opt.k, d, opt.m);
    const auto gen = mbr_build_generator(p);
    std::printf("mbr [n=%zu k=%zu d=%zu] m=%u alpha=%zu B=%zu\n", p.n, p.k, p.d, p.m, p.alpha,
                p.message_len);
    print_matrix("G_k", gen.g_k);
    print_matrix("B", gen.b_mat);
    const auto uc = update_complexity(gen.g_full);
    std::printf("update complexity: max row weight %zu of %zu (eta=%.4f)\n", uc.max_row_weight,
                uc.row_len, uc.eta());
    const bool rank_ok = mat_rank(p.field, gen.g_full) == p.d;
    std::printf("generator checks: rank_d=%s\n", rank_ok ? "pass" : "FAIL");
    return rank_ok ? exit_ok : exit_decode_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"error-correcting regenerating codes (MSR/MBR over GF(2^m))"};
    app.require_subcommand(1);

    CodeOptions enc_opt;
    std::string enc_in, enc_out;
    auto* enc = app.add_subcommand("encode", "Encode a file into n shards");
    add_code_options(enc, enc_opt, true);
    enc->add_option("--in", enc_in, "Input file")->required();
    enc->add_option("--out", enc_out, "Output shard directory")->required();

    std::string rec_dir, rec_out;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct the original file from shards");
    rec->add_option("--dir", rec_dir, "Shard directory")->required();
    rec->add_option("--out", rec_out, "Output file")->required();

    std::string reg_dir;
    std::size_t reg_node = 0;
    bool reg_force = false;
    auto* reg = app.add_subcommand("regenerate", "Regenerate one node's shard from survivors");
    reg->add_option("--dir", reg_dir, "Shard directory")->required();
    reg->add_option("--node", reg_node, "Failed node index")->required();
    reg->add_flag("--force", reg_force, "Overwrite an existing shard");

    CodeOptions sim_opt;
    std::string sim_grid = "0:0.5:0.05", sim_mode = "full", sim_out, sim_json;
    std::size_t sim_runs = 1000;
    std::uint64_t sim_seed = 0;
    double sim_rate = 0.5;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo Byzantine-failure sweep (CSV)");
    add_code_options(sim, sim_opt, true);
    sim->add_option("--p", sim_grid, "Failure probabilities: start:stop:step, comma list, or one value");
    sim->add_option("--runs", sim_runs, "Trials per grid point");
    sim->add_option("--seed", sim_seed, "Master seed (required for reproducibility)")->required();
    sim->add_option("--mode", sim_mode, "Corruption model")->check(CLI::IsMember({"full", "symbol"}));
    sim->add_option("--rate", sim_rate, "Per-symbol corruption rate (symbol mode)");
    sim->add_option("--out", sim_out, "CSV output file (default stdout)");
    sim->add_option("--json", sim_json, "Also write a JSON summary here");

    CodeOptions ins_opt;
    auto* ins = app.add_subcommand("inspect", "Print generator matrices and code properties");
    add_code_options(ins, ins_opt, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_bad_input;
    }

    try {
        if (enc->parsed()) return cmd_encode(enc_opt, enc_in, enc_out);
        if (rec->parsed()) return cmd_reconstruct(rec_dir, rec_out);
        if (reg->parsed()) return cmd_regenerate(reg_dir, reg_node, reg_force);
        if (sim->parsed())
            return cmd_simulate(sim_opt, sim_grid, sim_runs, sim_seed, sim_mode, sim_rate, sim_out,
                                sim_json);
        if (ins->parsed()) return cmd_inspect(ins_opt);
    } catch (const IntegrityFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_decode_failure;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_bad_input;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_bad_input;
    }
    return exit_bad_input;
}
