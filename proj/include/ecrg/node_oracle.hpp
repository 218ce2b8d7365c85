#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gf.hpp"

namespace ecrg {

// Data source for reconstruction: answers one share request per node per
// session. A node may be unavailable (crash-stop) or may answer with
// corrupted symbols (Byzantine); the decoders deal with both.
class NodeOracle {
  public:
    virtual ~NodeOracle() = default;
    virtual std::optional<std::vector<Elem>> fetch(std::size_t node_index) = 0;
};

// Canned in-memory oracle used by the simulator and tests.
class MemoryOracle : public NodeOracle {
  public:
    explicit MemoryOracle(std::vector<std::optional<std::vector<Elem>>> shares)
        : shares_(std::move(shares)) {}

    std::optional<std::vector<Elem>> fetch(std::size_t node_index) override {
        if (node_index >= shares_.size()) return std::nullopt;
        ++fetch_count_;
        return shares_[node_index];
    }

    std::size_t fetch_count() const { return fetch_count_; }

  private:
    std::vector<std::optional<std::vector<Elem>>> shares_;
    std::size_t fetch_count_ = 0;
};

// Predicate run on a candidate message before a reconstruction round is
// accepted; normally the CRC frame check from the container module.
using IntegrityCheck = std::function<bool(std::span<const Elem>)>;

struct ReconstructResult {
    std::vector<Elem> message;
    std::size_t nodes_accessed = 0;
    std::vector<std::size_t> accessed_nodes;
    std::vector<std::size_t> corrected_nodes;
};

struct HelperSymbol {
    std::size_t node_index = 0;
    Elem value = 0;
};

}  // namespace ecrg
