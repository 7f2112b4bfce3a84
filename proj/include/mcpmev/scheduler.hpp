#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcpmev::sched {

using TxId = std::string;

/// One transaction copy in a tick. Tips are integer smallest units so
/// duplicate-split payouts conserve exactly. Copies of the same logical
/// transaction share logical_id and must carry equal tips and equal deps.
struct Tx {
    TxId id;
    TxId logical_id;
    std::uint64_t tip = 0;
    std::string proposer;
    std::vector<TxId> deps;
    std::optional<double> t_da;
    std::uint64_t tie_hash = 0;
};

/// Per-tick proposer ranks; must form a permutation of 1..n.
class ProposerRank {
public:
    ProposerRank() = default;
    explicit ProposerRank(std::map<std::string, int> ranks);

    int rank_of(const std::string& proposer) const;
    const std::map<std::string, int>& ranks() const { return ranks_; }

private:
    std::map<std::string, int> ranks_;
};

/// Total-order priority key: higher tip first, then lower proposer rank,
/// then earlier DD timestamp (when present for all), then higher tie hash;
/// the id completes the order.
struct PriorityKey {
    std::uint64_t tip = 0;
    int rank = 0;
    bool has_t_da = false;
    double t_da = 0.0;
    std::uint64_t tie_hash = 0;
    TxId id;

    /// True when this key strictly precedes `other` in execution order.
    bool before(const PriorityKey& other) const;
};

PriorityKey priority_key(const Tx& tx, const ProposerRank& ranks);

/// Keys for a whole tick; rejects mixed timestamp presence.
std::vector<PriorityKey> priority_keys(std::span<const Tx> txs, const ProposerRank& ranks);

/// Deterministic non-grindable tie-break value: a keyed 64-bit hash of
/// (epoch seed, sender identity, sender nonce), stable across platforms.
std::uint64_t tie_hash(std::string_view epoch_seed, std::string_view sender,
                       std::uint64_t nonce);

/// SipHash-2-4 with an explicit 128-bit key (k0 low half, k1 high half).
std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, std::string_view data);

struct MergeResult {
    /// Execution order: surviving transactions minus pruned duplicate copies.
    std::vector<TxId> order;
    /// Full merge sequence including pruned copies (same relative order).
    std::vector<TxId> sequence;
    /// Transactions on a dependency cycle, with unresolved deps, or
    /// transitively dependent on either; sorted by id.
    std::vector<TxId> rejected;
    /// Duplicate copies that lost to an earlier copy of their logical tx.
    std::vector<TxId> pruned;
    std::map<std::string, std::uint64_t> payouts;   // proposer -> units
    std::map<TxId, TxId> executed;                  // logical id -> executing copy
    std::map<TxId, int> duplicate_counts;           // logical id -> surviving copies
    std::uint64_t burned = 0;                       // split remainders
};

/// Priority-DAG merge: Kahn's algorithm over the dependency DAG with a
/// max-heap keyed by priority_key. Transactions on any directed cycle are
/// rejected deterministically, together with everything that transitively
/// depends on a rejected transaction; unresolved dep references reject the
/// referring transaction the same way. Duplicate-aware payouts follow
/// split_tips. Runs in O(X log X + E).
MergeResult pdm_merge(std::span<const Tx> txs, const ProposerRank& ranks);

struct TipSplit {
    std::map<std::string, std::uint64_t> payouts;
    std::map<TxId, TxId> executed;
    std::map<TxId, int> duplicate_counts;
    std::vector<TxId> pruned;
    std::uint64_t burned = 0;
};

/// Duplicate-aware tip split over a merge sequence: the earliest copy of
/// each logical transaction executes, every copy's proposer receives
/// tip / m in integer units, and the division remainder (< m units) is
/// burned so payouts conserve exactly.
TipSplit split_tips(std::span<const Tx> txs, std::span<const TxId> sequence);

}  // namespace mcpmev::sched
