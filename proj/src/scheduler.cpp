#include "mcpmev/scheduler.hpp"

#include <algorithm>
#include <cstring>
#include <queue>
#include <unordered_map>

#include "mcpmev/errors.hpp"

namespace mcpmev::sched {

ProposerRank::ProposerRank(std::map<std::string, int> ranks) : ranks_(std::move(ranks)) {
    std::vector<int> seen;
    seen.reserve(ranks_.size());
    for (const auto& [id, r] : ranks_) seen.push_back(r);
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] != static_cast<int>(i) + 1)
            throw DomainError("ProposerRank: ranks must be a permutation of 1..n");
}

int ProposerRank::rank_of(const std::string& proposer) const {
    const auto it = ranks_.find(proposer);
    if (it == ranks_.end()) throw UnknownProposer("unknown proposer: " + proposer);
    return it->second;
}

bool PriorityKey::before(const PriorityKey& other) const {
    if (tip != other.tip) return tip > other.tip;
    if (rank != other.rank) return rank < other.rank;
    if (has_t_da && t_da != other.t_da) return t_da < other.t_da;
    if (tie_hash != other.tie_hash) return tie_hash > other.tie_hash;
    return id < other.id;
}

PriorityKey priority_key(const Tx& tx, const ProposerRank& ranks) {
    PriorityKey key;
    key.tip = tx.tip;
    key.rank = ranks.rank_of(tx.proposer);
    key.has_t_da = tx.t_da.has_value();
    key.t_da = tx.t_da.value_or(0.0);
    key.tie_hash = tx.tie_hash;
    key.id = tx.id;
    return key;
}

std::vector<PriorityKey> priority_keys(std::span<const Tx> txs, const ProposerRank& ranks) {
    std::vector<PriorityKey> keys;
    keys.reserve(txs.size());
    bool any_t_da = false, any_absent = false;
    for (const Tx& tx : txs) {
        (tx.t_da.has_value() ? any_t_da : any_absent) = true;
        keys.push_back(priority_key(tx, ranks));
    }
    if (any_t_da && any_absent)
        throw MixedTimestampPresence("timestamps must be present for all transactions or none");
    return keys;
}

// ---------------------------------------------------------------------------
// SipHash-2-4

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

inline void sipround(std::uint64_t& v0, std::uint64_t& v1, std::uint64_t& v2, std::uint64_t& v3) {
    v0 += v1;
    v1 = rotl64(v1, 13);
    v1 ^= v0;
    v0 = rotl64(v0, 32);
    v2 += v3;
    v3 = rotl64(v3, 16);
    v3 ^= v2;
    v0 += v3;
    v3 = rotl64(v3, 21);
    v3 ^= v0;
    v2 += v1;
    v1 = rotl64(v1, 17);
    v1 ^= v2;
    v2 = rotl64(v2, 32);
}

inline std::uint64_t load_le64(const unsigned char* p, std::size_t n) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, std::string_view data) {
    std::uint64_t v0 = k0 ^ 0x736f6d6570736575ULL;
    std::uint64_t v1 = k1 ^ 0x646f72616e646f6dULL;
    std::uint64_t v2 = k0 ^ 0x6c7967656e657261ULL;
    std::uint64_t v3 = k1 ^ 0x7465646279746573ULL;
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    std::size_t n = data.size();
    const std::uint64_t b_len = static_cast<std::uint64_t>(n & 0xFF) << 56;
    while (n >= 8) {
        const std::uint64_t m = load_le64(p, 8);
        v3 ^= m;
        sipround(v0, v1, v2, v3);
        sipround(v0, v1, v2, v3);
        v0 ^= m;
        p += 8;
        n -= 8;
    }
    const std::uint64_t m = load_le64(p, n) | b_len;
    v3 ^= m;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    v0 ^= m;
    v2 ^= 0xFF;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    return v0 ^ v1 ^ v2 ^ v3;
}

std::uint64_t tie_hash(std::string_view epoch_seed, std::string_view sender,
                       std::uint64_t nonce) {
    static constexpr char kKey[17] = "mcpmev tie hash!";
    std::uint64_t k0, k1;
    std::memcpy(&k0, kKey, 8);
    std::memcpy(&k1, kKey + 8, 8);
    // Length-prefixed framing keeps (epoch, sender, nonce) unambiguous.
    std::string msg;
    msg.reserve(epoch_seed.size() + sender.size() + 24);
    append_u64_le(msg, epoch_seed.size());
    msg.append(epoch_seed);
    append_u64_le(msg, sender.size());
    msg.append(sender);
    append_u64_le(msg, nonce);
    return siphash24(k0, k1, msg);
}

// ---------------------------------------------------------------------------
// Merge

namespace {

// Vertices of any strongly connected component of size >= 2, plus self-loops.
std::vector<bool> cyclic_vertices(std::size_t n, const std::vector<std::vector<int>>& out) {
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<int> comp_size;
    int next_index = 0;

    // Iterative Tarjan; frames hold (vertex, next child position).
    struct Frame {
        int v;
        std::size_t child;
    };
    std::vector<Frame> frames;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        frames.push_back({static_cast<int>(root), 0});
        while (!frames.empty()) {
            Frame& f = frames.back();
            const int v = f.v;
            if (f.child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (f.child < out[static_cast<std::size_t>(v)].size()) {
                const int w = out[static_cast<std::size_t>(v)][f.child++];
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                const int c = static_cast<int>(comp_size.size());
                int size = 0;
                for (;;) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = c;
                    ++size;
                    if (w == v) break;
                }
                comp_size.push_back(size);
            }
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }

    std::vector<bool> cyclic(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        if (comp_size[static_cast<std::size_t>(comp[v])] >= 2) cyclic[v] = true;
        for (int w : out[v])
            if (w == static_cast<int>(v)) cyclic[v] = true;
    }
    return cyclic;
}

}  // namespace

TipSplit split_tips(std::span<const Tx> txs, std::span<const TxId> sequence) {
    std::unordered_map<std::string_view, const Tx*> by_id;
    by_id.reserve(txs.size());
    for (const Tx& tx : txs) by_id.emplace(tx.id, &tx);

    TipSplit out;
    // Count surviving copies and enforce one posted tip per logical tx.
    std::map<TxId, std::uint64_t> logical_tip;
    for (const TxId& id : sequence) {
        const Tx& tx = *by_id.at(id);
        auto [it, fresh] = logical_tip.emplace(tx.logical_id, tx.tip);
        if (!fresh && it->second != tx.tip)
            throw InconsistentDuplicateTips("copies of " + tx.logical_id +
                                            " carry different tips");
        ++out.duplicate_counts[tx.logical_id];
    }
    for (const TxId& id : sequence) {
        const Tx& tx = *by_id.at(id);
        const auto m = static_cast<std::uint64_t>(out.duplicate_counts.at(tx.logical_id));
        const std::uint64_t share = tx.tip / m;
        out.payouts[tx.proposer] += share;
        auto [it, fresh] = out.executed.emplace(tx.logical_id, id);
        if (fresh) {
            out.burned += tx.tip - share * m;
        } else {
            out.pruned.push_back(id);
        }
    }
    return out;
}

MergeResult pdm_merge(std::span<const Tx> txs, const ProposerRank& ranks) {
    const std::size_t n = txs.size();

    std::unordered_map<std::string_view, int> idx;
    idx.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [it, fresh] = idx.emplace(txs[i].id, static_cast<int>(i));
        if (!fresh) throw DuplicateId("duplicate transaction id: " + txs[i].id);
    }

    const std::vector<PriorityKey> keys = priority_keys(txs, ranks);

    // Copies of one logical transaction must agree on tip and deps.
    {
        std::unordered_map<std::string_view, const Tx*> logical_rep;
        for (const Tx& tx : txs) {
            const auto [it, fresh] = logical_rep.emplace(tx.logical_id, &tx);
            if (fresh) continue;
            const Tx& rep = *it->second;
            if (rep.tip != tx.tip)
                throw InconsistentDuplicateTips("copies of " + tx.logical_id +
                                                " carry different tips");
            auto a = rep.deps, b = tx.deps;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b)
                throw InconsistentDuplicateDeps("copies of " + tx.logical_id +
                                                " declare different deps");
        }
    }

    // Dependency edges dep -> dependent; unresolved references reject the
    // referring transaction outright.
    std::vector<std::vector<int>> out_edges(n);
    std::vector<int> indegree(n, 0);
    std::vector<bool> rejected(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        for (const TxId& dep : txs[i].deps) {
            const auto it = idx.find(dep);
            if (it == idx.end()) {
                rejected[i] = true;
                continue;
            }
            out_edges[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
            ++indegree[i];
        }
    }

    const std::vector<bool> cyclic = cyclic_vertices(n, out_edges);
    for (std::size_t i = 0; i < n; ++i)
        if (cyclic[i]) rejected[i] = true;

    // Everything downstream of a rejected transaction can never execute.
    {
        std::vector<int> frontier;
        for (std::size_t i = 0; i < n; ++i)
            if (rejected[i]) frontier.push_back(static_cast<int>(i));
        while (!frontier.empty()) {
            const int v = frontier.back();
            frontier.pop_back();
            for (int w : out_edges[static_cast<std::size_t>(v)]) {
                if (!rejected[static_cast<std::size_t>(w)]) {
                    rejected[static_cast<std::size_t>(w)] = true;
                    frontier.push_back(w);
                }
            }
        }
    }

    // Kahn's algorithm over the survivors, max-heap keyed by priority.
    const auto heap_cmp = [&](int a, int b) {
        // priority_queue pops the "largest"; invert before().
        return keys[static_cast<std::size_t>(b)].before(keys[static_cast<std::size_t>(a)]);
    };
    std::priority_queue<int, std::vector<int>, decltype(heap_cmp)> heap(heap_cmp);

    std::vector<int> live_indegree = indegree;
    for (std::size_t i = 0; i < n; ++i) {
        if (rejected[i]) continue;
        int d = 0;
        for (const TxId& dep : txs[i].deps) {
            const auto it = idx.find(dep);
            if (it != idx.end() && !rejected[static_cast<std::size_t>(it->second)]) ++d;
        }
        live_indegree[i] = d;
        if (d == 0) heap.push(static_cast<int>(i));
    }

    MergeResult result;
    result.sequence.reserve(n);
    while (!heap.empty()) {
        const int v = heap.top();
        heap.pop();
        result.sequence.push_back(txs[static_cast<std::size_t>(v)].id);
        for (int w : out_edges[static_cast<std::size_t>(v)]) {
            if (rejected[static_cast<std::size_t>(w)]) continue;
            if (--live_indegree[static_cast<std::size_t>(w)] == 0) heap.push(w);
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (rejected[i]) result.rejected.push_back(txs[i].id);
    std::sort(result.rejected.begin(), result.rejected.end());

    TipSplit split = split_tips(txs, result.sequence);
    result.payouts = std::move(split.payouts);
    result.executed = std::move(split.executed);
    result.duplicate_counts = std::move(split.duplicate_counts);
    result.pruned = std::move(split.pruned);
    result.burned = split.burned;

    std::vector<bool> is_pruned(n, false);
    for (const TxId& id : result.pruned) is_pruned[static_cast<std::size_t>(idx.at(id))] = true;
    result.order.reserve(result.sequence.size() - result.pruned.size());
    for (const TxId& id : result.sequence)
        if (!is_pruned[static_cast<std::size_t>(idx.at(id))]) result.order.push_back(id);

    return result;
}

}  // namespace mcpmev::sched
