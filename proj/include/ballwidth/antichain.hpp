#pragma once

// Width engines. Two independent routes to the same number:
//   - Dilworth/Koenig: maximum bipartite matching on the comparability
//     relation (Hopcroft-Karp); width = n - matching.
//   - Minimum flow with node lower bounds on the cover digraph; its value is
//     the maximum weight of an antichain, which for unit weights is the width.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "ballwidth/bigint.hpp"
#include "ballwidth/errors.hpp"
#include "ballwidth/flow.hpp"
#include "ballwidth/poset.hpp"

namespace ballwidth {

inline constexpr std::size_t default_matching_budget = 20000;

struct AntichainWitness {
    std::vector<ElementId> elements;

    std::size_t size() const noexcept { return elements.size(); }
};

struct ChainPartition {
    std::vector<std::vector<std::size_t>> chains;

    std::size_t size() const noexcept { return chains.size(); }
};

using WeightVector = std::vector<BigInt>;

struct WidthResult {
    std::size_t width = 0;
    AntichainWitness witness;
};

struct WeightedAntichain {
    BigInt value;
    AntichainWitness witness;
};

struct KlymResult {
    bool holds = false;
    Rational max_lym_sum;
    AntichainWitness witness;
    BigInt scale;
};

inline bool is_antichain(const PosetInstance& instance, const std::vector<ElementId>& ids)
{
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            if (ids[a] == ids[b] || instance.comparable(ids[a], ids[b])) {
                return false;
            }
        }
    }
    return true;
}

namespace detail {

inline void check_budget(const PosetInstance& instance, std::size_t budget)
{
    if (instance.size() > budget) {
        throw budget_exceeded("matching oracle", BigInt(instance.size()), BigInt(budget));
    }
}

/// Bipartite graph u -> v for u < v, over a subset of the instance given as ids.
inline std::vector<std::vector<std::uint32_t>> comparability_graph(const PosetInstance& instance,
                                                                   const std::vector<ElementId>& ids)
{
    std::vector<std::uint32_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return instance.height(ids[a]) < instance.height(ids[b]);
    });
    std::vector<std::vector<std::uint32_t>> adj(ids.size());
    for (std::size_t a = 0; a < order.size(); ++a) {
        const std::uint32_t u = order[a];
        const std::size_t hu = instance.height(ids[u]);
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const std::uint32_t v = order[b];
            if (instance.height(ids[v]) > hu && instance.less(ids[u], ids[v])) {
                adj[u].push_back(v);
            }
        }
        std::sort(adj[u].begin(), adj[u].end());
    }
    return adj;
}

class HopcroftKarp {
public:
    static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

    explicit HopcroftKarp(const std::vector<std::vector<std::uint32_t>>& adj)
        : adj_(adj), match_l_(adj.size(), none), match_r_(adj.size(), none), dist_(adj.size())
    {
        while (bfs()) {
            for (std::uint32_t u = 0; u < adj_.size(); ++u) {
                if (match_l_[u] == none && dfs(u)) {
                    ++size_;
                }
            }
        }
    }

    std::size_t size() const noexcept { return size_; }
    const std::vector<std::uint32_t>& match_left() const noexcept { return match_l_; }
    const std::vector<std::uint32_t>& match_right() const noexcept { return match_r_; }

    /// Koenig: left vertices reachable by alternating paths from free left
    /// vertices, and the right vertices seen on the way.
    std::pair<std::vector<bool>, std::vector<bool>> alternating_reach() const
    {
        std::vector<bool> left(adj_.size(), false);
        std::vector<bool> right(adj_.size(), false);
        std::queue<std::uint32_t> queue;
        for (std::uint32_t u = 0; u < adj_.size(); ++u) {
            if (match_l_[u] == none) {
                left[u] = true;
                queue.push(u);
            }
        }
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop();
            for (const std::uint32_t v : adj_[u]) {
                if (right[v]) {
                    continue;
                }
                right[v] = true;
                const std::uint32_t w = match_r_[v];
                if (w != none && !left[w]) {
                    left[w] = true;
                    queue.push(w);
                }
            }
        }
        return {left, right};
    }

private:
    static constexpr std::uint32_t inf = std::numeric_limits<std::uint32_t>::max();

    bool bfs()
    {
        std::queue<std::uint32_t> queue;
        bool found = false;
        for (std::uint32_t u = 0; u < adj_.size(); ++u) {
            if (match_l_[u] == none) {
                dist_[u] = 0;
                queue.push(u);
            } else {
                dist_[u] = inf;
            }
        }
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop();
            for (const std::uint32_t v : adj_[u]) {
                const std::uint32_t w = match_r_[v];
                if (w == none) {
                    found = true;
                } else if (dist_[w] == inf) {
                    dist_[w] = dist_[u] + 1;
                    queue.push(w);
                }
            }
        }
        return found;
    }

    bool dfs(std::uint32_t u)
    {
        for (const std::uint32_t v : adj_[u]) {
            const std::uint32_t w = match_r_[v];
            if (w == none || (dist_[w] == dist_[u] + 1 && dfs(w))) {
                match_l_[u] = v;
                match_r_[v] = u;
                return true;
            }
        }
        dist_[u] = inf;
        return false;
    }

    const std::vector<std::vector<std::uint32_t>>& adj_;
    std::vector<std::uint32_t> match_l_;
    std::vector<std::uint32_t> match_r_;
    std::vector<std::uint32_t> dist_;
    std::size_t size_ = 0;
};

inline std::vector<ElementId> all_ids(const PosetInstance& instance)
{
    std::vector<ElementId> ids(instance.size());
    std::iota(ids.begin(), ids.end(), ElementId{0});
    return ids;
}

inline WidthResult width_of_subset(const PosetInstance& instance, const std::vector<ElementId>& ids)
{
    const auto adj = comparability_graph(instance, ids);
    const HopcroftKarp matching(adj);
    const auto [left, right] = matching.alternating_reach();
    WidthResult out;
    out.width = ids.size() - matching.size();
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (left[k] && !right[k]) {
            out.witness.elements.push_back(ids[k]);
        }
    }
    std::sort(out.witness.elements.begin(), out.witness.elements.end());
    if (out.witness.size() != out.width || !is_antichain(instance, out.witness.elements)) {
        throw consistency_error("matching witness is not an antichain of the reported width");
    }
    return out;
}

} // namespace detail

inline WidthResult width(const PosetInstance& instance, std::size_t budget = default_matching_budget)
{
    detail::check_budget(instance, budget);
    return detail::width_of_subset(instance, detail::all_ids(instance));
}

/// Dilworth chain cover read off the same matching: a matched pair u -> v
/// puts v directly after u in a chain.
inline ChainPartition min_chain_partition(const PosetInstance& instance, std::size_t budget = default_matching_budget)
{
    detail::check_budget(instance, budget);
    const auto ids = detail::all_ids(instance);
    const auto adj = detail::comparability_graph(instance, ids);
    const detail::HopcroftKarp matching(adj);
    ChainPartition out;
    const auto& next = matching.match_left();
    const auto& prev = matching.match_right();
    for (std::uint32_t u = 0; u < ids.size(); ++u) {
        if (prev[u] != detail::HopcroftKarp::none) {
            continue;
        }
        std::vector<std::size_t> chain;
        for (std::uint32_t v = u; v != detail::HopcroftKarp::none; v = next[v]) {
            chain.push_back(ids[v]);
        }
        out.chains.push_back(std::move(chain));
    }
    if (out.size() != ids.size() - matching.size()) {
        throw consistency_error("chain count differs from n - matching");
    }
    return out;
}

/// Maximum total weight of an antichain, as the minimum value of a flow that
/// sends at least weight(x) through every element x along cover arcs.
inline WeightedAntichain max_weight_antichain(const PosetInstance& instance, const WeightVector& weights,
                                              std::size_t budget = default_matching_budget)
{
    detail::check_budget(instance, budget);
    const std::size_t n = instance.size();
    if (weights.size() != n) {
        throw precondition_error("weight vector length differs from element count");
    }
    for (const auto& w : weights) {
        if (w < 0) {
            throw precondition_error("weights must be non-negative");
        }
    }
    const std::size_t s = 2 * n;
    const std::size_t t = 2 * n + 1;
    LowerBoundedFlow<BigInt> flow(2 * n + 2);
    for (ElementId x = 0; x < n; ++x) {
        flow.add_arc(2 * x, 2 * x + 1, weights[x]);
        for (const ElementId y : instance.upper_covers()[x]) {
            flow.add_arc(2 * x + 1, 2 * y, 0);
        }
        if (instance.lower_covers()[x].empty()) {
            flow.add_arc(s, 2 * x, 0);
        }
        if (instance.upper_covers()[x].empty()) {
            flow.add_arc(2 * x + 1, t, 0);
        }
    }
    if (!flow.find_feasible(s, t)) {
        throw consistency_error("uncapacitated lower-bound flow reported infeasible");
    }
    WeightedAntichain out;
    out.value = flow.minimize();
    const auto reach = flow.residual_reachable_from_sink();
    BigInt total = 0;
    for (ElementId x = 0; x < n; ++x) {
        if (reach[2 * x + 1] && !reach[2 * x]) {
            out.witness.elements.push_back(x);
            total += weights[x];
        }
    }
    if (total != out.value || !is_antichain(instance, out.witness.elements)) {
        throw consistency_error("residual cut does not yield an antichain of the minimum-flow weight");
    }
    return out;
}

inline WeightVector unit_weights(const PosetInstance& instance) { return WeightVector(instance.size(), BigInt(1)); }

/// Layer sizes by intrinsic height.
inline std::vector<BigInt> layer_sizes(const PosetInstance& instance)
{
    std::vector<BigInt> sizes(instance.size() == 0 ? 0 : instance.max_height() + 1, 0);
    for (const std::size_t h : instance.heights()) {
        sizes[h] += 1;
    }
    return sizes;
}

/// Weights M / |L_h(x)| with M the lcm of the layer sizes.
inline std::pair<WeightVector, BigInt> klym_weights(const PosetInstance& instance)
{
    const auto sizes = layer_sizes(instance);
    BigInt scale = 1;
    for (const auto& s : sizes) {
        scale = boost::multiprecision::lcm(scale, s);
    }
    WeightVector weights(instance.size());
    for (ElementId x = 0; x < instance.size(); ++x) {
        weights[x] = scale / sizes[instance.height(x)];
    }
    return {std::move(weights), scale};
}

inline KlymResult check_klym(const PosetInstance& instance, std::size_t budget = default_matching_budget)
{
    auto [weights, scale] = klym_weights(instance);
    auto best = max_weight_antichain(instance, weights, budget);
    KlymResult out;
    out.holds = best.value <= scale;
    out.max_lym_sum = Rational(best.value, scale);
    out.witness = std::move(best.witness);
    out.scale = std::move(scale);
    return out;
}

/// True iff no maximum antichain other than the candidate exists. Every other
/// maximum antichain contains an element x outside the candidate, and the
/// largest antichain through x has 1 + width(elements incomparable to x).
/// When the candidate is a union of whole sublayers of a built family, one
/// representative per sublayer suffices: relabelling the two sides maps the
/// candidate to itself and acts transitively on each sublayer.
inline bool is_unique_max_antichain(const PosetInstance& instance, const AntichainWitness& candidate,
                                    std::size_t budget = default_matching_budget)
{
    detail::check_budget(instance, budget);
    if (!is_antichain(instance, candidate.elements)) {
        throw precondition_error("candidate is not an antichain");
    }
    const std::size_t w = width(instance, budget).width;
    if (candidate.size() != w) {
        throw precondition_error("candidate has size " + std::to_string(candidate.size()) + " but the width is " +
                                 std::to_string(w));
    }
    std::vector<bool> in_candidate(instance.size(), false);
    for (const ElementId x : candidate.elements) {
        in_candidate[x] = true;
    }

    std::vector<ElementId> probes;
    bool orbit_union = !instance.is_custom();
    if (orbit_union) {
        std::map<SublayerCoord, std::pair<std::size_t, std::size_t>> counts;
        for (ElementId x = 0; x < instance.size(); ++x) {
            auto& [inside, total] = counts[instance.element(x).coord()];
            ++total;
            inside += in_candidate[x] ? 1 : 0;
        }
        orbit_union = std::all_of(counts.begin(), counts.end(), [](const auto& kv) {
            return kv.second.first == 0 || kv.second.first == kv.second.second;
        });
    }
    if (orbit_union) {
        std::set<SublayerCoord> seen;
        for (ElementId x = 0; x < instance.size(); ++x) {
            if (!in_candidate[x] && seen.insert(instance.element(x).coord()).second) {
                probes.push_back(x);
            }
        }
    } else {
        for (ElementId x = 0; x < instance.size(); ++x) {
            if (!in_candidate[x]) {
                probes.push_back(x);
            }
        }
    }

    for (const ElementId x : probes) {
        std::vector<ElementId> rest;
        for (ElementId y = 0; y < instance.size(); ++y) {
            if (!instance.comparable(x, y)) {
                rest.push_back(y);
            }
        }
        if (1 + detail::width_of_subset(instance, rest).width >= w) {
            return false;
        }
    }
    return true;
}

} // namespace ballwidth
