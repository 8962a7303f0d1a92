#pragma once

// Concrete induced posets: balls, spheres and annuli around [p] inside the
// Boolean lattice on [p+q], plus user-supplied posets given by generator
// relations. Elements of built families are stored as two bit sets (which
// center elements were removed, which far-side elements were added), so the
// sublayer coordinate is a pair of popcounts and the order test two masks.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballwidth/errors.hpp"
#include "ballwidth/sublayer.hpp"

namespace ballwidth {

inline constexpr std::size_t default_element_budget = 200000;
inline constexpr std::size_t max_side = 62;

struct PosetElement {
    std::uint64_t removal = 0;
    std::uint64_t addition = 0;

    std::size_t i() const noexcept { return static_cast<std::size_t>(std::popcount(removal)); }
    std::size_t j() const noexcept { return static_cast<std::size_t>(std::popcount(addition)); }
    SublayerCoord coord() const noexcept { return {i(), j()}; }

    friend bool operator==(const PosetElement&, const PosetElement&) = default;
};

/// Subset order: removals shrink and additions grow going up.
inline bool leq(const PosetElement& x, const PosetElement& y) noexcept
{
    return (y.removal & ~x.removal) == 0 && (x.addition & ~y.addition) == 0;
}

/// The represented subset of [p+q] as 1-based indices, far side shifted by p.
inline std::vector<std::size_t> members(const PosetElement& x, std::size_t p, std::size_t q)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < p; ++k) {
        if (((x.removal >> k) & 1U) == 0) {
            out.push_back(k + 1);
        }
    }
    for (std::size_t k = 0; k < q; ++k) {
        if (((x.addition >> k) & 1U) != 0) {
            out.push_back(p + k + 1);
        }
    }
    return out;
}

inline std::string to_set_string(const PosetElement& x, std::size_t p, std::size_t q)
{
    std::string s = "{";
    bool first = true;
    for (const std::size_t m : members(x, p, q)) {
        if (!first) {
            s += ",";
        }
        s += std::to_string(m);
        first = false;
    }
    return s + "}";
}

using ElementId = std::uint32_t;
using CoverLists = std::vector<std::vector<ElementId>>;

class PosetInstance {
public:
    bool is_custom() const noexcept { return !params_.has_value(); }
    std::size_t size() const noexcept { return heights_.size(); }

    /// Empty for custom posets.
    const std::vector<PosetElement>& elements() const noexcept { return elements_; }
    const PosetElement& element(ElementId id) const { return elements_.at(id); }

    const CoverLists& upper_covers() const noexcept { return upper_; }
    const CoverLists& lower_covers() const noexcept { return lower_; }

    const std::vector<std::size_t>& heights() const noexcept { return heights_; }
    std::size_t height(ElementId id) const { return heights_.at(id); }

    std::optional<SublayerCoord> sublayer(ElementId id) const
    {
        if (is_custom()) {
            return std::nullopt;
        }
        return elements_.at(id).coord();
    }

    const std::optional<GroundParams>& params() const noexcept { return params_; }
    const std::optional<Family>& family() const noexcept { return family_; }

    /// Strict order.
    bool less(ElementId a, ElementId b) const
    {
        if (a == b) {
            return false;
        }
        if (is_custom()) {
            return (closure_[a][b / 64] >> (b % 64)) & 1U;
        }
        return ballwidth::leq(elements_[a], elements_[b]);
    }

    bool comparable(ElementId a, ElementId b) const { return a == b || less(a, b) || less(b, a); }

    std::vector<ElementId> minimal_elements() const
    {
        std::vector<ElementId> out;
        for (ElementId v = 0; v < size(); ++v) {
            if (lower_[v].empty()) {
                out.push_back(v);
            }
        }
        return out;
    }

    std::vector<ElementId> maximal_elements() const
    {
        std::vector<ElementId> out;
        for (ElementId v = 0; v < size(); ++v) {
            if (upper_[v].empty()) {
                out.push_back(v);
            }
        }
        return out;
    }

    std::size_t max_height() const
    {
        return heights_.empty() ? 0 : *std::max_element(heights_.begin(), heights_.end());
    }

private:
    friend PosetInstance build_family(const GroundParams&, const Family&, std::size_t);
    friend PosetInstance build_custom_poset(std::size_t, const std::vector<std::pair<std::size_t, std::size_t>>&);

    PosetInstance() = default;

    std::optional<GroundParams> params_;
    std::optional<Family> family_;
    std::vector<PosetElement> elements_;
    CoverLists upper_;
    CoverLists lower_;
    std::vector<std::size_t> heights_;
    // Row a has bit b set iff a < b. Custom posets only.
    std::vector<std::vector<std::uint64_t>> closure_;
};

namespace detail {

inline std::uint64_t small_binomial(std::size_t n, std::size_t k)
{
    static const auto table = [] {
        std::vector<std::vector<std::uint64_t>> t(max_side + 1, std::vector<std::uint64_t>(max_side + 1, 0));
        for (std::size_t a = 0; a <= max_side; ++a) {
            t[a][0] = 1;
            for (std::size_t b = 1; b <= a; ++b) {
                t[a][b] = t[a - 1][b - 1] + (b <= a - 1 ? t[a - 1][b] : 0);
            }
        }
        return t;
    }();
    return k > n ? 0 : table[n][k];
}

/// Position of a k-subset in increasing-integer (colex) order.
inline std::uint64_t colex_rank(std::uint64_t mask)
{
    std::uint64_t rank = 0;
    std::size_t t = 1;
    while (mask != 0) {
        const auto pos = static_cast<std::size_t>(std::countr_zero(mask));
        rank += small_binomial(pos, t);
        ++t;
        mask &= mask - 1;
    }
    return rank;
}

/// All k-subsets of {0..n-1} as masks, increasing.
inline std::vector<std::uint64_t> k_subsets(std::size_t n, std::size_t k)
{
    std::vector<std::uint64_t> out;
    if (k > n) {
        return out;
    }
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    const std::uint64_t limit = std::uint64_t{1} << n;
    std::uint64_t x = (std::uint64_t{1} << k) - 1;
    while (x < limit) {
        out.push_back(x);
        const std::uint64_t c = x & (~x + 1);
        const std::uint64_t r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    return out;
}

/// Longest-path heights by Kahn's algorithm over upper covers.
inline std::vector<std::size_t> longest_path_heights(const CoverLists& upper)
{
    const std::size_t n = upper.size();
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& outs : upper) {
        for (const ElementId v : outs) {
            ++indegree[v];
        }
    }
    std::vector<std::size_t> height(n, 0);
    std::vector<ElementId> ready;
    for (ElementId v = 0; v < n; ++v) {
        if (indegree[v] == 0) {
            ready.push_back(v);
        }
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        const ElementId u = ready.back();
        ready.pop_back();
        ++seen;
        for (const ElementId v : upper[u]) {
            height[v] = std::max(height[v], height[u] + 1);
            if (--indegree[v] == 0) {
                ready.push_back(v);
            }
        }
    }
    if (seen != n) {
        throw malformed_order("order relation contains a cycle");
    }
    return height;
}

inline CoverLists invert(const CoverLists& upper)
{
    CoverLists lower(upper.size());
    for (ElementId u = 0; u < upper.size(); ++u) {
        for (const ElementId v : upper[u]) {
            lower[v].push_back(u);
        }
    }
    return lower;
}

} // namespace detail

/// Builds a ball, sphere or annulus. Covers inside an annulus of width >= 1
/// are single steps (restore one center element or add one far element);
/// inside a sphere they are double steps that do both.
inline PosetInstance build_family(const GroundParams& params, const Family& family,
                                  std::size_t budget = default_element_budget)
{
    params.validate();
    if (!family.is_annular()) {
        throw std::domain_error("element-level posets need a ball, sphere or annulus family");
    }
    if (params.p > max_side || params.q > max_side) {
        throw std::domain_error("p and q are limited to " + std::to_string(max_side));
    }
    const SublayerTable table(params, family);
    if (table.total() > budget) {
        throw budget_exceeded(family.name() + " instance", table.total(), BigInt(budget));
    }

    const auto coords = family.coords(params);
    std::map<SublayerCoord, std::size_t> offset;
    std::vector<PosetElement> raw;
    raw.reserve(static_cast<std::size_t>(table.total()));
    for (const auto& c : coords) {
        offset[c] = raw.size();
        const auto adds = detail::k_subsets(params.q, c.j);
        for (const std::uint64_t rem : detail::k_subsets(params.p, c.i)) {
            for (const std::uint64_t add : adds) {
                raw.push_back(PosetElement{rem, add});
            }
        }
    }
    auto index_of = [&](const PosetElement& x) -> ElementId {
        const std::size_t j = x.j();
        return static_cast<ElementId>(offset.at(x.coord()) +
                                      detail::colex_rank(x.removal) * detail::small_binomial(params.q, j) +
                                      detail::colex_rank(x.addition));
    };

    const std::uint64_t far_mask = params.q == 0 ? 0 : (std::uint64_t{1} << params.q) - 1;
    const bool sphere_like = family.lo() == family.hi();
    CoverLists upper(raw.size());
    for (ElementId u = 0; u < raw.size(); ++u) {
        const PosetElement& x = raw[u];
        const std::size_t k = x.i() + x.j();
        const std::uint64_t free_far = far_mask & ~x.addition;
        if (sphere_like) {
            for (std::uint64_t rem = x.removal; rem != 0; rem &= rem - 1) {
                const std::uint64_t bit = rem & (~rem + 1);
                for (std::uint64_t add = free_far; add != 0; add &= add - 1) {
                    const std::uint64_t abit = add & (~add + 1);
                    upper[u].push_back(index_of({x.removal & ~bit, x.addition | abit}));
                }
            }
            continue;
        }
        if (k >= family.lo() + 1) {
            for (std::uint64_t rem = x.removal; rem != 0; rem &= rem - 1) {
                const std::uint64_t bit = rem & (~rem + 1);
                upper[u].push_back(index_of({x.removal & ~bit, x.addition}));
            }
        }
        if (k + 1 <= family.hi()) {
            for (std::uint64_t add = free_far; add != 0; add &= add - 1) {
                const std::uint64_t abit = add & (~add + 1);
                upper[u].push_back(index_of({x.removal, x.addition | abit}));
            }
        }
    }
    const auto raw_heights = detail::longest_path_heights(upper);

    // Canonical order: (height, i, j, removal bits, addition bits).
    std::vector<ElementId> order(raw.size());
    std::iota(order.begin(), order.end(), ElementId{0});
    std::sort(order.begin(), order.end(), [&](ElementId a, ElementId b) {
        const auto key = [&](ElementId v) {
            return std::tuple(raw_heights[v], raw[v].i(), raw[v].j(), raw[v].removal, raw[v].addition);
        };
        return key(a) < key(b);
    });
    std::vector<ElementId> position(raw.size());
    for (ElementId k = 0; k < order.size(); ++k) {
        position[order[k]] = k;
    }

    PosetInstance out;
    out.params_ = params;
    out.family_ = family;
    out.elements_.resize(raw.size());
    out.heights_.resize(raw.size());
    out.upper_.resize(raw.size());
    for (ElementId k = 0; k < order.size(); ++k) {
        const ElementId old = order[k];
        out.elements_[k] = raw[old];
        out.heights_[k] = raw_heights[old];
        auto& ups = out.upper_[k];
        ups.reserve(upper[old].size());
        for (const ElementId v : upper[old]) {
            ups.push_back(position[v]);
        }
        std::sort(ups.begin(), ups.end());
    }
    out.lower_ = detail::invert(out.upper_);
    return out;
}

inline PosetInstance build_ball(const GroundParams& params, std::size_t budget = default_element_budget)
{
    return build_family(params, Family::ball(params.r), budget);
}

inline PosetInstance build_sphere(const GroundParams& params, std::size_t m,
                                  std::size_t budget = default_element_budget)
{
    return build_family(params, Family::sphere(m), budget);
}

/// Order = transitive closure of the generator pairs (u < v); covers are the
/// transitive reduction. Ids keep the caller's numbering.
inline PosetInstance build_custom_poset(std::size_t count,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& relations)
{
    CoverLists generators(count);
    for (std::size_t k = 0; k < relations.size(); ++k) {
        const auto [u, v] = relations[k];
        if (u >= count || v >= count) {
            throw format_error("relations[" + std::to_string(k) + "]: id out of range [0," +
                               std::to_string(count) + ")");
        }
        if (u == v) {
            throw malformed_order("relations[" + std::to_string(k) + "]: element " + std::to_string(u) +
                                  " related to itself");
        }
        generators[u].push_back(static_cast<ElementId>(v));
    }
    // Topological order doubles as cycle detection.
    std::vector<std::size_t> indegree(count, 0);
    for (const auto& outs : generators) {
        for (const ElementId v : outs) {
            ++indegree[v];
        }
    }
    std::vector<ElementId> topo;
    std::vector<ElementId> ready;
    for (ElementId v = 0; v < count; ++v) {
        if (indegree[v] == 0) {
            ready.push_back(v);
        }
    }
    while (!ready.empty()) {
        const ElementId u = ready.back();
        ready.pop_back();
        topo.push_back(u);
        for (const ElementId v : generators[u]) {
            if (--indegree[v] == 0) {
                ready.push_back(v);
            }
        }
    }
    if (topo.size() != count) {
        throw malformed_order("relations contain a cycle");
    }

    const std::size_t words = (count + 63) / 64;
    std::vector<std::vector<std::uint64_t>> closure(count, std::vector<std::uint64_t>(words, 0));
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const ElementId u = *it;
        for (const ElementId v : generators[u]) {
            closure[u][v / 64] |= std::uint64_t{1} << (v % 64);
            for (std::size_t w = 0; w < words; ++w) {
                closure[u][w] |= closure[v][w];
            }
        }
    }

    CoverLists upper(count);
    for (ElementId u = 0; u < count; ++u) {
        std::vector<std::uint64_t> reduced = closure[u];
        for (ElementId w = 0; w < count; ++w) {
            if ((closure[u][w / 64] >> (w % 64)) & 1U) {
                for (std::size_t k = 0; k < words; ++k) {
                    reduced[k] &= ~closure[w][k];
                }
            }
        }
        for (ElementId v = 0; v < count; ++v) {
            if ((reduced[v / 64] >> (v % 64)) & 1U) {
                upper[u].push_back(v);
            }
        }
    }

    PosetInstance out;
    out.heights_ = detail::longest_path_heights(upper);
    out.upper_ = std::move(upper);
    out.lower_ = detail::invert(out.upper_);
    out.closure_ = std::move(closure);
    return out;
}

/// Reads {"elements": n, "relations": [[u,v], ...]}.
inline PosetInstance load_custom_poset(const nlohmann::json& doc)
{
    if (!doc.is_object()) {
        throw format_error("custom poset: top level must be an object");
    }
    if (!doc.contains("elements") || !doc["elements"].is_number_unsigned()) {
        throw format_error("custom poset: \"elements\" must be a non-negative integer");
    }
    const auto count = doc["elements"].get<std::size_t>();
    std::vector<std::pair<std::size_t, std::size_t>> relations;
    if (doc.contains("relations")) {
        const auto& rel = doc["relations"];
        if (!rel.is_array()) {
            throw format_error("custom poset: \"relations\" must be an array");
        }
        for (std::size_t k = 0; k < rel.size(); ++k) {
            const auto& pair = rel[k];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
                !pair[1].is_number_unsigned()) {
                throw format_error("custom poset: relations[" + std::to_string(k) +
                                   "] must be a pair of non-negative integers");
            }
            relations.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
        }
    }
    return build_custom_poset(count, relations);
}

inline PosetInstance load_custom_poset(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error("custom poset: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return load_custom_poset(doc);
}

/// The sublayer-level digraph: the poset factored by relabelling the center
/// and far sides independently.
struct QuotientDag {
    GroundParams params;
    Family family = Family::ball(0);
    std::vector<SublayerCoord> coords;
    std::vector<std::pair<SublayerCoord, SublayerCoord>> edges;
    std::map<SublayerCoord, std::vector<SublayerCoord>> successors;
    std::map<SublayerCoord, std::size_t> height_of;
    std::optional<SublayerCoord> source;
    std::optional<SublayerCoord> sink;
    std::size_t max_height = 0;

    bool has_edge(const SublayerCoord& a, const SublayerCoord& b) const
    {
        auto it = successors.find(a);
        return it != successors.end() && std::find(it->second.begin(), it->second.end(), b) != it->second.end();
    }

    std::vector<SublayerCoord> layer(std::size_t h) const
    {
        std::vector<SublayerCoord> out;
        for (const auto& c : coords) {
            if (height_of.at(c) == h) {
                out.push_back(c);
            }
        }
        return out;
    }
};

namespace detail {

/// c <= d in the induced order on sublayers.
inline bool coord_leq(const SublayerCoord& c, const SublayerCoord& d) noexcept { return d.i <= c.i && c.j <= d.j; }

} // namespace detail

/// Hasse diagram of the sublayer order restricted to the family; throws
/// not_graded when some edge does not raise height by exactly one, unless
/// require_graded is false (heights are then longest-path heights).
inline QuotientDag quotient_dag(const GroundParams& params, const Family& family, bool require_graded = true)
{
    params.validate();
    if (!family.is_annular()) {
        throw std::domain_error("quotient digraph needs a ball, sphere or union of consecutive spheres");
    }
    QuotientDag dag;
    dag.params = params;
    dag.family = family;
    dag.coords = family.coords(params);
    auto member = [&](const SublayerCoord& c) { return family.contains(params, c); };

    for (const auto& c : dag.coords) {
        auto& succ = dag.successors[c];
        for (const auto& d : dag.coords) {
            if (d == c || !detail::coord_leq(c, d)) {
                continue;
            }
            bool cover = true;
            for (std::size_t i = d.i; i <= c.i && cover; ++i) {
                for (std::size_t j = c.j; j <= d.j; ++j) {
                    const SublayerCoord m{i, j};
                    if (m != c && m != d && member(m)) {
                        cover = false;
                        break;
                    }
                }
            }
            if (cover) {
                succ.push_back(d);
                dag.edges.emplace_back(c, d);
            }
        }
        std::sort(succ.begin(), succ.end());
    }
    std::sort(dag.edges.begin(), dag.edges.end());

    // Every edge raises j - i, so sorting by it is a topological order.
    std::vector<SublayerCoord> topo = dag.coords;
    std::stable_sort(topo.begin(), topo.end(), [](const SublayerCoord& a, const SublayerCoord& b) {
        return static_cast<long long>(a.j) - static_cast<long long>(a.i) <
               static_cast<long long>(b.j) - static_cast<long long>(b.i);
    });
    std::map<SublayerCoord, std::size_t> indegree;
    for (const auto& c : dag.coords) {
        dag.height_of[c] = 0;
        indegree[c] = 0;
    }
    for (const auto& [a, b] : dag.edges) {
        ++indegree[b];
    }
    for (const auto& c : topo) {
        for (const auto& d : dag.successors[c]) {
            dag.height_of[d] = std::max(dag.height_of[d], dag.height_of[c] + 1);
        }
    }
    for (const auto& [a, b] : dag.edges) {
        if (require_graded && dag.height_of[b] != dag.height_of[a] + 1) {
            throw not_graded("quotient edge " + to_string(a) + " -> " + to_string(b) + " skips a height");
        }
    }
    std::vector<SublayerCoord> sources;
    std::vector<SublayerCoord> sinks;
    for (const auto& c : dag.coords) {
        dag.max_height = std::max(dag.max_height, dag.height_of[c]);
        if (indegree[c] == 0) {
            sources.push_back(c);
        }
        if (dag.successors[c].empty()) {
            sinks.push_back(c);
        }
    }
    if (sources.size() == 1) {
        dag.source = sources.front();
    }
    if (sinks.size() == 1) {
        dag.sink = sinks.front();
    }
    return dag;
}

inline QuotientDag quotient_dag(const PosetInstance& instance)
{
    if (instance.is_custom()) {
        throw std::domain_error("custom posets carry no sublayer structure");
    }
    return quotient_dag(*instance.params(), *instance.family());
}

} // namespace ballwidth
