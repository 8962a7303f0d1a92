#pragma once

// Layer certificates on the sublayer quotient.
//
// A certificate is a weighted family of source-to-sink paths ("profiles") in
// the quotient digraph. Read back in the poset, each profile stands for all
// relabellings of one maximal chain, so the per-element coverage of sublayer
// c is N_c / |X_c|. If that rate is exactly 1 on a target layer and at least
// 1 everywhere else, every antichain A satisfies |A| <= sum over A of rates
// <= number of chains = |target layer|, so the target layer is a maximum
// antichain. Rates strictly above 1 off the target make it the only one.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballwidth/bigint.hpp"
#include "ballwidth/errors.hpp"
#include "ballwidth/flow.hpp"
#include "ballwidth/poset.hpp"
#include "ballwidth/sublayer.hpp"

namespace ballwidth {

struct ChainProfile {
    std::vector<SublayerCoord> path;

    friend bool operator==(const ChainProfile&, const ChainProfile&) = default;
};

struct WeightedProfile {
    ChainProfile profile;
    BigInt multiplicity;
};

struct Certificate {
    std::vector<WeightedProfile> profiles;
    std::map<SublayerCoord, BigInt> coverage;
    std::size_t target_height = 0;
};

enum class CertificateStatus { certified, certified_strict, infeasible, not_applicable };

inline std::string to_string(CertificateStatus s)
{
    switch (s) {
    case CertificateStatus::certified:
        return "CERTIFIED";
    case CertificateStatus::certified_strict:
        return "CERTIFIED_STRICT";
    case CertificateStatus::infeasible:
        return "INFEASIBLE";
    case CertificateStatus::not_applicable:
        return "NOT_APPLICABLE";
    }
    return "NOT_APPLICABLE";
}

struct CertificateVerdict {
    CertificateStatus status = CertificateStatus::not_applicable;
    std::optional<Certificate> certificate;
    std::string diagnostics;
};

inline std::map<SublayerCoord, BigInt> coverage_of(const std::vector<WeightedProfile>& profiles)
{
    std::map<SublayerCoord, BigInt> out;
    for (const auto& wp : profiles) {
        for (const auto& c : wp.profile.path) {
            out[c] += wp.multiplicity;
        }
    }
    return out;
}

/// Re-derives every certificate condition from scratch. Returns the first
/// violated condition, or nothing when the certificate is valid. Coordinates
/// outside the digraph are a format error.
inline std::optional<std::string> certificate_violation(const Certificate& cert, const SublayerTable& table,
                                                        const QuotientDag& dag)
{
    for (const auto& wp : cert.profiles) {
        for (const auto& c : wp.profile.path) {
            if (!dag.height_of.count(c) || !table.contains(c)) {
                throw format_error("certificate coordinate " + to_string(c) + " is not a sublayer of the family");
            }
        }
    }
    for (const auto& [c, n] : cert.coverage) {
        if (!dag.height_of.count(c) || !table.contains(c)) {
            throw format_error("coverage coordinate " + to_string(c) + " is not a sublayer of the family");
        }
    }
    if (!dag.source || !dag.sink) {
        return "quotient digraph lacks a unique source and sink";
    }

    // Profiles: positive multiplicity, source to sink along edges.
    for (std::size_t k = 0; k < cert.profiles.size(); ++k) {
        const auto& wp = cert.profiles[k];
        const auto& path = wp.profile.path;
        const std::string tag = "profile " + std::to_string(k);
        if (wp.multiplicity <= 0) {
            return tag + " has non-positive multiplicity";
        }
        if (path.empty() || path.front() != *dag.source || path.back() != *dag.sink) {
            return tag + " does not run from source to sink";
        }
        for (std::size_t s = 0; s + 1 < path.size(); ++s) {
            if (!dag.has_edge(path[s], path[s + 1])) {
                return tag + " step " + to_string(path[s]) + " -> " + to_string(path[s + 1]) + " is not an edge";
            }
        }
        if (path.size() != dag.max_height + 1) {
            return tag + " misses a height";
        }
    }

    // Coverage consistency.
    const auto recomputed = coverage_of(cert.profiles);
    for (const auto& c : dag.coords) {
        const BigInt stated = cert.coverage.count(c) ? cert.coverage.at(c) : BigInt(0);
        const BigInt actual = recomputed.count(c) ? recomputed.at(c) : BigInt(0);
        if (stated != actual) {
            return "coverage at " + to_string(c) + " is " + stated.str() + " but the profiles give " + actual.str();
        }
    }

    // Layer-flow conservation.
    std::map<std::size_t, BigInt> per_layer;
    for (const auto& c : dag.coords) {
        per_layer[dag.height_of.at(c)] += recomputed.count(c) ? recomputed.at(c) : BigInt(0);
    }
    for (const auto& [h, total] : per_layer) {
        if (total != per_layer.begin()->second) {
            return "layer " + std::to_string(h) + " carries " + total.str() + " chains, layer " +
                   std::to_string(per_layer.begin()->first) + " carries " + per_layer.begin()->second.str();
        }
    }

    // Exactness on the target layer.
    const auto target = dag.layer(cert.target_height);
    if (target.empty()) {
        return "target height " + std::to_string(cert.target_height) + " has no sublayers";
    }
    for (const auto& c : target) {
        const BigInt n = recomputed.count(c) ? recomputed.at(c) : BigInt(0);
        if (n != table.size_of(c)) {
            return "target sublayer " + to_string(c) + " covered " + n.str() + " times, size " +
                   table.size_of(c).str();
        }
    }

    // Domination: N_c / |X_c| >= N_t / |X_t| for a target sublayer t.
    const auto& ref = target.front();
    const BigInt n_ref = recomputed.count(ref) ? recomputed.at(ref) : BigInt(0);
    for (const auto& c : dag.coords) {
        const BigInt n = recomputed.count(c) ? recomputed.at(c) : BigInt(0);
        if (n * table.size_of(ref) < table.size_of(c) * n_ref) {
            return "sublayer " + to_string(c) + " covered " + n.str() + " times, below its size " +
                   table.size_of(c).str();
        }
    }
    return std::nullopt;
}

inline bool certificate_check(const Certificate& cert, const SublayerTable& table, const QuotientDag& dag)
{
    return !certificate_violation(cert, table, dag).has_value();
}

/// Off-target rates strictly above 1, with at least one off-target sublayer.
inline bool certificate_is_strict(const Certificate& cert, const SublayerTable& table, const QuotientDag& dag)
{
    bool any = false;
    for (const auto& c : dag.coords) {
        if (dag.height_of.at(c) == cert.target_height) {
            continue;
        }
        any = true;
        const auto it = cert.coverage.find(c);
        if (it == cert.coverage.end() || it->second < table.size_of(c) + 1) {
            return false;
        }
    }
    return any;
}

namespace detail {

inline const char* coverage_rule_note =
    "coverage rule: per-element rate exactly 1 on the target layer and >= 1 elsewhere (> 1 for uniqueness); "
    "the opposite orientation (off-target rates <= target rate) does not bound antichains and is not used";

inline CertificateVerdict finish(Certificate cert, const SublayerTable& table, const QuotientDag& dag,
                                 std::string diagnostics)
{
    if (auto bad = certificate_violation(cert, table, dag)) {
        throw consistency_error("assembled certificate fails verification: " + *bad);
    }
    CertificateVerdict out;
    out.status = certificate_is_strict(cert, table, dag) ? CertificateStatus::certified_strict
                                                         : CertificateStatus::certified;
    out.certificate = std::move(cert);
    out.diagnostics = std::move(diagnostics);
    return out;
}

} // namespace detail

/// Searches for a certificate that the sublayers at target_height form a
/// maximum antichain. Node c carries flow in [|X_c|, |X_c|] on the target
/// layer and [|X_c| (+1 when strict), inf) elsewhere; any feasible flow is
/// peeled into weighted paths, lexicographically smallest first.
inline CertificateVerdict certificate_search(const QuotientDag& dag, const SublayerTable& table,
                                             std::size_t target_height, bool strict)
{
    CertificateVerdict out;
    if (!dag.source || !dag.sink) {
        out.diagnostics = "quotient digraph lacks a unique source and sink";
        return out;
    }
    if (dag.layer(target_height).empty()) {
        throw precondition_error("target height " + std::to_string(target_height) + " has no sublayers");
    }
    const std::size_t k = dag.coords.size();
    std::map<SublayerCoord, std::size_t> index;
    for (std::size_t v = 0; v < k; ++v) {
        index[dag.coords[v]] = v;
    }
    const std::size_t s = 2 * k;
    const std::size_t t = 2 * k + 1;
    LowerBoundedFlow<BigInt> flow(2 * k + 2);
    for (std::size_t v = 0; v < k; ++v) {
        const auto& c = dag.coords[v];
        const BigInt& size = table.size_of(c);
        if (dag.height_of.at(c) == target_height) {
            flow.add_arc(2 * v, 2 * v + 1, size, size);
        } else {
            flow.add_arc(2 * v, 2 * v + 1, strict ? size + 1 : size);
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_arc;
    for (const auto& [a, b] : dag.edges) {
        edge_arc[{index[a], index[b]}] = flow.add_arc(2 * index[a] + 1, 2 * index[b], 0);
    }
    const std::size_t entry = flow.add_arc(s, 2 * index[*dag.source], 0);
    flow.add_arc(2 * index[*dag.sink] + 1, t, 0);

    if (!flow.find_feasible(s, t)) {
        out.status = CertificateStatus::infeasible;
        std::ostringstream diag;
        diag << "no chain family meets the lower bounds: demand " << flow.demand() << ", best " << flow.achieved()
             << "; violated cut contains";
        const auto& side = flow.infeasible_side();
        for (std::size_t v = 0; v < k; ++v) {
            if (side[2 * v] || side[2 * v + 1]) {
                diag << " " << to_string(dag.coords[v]);
            }
        }
        diag << "; " << detail::coverage_rule_note;
        out.diagnostics = diag.str();
        return out;
    }

    std::map<std::pair<std::size_t, std::size_t>, BigInt> remaining;
    for (const auto& [key, arc] : edge_arc) {
        remaining[key] = flow.flow(arc);
    }
    BigInt start = flow.flow(entry);
    Certificate cert;
    cert.target_height = target_height;
    const std::size_t src = index[*dag.source];
    const std::size_t snk = index[*dag.sink];
    while (start > 0) {
        std::vector<std::size_t> path{src};
        BigInt bottleneck = start;
        while (path.back() != snk) {
            const std::size_t u = path.back();
            std::optional<std::size_t> next;
            for (const auto& d : dag.successors.at(dag.coords[u])) {
                if (remaining[{u, index[d]}] > 0) {
                    next = index[d];
                    break;
                }
            }
            if (!next) {
                throw consistency_error("flow decomposition stalled at " + to_string(dag.coords[u]));
            }
            bottleneck = std::min(bottleneck, remaining[{u, *next}]);
            path.push_back(*next);
        }
        for (std::size_t e = 0; e + 1 < path.size(); ++e) {
            remaining[{path[e], path[e + 1]}] -= bottleneck;
        }
        start -= bottleneck;
        WeightedProfile wp;
        for (const std::size_t v : path) {
            wp.profile.path.push_back(dag.coords[v]);
        }
        wp.multiplicity = bottleneck;
        cert.profiles.push_back(std::move(wp));
    }
    cert.coverage = coverage_of(cert.profiles);
    return detail::finish(std::move(cert), table, dag, detail::coverage_rule_note);
}

struct CertifiedWidth {
    CertificateVerdict verdict;
    BigInt layer_size;
    std::size_t layer_height = 0;
};

/// Certifies the largest layer of B_r[p,q]: strict search first, then the
/// plain one. Ties between layers are reported as not applicable.
inline CertifiedWidth certified_width(const GroundParams& params)
{
    CertifiedWidth out;
    if (params.r > std::min(params.p, params.q)) {
        out.verdict.diagnostics = "radius exceeds min(p,q); closed-form quotient not available";
        return out;
    }
    const auto table = build_table(params);
    const auto profile = layer_profile(table);
    out.layer_size = profile.max_size();
    out.layer_height = profile.argmax.front();
    if (profile.tie) {
        std::string heights;
        for (const auto h : profile.argmax) {
            heights += (heights.empty() ? "" : ",") + std::to_string(h);
        }
        out.verdict.diagnostics = "largest layer is tied at heights " + heights;
        return out;
    }
    const auto dag = quotient_dag(params, Family::ball(params.r));
    out.verdict = certificate_search(dag, table, out.layer_height, true);
    if (out.verdict.status == CertificateStatus::infeasible) {
        auto plain = certificate_search(dag, table, out.layer_height, false);
        if (plain.status != CertificateStatus::infeasible) {
            plain.diagnostics = "strict search infeasible; " + plain.diagnostics;
        }
        out.verdict = std::move(plain);
    }
    return out;
}

namespace detail {

inline SublayerCoord flip(const SublayerCoord& c) { return {c.j, c.i}; }

struct ZigzagAttempt {
    std::optional<Certificate> certificate;
    std::string failure;
};

/// The explicit construction for q >= p, starting from sublayer (i0, j0) on
/// the outer sphere. Chains through the start descend along the spine
/// (i0, j0), (i0, j0-1), ... and peel off into the strips S_{r-2k} u S_{r-2k-1},
/// each strip fed by the chains entering at (i0, j0-2k); going up they zigzag
/// in S_r u S_{r-1}. Chains through the other target sublayers (i0-l, j0-l)
/// keep their center part fixed on the way down and zigzag in
/// S_{r-2l} u S_{r-2l-1} on the way up.
inline ZigzagAttempt zigzag_attempt(const GroundParams& params, const SublayerCoord& start,
                                    const SublayerTable& table, const QuotientDag& dag)
{
    ZigzagAttempt out;
    const std::size_t r = params.r;
    const std::size_t i0 = start.i;
    const std::size_t j0 = start.j;
    const std::size_t strips = j0 / 2;

    for (std::size_t k = 0; k < strips; ++k) {
        const SublayerCoord entry{i0, j0 - 2 * k};
        if (i0 + 1 > params.p) {
            out.failure = "zigzag margin undefined at " + to_string(entry);
            return out;
        }
        const auto margin = zigzag_margin(params, entry);
        if (!margin.holds) {
            out.failure = "zigzag margin fails at " + to_string(entry) + " (slack " + margin.slack.str() + ")";
            return out;
        }
    }

    auto climb = [&](SublayerCoord cur) {
        std::vector<SublayerCoord> up;
        const std::size_t sum = cur.i + cur.j;
        while (cur.i > 0) {
            up.push_back({cur.i - 1, cur.j});
            cur = {cur.i - 1, cur.j + 1};
            up.push_back(cur);
        }
        for (std::size_t j = sum + 1; j <= r; ++j) {
            up.push_back({0, j});
        }
        return up;
    };

    Certificate cert;
    cert.target_height = r - i0 + j0;
    const auto upper_start = climb(start);
    for (std::size_t k = 0; k <= strips; ++k) {
        const SublayerCoord entry{i0, j0 - 2 * k};
        BigInt multiplicity = table.size_of(entry);
        if (k < strips) {
            multiplicity -= table.size_of({i0, j0 - 2 * k - 2});
        }
        std::vector<SublayerCoord> down;
        for (std::size_t j = j0; j + 1 > entry.j; --j) {
            down.push_back({i0, j});
            if (j == 0) {
                break;
            }
        }
        SublayerCoord cur = entry;
        while (cur.j > 0) {
            down.push_back({cur.i, cur.j - 1});
            cur = {cur.i + 1, cur.j - 1};
            down.push_back(cur);
        }
        for (std::size_t i = cur.i + 1; i <= r; ++i) {
            down.push_back({i, 0});
        }
        WeightedProfile wp;
        wp.profile.path.assign(down.rbegin(), down.rend());
        wp.profile.path.insert(wp.profile.path.end(), upper_start.begin(), upper_start.end());
        wp.multiplicity = std::move(multiplicity);
        if (wp.multiplicity > 0) {
            cert.profiles.push_back(std::move(wp));
        }
    }
    for (std::size_t l = 1; l <= std::min(i0, j0); ++l) {
        const SublayerCoord t{i0 - l, j0 - l};
        std::vector<SublayerCoord> down;
        for (std::size_t j = t.j;; --j) {
            down.push_back({t.i, j});
            if (j == 0) {
                break;
            }
        }
        for (std::size_t i = t.i + 1; i <= r; ++i) {
            down.push_back({i, 0});
        }
        const auto up = climb(t);
        WeightedProfile wp;
        wp.profile.path.assign(down.rbegin(), down.rend());
        wp.profile.path.insert(wp.profile.path.end(), up.begin(), up.end());
        wp.multiplicity = table.size_of(t);
        cert.profiles.push_back(std::move(wp));
    }
    cert.coverage = coverage_of(cert.profiles);
    if (auto bad = certificate_violation(cert, table, dag)) {
        out.failure = "construction from " + to_string(start) + " fails: " + *bad;
        return out;
    }
    out.certificate = std::move(cert);
    return out;
}

} // namespace detail

/// The explicit zigzag construction. Works on the orientation with q >= p and
/// maps the result back through complementation when p > q.
inline CertificateVerdict zigzag_certificate(const GroundParams& params)
{
    CertificateVerdict out;
    params.validate();
    if (params.r > std::min(params.p, params.q)) {
        out.diagnostics = "radius exceeds min(p,q)";
        return out;
    }
    const auto table = build_table(params);
    const auto profile = layer_profile(table);
    if (profile.tie) {
        out.diagnostics = "largest layer is tied";
        return out;
    }
    const bool swap = params.p > params.q;
    const GroundParams oriented = swap ? params.swapped() : params;
    const auto otable = build_table(oriented);
    const auto odag = quotient_dag(oriented, Family::ball(oriented.r));
    const auto dag = quotient_dag(params, Family::ball(params.r));

    const auto largest = largest_sphere_sublayer(oriented, oriented.r);
    std::vector<SublayerCoord> starts{largest.rounding_coord};
    for (const auto& c : largest.coords) {
        if (c != largest.rounding_coord) {
            starts.push_back(c);
        }
    }
    std::string failures;
    for (const auto& start : starts) {
        auto attempt = detail::zigzag_attempt(oriented, start, otable, odag);
        if (!attempt.certificate) {
            failures += (failures.empty() ? "" : "; ") + attempt.failure;
            continue;
        }
        Certificate cert = std::move(*attempt.certificate);
        if (swap) {
            Certificate mapped;
            mapped.target_height = 2 * params.r - cert.target_height;
            for (auto& wp : cert.profiles) {
                WeightedProfile m;
                for (auto it = wp.profile.path.rbegin(); it != wp.profile.path.rend(); ++it) {
                    m.profile.path.push_back(detail::flip(*it));
                }
                m.multiplicity = std::move(wp.multiplicity);
                mapped.profiles.push_back(std::move(m));
            }
            mapped.coverage = coverage_of(mapped.profiles);
            cert = std::move(mapped);
        }
        std::string diag = "zigzag from " + to_string(swap ? detail::flip(start) : start);
        if (!failures.empty()) {
            diag += " after: " + failures;
        }
        return detail::finish(std::move(cert), table, dag, diag);
    }
    out.status = CertificateStatus::infeasible;
    out.diagnostics = failures;
    return out;
}

/// One concrete chain for a profile: the source (i0,j0) starts from removing
/// {1..i0} and adding the first j0 far elements; each step restores the
/// smallest removed center element and adds the smallest unused far element.
inline std::vector<PosetElement> realize_chain(const ChainProfile& profile, const GroundParams& params)
{
    params.validate();
    if (profile.path.empty()) {
        throw profile_error("empty profile");
    }
    if (params.p > max_side || params.q > max_side) {
        throw std::domain_error("p and q are limited to " + std::to_string(max_side));
    }
    for (const auto& c : profile.path) {
        if (c.i > params.p || c.j > params.q) {
            throw profile_error("profile coordinate " + to_string(c) + " out of range");
        }
    }
    const auto& first = profile.path.front();
    PosetElement x{first.i == 0 ? 0 : (std::uint64_t{1} << first.i) - 1,
                   first.j == 0 ? 0 : (std::uint64_t{1} << first.j) - 1};
    std::vector<PosetElement> chain{x};
    for (std::size_t s = 1; s < profile.path.size(); ++s) {
        const auto& a = profile.path[s - 1];
        const auto& b = profile.path[s];
        if (b.i > a.i || b.j < a.j || (a == b)) {
            throw profile_error("step " + to_string(a) + " -> " + to_string(b) + " does not go up");
        }
        for (std::size_t k = 0; k < a.i - b.i; ++k) {
            x.removal &= x.removal - 1;
        }
        for (std::size_t k = 0; k < b.j - a.j; ++k) {
            x.addition |= ~x.addition & (x.addition + 1);
        }
        chain.push_back(x);
    }
    return chain;
}

/// sum over m = r, r-2, r-4, ... >= 0 of the largest sublayer of sphere m.
inline BigInt theorem_bound(const GroundParams& params)
{
    params.validate();
    if (params.r > std::min(params.p, params.q)) {
        throw std::domain_error("theorem_bound needs r <= min(p,q)");
    }
    BigInt total = 0;
    for (std::size_t m = params.r;; m -= 2) {
        const auto largest = largest_sphere_sublayer(params, m);
        total += sublayer_size(params, largest.coords.front());
        if (m < 2) {
            break;
        }
    }
    return total;
}

inline nlohmann::json certificate_to_json(const Certificate& cert)
{
    nlohmann::json doc;
    doc["target_height"] = cert.target_height;
    doc["profiles"] = nlohmann::json::array();
    for (const auto& wp : cert.profiles) {
        nlohmann::json path = nlohmann::json::array();
        for (const auto& c : wp.profile.path) {
            path.push_back({c.i, c.j});
        }
        doc["profiles"].push_back({{"path", path}, {"multiplicity", wp.multiplicity.str()}});
    }
    doc["coverage"] = nlohmann::json::array();
    for (const auto& [c, n] : cert.coverage) {
        doc["coverage"].push_back({{"i", c.i}, {"j", c.j}, {"count", n.str()}});
    }
    return doc;
}

inline Certificate certificate_from_json(const nlohmann::json& doc)
{
    auto fail = [](const std::string& where) { throw format_error("certificate: malformed " + where); };
    if (!doc.is_object() || !doc.contains("target_height") || !doc["target_height"].is_number_unsigned() ||
        !doc.contains("profiles") || !doc["profiles"].is_array() || !doc.contains("coverage") ||
        !doc["coverage"].is_array()) {
        fail("top level");
    }
    Certificate cert;
    cert.target_height = doc["target_height"].get<std::size_t>();
    for (std::size_t k = 0; k < doc["profiles"].size(); ++k) {
        const auto& p = doc["profiles"][k];
        const std::string where = "profiles[" + std::to_string(k) + "]";
        if (!p.is_object() || !p.contains("path") || !p["path"].is_array() || !p.contains("multiplicity") ||
            !p["multiplicity"].is_string()) {
            fail(where);
        }
        WeightedProfile wp;
        for (const auto& c : p["path"]) {
            if (!c.is_array() || c.size() != 2 || !c[0].is_number_unsigned() || !c[1].is_number_unsigned()) {
                fail(where + ".path");
            }
            wp.profile.path.push_back({c[0].get<std::size_t>(), c[1].get<std::size_t>()});
        }
        try {
            wp.multiplicity = parse_decimal(p["multiplicity"].get<std::string>());
        } catch (const std::invalid_argument&) {
            fail(where + ".multiplicity");
        }
        cert.profiles.push_back(std::move(wp));
    }
    for (std::size_t k = 0; k < doc["coverage"].size(); ++k) {
        const auto& e = doc["coverage"][k];
        const std::string where = "coverage[" + std::to_string(k) + "]";
        if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e.contains("count") ||
            !e["i"].is_number_unsigned() || !e["j"].is_number_unsigned() || !e["count"].is_string()) {
            fail(where);
        }
        try {
            cert.coverage[{e["i"].get<std::size_t>(), e["j"].get<std::size_t>()}] =
                parse_decimal(e["count"].get<std::string>());
        } catch (const std::invalid_argument&) {
            fail(where + ".count");
        }
    }
    return cert;
}

} // namespace ballwidth
