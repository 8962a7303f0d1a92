#pragma once

// Report emission: sublayer tables as CSV, JSON, TikZ or aligned text, and
// sweep records as JSON lines / CSV. Big numbers are always decimal strings.

#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballwidth/poset.hpp"
#include "ballwidth/sublayer.hpp"

namespace ballwidth {

enum class Format { csv, json, tikz, text };

inline std::optional<Format> parse_format(const std::string& s)
{
    if (s == "csv") {
        return Format::csv;
    }
    if (s == "json") {
        return Format::json;
    }
    if (s == "tikz") {
        return Format::tikz;
    }
    if (s == "text") {
        return Format::text;
    }
    return std::nullopt;
}

/// A sublayer table together with the intrinsic height of every sublayer.
struct TableReport {
    SublayerTable table;
    std::map<SublayerCoord, std::size_t> height;
    LayerProfile profile;
    bool closed_form = true;

    bool in_largest_layer(const SublayerCoord& c) const
    {
        const auto h = height.at(c);
        return std::find(profile.argmax.begin(), profile.argmax.end(), h) != profile.argmax.end();
    }
};

/// Closed-form heights when they apply, longest-path heights on the quotient
/// digraph otherwise.
inline TableReport make_table_report(const GroundParams& params, const Family& family)
{
    TableReport out{build_table(params, family), {}, {}, closed_form_heights(params, family)};
    if (out.closed_form) {
        for (const auto& e : out.table.entries()) {
            out.height[e.coord] = closed_form_height(params, family, e.coord);
        }
    } else {
        out.height = quotient_dag(params, family, false).height_of;
    }
    std::map<std::size_t, BigInt> layers;
    for (const auto& e : out.table.entries()) {
        layers[out.height.at(e.coord)] += e.size;
    }
    out.profile = layer_profile_from(std::move(layers));
    return out;
}

namespace detail {

inline std::string family_label(const TableReport& report)
{
    const auto& prm = report.table.params();
    const auto& fam = report.table.family();
    const std::string pq = "[" + std::to_string(prm.p) + "," + std::to_string(prm.q) + "]";
    switch (fam.kind()) {
    case Family::Kind::ball:
        return "B_" + std::to_string(fam.hi()) + pq;
    case Family::Kind::sphere:
        return "S_" + std::to_string(fam.hi()) + pq;
    default:
        return fam.name() + pq;
    }
}

} // namespace detail

inline std::string emit_csv(const TableReport& report)
{
    std::ostringstream os;
    os << "i,j,size,height\n";
    for (const auto& e : report.table.entries()) {
        os << e.coord.i << ',' << e.coord.j << ',' << e.size << ',' << report.height.at(e.coord) << '\n';
    }
    return os.str();
}

inline nlohmann::ordered_json table_to_json(const TableReport& report)
{
    const auto& prm = report.table.params();
    nlohmann::ordered_json doc;
    doc["p"] = prm.p;
    doc["q"] = prm.q;
    doc["family"] = report.table.family().name();
    doc["radius"] = report.table.family().hi();
    doc["total"] = report.table.total().str();
    doc["heights"] = report.closed_form ? "closed-form" : "longest-path";
    doc["sublayers"] = nlohmann::ordered_json::array();
    for (const auto& e : report.table.entries()) {
        nlohmann::ordered_json row;
        row["i"] = e.coord.i;
        row["j"] = e.coord.j;
        row["size"] = e.size.str();
        row["height"] = report.height.at(e.coord);
        doc["sublayers"].push_back(std::move(row));
    }
    doc["layers"] = nlohmann::ordered_json::array();
    for (const auto& [h, size] : report.profile.heights) {
        doc["layers"].push_back({{"height", h}, {"size", size.str()}});
    }
    doc["largest_layer"] = {{"heights", report.profile.argmax},
                            {"size", report.profile.max_size().str()},
                            {"tie", report.profile.tie}};
    return doc;
}

inline std::string emit_json(const TableReport& report) { return table_to_json(report).dump(2) + "\n"; }

/// Diamond diagram: sublayer (i,j) sits at (i+j, j-i); the largest layer is red.
inline std::string emit_tikz(const TableReport& report)
{
    const std::size_t hi = report.table.family().kind() == Family::Kind::custom ? 0 : report.table.family().hi();
    std::size_t reach = hi;
    for (const auto& e : report.table.entries()) {
        reach = std::max(reach, e.coord.radius());
    }
    std::ostringstream os;
    os << "\\begin{tikzpicture}[scale=0.45]\n";
    const long long R = static_cast<long long>(reach);
    for (long long k = 0; k < R; ++k) {
        os << "\\draw[dotted] (" << k << ',' << -k << ") -- (" << R << ',' << R - 2 * k << ");\n";
    }
    for (long long k = 0; k < R; ++k) {
        os << "\\draw[dotted] (" << k << ',' << k << ") -- (" << R << ',' << 2 * k - R << ");\n";
    }
    os << "\n";
    auto entries = report.table.entries();
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        const long long ya = static_cast<long long>(a.coord.j) - static_cast<long long>(a.coord.i);
        const long long yb = static_cast<long long>(b.coord.j) - static_cast<long long>(b.coord.i);
        return std::pair(a.coord.radius(), ya) < std::pair(b.coord.radius(), yb);
    });
    for (const auto& e : entries) {
        const long long x = static_cast<long long>(e.coord.radius());
        const long long y = static_cast<long long>(e.coord.j) - static_cast<long long>(e.coord.i);
        os << "\\node" << (report.in_largest_layer(e.coord) ? "[red]" : "") << " at (" << x << ',' << y << ") {"
           << e.size << "};\n";
    }
    os << "\n\\end{tikzpicture}\n";
    return os.str();
}

inline std::string emit_text(const TableReport& report)
{
    std::vector<std::vector<std::string>> rows{{"i", "j", "size", "height", ""}};
    for (const auto& e : report.table.entries()) {
        rows.push_back({std::to_string(e.coord.i), std::to_string(e.coord.j), e.size.str(),
                        std::to_string(report.height.at(e.coord)), report.in_largest_layer(e.coord) ? "*" : ""});
    }
    std::vector<std::size_t> widths(5, 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream os;
    os << detail::family_label(report) << ": " << report.table.coord_count() << " sublayers, total "
       << report.table.total() << "\n";
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < 4; ++c) {
            line += std::string(widths[c] - row[c].size() + (c == 0 ? 0 : 2), ' ') + row[c];
        }
        if (!row[4].empty()) {
            line += "  " + row[4];
        }
        os << line << "\n";
    }
    os << "largest layer: height";
    for (const auto h : report.profile.argmax) {
        os << ' ' << h;
    }
    os << ", size " << report.profile.max_size() << (report.profile.tie ? " (tie)" : "") << "\n";
    return os.str();
}

inline std::string emit_report(const TableReport& report, Format format)
{
    switch (format) {
    case Format::csv:
        return emit_csv(report);
    case Format::json:
        return emit_json(report);
    case Format::tikz:
        return emit_tikz(report);
    case Format::text:
        return emit_text(report);
    }
    return emit_text(report);
}

enum class SweepStatus { verified_unique, verified_size_only, tie, counterexample, over_budget };

inline std::string to_string(SweepStatus s)
{
    switch (s) {
    case SweepStatus::verified_unique:
        return "VERIFIED_UNIQUE";
    case SweepStatus::verified_size_only:
        return "VERIFIED_SIZE_ONLY";
    case SweepStatus::tie:
        return "TIE";
    case SweepStatus::counterexample:
        return "COUNTEREXAMPLE";
    case SweepStatus::over_budget:
        return "OVER_BUDGET";
    }
    return "OVER_BUDGET";
}

inline std::optional<SweepStatus> parse_sweep_status(const std::string& s)
{
    for (const auto st : {SweepStatus::verified_unique, SweepStatus::verified_size_only, SweepStatus::tie,
                          SweepStatus::counterexample, SweepStatus::over_budget}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    return std::nullopt;
}

/// One verification verdict for B_r[p,q].
struct SweepRecord {
    std::size_t p = 1;
    std::size_t q = 0;
    std::size_t r = 0;
    BigInt ball_size;
    std::size_t largest_layer_height = 0;
    BigInt largest_layer_size;
    bool tie = false;
    std::optional<BigInt> width;
    std::optional<bool> unique;
    std::string certificate = "SKIPPED";
    std::optional<bool> klym_sphere;
    std::optional<bool> theorem_bound_ok;
    SweepStatus status = SweepStatus::over_budget;
    std::uint64_t elapsed_ms = 0;

    std::tuple<std::size_t, std::size_t, std::size_t> key() const { return {p, q, r}; }

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

inline nlohmann::ordered_json record_to_json(const SweepRecord& rec, bool with_timing = true)
{
    nlohmann::ordered_json doc;
    doc["p"] = rec.p;
    doc["q"] = rec.q;
    doc["r"] = rec.r;
    doc["ball_size"] = rec.ball_size.str();
    doc["largest_layer_height"] = rec.largest_layer_height;
    doc["largest_layer_size"] = rec.largest_layer_size.str();
    doc["tie"] = rec.tie;
    if (rec.width) {
        doc["width"] = rec.width->str();
    }
    if (rec.unique) {
        doc["unique"] = *rec.unique;
    }
    doc["certificate"] = rec.certificate;
    if (rec.klym_sphere) {
        doc["klym_sphere"] = *rec.klym_sphere;
    }
    if (rec.theorem_bound_ok) {
        doc["theorem_bound_ok"] = *rec.theorem_bound_ok;
    }
    doc["status"] = to_string(rec.status);
    if (with_timing) {
        doc["elapsed_ms"] = rec.elapsed_ms;
    }
    return doc;
}

/// Parses one persisted line; throws format_error on anything malformed.
inline SweepRecord record_from_json(const nlohmann::json& doc)
{
    auto bad = [](const std::string& what) { throw format_error("sweep record: " + what); };
    if (!doc.is_object()) {
        bad("not an object");
    }
    auto nat = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_number_unsigned()) {
            bad(std::string("missing or invalid ") + key);
        }
        return doc[key].get<std::size_t>();
    };
    auto big = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_string()) {
            bad(std::string("missing or invalid ") + key);
        }
        try {
            return parse_decimal(doc[key].get<std::string>());
        } catch (const std::invalid_argument&) {
            bad(std::string("invalid decimal in ") + key);
        }
        return BigInt(0);
    };
    auto flag = [&](const char* key) -> std::optional<bool> {
        if (!doc.contains(key) || doc[key].is_null()) {
            return std::nullopt;
        }
        if (!doc[key].is_boolean()) {
            bad(std::string("invalid ") + key);
        }
        return doc[key].get<bool>();
    };
    SweepRecord rec;
    rec.p = nat("p");
    rec.q = nat("q");
    rec.r = nat("r");
    rec.ball_size = big("ball_size");
    rec.largest_layer_height = nat("largest_layer_height");
    rec.largest_layer_size = big("largest_layer_size");
    const auto tie = flag("tie");
    if (!tie) {
        bad("missing tie");
    }
    rec.tie = *tie;
    if (doc.contains("width")) {
        rec.width = big("width");
    }
    rec.unique = flag("unique");
    if (!doc.contains("certificate") || !doc["certificate"].is_string()) {
        bad("missing certificate");
    }
    rec.certificate = doc["certificate"].get<std::string>();
    rec.klym_sphere = flag("klym_sphere");
    rec.theorem_bound_ok = flag("theorem_bound_ok");
    if (!doc.contains("status") || !doc["status"].is_string()) {
        bad("missing status");
    }
    const auto st = parse_sweep_status(doc["status"].get<std::string>());
    if (!st) {
        bad("unknown status");
    }
    rec.status = *st;
    if (doc.contains("elapsed_ms") && doc["elapsed_ms"].is_number_unsigned()) {
        rec.elapsed_ms = doc["elapsed_ms"].get<std::uint64_t>();
    }
    return rec;
}

inline const char* sweep_csv_header =
    "p,q,r,ball_size,largest_layer_height,largest_layer_size,tie,width,unique,certificate,klym_sphere,"
    "theorem_bound_ok,status\n";

namespace detail {

inline std::string opt_bool(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : ""; }

} // namespace detail

/// Final sweep report. Timing is left out so that reports are reproducible.
inline std::string emit_sweep(const std::vector<SweepRecord>& records, Format format)
{
    std::ostringstream os;
    std::map<std::string, std::size_t> counts;
    for (const auto& rec : records) {
        ++counts[to_string(rec.status)];
    }
    switch (format) {
    case Format::csv:
        os << sweep_csv_header;
        for (const auto& rec : records) {
            os << rec.p << ',' << rec.q << ',' << rec.r << ',' << rec.ball_size << ',' << rec.largest_layer_height
               << ',' << rec.largest_layer_size << ',' << (rec.tie ? "true" : "false") << ','
               << (rec.width ? rec.width->str() : "") << ',' << detail::opt_bool(rec.unique) << ','
               << rec.certificate << ',' << detail::opt_bool(rec.klym_sphere) << ','
               << detail::opt_bool(rec.theorem_bound_ok) << ',' << to_string(rec.status) << '\n';
        }
        break;
    case Format::json: {
        nlohmann::ordered_json doc;
        doc["records"] = nlohmann::ordered_json::array();
        for (const auto& rec : records) {
            doc["records"].push_back(record_to_json(rec, false));
        }
        doc["summary"] = counts;
        os << doc.dump(2) << "\n";
        break;
    }
    case Format::text:
        for (const auto& rec : records) {
            os << "B_" << rec.r << "[" << rec.p << "," << rec.q << "]  size " << rec.ball_size << "  layer "
               << rec.largest_layer_height << ":" << rec.largest_layer_size << "  width "
               << (rec.width ? rec.width->str() : "-") << "  " << rec.certificate << "  " << to_string(rec.status)
               << "\n";
        }
        os << "records: " << records.size() << "\n";
        for (const auto& [name, n] : counts) {
            os << "  " << name << ": " << n << "\n";
        }
        break;
    case Format::tikz:
        throw std::invalid_argument("sweep reports have no tikz form");
    }
    return os.str();
}

} // namespace ballwidth
