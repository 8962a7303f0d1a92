#pragma once

// The ballwidth command line: argument parsing and dispatch. Everything is
// written to the supplied streams so the command can be driven from tests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ballwidth/antichain.hpp"
#include "ballwidth/certificate.hpp"
#include "ballwidth/errors.hpp"
#include "ballwidth/poset.hpp"
#include "ballwidth/report.hpp"
#include "ballwidth/sublayer.hpp"
#include "ballwidth/sweep.hpp"
#include "ballwidth/symmetric_chains.hpp"

namespace ballwidth {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int usage = 2;
inline constexpr int counterexample = 3;
inline constexpr int infeasible = 4;
} // namespace exit_code

/// Parsed command line. Ranges apply to sweep only.
struct CommandConfig {
    std::string subcommand;
    std::size_t p = 1;
    std::size_t q = 0;
    std::size_t r = 0;
    bool have_p = false;
    bool have_q = false;
    bool have_r = false;
    std::optional<std::size_t> n;
    std::string format = "text";
    std::optional<std::string> out;
    bool resume = false;
    std::size_t budget = default_matching_budget;
    std::size_t element_budget = default_element_budget;
    bool strict = false;
    bool sphere = false;
    bool zigzag = false;
    std::optional<std::string> check;
    std::optional<std::string> custom_poset;
    SweepConfig sweep;
};

namespace detail {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline GroundParams require_params(const CommandConfig& cfg)
{
    if (!cfg.have_p || !cfg.have_q || !cfg.have_r) {
        throw usage_error(cfg.subcommand + " needs -p, -q and -r");
    }
    GroundParams params{cfg.p, cfg.q, cfg.r};
    if (params.p < 1) {
        throw usage_error("p must be at least 1");
    }
    if (std::max(params.p, params.q) > max_side) {
        throw usage_error("p and q must be at most " + std::to_string(max_side));
    }
    if (cfg.r > cfg.p + cfg.q) {
        throw usage_error("r must be at most p+q");
    }
    return params;
}

inline Format require_format(const CommandConfig& cfg)
{
    const auto f = parse_format(cfg.format);
    if (!f) {
        throw usage_error("unknown format '" + cfg.format + "' (expected csv, json, tikz or text)");
    }
    return *f;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Sends a finished document to --out or to the output stream.
inline void deliver(const CommandConfig& cfg, const std::string& doc, std::ostream& out)
{
    if (!cfg.out) {
        out << doc;
        return;
    }
    std::ofstream os(*cfg.out, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw io_error("cannot write " + *cfg.out);
    }
    os << doc;
    if (!os) {
        throw io_error("write failed on " + *cfg.out);
    }
}

inline PosetInstance load_instance(const CommandConfig& cfg)
{
    if (cfg.custom_poset) {
        return load_custom_poset(read_file(*cfg.custom_poset));
    }
    const auto params = require_params(cfg);
    return cfg.sphere ? build_sphere(params, params.r, cfg.element_budget) : build_ball(params, cfg.element_budget);
}

inline std::string element_label(const PosetInstance& instance, ElementId x)
{
    if (instance.is_custom()) {
        return std::to_string(x);
    }
    return to_set_string(instance.element(x), instance.params()->p, instance.params()->q);
}

inline nlohmann::ordered_json labels(const PosetInstance& instance, const std::vector<ElementId>& ids)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto x : ids) {
        arr.push_back(element_label(instance, x));
    }
    return arr;
}

inline std::string instance_label(const CommandConfig& cfg)
{
    if (cfg.custom_poset) {
        return "custom poset " + *cfg.custom_poset;
    }
    return std::string(cfg.sphere ? "S_" : "B_") + std::to_string(cfg.r) + "[" + std::to_string(cfg.p) + "," +
           std::to_string(cfg.q) + "]";
}

/// Flat key/value documents for the small subcommands.
inline std::string emit_fields(const nlohmann::ordered_json& doc, Format format)
{
    std::ostringstream os;
    switch (format) {
    case Format::json:
        os << doc.dump(2) << "\n";
        break;
    case Format::csv:
        os << "key,value\n";
        for (const auto& [k, v] : doc.items()) {
            os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
        break;
    case Format::text:
        for (const auto& [k, v] : doc.items()) {
            os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
        break;
    case Format::tikz:
        throw usage_error("tikz output is only available for table");
    }
    return os.str();
}

inline int cmd_table(const CommandConfig& cfg, std::ostream& out)
{
    const auto format = require_format(cfg);
    const auto params = require_params(cfg);
    const auto family = cfg.sphere ? Family::sphere(params.r) : Family::ball(params.r);
    deliver(cfg, emit_report(make_table_report(params, family), format), out);
    return exit_code::ok;
}

inline int cmd_width(const CommandConfig& cfg, std::ostream& out)
{
    const auto format = require_format(cfg);
    const auto instance = load_instance(cfg);
    const auto w = width(instance, cfg.budget);
    const auto flow = max_weight_antichain(instance, unit_weights(instance), cfg.budget);
    const auto layers = layer_sizes(instance);
    const auto largest = layers.empty() ? BigInt(0) : *std::max_element(layers.begin(), layers.end());

    nlohmann::ordered_json doc;
    doc["width"] = std::to_string(w.width);
    doc["instance"] = instance_label(cfg);
    doc["elements"] = std::to_string(instance.size());
    doc["flow_width"] = flow.value.str();
    doc["largest_layer_size"] = largest.str();
    doc["antichain"] = labels(instance, w.witness.elements);
    deliver(cfg, emit_fields(doc, format), out);
    if (flow.value != BigInt(w.width)) {
        throw consistency_error("matching width " + std::to_string(w.width) + " differs from flow width " +
                                flow.value.str());
    }
    return exit_code::ok;
}

inline int cmd_klym(const CommandConfig& cfg, std::ostream& out)
{
    const auto format = require_format(cfg);
    const auto instance = load_instance(cfg);
    const auto k = check_klym(instance, cfg.budget);
    nlohmann::ordered_json doc;
    doc["instance"] = instance_label(cfg);
    doc["klym"] = k.holds;
    doc["max_lym_sum"] = to_string(k.max_lym_sum);
    doc["antichain"] = labels(instance, k.witness.elements);
    deliver(cfg, emit_fields(doc, format), out);
    return exit_code::ok;
}

inline std::string emit_certificate(const CommandConfig& cfg, const std::string& status, const std::string& diag,
                                    const std::optional<Certificate>& cert, Format format)
{
    if (format == Format::json) {
        nlohmann::ordered_json doc;
        doc["instance"] = instance_label(cfg);
        doc["status"] = status;
        doc["diagnostics"] = diag;
        doc["certificate"] = cert ? nlohmann::ordered_json::parse(certificate_to_json(*cert).dump()) : nullptr;
        return doc.dump(2) + "\n";
    }
    std::ostringstream os;
    if (format == Format::csv) {
        os << "multiplicity,path\n";
        if (cert) {
            for (const auto& wp : cert->profiles) {
                os << wp.multiplicity << ',';
                for (std::size_t k = 0; k < wp.profile.path.size(); ++k) {
                    os << (k ? " " : "") << wp.profile.path[k].i << ':' << wp.profile.path[k].j;
                }
                os << "\n";
            }
        }
        return os.str();
    }
    if (format == Format::tikz) {
        throw usage_error("tikz output is only available for table");
    }
    os << instance_label(cfg) << ": " << status << "\n";
    if (!diag.empty()) {
        os << "  " << diag << "\n";
    }
    if (cert) {
        os << "target height " << cert->target_height << ", " << cert->profiles.size() << " chain profiles\n";
        for (const auto& wp : cert->profiles) {
            os << "  " << wp.multiplicity << " x";
            for (const auto& c : wp.profile.path) {
                os << ' ' << to_string(c);
            }
            os << "\n";
        }
        os << "coverage:";
        for (const auto& [c, n] : cert->coverage) {
            os << ' ' << to_string(c) << '=' << n;
        }
        os << "\n";
    }
    return os.str();
}

inline int cmd_certify(const CommandConfig& cfg, std::ostream& out)
{
    const auto format = require_format(cfg);
    const auto params = require_params(cfg);
    if (params.r > std::min(params.p, params.q)) {
        deliver(cfg, emit_certificate(cfg, "NOT_APPLICABLE", "radius exceeds min(p,q)", std::nullopt, format), out);
        return exit_code::ok;
    }
    const auto table = build_table(params);
    const auto dag = quotient_dag(params, Family::ball(params.r));

    if (cfg.check) {
        const auto cert = certificate_from_json(nlohmann::json::parse(read_file(*cfg.check)));
        const auto violation = certificate_violation(cert, table, dag);
        std::string status = "INVALID";
        if (!violation) {
            status = certificate_is_strict(cert, table, dag) ? "CERTIFIED_STRICT" : "CERTIFIED";
        }
        const bool accepted = !violation && (!cfg.strict || status == "CERTIFIED_STRICT");
        deliver(cfg, emit_certificate(cfg, status, violation.value_or(""), cert, format), out);
        return accepted ? exit_code::ok : exit_code::infeasible;
    }

    CertificateVerdict verdict;
    if (cfg.zigzag) {
        verdict = zigzag_certificate(params);
    } else if (cfg.strict) {
        const auto profile = layer_profile(table);
        if (profile.tie) {
            verdict.diagnostics = "largest layer is tied";
        } else {
            verdict = certificate_search(dag, table, profile.argmax.front(), true);
        }
    } else {
        verdict = certified_width(params).verdict;
    }
    deliver(cfg, emit_certificate(cfg, to_string(verdict.status), verdict.diagnostics, verdict.certificate, format),
            out);
    if (verdict.status == CertificateStatus::infeasible) {
        return exit_code::infeasible;
    }
    if (cfg.strict && verdict.status == CertificateStatus::certified) {
        return exit_code::infeasible;
    }
    return exit_code::ok;
}

inline int cmd_sweep(const CommandConfig& cfg, std::ostream& out, std::ostream& err)
{
    const auto format = require_format(cfg);
    if (format == Format::tikz) {
        throw usage_error("tikz output is only available for table");
    }
    SweepConfig sc = cfg.sweep;
    sc.matching_budget = cfg.budget;
    sc.element_budget = cfg.element_budget;
    sc.resume = cfg.resume;
    if (cfg.out) {
        sc.out = *cfg.out;
    }
    if (sc.p_min < 1) {
        throw usage_error("p must be at least 1");
    }
    if (std::max(sc.p_max, sc.q_max) > max_side) {
        throw usage_error("p and q must be at most " + std::to_string(max_side));
    }
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    const auto outcome = run_sweep(sc);
    out << emit_sweep(outcome.records, format);
    err << "sweep: " << outcome.computed << " computed, " << outcome.reused << " reused"
        << (outcome.interrupted ? ", stopped early" : "") << "\n";
    return outcome.any_counterexample() ? exit_code::counterexample : exit_code::ok;
}

inline int cmd_chains(const CommandConfig& cfg, std::ostream& out)
{
    const auto format = require_format(cfg);
    if (format == Format::tikz) {
        throw usage_error("tikz output is only available for table");
    }
    std::vector<std::vector<std::string>> chains;
    std::string label;
    if (cfg.n) {
        label = "bracketing partition of 2^[" + std::to_string(*cfg.n) + "]";
        for (const auto& chain : gk_partition(*cfg.n).chains) {
            std::vector<std::string> row;
            for (const auto mask : chain) {
                std::string s = "{";
                for (std::size_t k = 0; k < *cfg.n; ++k) {
                    if ((mask >> k) & 1U) {
                        s += (s.size() > 1 ? "," : "") + std::to_string(k + 1);
                    }
                }
                row.push_back(s + "}");
            }
            chains.push_back(std::move(row));
        }
    } else {
        const auto instance = load_instance(cfg);
        label = "minimum chain partition of " + instance_label(cfg);
        for (const auto& chain : min_chain_partition(instance, cfg.budget).chains) {
            std::vector<std::string> row;
            for (const auto x : chain) {
                row.push_back(element_label(instance, static_cast<ElementId>(x)));
            }
            chains.push_back(std::move(row));
        }
    }
    std::ostringstream os;
    if (format == Format::json) {
        nlohmann::ordered_json doc;
        doc["partition"] = label;
        doc["count"] = std::to_string(chains.size());
        doc["chains"] = chains;
        os << doc.dump(2) << "\n";
    } else if (format == Format::csv) {
        os << "chain,position,element\n";
        for (std::size_t c = 0; c < chains.size(); ++c) {
            for (std::size_t k = 0; k < chains[c].size(); ++k) {
                os << c << ',' << k << ",\"" << chains[c][k] << "\"\n";
            }
        }
    } else {
        os << label << ": " << chains.size() << " chains\n";
        for (const auto& row : chains) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                os << (k ? " < " : "  ") << row[k];
            }
            os << "\n";
        }
    }
    deliver(cfg, os.str(), out);
    return exit_code::ok;
}

inline int cmd_theorem(const CommandConfig& cfg, std::ostream& out)
{
    const auto format = require_format(cfg);
    nlohmann::ordered_json doc;
    if (!cfg.have_p && !cfg.have_q && cfg.have_r) {
        doc["r"] = cfg.r;
        doc["omega_threshold"] = to_string(omega_threshold(cfg.r));
        deliver(cfg, emit_fields(doc, format), out);
        return exit_code::ok;
    }
    const auto params = require_params(cfg);
    doc["instance"] = instance_label(cfg);
    doc["omega_threshold"] = to_string(omega_threshold(params.r));
    if (params.r > std::min(params.p, params.q)) {
        doc["theorem_bound"] = nullptr;
        doc["note"] = "radius exceeds min(p,q)";
        deliver(cfg, emit_fields(doc, format), out);
        return exit_code::ok;
    }
    const auto bound = theorem_bound(params);
    const auto profile = layer_profile(build_table(params));
    doc["theorem_bound"] = bound.str();
    doc["largest_layer_size"] = profile.max_size().str();
    const auto largest = largest_sphere_sublayer(params, params.r);
    doc["largest_sphere_sublayer"] = to_string(largest.rounding_coord);
    const auto ratio = check_ratio_monotone(params, params.r);
    doc["ratio_monotone"] = ratio.monotone;
    const auto zz = zigzag_certificate(params);
    doc["zigzag"] = to_string(zz.status);
    doc["zigzag_diagnostics"] = zz.diagnostics;
    int code = exit_code::ok;
    if (BigInt(build_table(params).total()) <= BigInt(std::min(cfg.budget, cfg.element_budget))) {
        const auto w = width(build_ball(params, cfg.element_budget), cfg.budget).width;
        doc["width"] = std::to_string(w);
        doc["bound_holds"] = BigInt(w) <= bound;
        if (BigInt(w) > bound) {
            code = exit_code::counterexample;
        }
    }
    deliver(cfg, emit_fields(doc, format), out);
    return code;
}

} // namespace detail

/// Runs one command. args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CommandConfig cfg;
    CLI::App app{"Width, layers and chain certificates for balls in the Boolean lattice", "ballwidth"};
    app.require_subcommand(1);

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("-p", cfg.p, "center side size")->each([&](const std::string&) { cfg.have_p = true; });
        sub->add_option("-q", cfg.q, "far side size")->each([&](const std::string&) { cfg.have_q = true; });
        sub->add_option("-r", cfg.r, "radius")->each([&](const std::string&) { cfg.have_r = true; });
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "csv, json, tikz or text");
        sub->add_option("--out", cfg.out, "write the report here");
        sub->add_option("--budget", cfg.budget, "element limit for matching and flow engines");
        sub->add_option("--element-budget", cfg.element_budget, "element limit for building posets");
    };

    auto* table = app.add_subcommand("table", "sublayer sizes and heights");
    add_params(table);
    add_common(table);
    table->add_flag("--sphere", cfg.sphere, "the sphere S_r instead of the ball");

    auto* width_cmd = app.add_subcommand("width", "exact width by matching, cross-checked by flow");
    auto* klym = app.add_subcommand("klym", "maximum LYM sum over antichains");
    for (auto* sub : {width_cmd, klym}) {
        add_params(sub);
        add_common(sub);
        sub->add_flag("--sphere", cfg.sphere, "the sphere S_r instead of the ball");
        sub->add_option("--custom-poset", cfg.custom_poset, "JSON poset file");
    }

    auto* certify = app.add_subcommand("certify", "chain-profile certificate for the largest layer");
    add_params(certify);
    add_common(certify);
    certify->add_flag("--strict", cfg.strict, "require a certificate that also proves uniqueness");
    certify->add_flag("--zigzag", cfg.zigzag, "use the explicit zigzag construction");
    certify->add_option("--check", cfg.check, "verify a certificate file instead of searching");

    auto* sweep = app.add_subcommand("sweep", "verify every ball in a parameter range");
    add_common(sweep);
    sweep->add_option("--p-min", cfg.sweep.p_min);
    sweep->add_option("--p-max", cfg.sweep.p_max)->required();
    sweep->add_option("--q-min", cfg.sweep.q_min);
    sweep->add_option("--q-max", cfg.sweep.q_max)->required();
    sweep->add_option("--r-min", cfg.sweep.r_min);
    sweep->add_option("--r-max", cfg.sweep.r_max)->required();
    sweep->add_option("--n-max", cfg.sweep.n_max, "skip p+q above this");
    sweep->add_option("--jobs", cfg.sweep.jobs, "worker threads");
    sweep->add_option("--max-new", cfg.sweep.max_new, "stop after this many new records");
    sweep->add_flag("--resume", cfg.resume, "keep records already in --out");
    sweep->add_flag("--general", cfg.sweep.general, "also sweep r > min(p,q)");
    sweep->add_flag("--skip-certificates", cfg.sweep.skip_certificates);

    auto* chains = app.add_subcommand("chains", "chain partitions");
    add_params(chains);
    add_common(chains);
    chains->add_option("-n", cfg.n, "bracketing partition of the subsets of [n]");
    chains->add_flag("--sphere", cfg.sphere, "the sphere S_r instead of the ball");
    chains->add_option("--custom-poset", cfg.custom_poset, "JSON poset file");

    auto* theorem = app.add_subcommand("theorem", "closed-form bound and thresholds");
    add_params(theorem);
    add_common(theorem);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    try {
        if (cfg.subcommand == "table") {
            return detail::cmd_table(cfg, out);
        }
        if (cfg.subcommand == "width") {
            return detail::cmd_width(cfg, out);
        }
        if (cfg.subcommand == "klym") {
            return detail::cmd_klym(cfg, out);
        }
        if (cfg.subcommand == "certify") {
            return detail::cmd_certify(cfg, out);
        }
        if (cfg.subcommand == "sweep") {
            return detail::cmd_sweep(cfg, out, err);
        }
        if (cfg.subcommand == "chains") {
            return detail::cmd_chains(cfg, out);
        }
        return detail::cmd_theorem(cfg, out);
    } catch (const detail::usage_error& e) {
        err << "error: " << e.what() << "\n" << app.get_subcommands().front()->help();
        return exit_code::usage;
    } catch (const budget_exceeded& e) {
        err << "refused: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const format_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const malformed_order& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_code::internal;
    }
}

} // namespace ballwidth
