#pragma once

// Case-by-case verification sweeps over (p,q,r) with a resumable JSON-lines
// record file.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ballwidth/antichain.hpp"
#include "ballwidth/certificate.hpp"
#include "ballwidth/errors.hpp"
#include "ballwidth/poset.hpp"
#include "ballwidth/report.hpp"
#include "ballwidth/sublayer.hpp"

namespace ballwidth {

struct SweepConfig {
    std::size_t p_min = 1;
    std::size_t p_max = 1;
    std::size_t q_min = 1;
    std::size_t q_max = 1;
    std::size_t r_min = 1;
    std::size_t r_max = 1;
    std::optional<std::size_t> n_max;
    // Allow r > min(p,q): heights come from the quotient digraph and no
    // certificate or closed-form bound is attempted.
    bool general = false;
    std::size_t element_budget = default_element_budget;
    std::size_t matching_budget = default_matching_budget;
    // Balls larger than this are checked for size only, not uniqueness.
    std::size_t unique_budget = default_matching_budget;
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> out;
    bool resume = false;
    // Stop after this many freshly computed records, as if interrupted.
    std::optional<std::size_t> max_new;
    bool skip_certificates = false;

    void validate() const
    {
        if (p_min < 1 || p_min > p_max || q_min > q_max || r_min > r_max) {
            throw std::invalid_argument("sweep ranges must be nonempty with p >= 1");
        }
        if (element_budget == 0 || matching_budget == 0 || unique_budget == 0 || jobs == 0) {
            throw std::invalid_argument("budgets and job counts must be positive");
        }
    }
};

struct SweepOutcome {
    std::vector<SweepRecord> records;
    std::size_t computed = 0;
    std::size_t reused = 0;
    bool interrupted = false;

    bool any_counterexample() const
    {
        return std::any_of(records.begin(), records.end(),
                           [](const SweepRecord& r) { return r.status == SweepStatus::counterexample; });
    }
};

inline std::vector<GroundParams> sweep_tuples(const SweepConfig& config)
{
    std::vector<GroundParams> out;
    for (std::size_t p = config.p_min; p <= config.p_max; ++p) {
        for (std::size_t q = config.q_min; q <= config.q_max; ++q) {
            if (config.n_max && p + q > *config.n_max) {
                continue;
            }
            const std::size_t top = config.general ? std::min(config.r_max, p + q) : std::min({config.r_max, p, q});
            for (std::size_t r = config.r_min; r <= top; ++r) {
                out.push_back(GroundParams{p, q, r});
            }
        }
    }
    return out;
}

/// Verdict for one ball. Width and uniqueness come from the matching oracle;
/// the certificate, the sphere KLYM check and the bound are recorded alongside.
inline SweepRecord evaluate_tuple(const GroundParams& params, const SweepConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.p = params.p;
    rec.q = params.q;
    rec.r = params.r;
    const bool regular = params.r <= std::min(params.p, params.q);

    const auto report = make_table_report(params, Family::ball(params.r));
    rec.ball_size = report.table.total();
    rec.largest_layer_height = report.profile.argmax.front();
    rec.largest_layer_size = report.profile.max_size();
    rec.tie = report.profile.tie;

    if (config.skip_certificates) {
        rec.certificate = "SKIPPED";
    } else if (!regular) {
        rec.certificate = "NOT_APPLICABLE";
    } else {
        rec.certificate = to_string(certified_width(params).verdict.status);
    }

    const bool fits = rec.ball_size <= BigInt(std::min(config.element_budget, config.matching_budget));
    if (!fits) {
        rec.status = SweepStatus::over_budget;
    } else {
        const auto ball = build_ball(params, config.element_budget);
        const auto w = width(ball, config.matching_budget);
        rec.width = BigInt(w.width);
        if (regular) {
            rec.theorem_bound_ok = *rec.width <= theorem_bound(params);
        }
        const auto sphere = build_sphere(params, params.r, config.element_budget);
        rec.klym_sphere = check_klym(sphere, config.matching_budget).holds;

        if (*rec.width != rec.largest_layer_size) {
            rec.status = SweepStatus::counterexample;
        } else if (rec.tie) {
            rec.status = SweepStatus::tie;
        } else if (ball.size() > config.unique_budget) {
            rec.status = SweepStatus::verified_size_only;
        } else {
            AntichainWitness candidate;
            for (ElementId x = 0; x < ball.size(); ++x) {
                if (ball.height(x) == rec.largest_layer_height) {
                    candidate.elements.push_back(x);
                }
            }
            rec.unique = is_unique_max_antichain(ball, candidate, config.matching_budget);
            rec.status = *rec.unique ? SweepStatus::verified_unique : SweepStatus::counterexample;
        }
    }
    rec.elapsed_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
    return rec;
}

namespace detail {

using SweepKey = std::tuple<std::size_t, std::size_t, std::size_t>;

/// Records already on disk. A line that does not parse (typically the last
/// one, cut short by an interruption) is dropped and recomputed.
inline std::map<SweepKey, SweepRecord> load_records(const std::filesystem::path& path)
{
    std::map<SweepKey, SweepRecord> out;
    std::ifstream in(path);
    if (!in) {
        return out;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            const auto rec = record_from_json(nlohmann::json::parse(line));
            out[rec.key()] = rec;
        } catch (const nlohmann::json::exception&) {
        } catch (const format_error&) {
        }
    }
    return out;
}

inline void write_records(const std::filesystem::path& path, const std::map<SweepKey, SweepRecord>& records)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) {
            throw io_error("cannot write " + tmp.string());
        }
        for (const auto& [key, rec] : records) {
            os << record_to_json(rec).dump() << '\n';
        }
        if (!os) {
            throw io_error("write failed on " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw io_error("cannot replace " + path.string() + ": " + ec.message());
    }
}

} // namespace detail

/// Runs the sweep. With an output path every record is appended as soon as it
/// is known; on completion the file is rewritten in key order.
inline SweepOutcome run_sweep(const SweepConfig& config)
{
    config.validate();
    const auto tuples = sweep_tuples(config);

    std::map<detail::SweepKey, SweepRecord> done;
    std::ofstream sink;
    if (config.out) {
        if (config.resume) {
            done = detail::load_records(*config.out);
        }
        // Start from a clean file holding exactly the reusable records.
        detail::write_records(*config.out, done);
        sink.open(*config.out, std::ios::app);
        if (!sink) {
            throw io_error("cannot append to " + config.out->string());
        }
    }

    SweepOutcome outcome;
    std::vector<GroundParams> todo;
    std::map<detail::SweepKey, SweepRecord> results;
    for (const auto& t : tuples) {
        auto it = done.find({t.p, t.q, t.r});
        if (it != done.end()) {
            results.insert(*it);
            ++outcome.reused;
        } else {
            todo.push_back(t);
        }
    }
    if (config.max_new && todo.size() > *config.max_new) {
        todo.resize(*config.max_new);
        outcome.interrupted = true;
    }

    std::mutex writer;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= todo.size()) {
                return;
            }
            SweepRecord rec;
            try {
                rec = evaluate_tuple(todo[k], config);
            } catch (...) {
                std::lock_guard lock(writer);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = todo.size();
                return;
            }
            std::lock_guard lock(writer);
            if (sink.is_open()) {
                sink << record_to_json(rec).dump() << '\n' << std::flush;
            }
            results[rec.key()] = rec;
            ++outcome.computed;
        }
    };
    const std::size_t threads = std::min<std::size_t>(config.jobs, std::max<std::size_t>(todo.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    if (sink.is_open()) {
        sink.close();
        if (!outcome.interrupted) {
            auto all = done;
            for (const auto& [key, rec] : results) {
                all[key] = rec;
            }
            detail::write_records(*config.out, all);
        }
    }
    for (auto& [key, rec] : results) {
        outcome.records.push_back(std::move(rec));
    }
    return outcome;
}

} // namespace ballwidth
