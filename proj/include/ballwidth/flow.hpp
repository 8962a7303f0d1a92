#pragma once

// Exact maximum flow (Dinic) and flows with arc lower bounds.
//
// Capacities are a template parameter so the same code runs on machine
// integers in tests and on arbitrary-precision integers in production.
// Augmentation always pushes bottleneck amounts, so the number of phases
// depends on the graph only, never on the magnitude of the capacities.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace ballwidth {

template <typename Cap>
class MaxFlow {
public:
    struct Arc {
        std::size_t to;
        std::size_t rev;
        Cap cap;
    };

    explicit MaxFlow(std::size_t nodes = 0) : graph_(nodes) {}

    std::size_t add_node()
    {
        graph_.emplace_back();
        return graph_.size() - 1;
    }

    std::size_t node_count() const noexcept { return graph_.size(); }

    /// Returns a handle (node, index) for reading the arc back.
    std::pair<std::size_t, std::size_t> add_arc(std::size_t from, std::size_t to, Cap cap)
    {
        graph_[from].push_back(Arc{to, graph_[to].size(), std::move(cap)});
        graph_[to].push_back(Arc{from, graph_[from].size() - 1, Cap(0)});
        return {from, graph_[from].size() - 1};
    }

    Arc& arc(std::pair<std::size_t, std::size_t> handle) { return graph_[handle.first][handle.second]; }
    const Arc& arc(std::pair<std::size_t, std::size_t> handle) const { return graph_[handle.first][handle.second]; }

    /// Flow currently on a forward arc equals the residual of its reverse.
    const Cap& flow_on(std::pair<std::size_t, std::size_t> handle) const
    {
        const Arc& a = arc(handle);
        return graph_[a.to][a.rev].cap;
    }

    void set_capacity(std::pair<std::size_t, std::size_t> handle, Cap cap) { arc(handle).cap = std::move(cap); }

    Cap run(std::size_t s, std::size_t t)
    {
        Cap total(0);
        if (s == t) {
            return total;
        }
        while (build_levels(s, t)) {
            next_.assign(graph_.size(), 0);
            while (true) {
                Cap pushed = augment(s, t);
                if (pushed == Cap(0)) {
                    break;
                }
                total += pushed;
            }
        }
        return total;
    }

    /// Nodes reachable from s through arcs with positive residual capacity.
    std::vector<bool> reachable_from(std::size_t s) const
    {
        std::vector<bool> seen(graph_.size(), false);
        std::vector<std::size_t> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const Arc& a : graph_[u]) {
                if (a.cap > Cap(0) && !seen[a.to]) {
                    seen[a.to] = true;
                    stack.push_back(a.to);
                }
            }
        }
        return seen;
    }

private:
    bool build_levels(std::size_t s, std::size_t t)
    {
        level_.assign(graph_.size(), -1);
        std::queue<std::size_t> queue;
        level_[s] = 0;
        queue.push(s);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop();
            for (const Arc& a : graph_[u]) {
                if (a.cap > Cap(0) && level_[a.to] < 0) {
                    level_[a.to] = level_[u] + 1;
                    queue.push(a.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    // One augmenting path in the level graph, iteratively, with retreat on
    // dead ends. Returns 0 when the blocking flow is complete.
    Cap augment(std::size_t s, std::size_t t)
    {
        std::vector<std::pair<std::size_t, std::size_t>> path;
        std::size_t u = s;
        while (true) {
            if (u == t) {
                Cap bottleneck = graph_[path.front().first][path.front().second].cap;
                for (const auto& [node, idx] : path) {
                    bottleneck = std::min(bottleneck, graph_[node][idx].cap);
                }
                for (const auto& [node, idx] : path) {
                    Arc& a = graph_[node][idx];
                    a.cap -= bottleneck;
                    graph_[a.to][a.rev].cap += bottleneck;
                }
                return bottleneck;
            }
            bool advanced = false;
            for (auto& k = next_[u]; k < graph_[u].size(); ++k) {
                const Arc& a = graph_[u][k];
                if (a.cap > Cap(0) && level_[a.to] == level_[u] + 1) {
                    path.emplace_back(u, k);
                    u = a.to;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                if (path.empty()) {
                    return Cap(0);
                }
                level_[u] = -1;
                u = path.back().first;
                path.pop_back();
                ++next_[u];
            }
        }
    }

    std::vector<std::vector<Arc>> graph_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
};

/// s-t flow with per-arc lower bounds and optional upper bounds. Solved by
/// the standard reduction: shift lower bounds into node imbalances, close the
/// circuit with an unbounded t->s arc, and saturate the imbalances from an
/// auxiliary source to an auxiliary sink.
template <typename Cap>
class LowerBoundedFlow {
public:
    struct ArcSpec {
        std::size_t from;
        std::size_t to;
        Cap lower;
        std::optional<Cap> upper;
    };

    explicit LowerBoundedFlow(std::size_t nodes) : nodes_(nodes) {}

    std::size_t add_arc(std::size_t from, std::size_t to, Cap lower, std::optional<Cap> upper = std::nullopt)
    {
        if (upper && *upper < lower) {
            throw std::invalid_argument("arc upper bound below lower bound");
        }
        arcs_.push_back(ArcSpec{from, to, std::move(lower), std::move(upper)});
        return arcs_.size() - 1;
    }

    std::size_t node_count() const noexcept { return nodes_; }
    const std::vector<ArcSpec>& arcs() const noexcept { return arcs_; }

    /// Finds some feasible s-t flow. Returns false when the lower bounds
    /// cannot be met; infeasible_side() then describes the violated cut.
    bool find_feasible(std::size_t s, std::size_t t)
    {
        s_ = s;
        t_ = t;
        Cap finite(0);
        for (const auto& a : arcs_) {
            finite += a.lower;
            if (a.upper) {
                finite += *a.upper;
            }
        }
        // No arc ever carries more than the total lower-bound demand in either
        // phase, so this value never binds.
        infinity_ = finite * 2 + Cap(1);

        net_ = MaxFlow<Cap>(nodes_ + 2);
        aux_s_ = nodes_;
        aux_t_ = nodes_ + 1;
        std::vector<Cap> imbalance(nodes_, Cap(0));
        handles_.clear();
        for (const auto& a : arcs_) {
            Cap cap = a.upper ? *a.upper - a.lower : infinity_;
            handles_.push_back(net_.add_arc(a.from, a.to, std::move(cap)));
            imbalance[a.to] += a.lower;
            imbalance[a.from] -= a.lower;
        }
        circuit_ = net_.add_arc(t, s, infinity_);
        Cap demand(0);
        aux_handles_.clear();
        for (std::size_t v = 0; v < nodes_; ++v) {
            if (imbalance[v] > Cap(0)) {
                demand += imbalance[v];
                aux_handles_.push_back(net_.add_arc(aux_s_, v, imbalance[v]));
            } else if (imbalance[v] < Cap(0)) {
                aux_handles_.push_back(net_.add_arc(v, aux_t_, -imbalance[v]));
            }
        }
        demand_ = demand;
        achieved_ = net_.run(aux_s_, aux_t_);
        feasible_ = achieved_ == demand;
        if (!feasible_) {
            cut_side_ = net_.reachable_from(aux_s_);
            cut_side_.resize(nodes_);
        }
        return feasible_;
    }

    bool feasible() const noexcept { return feasible_; }
    const Cap& demand() const noexcept { return demand_; }
    const Cap& achieved() const noexcept { return achieved_; }

    /// Original nodes on the auxiliary-source side of a minimum cut after an
    /// infeasible attempt. The lower bounds entering this side cannot all be met.
    const std::vector<bool>& infeasible_side() const noexcept { return cut_side_; }

    /// Reduces a feasible flow to the minimum s-t value by pushing flow back
    /// from t to s through the residual network. Returns the minimum value.
    Cap minimize()
    {
        require_feasible();
        for (const auto& h : aux_handles_) {
            net_.set_capacity(h, Cap(0));
            auto& a = net_.arc(h);
            net_.arc({a.to, a.rev}).cap = Cap(0);
        }
        Cap value = net_.flow_on(circuit_);
        net_.set_capacity(circuit_, Cap(0));
        auto& c = net_.arc(circuit_);
        net_.arc({c.to, c.rev}).cap = Cap(0);
        const Cap back = net_.run(t_, s_);
        minimized_ = true;
        return value - back;
    }

    /// Current flow value leaving s.
    Cap value() const
    {
        Cap v(0);
        for (std::size_t k = 0; k < arcs_.size(); ++k) {
            if (arcs_[k].from == s_) {
                v += flow(k);
            }
            if (arcs_[k].to == s_) {
                v -= flow(k);
            }
        }
        return v;
    }

    Cap flow(std::size_t arc) const
    {
        require_feasible();
        return arcs_[arc].lower + net_.flow_on(handles_[arc]);
    }

    /// After minimize(): original nodes reachable from t in the residual network.
    std::vector<bool> residual_reachable_from_sink() const
    {
        if (!minimized_) {
            throw std::logic_error("residual_reachable_from_sink needs minimize() first");
        }
        auto seen = net_.reachable_from(t_);
        seen.resize(nodes_);
        return seen;
    }

private:
    void require_feasible() const
    {
        if (!feasible_) {
            throw std::logic_error("no feasible flow has been found");
        }
    }

    std::size_t nodes_;
    std::vector<ArcSpec> arcs_;
    MaxFlow<Cap> net_;
    std::vector<std::pair<std::size_t, std::size_t>> handles_;
    std::vector<std::pair<std::size_t, std::size_t>> aux_handles_;
    std::pair<std::size_t, std::size_t> circuit_{};
    std::size_t s_ = 0;
    std::size_t t_ = 0;
    std::size_t aux_s_ = 0;
    std::size_t aux_t_ = 0;
    Cap infinity_{0};
    Cap demand_{0};
    Cap achieved_{0};
    bool feasible_ = false;
    bool minimized_ = false;
    std::vector<bool> cut_side_;
};

} // namespace ballwidth
