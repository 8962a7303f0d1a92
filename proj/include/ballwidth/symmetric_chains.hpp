#pragma once

// Symmetric chain partition of the Boolean lattice by bracket matching.
// Write position k as ')' when k is in the set and '(' otherwise, match
// brackets as usual, and leave the matched pairs fixed: the chain is obtained
// by turning the unmatched '(' into ')' one at a time from the left.

#include <cstdint>
#include <string>
#include <vector>

#include "ballwidth/antichain.hpp"
#include "ballwidth/errors.hpp"

namespace ballwidth {

inline constexpr std::size_t max_bracketing_n = 22;

/// Unmatched positions of the bracket word of a subset, left to right.
/// Unmatched ')' always precede unmatched '('.
inline std::vector<std::size_t> unmatched_positions(std::uint64_t subset, std::size_t n)
{
    std::vector<std::size_t> open;
    std::vector<std::size_t> unmatched_close;
    for (std::size_t k = 0; k < n; ++k) {
        if ((subset >> k) & 1U) {
            if (!open.empty()) {
                open.pop_back();
            } else {
                unmatched_close.push_back(k);
            }
        } else {
            open.push_back(k);
        }
    }
    unmatched_close.insert(unmatched_close.end(), open.begin(), open.end());
    return unmatched_close;
}

/// Chains of subsets of [n]; each id is a bit mask with bit k-1 standing for
/// element k. Chains are listed by their bottom element, ascending.
inline ChainPartition gk_partition(std::size_t n)
{
    if (n > max_bracketing_n) {
        throw budget_exceeded("bracketing partition", BigInt(1) << n, BigInt(1) << max_bracketing_n);
    }
    ChainPartition out;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t s = 0; s < total; ++s) {
        const auto free = unmatched_positions(s, n);
        // Bottom of a chain: every unmatched position is an opening bracket.
        bool bottom = true;
        for (const std::size_t k : free) {
            if ((s >> k) & 1U) {
                bottom = false;
                break;
            }
        }
        if (!bottom) {
            continue;
        }
        std::vector<std::size_t> chain{static_cast<std::size_t>(s)};
        std::uint64_t x = s;
        for (const std::size_t k : free) {
            x |= std::uint64_t{1} << k;
            chain.push_back(static_cast<std::size_t>(x));
        }
        out.chains.push_back(std::move(chain));
    }
    return out;
}

} // namespace ballwidth
