#pragma once

// Sublayer combinatorics for balls and spheres around a p-set.
//
// A set obtained from [p] by removing i of its elements and adding j of the
// q far-side elements lies in sublayer X_{i,j}; |X_{i,j}| = C(p,i) * C(q,j).
// Everything here is exact and pure.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ballwidth/bigint.hpp"
#include "ballwidth/errors.hpp"

namespace ballwidth {

struct GroundParams {
    std::size_t p = 1;
    std::size_t q = 0;
    std::size_t r = 0;

    std::size_t n() const noexcept { return p + q; }

    void validate() const
    {
        if (p < 1) {
            throw std::domain_error("p must be at least 1");
        }
    }

    GroundParams swapped() const { return GroundParams{q, p, r}; }

    friend bool operator==(const GroundParams&, const GroundParams&) = default;
};

struct SublayerCoord {
    std::size_t i = 0;
    std::size_t j = 0;

    std::size_t radius() const noexcept { return i + j; }

    friend auto operator<=>(const SublayerCoord&, const SublayerCoord&) = default;
    friend bool operator==(const SublayerCoord&, const SublayerCoord&) = default;
};

inline std::string to_string(const SublayerCoord& c)
{
    return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

/// Which sublayers make up a family. Balls, spheres and unions of consecutive
/// spheres are annuli lo <= i+j <= hi; custom families list coordinates.
class Family {
public:
    enum class Kind { ball, sphere, annulus, custom };

    static Family ball(std::size_t r) { return Family(Kind::ball, 0, r, {}); }
    static Family sphere(std::size_t m) { return Family(Kind::sphere, m, m, {}); }
    static Family annulus(std::size_t lo, std::size_t hi)
    {
        if (lo > hi) {
            throw std::domain_error("annulus needs lo <= hi");
        }
        return Family(Kind::annulus, lo, hi, {});
    }
    static Family custom(std::vector<SublayerCoord> coords)
    {
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        return Family(Kind::custom, 0, 0, std::move(coords));
    }

    Kind kind() const noexcept { return kind_; }
    std::size_t lo() const noexcept { return lo_; }
    std::size_t hi() const noexcept { return hi_; }
    bool is_annular() const noexcept { return kind_ != Kind::custom; }

    bool contains(const GroundParams& params, const SublayerCoord& c) const
    {
        if (c.i > params.p || c.j > params.q) {
            return false;
        }
        if (kind_ == Kind::custom) {
            return std::binary_search(custom_.begin(), custom_.end(), c);
        }
        return c.radius() >= lo_ && c.radius() <= hi_;
    }

    /// Member coordinates ordered by (i+j, j), the diagram order.
    std::vector<SublayerCoord> coords(const GroundParams& params) const
    {
        std::vector<SublayerCoord> out;
        if (kind_ == Kind::custom) {
            for (const auto& c : custom_) {
                if (c.i > params.p || c.j > params.q) {
                    throw std::domain_error("custom family coordinate " + ballwidth::to_string(c) +
                                            " out of range");
                }
                out.push_back(c);
            }
        } else {
            for (std::size_t m = lo_; m <= hi_; ++m) {
                for (std::size_t j = 0; j <= m; ++j) {
                    const SublayerCoord c{m - j, j};
                    if (c.i <= params.p && c.j <= params.q) {
                        out.push_back(c);
                    }
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const SublayerCoord& a, const SublayerCoord& b) {
            return std::pair(a.radius(), a.j) < std::pair(b.radius(), b.j);
        });
        return out;
    }

    std::string name() const
    {
        switch (kind_) {
        case Kind::ball:
            return "ball";
        case Kind::sphere:
            return "sphere";
        case Kind::annulus:
            return "annulus";
        case Kind::custom:
            return "custom";
        }
        return "custom";
    }

    friend bool operator==(const Family&, const Family&) = default;

private:
    Family(Kind kind, std::size_t lo, std::size_t hi, std::vector<SublayerCoord> custom)
        : kind_(kind), lo_(lo), hi_(hi), custom_(std::move(custom))
    {
    }

    Kind kind_;
    std::size_t lo_;
    std::size_t hi_;
    std::vector<SublayerCoord> custom_;
};

/// C(n,k); zero when k > n.
inline BigInt binomial(std::size_t n, std::size_t k)
{
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt result = 1;
    for (std::size_t t = 1; t <= k; ++t) {
        result *= n - k + t;
        result /= t;
    }
    return result;
}

inline BigInt sublayer_size(const GroundParams& params, const SublayerCoord& c)
{
    if (c.i > params.p || c.j > params.q) {
        throw std::domain_error("sublayer " + to_string(c) + " outside p=" + std::to_string(params.p) +
                                ", q=" + std::to_string(params.q));
    }
    return binomial(params.p, c.i) * binomial(params.q, c.j);
}

class SublayerTable {
public:
    struct Entry {
        SublayerCoord coord;
        BigInt size;
    };

    SublayerTable(GroundParams params, Family family) : params_(params), family_(std::move(family))
    {
        params_.validate();
        for (const auto& c : family_.coords(params_)) {
            BigInt size = sublayer_size(params_, c);
            total_ += size;
            index_.emplace(c, entries_.size());
            entries_.push_back(Entry{c, std::move(size)});
        }
    }

    const GroundParams& params() const noexcept { return params_; }
    const Family& family() const noexcept { return family_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const BigInt& total() const noexcept { return total_; }
    std::size_t coord_count() const noexcept { return entries_.size(); }

    bool contains(const SublayerCoord& c) const { return index_.count(c) != 0; }

    const BigInt& size_of(const SublayerCoord& c) const
    {
        auto it = index_.find(c);
        if (it == index_.end()) {
            throw std::domain_error("sublayer " + to_string(c) + " not in table");
        }
        return entries_[it->second].size;
    }

private:
    GroundParams params_;
    Family family_;
    std::vector<Entry> entries_;
    std::map<SublayerCoord, std::size_t> index_;
    BigInt total_ = 0;
};

inline SublayerTable build_table(const GroundParams& params, const Family& family)
{
    return SublayerTable(params, family);
}

inline SublayerTable build_table(const GroundParams& params)
{
    return SublayerTable(params, Family::ball(params.r));
}

struct LayerProfile {
    std::map<std::size_t, BigInt> heights;
    std::vector<std::size_t> argmax;
    bool tie = false;

    const BigInt& max_size() const { return heights.at(argmax.front()); }
};

/// Whether the closed-form heights apply: balls and spheres whose radius does
/// not exceed min(p,q).
inline bool closed_form_heights(const GroundParams& params, const Family& family)
{
    const std::size_t lim = std::min(params.p, params.q);
    switch (family.kind()) {
    case Family::Kind::ball:
    case Family::Kind::sphere:
        return family.hi() <= lim;
    default:
        return false;
    }
}

/// Intrinsic height of sublayer c: hi - i + j in a ball, j in a sphere.
inline std::size_t closed_form_height(const GroundParams& params, const Family& family, const SublayerCoord& c)
{
    if (!closed_form_heights(params, family)) {
        throw std::domain_error("closed-form heights need a ball or sphere of radius <= min(p,q); "
                                "use longest-path heights from the poset instead");
    }
    if (family.kind() == Family::Kind::sphere) {
        return c.j;
    }
    return family.hi() - c.i + c.j;
}

inline LayerProfile layer_profile_from(std::map<std::size_t, BigInt> heights)
{
    LayerProfile out;
    out.heights = std::move(heights);
    const BigInt* best = nullptr;
    for (const auto& [h, size] : out.heights) {
        if (best == nullptr || size > *best) {
            best = &size;
            out.argmax.assign(1, h);
        } else if (size == *best) {
            out.argmax.push_back(h);
        }
    }
    out.tie = out.argmax.size() > 1;
    return out;
}

inline LayerProfile layer_profile(const SublayerTable& table)
{
    std::map<std::size_t, BigInt> heights;
    for (const auto& e : table.entries()) {
        heights[closed_form_height(table.params(), table.family(), e.coord)] += e.size;
    }
    return layer_profile_from(std::move(heights));
}

/// |X_{i-1,j}| / |X_{i,j-1}| = (q-j+1) i / ((p-i+1) j).
inline Rational ratio(const GroundParams& params, std::size_t i, std::size_t j)
{
    if (i < 1 || j < 1 || i > params.p || j > params.q) {
        throw std::domain_error("ratio needs 1 <= i <= p and 1 <= j <= q");
    }
    return Rational(BigInt((params.q - j + 1) * i), BigInt((params.p - i + 1) * j));
}

struct RatioVerdict {
    bool monotone = true;
    /// Ratios for j = first_j, first_j+1, ...
    std::size_t first_j = 0;
    std::vector<Rational> sequence;
    /// First j whose ratio exceeds the ratio at j-1.
    std::optional<std::size_t> violation_j;
};

/// Non-increasing check of ratio(i,j) in j along i + j = radius + 1.
inline RatioVerdict check_ratio_monotone(const GroundParams& params, std::size_t radius)
{
    if (radius < 1) {
        throw std::domain_error("radius must be at least 1");
    }
    const std::size_t sum = radius + 1;
    RatioVerdict out;
    const std::size_t j_lo = sum > params.p ? std::max<std::size_t>(1, sum - params.p) : 1;
    const std::size_t j_hi = std::min(params.q, radius);
    out.first_j = j_lo;
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        out.sequence.push_back(ratio(params, sum - j, j));
        const std::size_t n = out.sequence.size();
        if (out.monotone && n >= 2 && out.sequence[n - 1] > out.sequence[n - 2]) {
            out.monotone = false;
            out.violation_j = j;
        }
    }
    return out;
}

struct LargestSphereSublayer {
    std::vector<SublayerCoord> coords;
    SublayerCoord rounding_coord;
};

/// Argmax sublayers of sphere m (any m <= p+q) by direct comparison, plus the coordinate
/// predicted by solving (i+1)/j = (p+1)/(q+1) on i+j = m with j rounded down.
inline LargestSphereSublayer largest_sphere_sublayer(const GroundParams& params, std::size_t m)
{
    if (m > params.p + params.q) {
        throw std::domain_error("largest_sphere_sublayer needs m <= p+q");
    }
    LargestSphereSublayer out;
    BigInt best = -1;
    for (std::size_t j = m > params.p ? m - params.p : 0; j <= std::min(m, params.q); ++j) {
        const SublayerCoord c{m - j, j};
        BigInt size = sublayer_size(params, c);
        if (size > best) {
            best = size;
            out.coords.assign(1, c);
        } else if (size == best) {
            out.coords.push_back(c);
        }
    }
    // j (p+q+2) = (m+1)(q+1) at the crossover.
    const std::size_t j = ((m + 1) * (params.q + 1)) / (params.p + params.q + 2);
    out.rounding_coord = SublayerCoord{m - j, j};
    if (std::find(out.coords.begin(), out.coords.end(), out.rounding_coord) == out.coords.end()) {
        throw consistency_error("rounded crossover " + to_string(out.rounding_coord) +
                                " is not a largest sublayer of sphere " + std::to_string(m));
    }
    return out;
}

struct ZigzagMargin {
    bool holds = false;
    /// |X_{i,j}| - |X_{i+1,j-1}| - |X_{i,j-2}|
    BigInt slack;
};

inline ZigzagMargin zigzag_margin(const GroundParams& params, const SublayerCoord& c)
{
    if (c.j < 2 || c.i + 1 > params.p) {
        throw std::domain_error("zigzag margin needs j >= 2 and i + 1 <= p");
    }
    ZigzagMargin out;
    out.slack = sublayer_size(params, c) - sublayer_size(params, {c.i + 1, c.j - 1}) -
                sublayer_size(params, {c.i, c.j - 2});
    out.holds = out.slack >= 0;
    return out;
}

/// ((r + 1/2) / 3)^3 + r - 3, the side length beyond which the explicit
/// construction is guaranteed to work.
inline Rational omega_threshold(std::size_t r)
{
    const Rational base(BigInt(2 * r + 1), BigInt(6));
    return base * base * base + Rational(BigInt(r)) - Rational(3);
}

struct MultisetSpec {
    std::vector<std::size_t> multiplicities;
};

/// Coefficients of prod_i (1 + x + ... + x^{mu_i}).
inline std::vector<BigInt> multiset_layer_sizes(const MultisetSpec& spec)
{
    std::vector<BigInt> poly{1};
    for (const std::size_t mu : spec.multiplicities) {
        if (mu < 1) {
            throw std::domain_error("multiplicities must be at least 1");
        }
        std::vector<BigInt> next(poly.size() + mu, 0);
        // Sliding window sum of width mu+1.
        BigInt window = 0;
        for (std::size_t h = 0; h < next.size(); ++h) {
            if (h < poly.size()) {
                window += poly[h];
            }
            if (h >= mu + 1 && h - mu - 1 < poly.size()) {
                window -= poly[h - mu - 1];
            }
            next[h] = window;
        }
        poly = std::move(next);
    }
    return poly;
}

struct MultisetVerdict {
    bool monotone = true;
    std::vector<BigInt> sizes;
    /// First h with |P_h|/|P_{h-1}| > |P_{h-1}|/|P_{h-2}|.
    std::optional<std::size_t> violation_h;
};

inline MultisetVerdict check_multiset_ratio_monotone(const MultisetSpec& spec)
{
    MultisetVerdict out;
    out.sizes = multiset_layer_sizes(spec);
    const auto& a = out.sizes;
    // a[h]/a[h-1] <= a[h-1]/a[h-2]  <=>  a[h] a[h-2] <= a[h-1]^2 (all positive)
    for (std::size_t h = 2; h < a.size(); ++h) {
        if (a[h] * a[h - 2] > a[h - 1] * a[h - 1]) {
            out.monotone = false;
            out.violation_h = h;
            break;
        }
    }
    return out;
}

} // namespace ballwidth
