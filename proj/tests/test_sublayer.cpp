#include <functional>

#include <gtest/gtest.h>

#include "ballwidth/sublayer.hpp"
#include "oracles.hpp"

using namespace ballwidth;

namespace {

BigInt big(const oracle::Big& v) { return BigInt(v); }

} // namespace

TEST(Binomial, Examples)
{
    EXPECT_EQ(binomial(8, 2), 28);
    EXPECT_EQ(binomial(0, 0), 1);
    EXPECT_EQ(binomial(13, 0), 1);
    EXPECT_EQ(binomial(17, 6), 12376);
    EXPECT_EQ(binomial(3, 5), 0);
}

TEST(Binomial, MatchesPascal)
{
    for (std::size_t n = 0; n <= 70; ++n) {
        for (std::size_t k = 0; k <= n + 2; ++k) {
            ASSERT_EQ(binomial(n, k), big(oracle::choose(n, k))) << n << " choose " << k;
        }
    }
}

TEST(SublayerSize, Examples)
{
    EXPECT_EQ(sublayer_size({5, 8, 4}, {2, 2}), 280);
    EXPECT_EQ(sublayer_size({9, 17, 10}, {3, 7}), 1633632);
    EXPECT_EQ(sublayer_size({4, 6, 0}, {0, 0}), 1);
    EXPECT_THROW(sublayer_size({5, 8, 4}, {6, 0}), std::domain_error);
    EXPECT_THROW(sublayer_size({5, 8, 4}, {0, 9}), std::domain_error);
}

TEST(SublayerSize, Symmetry)
{
    for (std::size_t p = 1; p <= 12; ++p) {
        for (std::size_t q = 1; q <= 12; ++q) {
            for (std::size_t i = 0; i <= p; ++i) {
                for (std::size_t j = 0; j <= q; ++j) {
                    ASSERT_EQ(sublayer_size({p, q, 0}, {i, j}), sublayer_size({q, p, 0}, {j, i}));
                }
            }
        }
    }
}

TEST(BuildTable, BallFourOfFiveEight)
{
    const auto t = build_table({5, 8, 4});
    EXPECT_EQ(t.coord_count(), 15U);
    EXPECT_EQ(t.total(), 1093);
    const std::vector<int> expected{1, 5, 8, 10, 40, 28, 10, 80, 140, 56, 5, 80, 280, 280, 70};
    ASSERT_EQ(t.entries().size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        EXPECT_EQ(t.entries()[k].size, expected[k]) << to_string(t.entries()[k].coord);
    }
}

TEST(BuildTable, RadiusZero)
{
    const auto t = build_table({3, 4, 0});
    ASSERT_EQ(t.coord_count(), 1U);
    EXPECT_EQ(t.entries()[0].coord, (SublayerCoord{0, 0}));
    EXPECT_EQ(t.entries()[0].size, 1);
}

TEST(BuildTable, SphereTenOfNineSeventeen)
{
    const auto t = build_table({9, 17, 10}, Family::sphere(10));
    EXPECT_EQ(t.coord_count(), 10U);
    EXPECT_EQ(t.size_of({4, 6}), 1559376);
    EXPECT_EQ(t.size_of({3, 7}), 1633632);
    EXPECT_FALSE(t.contains({10, 0}));
}

TEST(BuildTable, BallTenOfNineSeventeen)
{
    const auto t = build_table({9, 17, 10});
    EXPECT_EQ(t.size_of({3, 5}), 519792);
    EXPECT_EQ(t.size_of({2, 6}), 445536);
}

TEST(BuildTable, TotalsAreExact)
{
    // Flipping m of the p+q elements gives the sets at distance m.
    for (std::size_t p = 1; p <= 20; ++p) {
        for (std::size_t q = 0; q <= 20; ++q) {
            for (std::size_t r = 0; r <= p + q; ++r) {
                oracle::Big total = 0;
                for (std::size_t m = 0; m <= r; ++m) {
                    total += oracle::choose(p + q, m);
                }
                ASSERT_EQ(build_table({p, q, r}).total(), big(total)) << p << "," << q << "," << r;
            }
        }
    }
}

TEST(LayerProfile, BallFourOfFiveEight)
{
    const auto prof = layer_profile(build_table({5, 8, 4}));
    EXPECT_EQ(prof.heights.at(4), 321);
    EXPECT_EQ(prof.heights.at(0), 5);
    EXPECT_EQ(prof.argmax, std::vector<std::size_t>{4});
    EXPECT_FALSE(prof.tie);
}

TEST(LayerProfile, TieInSmallBall)
{
    const auto prof = layer_profile(build_table({2, 2, 1}));
    EXPECT_EQ(prof.argmax, (std::vector<std::size_t>{0, 2}));
    EXPECT_TRUE(prof.tie);
    EXPECT_EQ(prof.max_size(), 2);
}

TEST(LayerProfile, RefusesBeyondClosedForm)
{
    EXPECT_THROW(layer_profile(build_table({2, 5, 3})), std::domain_error);
}

TEST(LayerProfile, PartitionsTheTable)
{
    for (std::size_t p = 1; p <= 14; ++p) {
        for (std::size_t q = 1; q <= 14; ++q) {
            for (std::size_t r = 0; r <= std::min(p, q); ++r) {
                const auto t = build_table({p, q, r});
                const auto prof = layer_profile(t);
                BigInt sum = 0;
                for (const auto& [h, s] : prof.heights) {
                    sum += s;
                }
                ASSERT_EQ(sum, t.total());
                ASSERT_EQ(prof.tie, prof.argmax.size() > 1);
            }
        }
    }
}

TEST(LargestSublayer, BallMaximumLiesOnOuterSphere)
{
    for (std::size_t p = 1; p <= 30; ++p) {
        for (std::size_t q = 1; q <= 30; ++q) {
            for (std::size_t r = 0; r <= (p + q) / 2; ++r) {
                const auto t = build_table({p, q, r});
                BigInt best = 0;
                BigInt best_outer = 0;
                for (const auto& e : t.entries()) {
                    best = std::max(best, e.size);
                    if (e.coord.radius() == r) {
                        best_outer = std::max(best_outer, e.size);
                    }
                }
                ASSERT_EQ(best, best_outer) << p << "," << q << "," << r;
            }
        }
    }
}

TEST(Ratio, Examples)
{
    EXPECT_EQ(ratio({5, 8, 0}, 2, 1), Rational(4));
    EXPECT_EQ(ratio({5, 8, 0}, 1, 2), Rational(7, 10));
    for (std::size_t p = 1; p <= 6; ++p) {
        for (std::size_t q = 1; q <= 6; ++q) {
            EXPECT_EQ(ratio({p, q, 0}, 1, 1), Rational(BigInt(q), BigInt(p)));
        }
    }
    EXPECT_THROW(ratio({5, 8, 0}, 0, 1), std::domain_error);
    EXPECT_THROW(ratio({5, 8, 0}, 6, 1), std::domain_error);
}

TEST(Ratio, EqualsQuotientOfSizes)
{
    for (std::size_t p = 1; p <= 15; ++p) {
        for (std::size_t q = 1; q <= 15; ++q) {
            const GroundParams g{p, q, 0};
            for (std::size_t i = 1; i <= p; ++i) {
                for (std::size_t j = 1; j <= q; ++j) {
                    const Rational direct(sublayer_size(g, {i - 1, j}), sublayer_size(g, {i, j - 1}));
                    ASSERT_EQ(ratio(g, i, j), direct);
                }
            }
        }
    }
}

TEST(RatioMonotone, Examples)
{
    const auto v = check_ratio_monotone({5, 8, 0}, 2);
    EXPECT_TRUE(v.monotone);
    EXPECT_EQ(v.sequence, (std::vector<Rational>{Rational(4), Rational(7, 10)}));
    EXPECT_TRUE(check_ratio_monotone({1, 1, 0}, 1).monotone);
    EXPECT_EQ(check_ratio_monotone({1, 1, 0}, 1).sequence.size(), 1U);
    EXPECT_TRUE(check_ratio_monotone({9, 17, 0}, 9).monotone);
}

TEST(RatioMonotone, HoldsUpToThirty)
{
    for (std::size_t p = 1; p <= 30; ++p) {
        for (std::size_t q = 1; q <= 30; ++q) {
            for (std::size_t radius = 1; radius <= std::min(p, q); ++radius) {
                const auto v = check_ratio_monotone({p, q, 0}, radius);
                ASSERT_TRUE(v.monotone) << p << "," << q << "," << radius;
            }
        }
    }
}

TEST(LargestSphereSublayer, Examples)
{
    const auto a = largest_sphere_sublayer({9, 17, 10}, 10);
    EXPECT_EQ(a.coords, std::vector<SublayerCoord>{(SublayerCoord{3, 7})});
    EXPECT_EQ(a.rounding_coord, (SublayerCoord{3, 7}));

    const auto b = largest_sphere_sublayer({5, 8, 4}, 4);
    EXPECT_EQ(b.coords, (std::vector<SublayerCoord>{{2, 2}, {1, 3}}));
    EXPECT_NE(std::find(b.coords.begin(), b.coords.end(), b.rounding_coord), b.coords.end());

    const auto c = largest_sphere_sublayer({4, 4, 0}, 0);
    EXPECT_EQ(c.coords, std::vector<SublayerCoord>{(SublayerCoord{0, 0})});
    EXPECT_THROW(largest_sphere_sublayer({3, 5, 0}, 9), std::domain_error);
}

TEST(LargestSphereSublayer, RoundingAlwaysLandsOnAMaximum)
{
    for (std::size_t p = 1; p <= 30; ++p) {
        for (std::size_t q = 1; q <= 30; ++q) {
            for (std::size_t m = 0; m <= p + q; ++m) {
                ASSERT_NO_THROW(largest_sphere_sublayer({p, q, 0}, m)) << p << "," << q << "," << m;
            }
        }
    }
}

TEST(ZigzagMargin, Examples)
{
    const auto a = zigzag_margin({5, 8, 4}, {2, 2});
    EXPECT_TRUE(a.holds);
    EXPECT_EQ(a.slack, 190);
    const auto b = zigzag_margin({5, 8, 4}, {1, 3});
    EXPECT_FALSE(b.holds);
    EXPECT_EQ(b.slack, -40);
    for (std::size_t p = 1; p <= 8; ++p) {
        for (std::size_t q = 2; q <= 8; ++q) {
            const BigInt expected = binomial(q, 2) - BigInt(p) * BigInt(q) - 1;
            EXPECT_EQ(zigzag_margin({p, q, 0}, {0, 2}).slack, expected);
        }
    }
    EXPECT_THROW(zigzag_margin({5, 8, 4}, {1, 1}), std::domain_error);
    EXPECT_THROW(zigzag_margin({2, 8, 4}, {2, 2}), std::domain_error);
}

TEST(OmegaThreshold, Examples)
{
    EXPECT_EQ(omega_threshold(10), Rational(399, 8));
    EXPECT_EQ(to_string(omega_threshold(10)), "399/8");
    EXPECT_EQ(omega_threshold(1), Rational(-15, 8));
    EXPECT_EQ(omega_threshold(0), Rational(1, 216) - 3);
}

TEST(OmegaThreshold, MatchesFractionOracle)
{
    for (std::int64_t r = 0; r <= 60; ++r) {
        const oracle::Frac base(2 * r + 1, 6);
        const auto expected = base * base * base + oracle::Frac(r - 3);
        const auto got = omega_threshold(static_cast<std::size_t>(r));
        ASSERT_EQ(numerator(got), expected.num) << r;
        ASSERT_EQ(denominator(got), expected.den) << r;
    }
}

TEST(Multiset, LayerSizes)
{
    EXPECT_EQ(multiset_layer_sizes({{1, 1, 1}}), (std::vector<BigInt>{1, 3, 3, 1}));
    EXPECT_EQ(multiset_layer_sizes({{2, 1}}), (std::vector<BigInt>{1, 2, 2, 1}));
    EXPECT_EQ(multiset_layer_sizes({{3}}), (std::vector<BigInt>{1, 1, 1, 1}));
    EXPECT_EQ(multiset_layer_sizes({{}}), (std::vector<BigInt>{1}));
    EXPECT_THROW(multiset_layer_sizes({{2, 0}}), std::domain_error);
}

TEST(Multiset, RatioExamples)
{
    EXPECT_TRUE(check_multiset_ratio_monotone({{2, 1}}).monotone);
    EXPECT_TRUE(check_multiset_ratio_monotone({{3}}).monotone);
    EXPECT_TRUE(check_multiset_ratio_monotone({{1, 1, 1, 1}}).monotone);
}

namespace {

void for_each_partition(std::size_t budget, std::size_t max_part, std::vector<std::size_t>& cur,
                        const std::function<void(const std::vector<std::size_t>&)>& f)
{
    if (!cur.empty()) {
        f(cur);
    }
    for (std::size_t m = 1; m <= std::min(budget, max_part); ++m) {
        cur.push_back(m);
        for_each_partition(budget - m, m, cur, f);
        cur.pop_back();
    }
}

} // namespace

TEST(Multiset, ExpansionAndPalindromeOverAllSmallVectors)
{
    std::vector<std::size_t> cur;
    std::size_t seen = 0;
    for_each_partition(12, 12, cur, [&](const std::vector<std::size_t>& mu) {
        const auto sizes = multiset_layer_sizes({mu});
        const auto expected = oracle::expand_multiset(mu);
        ASSERT_EQ(sizes.size(), expected.size());
        for (std::size_t h = 0; h < sizes.size(); ++h) {
            ASSERT_EQ(sizes[h], BigInt(expected[h]));
            ASSERT_EQ(sizes[h], sizes[sizes.size() - 1 - h]);
        }
        ASSERT_TRUE(check_multiset_ratio_monotone({mu}).monotone);
        ++seen;
    });
    EXPECT_GT(seen, 100U);
}
