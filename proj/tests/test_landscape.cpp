#include <doctest.h>

#include <random>

#include "lacuna/landscape.hpp"
#include "support/oracles.hpp"

using namespace lacuna;
using namespace lacuna::testing;

namespace {

PersistenceDiagram finite_diagram(const std::vector<std::pair<double, double>>& pairs)
{
    PersistenceDiagram d;
    for (auto [b, e] : pairs)
        d.pairs.push_back({b, e, 1});
    return d;
}

std::vector<std::pair<double, double>> random_pairs(std::mt19937_64& gen, std::size_t n)
{
    // coarse lattice values force coincident births, deaths and crossings
    std::uniform_int_distribution<int> birth(0, 20), length(1, 12);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = birth(gen) * 0.25;
        out.emplace_back(b, b + length(gen) * 0.25);
    }
    return out;
}

// Composite Simpson on the brute force landscape, for cross-checking norms.
double numeric_p_norm(const std::vector<std::pair<double, double>>& pairs, double p)
{
    double lo = 0.0, hi = 0.0;
    for (auto [b, d] : pairs) {
        lo = std::min(lo, b);
        hi = std::max(hi, d);
    }
    double total = 0.0;
    for (std::size_t k = 1; k <= pairs.size(); ++k) {
        const int n = 20000;
        const double h = (hi - lo) / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * std::pow(brute_landscape(pairs, k, lo + i * h), p);
        }
        total += std::pow(s * h / 3.0, 1.0 / p);
    }
    return total;
}

} // namespace

TEST_CASE("empty diagram gives the zero landscape")
{
    const auto ls = landscape_from_diagram({});
    CHECK(ls.depth() == 0);
    CHECK(evaluate_landscape(ls, 1, 0.3) == 0.0);
    CHECK(landscape_norm(ls, kInfinity) == 0.0);
    CHECK(landscape_norm(ls, 2.0) == 0.0);
    CHECK(landscape_norm(ls, 1.0) == 0.0);
}

TEST_CASE("single tent")
{
    const auto ls = landscape_from_diagram(finite_diagram({{0, 2}}));
    CHECK(evaluate_landscape(ls, 1, 1.0) == 1.0);
    CHECK(evaluate_landscape(ls, 1, 0.5) == 0.5);
    CHECK(evaluate_landscape(ls, 1, -0.5) == 0.0);
    CHECK(evaluate_landscape(ls, 1, 2.5) == 0.0);
    CHECK(evaluate_landscape(ls, 2, 1.0) == 0.0);
    CHECK(evaluate_landscape(ls, 1000000, 0.0) == 0.0);
    CHECK(landscape_norm(ls, kInfinity) == 1.0);
    CHECK(landscape_norm(ls, 2.0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(landscape_norm(ls, 2.0) == doctest::Approx(numeric_p_norm({{0, 2}}, 2.0)).epsilon(1e-9));
    CHECK(landscape_norm(ls, 2.0) == doctest::Approx(0.8165).epsilon(1e-4));
}

TEST_CASE("two overlapping tents")
{
    const std::vector<std::pair<double, double>> pairs{{0, 2}, {1, 3}};
    const auto ls = landscape_from_diagram(finite_diagram(pairs));
    REQUIRE(ls.depth() == 2);
    // values frozen from brute_landscape
    CHECK(brute_landscape(pairs, 1, 1.0) == 1.0);
    CHECK(brute_landscape(pairs, 1, 1.5) == 0.5);
    CHECK(brute_landscape(pairs, 1, 2.0) == 1.0);
    CHECK(brute_landscape(pairs, 2, 1.5) == 0.5);
    CHECK(evaluate_landscape(ls, 1, 1.0) == 1.0);
    CHECK(evaluate_landscape(ls, 1, 1.5) == 0.5);
    CHECK(evaluate_landscape(ls, 1, 2.0) == 1.0);
    CHECK(evaluate_landscape(ls, 2, 1.5) == 0.5);
    CHECK(evaluate_landscape(ls, 2, 1.0) == 0.0);
    CHECK(evaluate_landscape(ls, 2, 2.0) == 0.0);
    for (double t = -0.5; t <= 3.5; t += 0.03125)
        for (std::size_t k = 1; k <= 3; ++k)
            CHECK(evaluate_landscape(ls, k, t) == doctest::Approx(brute_landscape(pairs, k, t)));
}

TEST_CASE("random diagrams agree with the brute force landscape")
{
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pairs = random_pairs(gen, 1 + trial % 9);
        const auto ls = landscape_from_diagram(finite_diagram(pairs));
        CHECK(ls.depth() <= pairs.size());
        for (double t = -0.25; t <= 8.5; t += 0.0625)
            for (std::size_t k = 1; k <= pairs.size() + 1; ++k)
                REQUIRE(evaluate_landscape(ls, k, t) ==
                        doctest::Approx(brute_landscape(pairs, k, t)).epsilon(1e-12));
    }
}

TEST_CASE("levels are ordered, non-negative, with unit slopes")
{
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pairs = random_pairs(gen, 1 + trial % 12);
        const auto ls = landscape_from_diagram(finite_diagram(pairs));
        for (std::size_t k = 0; k < ls.depth(); ++k) {
            const auto& level = ls.levels[k];
            for (std::size_t i = 0; i < level.size(); ++i) {
                REQUIRE(level[i].value >= 0.0);
                std::vector<double> probes{level[i].t};
                if (i + 1 < level.size()) {
                    const double dt = level[i + 1].t - level[i].t;
                    REQUIRE(dt >= 0.0);
                    if (dt > 0) {
                        const double slope = (level[i + 1].value - level[i].value) / dt;
                        REQUIRE((slope == 1.0 || slope == -1.0 || slope == 0.0));
                    }
                    probes.push_back((level[i].t + level[i + 1].t) / 2);
                }
                for (double t : probes)
                    REQUIRE(evaluate_landscape(ls, k + 1, t) >= evaluate_landscape(ls, k + 2, t));
            }
        }
    }
}

TEST_CASE("twice the sup norm is the longest bar")
{
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> u(-3.0, 1.0), len(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::pair<double, double>> pairs;
        const int n = trial % 15;
        for (int i = 0; i < n; ++i) {
            const double b = u(gen);
            pairs.emplace_back(b, b + len(gen) + 1e-9);
        }
        double longest = 0.0;
        for (auto [b, d] : pairs)
            longest = std::max(longest, d - b);
        const auto ls = landscape_from_diagram(finite_diagram(pairs));
        REQUIRE(2.0 * landscape_norm(ls, kInfinity) == longest);
    }
}

TEST_CASE("finite p norms match quadrature")
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pairs = random_pairs(gen, 4);
        const auto ls = landscape_from_diagram(finite_diagram(pairs));
        for (double p : {1.0, 2.0, 3.5})
            CHECK(landscape_norm(ls, p) == doctest::Approx(numeric_p_norm(pairs, p)).epsilon(1e-7));
    }
    CHECK_THROWS_AS(landscape_norm(Landscape{}, 0.5), std::invalid_argument);
}

TEST_CASE("sup distance")
{
    const auto a = landscape_from_diagram(finite_diagram({{0, 2}}));
    const auto b = landscape_from_diagram(finite_diagram({{0.5, 2.5}}));
    CHECK(landscape_sup_distance(a, a) == 0.0);
    CHECK(landscape_sup_distance(a, Landscape{}) == 1.0);
    CHECK(landscape_sup_distance(a, b) == 0.5);

    // dense grid oracle on the translated tents
    double dense = 0.0;
    for (int i = 0; i <= 30000; ++i) {
        const double t = -0.5 + i * 1e-4;
        dense = std::max(dense, std::abs(brute_landscape({{0, 2}}, 1, t) -
                                         brute_landscape({{0.5, 2.5}}, 1, t)));
    }
    CHECK(dense == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sup distance is a metric on random triples")
{
    std::mt19937_64 gen(59);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = landscape_from_diagram(finite_diagram(random_pairs(gen, 1 + trial % 5)));
        const auto b = landscape_from_diagram(finite_diagram(random_pairs(gen, 1 + trial % 7)));
        const auto c = landscape_from_diagram(finite_diagram(random_pairs(gen, 1 + trial % 4)));
        const double ab = landscape_sup_distance(a, b);
        CHECK(ab == landscape_sup_distance(b, a));
        CHECK(landscape_sup_distance(a, c) <= ab + landscape_sup_distance(b, c) + 1e-12);
    }
}

TEST_CASE("essential policy")
{
    PersistenceDiagram d;
    d.pairs = {{0.0, 1.0, 1}, {-2.0, kInfinity, 1}, {3.0, kInfinity, 1}};
    SUBCASE("drop ignores essential pairs")
    {
        const auto ls = landscape_from_diagram(d, EssentialPolicy::drop());
        CHECK(landscape_norm(ls, kInfinity) == 0.5);
    }
    SUBCASE("cap truncates, and drops pairs born after the cap")
    {
        const auto pairs = finite_pairs(d, EssentialPolicy::cap_at(2.0));
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[1].birth == -2.0);
        CHECK(pairs[1].death == 2.0);
        const auto ls = landscape_from_diagram(d, EssentialPolicy::cap_at(2.0));
        CHECK(landscape_norm(ls, kInfinity) == 2.0);
    }
    SUBCASE("unresolved cap is an error")
    {
        CHECK_THROWS_AS(landscape_from_diagram(d, EssentialPolicy::cap_at_max()),
                        std::invalid_argument);
    }
}
