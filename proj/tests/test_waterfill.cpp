#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hcran/waterfill.hpp"

using namespace hcran;

namespace {

double single_objective(double w, double price, double g, double p) {
    return w * std::log2(1.0 + p * g) - price * p;
}

double coupled_objective(double w, const std::vector<double>& prices, const std::vector<double>& gains,
                         const std::vector<double>& p) {
    double snr = 0.0, cost = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        snr += p[i] * gains[i];
        cost += prices[i] * p[i];
    }
    return w * std::log2(1.0 + snr) - cost;
}

}  // namespace

TEST_CASE("single water-fill closed form and edge cases") {
    // Water level exactly at the channel floor.
    CHECK(waterfill_single(1.0, 1.0 / std::log(2.0), 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(waterfill_single(0.0, 1.0, 5.0) == 0.0);
    CHECK(waterfill_single(3.0, 1.0, 0.0) == 0.0);
    CHECK(waterfill_single(2.0, 1.0 / std::log(2.0), 2.0) == doctest::Approx(1.5));
    CHECK(waterfill_single(2.0, 1.0 / std::log(2.0), 2.0, 1.0) == 1.0);
    CHECK(waterfill_single(5.0, 0.0, 1.0, 3.0) == 3.0);
    CHECK_THROWS(waterfill_single(5.0, 0.0, 1.0));
}

TEST_CASE("single water-fill beats a 10^4-point grid") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lu(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double w = std::pow(10.0, lu(rng));
        const double price = std::pow(10.0, lu(rng));
        const double g = std::pow(10.0, lu(rng));
        const double cap = std::pow(10.0, lu(rng) / 2.0);
        const double p = waterfill_single(w, price, g, cap);
        REQUIRE(p >= 0.0);
        REQUIRE(p <= cap);
        const double best = single_objective(w, price, g, p);

        double grid_best = -INFINITY;
        for (int n = 0; n <= 10000; ++n) {
            const double q = cap * n / 10000.0;
            grid_best = std::max(grid_best, single_objective(w, price, g, q));
        }
        CHECK(best >= grid_best - 1e-6 * std::max(std::abs(grid_best), 1e-12));
    }
}

TEST_CASE("coupled water-fill") {
    const double w = 4.0;
    const double price = 1.0;

    SUBCASE("one transmitter reduces to the closed form") {
        const std::vector<double> pr{price}, g{3.0}, caps{kNoCap};
        const auto r = waterfill_coupled(w, pr, g, caps);
        CHECK(r.converged);
        CHECK(r.power[0] == doctest::Approx(waterfill_single(w, price, 3.0)).epsilon(1e-12));
    }

    SUBCASE("symmetric links") {
        const std::vector<double> pr{price, price}, g{2.0, 2.0};
        // Uncapped, only the combined SNR is determined; it matches one transmitter.
        const std::vector<double> open{kNoCap, kNoCap};
        const auto r = waterfill_coupled(w, pr, g, open);
        const double single = waterfill_single(w, price, 2.0);
        CHECK((r.power[0] + r.power[1]) == doctest::Approx(single).epsilon(1e-9));
        // With binding caps the split is forced and equal.
        const std::vector<double> caps{0.5, 0.5};
        const auto c = waterfill_coupled(w, pr, g, caps);
        CHECK(c.power[0] == doctest::Approx(0.5));
        CHECK(c.power[1] == doctest::Approx(0.5));
    }

    SUBCASE("asymmetric links agree with a 2-D grid") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.2, 5.0);
        for (int trial = 0; trial < 20; ++trial) {
            const std::vector<double> pr{u(rng) / 3.0, u(rng) / 3.0}, g{u(rng), u(rng) * 3.0},
                caps{u(rng), u(rng)};
            const double weight = 3.0 * u(rng);
            const auto r = waterfill_coupled(weight, pr, g, caps);
            REQUIRE(r.converged);
            const double best = coupled_objective(weight, pr, g, r.power);
            double grid_best = -INFINITY;
            const int n = 800;
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= n; ++b)
                    grid_best = std::max(grid_best, coupled_objective(weight, pr, g,
                                                                      {caps[0] * a / n, caps[1] * b / n}));
            CHECK(best >= grid_best - 1e-5 * std::abs(grid_best));
        }
    }

    CHECK_THROWS(waterfill_coupled(1.0, std::vector<double>{1.0}, std::vector<double>{1.0, 2.0},
                                   std::vector<double>{1.0, 1.0}));
}

TEST_CASE("budgeted water-fill") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::vector<double> w{u(rng), u(rng)}, g{u(rng), u(rng)}, floors{1.0, 1.0 + u(rng)};
        const double price = trial % 3 == 0 ? 0.0 : u(rng) / 4.0;
        const double budget = u(rng);
        double mult = -1.0;
        const auto p = waterfill_budget(w, g, floors, price, budget, &mult);
        REQUIRE(p.size() == 2);
        CHECK(p[0] >= 0.0);
        CHECK(p[1] >= 0.0);
        CHECK(p[0] + p[1] <= budget * (1 + 1e-12));
        CHECK(mult >= 0.0);

        auto f = [&](double a, double b) {
            return w[0] * std::log2(1.0 + a * g[0] / floors[0]) + w[1] * std::log2(1.0 + b * g[1] / floors[1]) -
                   price * (a + b);
        };
        const double best = f(p[0], p[1]);
        double grid_best = -INFINITY;
        const int n = 1000;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) grid_best = std::max(grid_best, f(budget * a / n, budget * b / n));
        CHECK(best >= grid_best - 1e-6 * std::abs(grid_best));

        // A slack budget leaves each RB at its own water level.
        if (price > 0.0) {
            const auto loose = waterfill_budget(w, g, floors, price, 1e9);
            for (int k = 0; k < 2; ++k)
                CHECK(loose[k] == doctest::Approx(waterfill_single(w[k], price, g[k] / floors[k])).epsilon(1e-9));
        }
    }
}
