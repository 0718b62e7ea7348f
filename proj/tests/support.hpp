#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "powerroute/grid_model.hpp"
#include "powerroute/market_agent.hpp"

namespace testsupport {

using namespace powerroute;

inline std::string scenario_path(const std::string& name) { return std::string(POWERROUTE_SCENARIO_DIR) + "/" + name; }

inline MarketNetwork two_bus(double b, double limit) {
    MarketNetwork m;
    m.id = "M";
    m.buses = {{1, 0.0}, {2, 0.0}};
    m.branches = {{1, 2, b, limit}};
    return m;
}

inline MarketNetwork triangle(double b12, double b13, double b23, double limit = 1000.0) {
    MarketNetwork m;
    m.id = "M";
    m.buses = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
    m.branches = {{1, 2, b12, limit}, {1, 3, b13, limit}, {2, 3, b23, limit}};
    return m;
}

/// Branch flows of a 3-bus triangle (branches 1-2, 1-3, 2-3) from Cramer's rule on the
/// 2x2 system with bus 1 as reference.
inline std::vector<double> triangle_flows(double b12, double b13, double b23, double base_mva, double p2, double p3) {
    const double a = b12 + b23, b = -b23, c = -b23, d = b13 + b23;
    const double det = a * d - b * c;
    const double t2 = (p2 / base_mva * d - b * p3 / base_mva) / det;
    const double t3 = (a * p3 / base_mva - c * p2 / base_mva) / det;
    return {b12 * (0.0 - t2) * base_mva, b13 * (0.0 - t3) * base_mva, b23 * (t2 - t3) * base_mva};
}

/// One 3-bus triangle market with a generator at every bus.
struct ThreeBusInstance {
    double b12, b13, b23;
    double load2, load3;
    double c1[3];
    double c2[3];
    double pmin[3];
    double pmax[3];
    double limit[3];  // 1-2, 1-3, 2-3
};

inline MarketNetwork to_network(const ThreeBusInstance& x) {
    MarketNetwork m;
    m.id = "T";
    m.buses = {{1, 0.0}, {2, x.load2}, {3, x.load3}};
    m.branches = {{1, 2, x.b12, x.limit[0]}, {1, 3, x.b13, x.limit[1]}, {2, 3, x.b23, x.limit[2]}};
    for (int i = 0; i < 3; ++i) {
        m.generators.push_back({"G" + std::to_string(i + 1), i + 1, x.pmin[i], x.pmax[i], x.c2[i], x.c1[i], 0.0});
    }
    return m;
}

struct GridSearchResult {
    bool feasible = false;
    double cost = 0.0;
    double g[3] = {0, 0, 0};
};

/// Exhaustive search over outputs of generators 1 and 2 at `step` MW; generator 3 takes
/// the balance. Loads at bus 1 are taken as zero.
inline GridSearchResult grid_search(const ThreeBusInstance& x, double base_mva = 100.0, double step = 0.1) {
    GridSearchResult best;
    const double total = x.load2 + x.load3;
    const long n1 = std::lround((x.pmax[0] - x.pmin[0]) / step);
    const long n2 = std::lround((x.pmax[1] - x.pmin[1]) / step);
    for (long i = 0; i <= n1; ++i) {
        const double g1 = x.pmin[0] + i * step;
        for (long j = 0; j <= n2; ++j) {
            const double g2 = x.pmin[1] + j * step;
            const double g3 = total - g1 - g2;
            if (g3 < x.pmin[2] - 1e-9 || g3 > x.pmax[2] + 1e-9) continue;
            const auto f = triangle_flows(x.b12, x.b13, x.b23, base_mva, g2 - x.load2, g3 - x.load3);
            bool ok = true;
            for (int k = 0; k < 3; ++k) ok = ok && std::abs(f[k]) <= x.limit[k] + 1e-9;
            if (!ok) continue;
            const double g[3] = {g1, g2, g3};
            double cost = 0.0;
            for (int k = 0; k < 3; ++k) cost += x.c2[k] * g[k] * g[k] + x.c1[k] * g[k];
            if (!best.feasible || cost < best.cost) {
                best.feasible = true;
                best.cost = cost;
                for (int k = 0; k < 3; ++k) best.g[k] = g[k];
            }
        }
    }
    return best;
}

/// Small market for protocol tests: buses 1..3 in a triangle, cheap generator at bus 1,
/// expensive generator at bus 3, load at bus 2. Boundaries are added by the caller.
inline MarketNetwork small_market(const MarketId& id, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> fee(0.0, 3.0), c1(5.0, 30.0), c2(0.0, 0.1), load(10.0, 60.0),
        lim(40.0, 200.0), b(5.0, 20.0);
    MarketNetwork m;
    m.id = id;
    m.transit_fee = fee(rng);
    m.buses = {{1, 0.0}, {2, load(rng)}, {3, 0.0}};
    m.branches = {{1, 2, b(rng), lim(rng)}, {1, 3, b(rng), lim(rng)}, {2, 3, b(rng), lim(rng)}};
    m.generators = {{"G1", 1, 0.0, 250.0, c2(rng), c1(rng), 10.0}, {"G3", 3, 0.0, 250.0, c2(rng), c1(rng), 10.0}};
    return m;
}

struct RandomTree {
    std::vector<MarketNetwork> markets;
    std::vector<TieLine> ties;
};

/// Random tree of `n` markets named M0..M(n-1); markets are declared in a shuffled order
/// so the sweep order is not the tree order.
inline RandomTree random_tree(std::size_t n, std::mt19937_64& rng) {
    RandomTree t;
    std::vector<MarketId> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("M" + std::to_string(i));
    for (const auto& name : names) t.markets.push_back(small_market(name, rng));
    std::uniform_real_distribution<double> fee(0.0, 3.0), limit(20.0, 150.0);
    std::uniform_int_distribution<int> bus(1, 3);
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> parent(0, i - 1);
        const std::size_t p = parent(rng);
        TieLine tie;
        tie.market_a = names[p];
        tie.market_b = names[i];
        tie.bus_a = bus(rng);
        tie.bus_b = bus(rng);
        tie.limit = limit(rng);
        tie.fee = fee(rng);
        t.markets[p].boundary_map[names[i]] = tie.bus_a;
        t.markets[i].boundary_map[names[p]] = tie.bus_b;
        t.ties.push_back(tie);
    }
    std::shuffle(t.markets.begin(), t.markets.end(), rng);
    return t;
}

/// Chain of uncongested copies of `small_market` with equal fees.
inline World chain_world(const std::vector<MarketId>& names, double tie_limit, double fee) {
    std::vector<MarketNetwork> markets;
    std::vector<TieLine> ties;
    std::mt19937_64 rng(1);
    for (const auto& name : names) {
        MarketNetwork m = small_market(name, rng);
        m.transit_fee = fee;
        m.generators = {{"G1", 1, 0.0, 500.0, 0.0, 10.0, 0.0}, {"G3", 3, 0.0, 500.0, 0.0, 20.0, 0.0}};
        for (auto& br : m.branches) br.limit = 1000.0;
        markets.push_back(m);
    }
    for (std::size_t i = 0; i + 1 < names.size(); ++i) {
        markets[i].boundary_map[names[i + 1]] = 3;
        markets[i + 1].boundary_map[names[i]] = 1;
        ties.push_back({names[i], 3, names[i + 1], 1, tie_limit, fee, 0.0});
    }
    return build_world(markets, ties);
}

}  // namespace testsupport
