#include <doctest.h>

#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#include "powerroute/errors.hpp"
#include "support.hpp"

using namespace powerroute;
using namespace testsupport;

TEST_CASE("reduced susceptance of a single branch") {
    const auto b = build_reduced_susceptance(two_bus(10.0, 100.0));
    REQUIRE(b.rows() == 1);
    REQUIRE(b.cols() == 1);
    CHECK(b(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("reduced susceptance of an equal triangle") {
    const auto b = build_reduced_susceptance(triangle(5.0, 5.0, 5.0));
    REQUIRE(b.rows() == 2);
    CHECK(b(0, 0) == doctest::Approx(10.0));
    CHECK(b(0, 1) == doctest::Approx(-5.0));
    CHECK(b(1, 0) == doctest::Approx(-5.0));
    CHECK(b(1, 1) == doctest::Approx(10.0));
}

TEST_CASE("reduced susceptance of a star drops the center") {
    MarketNetwork m;
    m.id = "S";
    m.buses = {{1, 0.0}, {2, 0.0}, {3, 0.0}, {4, 0.0}};
    m.branches = {{1, 2, 2.0, 100.0}, {1, 3, 2.0, 100.0}, {1, 4, 2.0, 100.0}};
    const auto b = build_reduced_susceptance(m);
    REQUIRE(b.rows() == 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) CHECK(b(i, j) == doctest::Approx(i == j ? 2.0 : 0.0));
    }
}

TEST_CASE("reference bus is the lowest numbered bus") {
    MarketNetwork m;
    m.buses = {{7, 0.0}, {3, 0.0}, {5, 0.0}};
    CHECK(m.reference_bus() == 3);
}

TEST_CASE("zero injections give zero angles and flows") {
    const auto net = triangle(5.0, 7.0, 9.0);
    const std::vector<double> inj(3, 0.0);
    const auto sol = solve_dc_flow(net, inj);
    for (double a : sol.angles) CHECK(a == doctest::Approx(0.0));
    for (double f : sol.branch_flows) CHECK(f == doctest::Approx(0.0));
}

TEST_CASE("two-bus transfer is carried entirely by the branch") {
    const auto net = two_bus(10.0, 500.0);
    const std::vector<double> inj = {75.0, -75.0};
    const auto sol = solve_dc_flow(net, inj);
    CHECK(sol.branch_flows[0] == doctest::Approx(75.0));
}

TEST_CASE("triangle flows match a hand solution") {
    const auto net = triangle(5.0, 5.0, 5.0);
    const std::vector<double> inj = {90.0, -30.0, -60.0};
    const auto sol = solve_dc_flow(net, inj);
    const auto expected = triangle_flows(5.0, 5.0, 5.0, 100.0, -30.0, -60.0);
    for (int k = 0; k < 3; ++k) CHECK(sol.branch_flows[k] == doctest::Approx(expected[k]).epsilon(1e-10));
    CHECK(nodal_balance_residual(net, inj, sol) < 1e-6);
}

TEST_CASE("unbalanced injections are rejected") {
    const auto net = two_bus(10.0, 100.0);
    const std::vector<double> inj = {10.0, -5.0};
    CHECK_THROWS_AS(solve_dc_flow(net, inj), UnbalancedInjection);
}

TEST_CASE("disconnected grid is rejected") {
    MarketNetwork m;
    m.id = "X";
    m.buses = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
    m.branches = {{1, 2, 5.0, 100.0}};
    CHECK_THROWS_AS(build_reduced_susceptance(m), DisconnectedGrid);
}

TEST_CASE("limit violations") {
    SUBCASE("zero flows") {
        const auto net = two_bus(10.0, 100.0);
        const std::vector<double> inj = {0.0, 0.0};
        CHECK(check_limit_violations(solve_dc_flow(net, inj), net).empty());
    }
    SUBCASE("150 MW over a 100 MW branch") {
        const auto net = two_bus(10.0, 100.0);
        const std::vector<double> inj = {150.0, -150.0};
        const auto v = check_limit_violations(solve_dc_flow(net, inj), net);
        REQUIRE(v.size() == 1);
        CHECK(v[0].branch == 0);
        CHECK(v[0].overload == doctest::Approx(50.0));
    }
    SUBCASE("shrinking one branch below its base flow flags exactly that branch") {
        auto net = triangle(5.0, 8.0, 11.0, 500.0);
        const std::vector<double> inj = {120.0, -50.0, -70.0};
        const auto base = solve_dc_flow(net, inj);
        CHECK(check_limit_violations(base, net).empty());
        net.branches[1].limit = std::abs(base.branch_flows[1]) - 5.0;
        const auto v = check_limit_violations(solve_dc_flow(net, inj), net);
        REQUIRE(v.size() == 1);
        CHECK(v[0].branch == 1);
        CHECK(v[0].overload == doctest::Approx(5.0));
    }
}

TEST_CASE("reduced susceptance is symmetric positive definite on random connected grids") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> sus(0.5, 30.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 9;
        MarketNetwork m;
        m.id = "R";
        for (int i = 1; i <= n; ++i) m.buses.push_back({i, 0.0});
        for (int i = 2; i <= n; ++i) {
            std::uniform_int_distribution<int> parent(1, i - 1);
            m.branches.push_back({parent(rng), i, sus(rng), 100.0});
        }
        for (int extra = 0; extra < n / 2; ++extra) {
            std::uniform_int_distribution<int> pick(1, n);
            const int a = pick(rng), b = pick(rng);
            if (a != b) m.branches.push_back({a, b, sus(rng), 100.0});
        }
        const Eigen::MatrixXd b = build_reduced_susceptance(m);
        CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        Eigen::LLT<Eigen::MatrixXd> llt(b);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("dc flow is linear in the injections") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> sus(1.0, 20.0), p(-100.0, 100.0), coef(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 6;
        MarketNetwork m;
        m.id = "L";
        for (int i = 1; i <= n; ++i) m.buses.push_back({i, 0.0});
        for (int i = 2; i <= n; ++i) m.branches.push_back({i - 1, i, sus(rng), 100.0});
        m.branches.push_back({1, n, sus(rng), 100.0});
        const auto balanced = [&] {
            std::vector<double> v(n);
            for (auto& x : v) x = p(rng);
            const double sum = std::accumulate(v.begin(), v.end(), 0.0);
            v.back() -= sum;
            return v;
        };
        const auto x = balanced(), y = balanced();
        const double a = coef(rng), b = coef(rng);
        std::vector<double> z(n);
        for (int i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
        const auto sx = solve_dc_flow(m, x), sy = solve_dc_flow(m, y), sz = solve_dc_flow(m, z);
        for (std::size_t k = 0; k < m.branches.size(); ++k) {
            const double expected = a * sx.branch_flows[k] + b * sy.branch_flows[k];
            CHECK(std::abs(sz.branch_flows[k] - expected) <= 1e-8 * (1.0 + std::abs(expected)));
        }
        CHECK(nodal_balance_residual(m, z, sz) < 1e-6);
    }
}

namespace {

std::vector<MarketNetwork> bare_markets(int n) {
    std::vector<MarketNetwork> markets;
    for (int i = 0; i < n; ++i) {
        MarketNetwork m;
        m.id = "M" + std::to_string(i);
        m.buses = {{1, 0.0}};
        markets.push_back(m);
    }
    return markets;
}

TieLine tie(const std::string& a, const std::string& b) { return {a, 1, b, 1, 100.0, 1.0, 0.0}; }

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

TEST_CASE("market graph loop detection") {
    SUBCASE("chain") {
        std::vector<MarketNetwork> m(4);
        const char* ids[] = {"A", "B", "C", "D"};
        for (int i = 0; i < 4; ++i) {
            m[i].id = ids[i];
            m[i].buses = {{1, 0.0}};
        }
        const auto g = validate_market_graph(m, {tie("A", "B"), tie("B", "C"), tie("C", "D")});
        CHECK(std::holds_alternative<LoopFree>(g));
    }
    SUBCASE("triangle") {
        std::vector<MarketNetwork> m(3);
        const char* ids[] = {"A", "B", "C"};
        for (int i = 0; i < 3; ++i) {
            m[i].id = ids[i];
            m[i].buses = {{1, 0.0}};
        }
        const auto g = validate_market_graph(m, {tie("A", "B"), tie("B", "C"), tie("C", "A")});
        REQUIRE(std::holds_alternative<CyclesFound>(g));
        const auto& cycles = std::get<CyclesFound>(g).cycles;
        REQUIRE(cycles.size() == 1);
        auto sorted = cycles[0];
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::vector<MarketId>{"A", "B", "C"});
    }
    SUBCASE("single market") {
        CHECK(std::holds_alternative<LoopFree>(validate_market_graph(bare_markets(1), {})));
    }
    SUBCASE("unknown market") {
        CHECK_THROWS_AS(validate_market_graph(bare_markets(2), {tie("M0", "Z")}), DanglingTie);
    }
    SUBCASE("unknown boundary bus") {
        auto t = tie("M0", "M1");
        t.bus_b = 9;
        CHECK_THROWS_AS(validate_market_graph(bare_markets(2), {t}), DanglingTie);
    }
}

TEST_CASE("loop detection agrees with union-find on random graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        std::uniform_int_distribution<int> size(1, 9);
        const int n = size(rng);
        std::uniform_int_distribution<int> edges(0, n + 2), pick(0, n - 1);
        const int e = edges(rng);
        std::vector<TieLine> ties;
        UnionFind uf(n);
        bool cyclic = false;
        for (int k = 0; k < e; ++k) {
            const int a = pick(rng), b = pick(rng);
            if (a == b) continue;
            ties.push_back(tie("M" + std::to_string(a), "M" + std::to_string(b)));
            if (!uf.unite(a, b)) cyclic = true;
        }
        const auto g = validate_market_graph(bare_markets(n), ties);
        CHECK(std::holds_alternative<CyclesFound>(g) == cyclic);
    }
}

TEST_CASE("network validation") {
    MarketNetwork m = triangle(5.0, 5.0, 5.0);
    m.buses[1].load = 50.0;
    m.generators = {{"G", 1, 0.0, 100.0, 0.0, 1.0, 0.0}};
    CHECK_NOTHROW(validate_network(m));
    SUBCASE("negative load") {
        m.buses[1].load = -1.0;
        CHECK_THROWS_AS(validate_network(m), InvalidModel);
    }
    SUBCASE("capacity below load") {
        m.buses[1].load = 150.0;
        CHECK_THROWS_AS(validate_network(m), InvalidModel);
    }
    SUBCASE("disconnected") {
        m.branches.resize(1);
        CHECK_THROWS_AS(validate_network(m), DisconnectedGrid);
    }
}
