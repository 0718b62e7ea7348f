#include "powerroute/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "powerroute/errors.hpp"

namespace powerroute {

bool MarketNetwork::has_bus(BusId id) const {
    return std::any_of(buses.begin(), buses.end(), [id](const Bus& b) { return b.id == id; });
}

std::size_t MarketNetwork::bus_index(BusId id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return i;
    }
    throw InvalidModel("market " + this->id + " has no bus " + std::to_string(id));
}

Bus& MarketNetwork::bus(BusId id) { return buses[bus_index(id)]; }
const Bus& MarketNetwork::bus(BusId id) const { return buses[bus_index(id)]; }

BusId MarketNetwork::reference_bus() const {
    if (buses.empty()) throw InvalidModel("market " + id + " has no buses");
    return std::min_element(buses.begin(), buses.end(),
                            [](const Bus& a, const Bus& b) { return a.id < b.id; })
        ->id;
}

double MarketNetwork::total_load() const {
    return std::accumulate(buses.begin(), buses.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.load; });
}

double MarketNetwork::total_capacity() const {
    return std::accumulate(generators.begin(), generators.end(), 0.0,
                           [](double s, const Generator& g) { return s + g.p_max; });
}

std::vector<double> MarketNetwork::loads() const {
    std::vector<double> out;
    out.reserve(buses.size());
    for (const auto& b : buses) out.push_back(b.load);
    return out;
}

namespace {

bool is_connected(const MarketNetwork& network) {
    const std::size_t n = network.buses.size();
    if (n == 0) return false;
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& br : network.branches) {
        const auto f = network.bus_index(br.from_bus);
        const auto t = network.bus_index(br.to_bus);
        adj[f].push_back(t);
        adj[t].push_back(f);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (auto v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

}  // namespace

void validate_network(const MarketNetwork& network) {
    const auto fail = [&](const std::string& what) {
        throw InvalidModel("market " + network.id + ": " + what);
    };
    if (network.id.empty()) throw InvalidModel("market with empty id");
    if (network.buses.empty()) fail("no buses");
    if (!(network.transit_fee >= 0.0)) fail("negative transit fee");
    if (!(network.base_mva > 0.0)) fail("base power must be positive");

    std::set<BusId> ids;
    for (const auto& b : network.buses) {
        if (!ids.insert(b.id).second) fail("duplicate bus " + std::to_string(b.id));
        if (!(b.load >= 0.0)) fail("bus " + std::to_string(b.id) + " has negative load");
    }
    std::set<std::string> gen_ids;
    for (const auto& g : network.generators) {
        if (!gen_ids.insert(g.id).second) fail("duplicate generator " + g.id);
        if (!ids.contains(g.bus)) fail("generator " + g.id + " on unknown bus");
        if (!(g.p_min >= 0.0 && g.p_min <= g.p_max)) fail("generator " + g.id + " needs 0 <= pmin <= pmax");
        if (!(g.cost_c2 >= 0.0)) fail("generator " + g.id + " has a non-convex cost curve");
    }
    for (const auto& br : network.branches) {
        const auto label = std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus);
        if (br.from_bus == br.to_bus) fail("branch " + label + " is a self loop");
        if (!ids.contains(br.from_bus) || !ids.contains(br.to_bus)) fail("branch " + label + " on unknown bus");
        if (!(br.susceptance > 0.0)) fail("branch " + label + " needs positive susceptance");
        if (!(br.limit > 0.0)) fail("branch " + label + " needs positive limit");
    }
    for (const auto& [neighbor, bus] : network.boundary_map) {
        if (!ids.contains(bus)) fail("boundary toward " + neighbor + " on unknown bus");
    }
    for (const auto& [bus, mw] : network.committed_output) {
        if (!ids.contains(bus) || !(mw >= 0.0)) fail("bad committed output record");
    }
    if (!is_connected(network)) throw DisconnectedGrid("market " + network.id + " grid is not connected");
    if (network.total_capacity() < network.total_load()) fail("total capacity below total load");
}

Eigen::MatrixXd build_reduced_susceptance(const MarketNetwork& network) {
    if (!is_connected(network)) throw DisconnectedGrid("market " + network.id + " grid is not connected");
    const auto n = static_cast<Eigen::Index>(network.buses.size());
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
    for (const auto& br : network.branches) {
        const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
        const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
        full(f, f) += br.susceptance;
        full(t, t) += br.susceptance;
        full(f, t) -= br.susceptance;
        full(t, f) -= br.susceptance;
    }
    const auto ref = static_cast<Eigen::Index>(network.bus_index(network.reference_bus()));
    Eigen::MatrixXd reduced(n - 1, n - 1);
    for (Eigen::Index i = 0, ri = 0; i < n; ++i) {
        if (i == ref) continue;
        for (Eigen::Index j = 0, rj = 0; j < n; ++j) {
            if (j == ref) continue;
            reduced(ri, rj++) = full(i, j);
        }
        ++ri;
    }
    return reduced;
}

namespace {

std::vector<double> flows_from_angles(const MarketNetwork& network, const std::vector<double>& angles) {
    std::vector<double> flows;
    flows.reserve(network.branches.size());
    for (const auto& br : network.branches) {
        const double d = angles[network.bus_index(br.from_bus)] - angles[network.bus_index(br.to_bus)];
        flows.push_back(br.susceptance * d * network.base_mva);
    }
    return flows;
}

}  // namespace

DcFlowSolution solve_dc_flow(const MarketNetwork& network, std::span<const double> injections) {
    const std::size_t n = network.buses.size();
    if (injections.size() != n) throw InvalidModel("injection vector size does not match bus count");
    const double imbalance = std::accumulate(injections.begin(), injections.end(), 0.0);
    if (std::abs(imbalance) > kBalanceTolerance) {
        throw UnbalancedInjection("injections in market " + network.id + " sum to " + std::to_string(imbalance));
    }
    const Eigen::MatrixXd reduced = build_reduced_susceptance(network);
    const std::size_t ref = network.bus_index(network.reference_bus());

    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 0, r = 0; i < n; ++i) {
        if (i != ref) rhs(static_cast<Eigen::Index>(r++)) = injections[i] / network.base_mva;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(reduced);
    const Eigen::VectorXd theta = llt.solve(rhs);

    DcFlowSolution out;
    out.angles.assign(n, 0.0);
    for (std::size_t i = 0, r = 0; i < n; ++i) {
        if (i != ref) out.angles[i] = theta(static_cast<Eigen::Index>(r++));
    }
    out.branch_flows = flows_from_angles(network, out.angles);
    return out;
}

Eigen::MatrixXd injection_shift_factors(const MarketNetwork& network) {
    const Eigen::MatrixXd reduced = build_reduced_susceptance(network);
    const auto n = static_cast<Eigen::Index>(network.buses.size());
    const auto ref = static_cast<Eigen::Index>(network.bus_index(network.reference_bus()));
    // Reduced inverse maps p.u. injections to angles; base power cancels in the MW ratio.
    const Eigen::MatrixXd inv = reduced.llt().solve(Eigen::MatrixXd::Identity(n - 1, n - 1));

    const auto reduced_row = [ref](Eigen::Index bus) { return bus < ref ? bus : bus - 1; };
    Eigen::MatrixXd factors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(network.branches.size()), n);
    for (std::size_t l = 0; l < network.branches.size(); ++l) {
        const auto& br = network.branches[l];
        const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
        const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == ref) continue;
            const double theta_f = f == ref ? 0.0 : inv(reduced_row(f), reduced_row(k));
            const double theta_t = t == ref ? 0.0 : inv(reduced_row(t), reduced_row(k));
            factors(static_cast<Eigen::Index>(l), k) = br.susceptance * (theta_f - theta_t);
        }
    }
    return factors;
}

double nodal_balance_residual(const MarketNetwork& network, std::span<const double> injections,
                              const DcFlowSolution& solution) {
    std::vector<double> net(network.buses.size(), 0.0);
    for (std::size_t l = 0; l < network.branches.size(); ++l) {
        const auto& br = network.branches[l];
        net[network.bus_index(br.from_bus)] += solution.branch_flows[l];
        net[network.bus_index(br.to_bus)] -= solution.branch_flows[l];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) worst = std::max(worst, std::abs(injections[i] - net[i]));
    return worst;
}

std::vector<LimitViolation> check_limit_violations(const DcFlowSolution& solution,
                                                   const MarketNetwork& network) {
    std::vector<LimitViolation> out;
    for (std::size_t l = 0; l < network.branches.size(); ++l) {
        const double excess = std::abs(solution.branch_flows.at(l)) - network.branches[l].limit;
        if (excess > kOverloadTolerance) out.push_back({l, excess});
    }
    return out;
}

GraphCheck validate_market_graph(const std::vector<MarketNetwork>& markets,
                                 const std::vector<TieLine>& ties) {
    std::map<MarketId, std::size_t> index;
    for (std::size_t i = 0; i < markets.size(); ++i) index.emplace(markets[i].id, i);

    const auto check_end = [&](const MarketId& m, BusId bus, const TieLine& tie) {
        const auto it = index.find(m);
        if (it == index.end()) throw DanglingTie("tie " + tie.name() + " references unknown market " + m);
        if (!markets[it->second].has_bus(bus)) {
            throw DanglingTie("tie " + tie.name() + " references unknown bus " + std::to_string(bus) + " in " + m);
        }
        return it->second;
    };

    // Adjacency keeps the tie index so parallel ties show up as two-market loops.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(markets.size());
    CyclesFound found;
    for (std::size_t e = 0; e < ties.size(); ++e) {
        const auto a = check_end(ties[e].market_a, ties[e].bus_a, ties[e]);
        const auto b = check_end(ties[e].market_b, ties[e].bus_b, ties[e]);
        if (a == b) {
            found.cycles.push_back({markets[a].id});
            continue;
        }
        adj[a].emplace_back(b, e);
        adj[b].emplace_back(a, e);
    }

    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(markets.size(), Mark::White);
    std::vector<std::size_t> stack;

    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t u, std::size_t via) {
        mark[u] = Mark::Grey;
        stack.push_back(u);
        for (const auto& [v, e] : adj[u]) {
            if (e == via) continue;
            if (mark[v] == Mark::White) {
                visit(v, e);
            } else if (mark[v] == Mark::Grey) {
                std::vector<MarketId> cycle;
                auto it = std::find(stack.begin(), stack.end(), v);
                for (; it != stack.end(); ++it) cycle.push_back(markets[*it].id);
                found.cycles.push_back(std::move(cycle));
            }
        }
        stack.pop_back();
        mark[u] = Mark::Black;
    };
    for (std::size_t i = 0; i < markets.size(); ++i) {
        if (mark[i] == Mark::White) visit(i, ties.size());
    }
    if (found.cycles.empty()) return LoopFree{};
    return found;
}

}  // namespace powerroute
