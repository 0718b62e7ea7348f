#include "powerroute/dc_opf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "powerroute/errors.hpp"
#include "powerroute/qp.hpp"

namespace powerroute {

const char* to_string(Role role) {
    switch (role) {
        case Role::Source: return "source";
        case Role::Intermediate: return "intermediate";
        case Role::Target: return "target";
        case Role::Internal: return "internal";
    }
    return "?";
}

BoundaryModification BoundaryModification::source(BusId seller, BusId out, double p_tr) {
    return {Role::Source, p_tr, std::nullopt, out, seller, std::nullopt};
}
BoundaryModification BoundaryModification::intermediate(BusId in, BusId out, double p_tr) {
    return {Role::Intermediate, p_tr, in, out, std::nullopt, std::nullopt};
}
BoundaryModification BoundaryModification::target(BusId in, BusId buyer, double p_tr) {
    return {Role::Target, p_tr, in, std::nullopt, std::nullopt, buyer};
}
BoundaryModification BoundaryModification::internal(BusId seller, BusId buyer, double p_tr) {
    return {Role::Internal, p_tr, std::nullopt, std::nullopt, seller, buyer};
}

void validate_modification(const MarketNetwork& network, const BoundaryModification& mod) {
    const auto fail = [&](const std::string& what) {
        throw InvalidModel(std::string(to_string(mod.role)) + " modification in " + network.id + ": " + what);
    };
    if (!(mod.p_tr >= 0.0)) fail("negative transaction power");
    const bool wants_in = mod.role == Role::Intermediate || mod.role == Role::Target;
    const bool wants_out = mod.role == Role::Source || mod.role == Role::Intermediate;
    const bool wants_seller = mod.role == Role::Source || mod.role == Role::Internal;
    const bool wants_buyer = mod.role == Role::Target || mod.role == Role::Internal;
    const auto check = [&](const std::optional<BusId>& bus, bool wanted, const char* name) {
        if (bus.has_value() != wanted) fail(std::string(name) + (wanted ? " missing" : " not allowed"));
        if (bus && !network.has_bus(*bus)) fail(std::string(name) + " " + std::to_string(*bus) + " does not exist");
    };
    check(mod.in_bus, wants_in, "in_bus");
    check(mod.out_bus, wants_out, "out_bus");
    check(mod.seller_bus, wants_seller, "seller_bus");
    check(mod.buyer_bus, wants_buyer, "buyer_bus");
}

MarketNetwork apply_modification(const MarketNetwork& network, const BoundaryModification& mod) {
    validate_modification(network, mod);
    MarketNetwork out = network;
    if (mod.p_tr == 0.0) return out;
    if (mod.in_bus) out.bus(*mod.in_bus).load -= mod.p_tr;
    if (mod.out_bus) out.bus(*mod.out_bus).load += mod.p_tr;
    if (mod.buyer_bus) out.bus(*mod.buyer_bus).load += mod.p_tr;
    if (mod.seller_bus) out.committed_output[*mod.seller_bus] += mod.p_tr;
    return out;
}

namespace {

SeparableQp build_dispatch_program(const MarketNetwork& network, const Eigen::MatrixXd& shift) {
    const auto n_gen = static_cast<Eigen::Index>(network.generators.size());
    const auto n_branch = static_cast<Eigen::Index>(network.branches.size());
    const auto n_floor = static_cast<Eigen::Index>(network.committed_output.size());

    SeparableQp qp;
    qp.quad.resize(n_gen);
    qp.lin.resize(n_gen);
    for (Eigen::Index g = 0; g < n_gen; ++g) {
        const auto& gen = network.generators[static_cast<std::size_t>(g)];
        qp.quad(g) = gen.cost_c2;
        qp.lin(g) = gen.cost_c1;
        qp.constant += gen.cost_c0;
    }

    qp.eq = Eigen::MatrixXd::Ones(1, n_gen);
    qp.eq_rhs = Eigen::VectorXd::Constant(1, network.total_load());

    const Eigen::Index rows = 2 * n_gen + 2 * n_branch + n_floor;
    qp.ineq = Eigen::MatrixXd::Zero(rows, n_gen);
    qp.ineq_rhs = Eigen::VectorXd::Zero(rows);
    qp.ineq_group.assign(static_cast<std::size_t>(rows), 0);
    Eigen::Index r = 0;
    std::size_t group = 0;

    for (Eigen::Index g = 0; g < n_gen; ++g, ++group) {
        const auto& gen = network.generators[static_cast<std::size_t>(g)];
        qp.ineq(r, g) = 1.0;
        qp.ineq_rhs(r) = gen.p_max;
        qp.ineq_group[static_cast<std::size_t>(r++)] = group;
        qp.ineq(r, g) = -1.0;
        qp.ineq_rhs(r) = -gen.p_min;
        qp.ineq_group[static_cast<std::size_t>(r++)] = group;
    }

    // flow_l = sum_g shift(l, bus_g) x_g - sum_k shift(l, k) load_k
    const Eigen::VectorXd load_flow = [&] {
        Eigen::VectorXd loads(static_cast<Eigen::Index>(network.buses.size()));
        for (std::size_t k = 0; k < network.buses.size(); ++k) loads(static_cast<Eigen::Index>(k)) = network.buses[k].load;
        return Eigen::VectorXd(shift * loads);
    }();
    for (Eigen::Index l = 0; l < n_branch; ++l, ++group) {
        Eigen::RowVectorXd coeff(n_gen);
        for (Eigen::Index g = 0; g < n_gen; ++g) {
            const auto bus = network.bus_index(network.generators[static_cast<std::size_t>(g)].bus);
            coeff(g) = shift(l, static_cast<Eigen::Index>(bus));
        }
        const double limit = network.branches[static_cast<std::size_t>(l)].limit;
        qp.ineq.row(r) = coeff;
        qp.ineq_rhs(r) = limit + load_flow(l);
        qp.ineq_group[static_cast<std::size_t>(r++)] = group;
        qp.ineq.row(r) = -coeff;
        qp.ineq_rhs(r) = limit - load_flow(l);
        qp.ineq_group[static_cast<std::size_t>(r++)] = group;
    }

    for (const auto& [bus, floor] : network.committed_output) {
        for (Eigen::Index g = 0; g < n_gen; ++g) {
            if (network.generators[static_cast<std::size_t>(g)].bus == bus) qp.ineq(r, g) = -1.0;
        }
        qp.ineq_rhs(r) = -floor;
        qp.ineq_group[static_cast<std::size_t>(r++)] = group++;
    }
    return qp;
}

}  // namespace

std::vector<double> dispatch_injections(const MarketNetwork& network, const DispatchResult& result) {
    std::vector<double> inj(network.buses.size(), 0.0);
    for (std::size_t k = 0; k < network.buses.size(); ++k) inj[k] = -network.buses[k].load;
    for (std::size_t g = 0; g < network.generators.size(); ++g) {
        inj[network.bus_index(network.generators[g].bus)] += result.outputs.at(g);
    }
    return inj;
}

DispatchResult solve_base_dispatch(const MarketNetwork& network) {
    const Eigen::MatrixXd shift = injection_shift_factors(network);
    const QpSolution sol = solve_qp(build_dispatch_program(network, shift));

    DispatchResult result;
    if (!sol.feasible) {
        result.total_cost = std::numeric_limits<double>::quiet_NaN();
        return result;
    }
    result.feasible = true;
    result.outputs.assign(sol.x.data(), sol.x.data() + sol.x.size());
    result.total_cost = 0.0;
    for (std::size_t g = 0; g < network.generators.size(); ++g) {
        result.total_cost += network.generators[g].cost(result.outputs[g]);
    }
    const auto inj = dispatch_injections(network, result);
    result.flow_solution = solve_dc_flow(network, inj);
    for (std::size_t l = 0; l < network.branches.size(); ++l) {
        if (std::abs(result.flow_solution.branch_flows[l]) >= network.branches[l].limit - kOverloadTolerance) {
            result.binding_branches.push_back(l);
        }
    }
    return result;
}

DispatchResult solve_with_transaction(const MarketNetwork& network, const BoundaryModification& mod) {
    return solve_base_dispatch(apply_modification(network, mod));
}

namespace {

std::optional<double> cost_delta(const MarketNetwork& network, const BoundaryModification& mod,
                                 const DispatchResult& base) {
    if (!base.feasible) return std::nullopt;
    const DispatchResult with = solve_with_transaction(network, mod);
    if (!with.feasible) return std::nullopt;
    return with.total_cost - base.total_cost;
}

}  // namespace

std::optional<double> congestion_fee(const MarketNetwork& network, const BoundaryModification& mod,
                                     const DispatchResult& base) {
    if (mod.role != Role::Intermediate) {
        throw InvalidModel("congestion fee applies to intermediate markets only");
    }
    return cost_delta(network, mod, base);
}

std::optional<double> role_delta(const MarketNetwork& network, const BoundaryModification& mod,
                                 const DispatchResult& base) {
    if (mod.role == Role::Intermediate) {
        throw InvalidModel("role delta applies to source, target or internal markets");
    }
    return cost_delta(network, mod, base);
}

}  // namespace powerroute
