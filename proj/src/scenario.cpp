#include "powerroute/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "powerroute/errors.hpp"

namespace powerroute {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

class Parser {
public:
    Scenario run(std::string_view text) {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t end = std::min(text.find('\n', pos), text.size());
            std::string_view line = text.substr(pos, end - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++line_no;
            handle(line_no, split_fields(line));
            if (end == text.size()) break;
            pos = end + 1;
        }
        if (scenario_.markets.empty()) throw ParseError(1, "no market records");
        finish();
        return std::move(scenario_);
    }

private:
    void handle(std::size_t line, const std::vector<std::string_view>& f) {
        if (f.empty()) return;
        line_ = line;
        fields_ = &f;
        const auto kind = f[0];
        if (kind == "market") {
            expect(3);
            MarketNetwork m;
            m.id = std::string(f[1]);
            m.transit_fee = number(2);
            m.base_mva = scenario_.base_power;
            if (market_index_.contains(m.id)) invalid("duplicate market " + m.id);
            market_index_[m.id] = scenario_.markets.size();
            market_line_.push_back(line);
            scenario_.markets.push_back(std::move(m));
        } else if (kind == "bus") {
            expect(4);
            auto& m = market(1);
            const BusId id = integer(2);
            if (m.has_bus(id)) invalid("duplicate bus " + std::to_string(id) + " in " + m.id);
            m.buses.push_back({id, number(3)});
        } else if (kind == "gen") {
            expect(9);
            auto& m = market(1);
            const BusId bus = existing_bus(m, 2);
            m.generators.push_back({std::string(f[3]), bus, number(4), number(5), number(6), number(7), number(8)});
        } else if (kind == "branch") {
            expect(6);
            auto& m = market(1);
            m.branches.push_back({existing_bus(m, 2), existing_bus(m, 3), number(4), number(5)});
        } else if (kind == "boundary") {
            expect(4);
            auto& m = market(1);
            const std::string neighbor(f[2]);
            const BusId bus = existing_bus(m, 3);
            if (m.boundary_map.contains(neighbor)) invalid("second boundary from " + m.id + " toward " + neighbor);
            m.boundary_map[neighbor] = bus;
            boundary_lines_.push_back({m.id, neighbor, line});
        } else if (kind == "tie") {
            expect(5);
            TieLine t;
            t.market_a = std::string(f[1]);
            t.market_b = std::string(f[2]);
            t.limit = number(3);
            t.fee = number(4);
            if (!market_index_.contains(t.market_a) || !market_index_.contains(t.market_b)) {
                invalid("tie " + t.name() + " references an unknown market");
            }
            if (t.market_a == t.market_b) invalid("tie " + t.name() + " connects a market to itself");
            if (!(t.limit > 0.0)) invalid("tie " + t.name() + " needs a positive limit");
            if (!(t.fee >= 0.0)) invalid("tie " + t.name() + " has a negative fee");
            for (const auto& other : scenario_.ties) {
                if (other.connects(t.market_a, t.market_b)) invalid("second tie between " + t.market_a + " and " + t.market_b);
            }
            scenario_.ties.push_back(std::move(t));
            tie_lines_.push_back(line);
        } else if (kind == "txn") {
            expect(7);
            Transaction t;
            const auto id = integer(1);
            if (id < 0) invalid("transaction id must be non-negative");
            t.id = static_cast<std::uint64_t>(id);
            t.seller_market = std::string(f[2]);
            t.seller_bus = integer(3);
            t.buyer_market = std::string(f[4]);
            t.buyer_bus = integer(5);
            t.p_tr = number(6);
            if (!scenario_.transactions.empty() && t.id <= scenario_.transactions.back().id) {
                invalid("transaction ids must be strictly increasing");
            }
            if (!(t.p_tr > 0.0)) invalid("transaction power must be positive");
            scenario_.transactions.push_back(std::move(t));
            txn_lines_.push_back(line);
        } else {
            throw ParseError(line, "unknown record kind '" + std::string(kind) + "'");
        }
    }

    void finish() {
        for (std::size_t i = 0; i < scenario_.markets.size(); ++i) {
            try {
                validate_network(scenario_.markets[i]);
            } catch (const Error& e) {
                throw ValidationError(market_line_[i], e.what());
            }
        }
        for (std::size_t i = 0; i < scenario_.ties.size(); ++i) {
            auto& t = scenario_.ties[i];
            const auto& a = scenario_.markets[market_index_.at(t.market_a)];
            const auto& b = scenario_.markets[market_index_.at(t.market_b)];
            if (!a.boundary_map.contains(t.market_b)) {
                throw ValidationError(tie_lines_[i], "tie " + t.name() + ": no boundary bus in " + t.market_a + " toward " + t.market_b);
            }
            if (!b.boundary_map.contains(t.market_a)) {
                throw ValidationError(tie_lines_[i], "tie " + t.name() + ": no boundary bus in " + t.market_b + " toward " + t.market_a);
            }
            t.bus_a = a.boundary_map.at(t.market_b);
            t.bus_b = b.boundary_map.at(t.market_a);
        }
        for (const auto& [market, neighbor, line] : boundary_lines_) {
            const bool tied = std::any_of(scenario_.ties.begin(), scenario_.ties.end(),
                                          [&](const TieLine& t) { return t.connects(market, neighbor); });
            if (!tied) throw ValidationError(line, "boundary " + market + " -> " + neighbor + " has no tie");
        }
        for (std::size_t i = 0; i < scenario_.transactions.size(); ++i) {
            const auto& t = scenario_.transactions[i];
            const auto check = [&](const MarketId& m, BusId bus, const char* who) {
                const auto it = market_index_.find(m);
                if (it == market_index_.end()) throw ValidationError(txn_lines_[i], std::string(who) + " market " + m + " unknown");
                if (!scenario_.markets[it->second].has_bus(bus)) {
                    throw ValidationError(txn_lines_[i], std::string(who) + " bus " + std::to_string(bus) + " not in " + m);
                }
            };
            check(t.seller_market, t.seller_bus, "seller");
            check(t.buyer_market, t.buyer_bus, "buyer");
        }
        const GraphCheck graph = validate_market_graph(scenario_.markets, scenario_.ties);
        if (const auto* cycles = std::get_if<CyclesFound>(&graph)) {
            std::string list;
            for (const auto& c : cycles->cycles) {
                list += " [";
                for (std::size_t k = 0; k < c.size(); ++k) list += (k ? "," : "") + c[k];
                list += "]";
            }
            throw ValidationError(tie_lines_.empty() ? 1 : tie_lines_.back(), "market graph has loops:" + list);
        }
    }

    void expect(std::size_t n) const {
        if (fields_->size() != n) {
            throw ParseError(line_, "'" + std::string((*fields_)[0]) + "' record needs " + std::to_string(n - 1) +
                                        " fields, got " + std::to_string(fields_->size() - 1));
        }
    }

    double number(std::size_t i) const {
        const auto s = (*fields_)[i];
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ParseError(line_, "expected a number, got '" + std::string(s) + "'");
        }
        return v;
    }

    int integer(std::size_t i) const {
        const auto s = (*fields_)[i];
        int v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ParseError(line_, "expected an integer, got '" + std::string(s) + "'");
        }
        return v;
    }

    MarketNetwork& market(std::size_t i) {
        const std::string id((*fields_)[i]);
        const auto it = market_index_.find(id);
        if (it == market_index_.end()) invalid("unknown market " + id);
        return scenario_.markets[it->second];
    }

    BusId existing_bus(const MarketNetwork& m, std::size_t i) const {
        const BusId id = integer(i);
        if (!m.has_bus(id)) invalid("bus " + std::to_string(id) + " not declared in " + m.id);
        return id;
    }

    [[noreturn]] void invalid(const std::string& message) const { throw ValidationError(line_, message); }

    struct BoundaryLine {
        MarketId market;
        MarketId neighbor;
        std::size_t line;
    };

    Scenario scenario_;
    std::map<MarketId, std::size_t> market_index_;
    std::vector<std::size_t> market_line_;
    std::vector<std::size_t> tie_lines_;
    std::vector<std::size_t> txn_lines_;
    std::vector<BoundaryLine> boundary_lines_;
    std::size_t line_ = 0;
    const std::vector<std::string_view>* fields_ = nullptr;
};

}  // namespace

Scenario parse_scenario(std::string_view text) { return Parser{}.run(text); }

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scenario " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

World make_world(const Scenario& scenario) { return build_world(scenario.markets, scenario.ties); }

}  // namespace powerroute
