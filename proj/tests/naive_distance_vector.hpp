#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace testsupport {

/// Plain distance-vector routing toward one destination: every node keeps only a distance
/// and a next hop, and believes whatever its neighbors advertise. No path information, so
/// nothing stops a node from routing back through the neighbor that routes through it.
class NaiveDistanceVector {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    void add_link(const std::string& a, const std::string& b, double cost) {
        links_[a][b] = cost;
        links_[b][a] = cost;
        dist_.try_emplace(a, kInf);
        dist_.try_emplace(b, kInf);
    }
    void remove_link(const std::string& a, const std::string& b) {
        links_[a].erase(b);
        links_[b].erase(a);
        // Only the endpoints notice; everyone else keeps the advertised distances.
        if (next_[a] == b) dist_[a] = kInf;
        if (next_[b] == a) dist_[b] = kInf;
    }
    void set_destination(const std::string& d) {
        destination_ = d;
        for (auto& [n, v] : dist_) v = n == d ? 0.0 : kInf;
    }

    /// One synchronous round: each node recomputes from its neighbors' previous values.
    /// Returns whether any distance changed.
    bool round() {
        const auto prev = dist_;
        bool changed = false;
        for (auto& [node, d] : dist_) {
            if (node == destination_) continue;
            double best = kInf;
            std::string hop;
            for (const auto& [nb, cost] : links_[node]) {
                if (prev.at(nb) + cost < best) {
                    best = prev.at(nb) + cost;
                    hop = nb;
                }
            }
            if (best != d) changed = true;
            d = best;
            next_[node] = hop;
        }
        return changed;
    }

    double distance(const std::string& n) const { return dist_.at(n); }

private:
    std::map<std::string, std::map<std::string, double>> links_;
    std::map<std::string, double> dist_;
    std::map<std::string, std::string> next_;
    std::string destination_;
};

}  // namespace testsupport
