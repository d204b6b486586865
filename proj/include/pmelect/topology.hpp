#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "lattice.hpp"

namespace pmelect {

enum class EdgeClass : std::uint8_t { Grey, LightBlue, DarkBlue };

inline const char* to_string(EdgeClass e) {
    switch (e) {
        case EdgeClass::Grey: return "Grey";
        case EdgeClass::LightBlue: return "LightBlue";
        case EdgeClass::DarkBlue: return "DarkBlue";
    }
    return "?";
}

class NotOccupied : public std::invalid_argument {
public:
    explicit NotOccupied(NodeCoord u) : std::invalid_argument("node " + to_string(u) + " is not occupied") {}
};

struct LocalBoundary {
    NodeCoord u;
    NodeCoord v;
    NodeCoord o;
    friend bool operator==(const LocalBoundary&, const LocalBoundary&) = default;
};

struct BoundaryAgent {
    NodeCoord node;
    int turn_code = 0;
    int first_empty_dir = 0;  // global (Standard-frame) direction of the first swept node
    int pred = 0;             // index into Boundary::agents
    int succ = 0;
};

enum class BoundaryKind : std::uint8_t { Outer, Inner };

// agents[i] -> agents[i+1] crosses ring[i].
struct Boundary {
    std::vector<BoundaryAgent> agents;
    std::vector<LocalBoundary> ring;
    BoundaryKind kind = BoundaryKind::Outer;

    std::vector<int> word() const {
        std::vector<int> w;
        w.reserve(agents.size());
        for (const auto& a : agents) w.push_back(a.turn_code);
        return w;
    }
};

enum class BoundaryMask : std::uint8_t { MaskDarkBlue, Unmasked };

// Configuration plus an occupancy index. Global directions use the Standard frame.
class Layout {
public:
    explicit Layout(const Configuration& config) : config_(&config), index_(config.nodes) {}

    const Configuration& config() const { return *config_; }
    int find(NodeCoord c) const { return index_.find(c); }
    bool occupied(NodeCoord c) const { return index_.contains(c); }

    EdgeClass classify(NodeCoord u, NodeCoord v) const {
        if (!occupied(u)) throw NotOccupied(u);
        if (!occupied(v)) throw NotOccupied(v);
        const PortId d = port_between(u, v, Chirality::Standard);
        if (!is_horizontal_port(d)) return EdgeClass::Grey;
        const int common = static_cast<int>(occupied(neighbor_of(u, port_add(d, 1), Chirality::Standard))) +
                           static_cast<int>(occupied(neighbor_of(u, port_add(d, -1), Chirality::Standard)));
        if (common == 0) return EdgeClass::DarkBlue;
        if (common == 1) return EdgeClass::LightBlue;
        return EdgeClass::Grey;
    }

    // Occupied in global direction d, optionally hiding dark-blue neighbours.
    bool visible(NodeCoord u, int d, BoundaryMask mask) const {
        const NodeCoord v = neighbor_of(u, d, Chirality::Standard);
        if (!occupied(v)) return false;
        if (mask == BoundaryMask::Unmasked) return true;
        return classify(u, v) != EdgeClass::DarkBlue;
    }

private:
    const Configuration* config_;
    OccupancyIndex index_;
};

inline EdgeClass classify_edge(const Configuration& config, NodeCoord u, NodeCoord v) {
    return Layout(config).classify(u, v);
}

inline std::vector<std::vector<NodeCoord>> grey_components(const Layout& layout) {
    const auto& nodes = layout.config().nodes;
    std::vector<int> comp(nodes.size(), -1);
    std::vector<std::vector<NodeCoord>> out;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::vector<std::size_t> stack{s};
        comp[s] = id;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            out.back().push_back(nodes[i]);
            for (int d = 0; d < 6; ++d) {
                if (!layout.visible(nodes[i], d, BoundaryMask::MaskDarkBlue)) continue;
                const int j = layout.find(neighbor_of(nodes[i], d, Chirality::Standard));
                if (comp[static_cast<std::size_t>(j)] < 0) {
                    comp[static_cast<std::size_t>(j)] = id;
                    stack.push_back(static_cast<std::size_t>(j));
                }
            }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

inline std::vector<std::vector<NodeCoord>> grey_components(const Configuration& config) {
    return grey_components(Layout(config));
}

inline int turning_sum(const Boundary& b) {
    int s = 0;
    for (const auto& a : b.agents) s += 2 - a.turn_code;
    return s;
}

namespace detail {

struct Sector {
    int start;  // first empty global direction
    int len;
};

// Maximal runs of hidden directions around u in counterclockwise order.
inline std::vector<Sector> sectors_of(const Layout& layout, NodeCoord u, BoundaryMask mask) {
    std::array<bool, 6> occ{};
    int count = 0;
    for (int d = 0; d < 6; ++d) {
        occ[static_cast<std::size_t>(d)] = layout.visible(u, d, mask);
        count += occ[static_cast<std::size_t>(d)];
    }
    std::vector<Sector> out;
    if (count == 0 || count == 6) return out;
    for (int d = 0; d < 6; ++d) {
        if (occ[static_cast<std::size_t>(d)] && !occ[static_cast<std::size_t>(port_add(d, 1))]) {
            int len = 0;
            while (!occ[static_cast<std::size_t>(port_add(d, 1 + len))]) ++len;
            out.push_back({port_add(d, 1), len});
        }
    }
    return out;
}

inline bool sector_contains(const Sector& s, int d) {
    return port_add(d, -s.start) < s.len;
}

}  // namespace detail

inline std::vector<Boundary> extract_boundaries(const Layout& layout, const std::vector<NodeCoord>& component,
                                                BoundaryMask mask = BoundaryMask::MaskDarkBlue) {
    struct Key {
        NodeCoord node;
        int start;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, detail::Sector> agents;
    std::map<NodeCoord, std::vector<detail::Sector>> by_node;
    for (const auto& u : component) {
        auto secs = detail::sectors_of(layout, u, mask);
        for (const auto& s : secs) agents.emplace(Key{u, s.start}, s);
        by_node[u] = std::move(secs);
    }
    std::set<Key> used;
    std::vector<Boundary> out;
    for (const auto& [start_key, start_sec] : agents) {
        if (used.count(start_key)) continue;
        Boundary b;
        Key k = start_key;
        detail::Sector s = start_sec;
        while (!used.count(k)) {
            used.insert(k);
            BoundaryAgent a;
            a.node = k.node;
            a.turn_code = s.len;
            a.first_empty_dir = s.start;
            b.agents.push_back(a);
            const int after = port_add(s.start, s.len);
            const int last_empty = port_add(after, -1);
            const NodeCoord w = neighbor_of(k.node, after, Chirality::Standard);
            const NodeCoord o = neighbor_of(k.node, last_empty, Chirality::Standard);
            b.ring.push_back({k.node, w, o});
            const int to_o = port_between(w, o, Chirality::Standard);
            const auto& wsecs = by_node.at(w);
            auto it = std::find_if(wsecs.begin(), wsecs.end(),
                                   [&](const detail::Sector& x) { return detail::sector_contains(x, to_o); });
            k = Key{w, it->start};
            s = *it;
        }
        const int m = static_cast<int>(b.agents.size());
        for (int i = 0; i < m; ++i) {
            b.agents[static_cast<std::size_t>(i)].succ = (i + 1) % m;
            b.agents[static_cast<std::size_t>(i)].pred = (i + m - 1) % m;
        }
        b.kind = turning_sum(b) < 0 ? BoundaryKind::Outer : BoundaryKind::Inner;
        out.push_back(std::move(b));
    }
    return out;
}

inline std::vector<Boundary> extract_boundaries(const Configuration& config, const std::vector<NodeCoord>& component,
                                                BoundaryMask mask = BoundaryMask::MaskDarkBlue) {
    return extract_boundaries(Layout(config), component, mask);
}

// Start indices whose rotation is lexicographically minimal (brute force).
inline std::vector<int> minimal_rotations(const std::vector<int>& word) {
    const int n = static_cast<int>(word.size());
    std::vector<int> out;
    if (n == 0) return out;
    auto less = [&](int a, int b) {
        for (int t = 0; t < n; ++t) {
            const int x = word[static_cast<std::size_t>((a + t) % n)];
            const int y = word[static_cast<std::size_t>((b + t) % n)];
            if (x != y) return x < y ? -1 : 1;
        }
        return 0;
    };
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (less(i, best) < 0) best = i;
    for (int i = 0; i < n; ++i)
        if (less(i, best) == 0) out.push_back(i);
    return out;
}

}  // namespace pmelect
