#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace pmelect {

class BadParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using GeneratorParams = std::map<std::string, std::int64_t>;

namespace detail {

inline Configuration from_nodes(std::vector<NodeCoord> nodes, std::uint64_t seed = 0) {
    Configuration c;
    std::set<NodeCoord> seen;
    for (const auto& n : nodes)
        if (seen.insert(n).second) c.nodes.push_back(n);
    c.seed = seed;
    return c;
}

inline std::int64_t param(const GeneratorParams& p, const std::string& key, std::int64_t fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline std::int64_t required(const GeneratorParams& p, const std::string& key) {
    const auto it = p.find(key);
    if (it == p.end()) throw BadParams("missing parameter '" + key + "'");
    return it->second;
}

}  // namespace detail

// Six particles around one empty node.
inline Configuration gen_s1() {
    return detail::from_nodes({{-1, -1}, {1, -1}, {2, 0}, {1, 1}, {-1, 1}, {-2, 0}});
}

// First k particles of a zigzag strip whose period holds two dark-blue edges.
inline Configuration gen_path(int k) {
    if (k < 1) throw BadParams("path needs k >= 1");
    static constexpr NodeCoord period[6] = {{0, 0}, {2, 0}, {3, 1}, {2, 2}, {0, 2}, {-1, 3}};
    std::vector<NodeCoord> nodes;
    for (int i = 0; i < k; ++i) {
        const NodeCoord b = period[i % 6];
        nodes.push_back({b.x, b.y + 4 * (i / 6)});
    }
    return detail::from_nodes(nodes);
}

// Two grey components joined by three dark-blue edges.
inline Configuration gen_fig1() {
    return detail::from_nodes({{5, 1}, {7, 1}, {8, 2}, {4, 2}, {3, 3}, {5, 3}, {7, 3}, {9, 3}, {10, 4},
                               {6, 4}, {2, 4}, {3, 5}, {5, 5}, {7, 5}, {9, 5}, {8, 6}, {4, 6}, {5, 7},
                               {7, 7}, {15, 1}, {14, 2}, {13, 3}, {12, 4}, {13, 5}, {14, 6}});
}

// Ring blocks around one hole each; every block closes with one internal dark-blue edge.
inline std::vector<NodeCoord> fig6_blocks(int r, int shift_x = 0, int shift_y = 0) {
    static constexpr NodeCoord block[7] = {{5, 1}, {4, 2}, {5, 3}, {6, 4}, {7, 3}, {8, 2}, {7, 1}};
    std::vector<NodeCoord> out;
    for (int i = 0; i < r; ++i)
        for (const auto& b : block) out.push_back({b.x + 4 * i + shift_x, b.y + shift_y});
    return out;
}

inline Configuration gen_fig6(int r) {
    if (r < 1) throw BadParams("fig6 needs r >= 1");
    return detail::from_nodes(fig6_blocks(r));
}

// Two zigzag components of n/4 particles bridged by n/2 singletons on a horizontal line.
inline Configuration gen_fig5(int n) {
    if (n < 4 || n % 4 != 0) throw BadParams("fig5 needs n >= 4 and n divisible by 4");
    const int side = n / 4;
    std::vector<NodeCoord> left;
    for (int i = 0; i < side; ++i) left.push_back({i % 2 == 0 ? 0 : -1, i});
    std::vector<NodeCoord> nodes = left;
    for (int i = 1; i <= n / 2; ++i) nodes.push_back({2 * i, 0});
    for (const auto& c : left) nodes.push_back({n + 2 - c.x, c.y});
    return detail::from_nodes(nodes);
}

// Growth from the origin by attaching a uniformly chosen free neighbour of the current set.
inline Configuration gen_random(int n, std::uint64_t seed) {
    if (n < 1) throw BadParams("random needs n >= 1");
    std::mt19937_64 rng(seed);
    std::set<NodeCoord> occupied{{0, 0}};
    std::vector<NodeCoord> nodes{{0, 0}};
    std::set<NodeCoord> frontier;
    for (const auto& c : lattice_neighbors({0, 0})) frontier.insert(c);
    while (static_cast<int>(nodes.size()) < n) {
        auto it = frontier.begin();
        std::advance(it, std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng));
        const NodeCoord c = *it;
        frontier.erase(it);
        occupied.insert(c);
        nodes.push_back(c);
        for (const auto& d : lattice_neighbors(c))
            if (!occupied.count(d)) frontier.insert(d);
    }
    return detail::from_nodes(nodes, seed);
}

inline const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names{"s1", "path", "fig1", "fig5", "fig6", "random"};
    return names;
}

inline Configuration generate(const std::string& family, const GeneratorParams& p) {
    if (family == "s1") return gen_s1();
    if (family == "fig1") return gen_fig1();
    if (family == "path") return gen_path(static_cast<int>(detail::required(p, "k")));
    if (family == "fig5") return gen_fig5(static_cast<int>(detail::required(p, "n")));
    if (family == "fig6") return gen_fig6(static_cast<int>(detail::required(p, "r")));
    if (family == "random")
        return gen_random(static_cast<int>(detail::required(p, "n")),
                          static_cast<std::uint64_t>(detail::param(p, "seed", 0)));
    throw BadParams("unknown family '" + family + "'");
}

}  // namespace pmelect
