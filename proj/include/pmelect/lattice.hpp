#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pmelect {

// x counts half-unit East/West steps, y counts rows. x + y is always even.
struct NodeCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
    friend auto operator<=>(const NodeCoord&, const NodeCoord&) = default;
};

inline std::string to_string(NodeCoord c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

struct NodeCoordHash {
    std::size_t operator()(NodeCoord c) const noexcept {
        return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.x) << 32) ^
                                         static_cast<std::uint32_t>(c.y));
    }
};

enum class Chirality : std::uint8_t { Standard, Flipped };

inline char chirality_char(Chirality c) { return c == Chirality::Standard ? 'S' : 'F'; }

using PortId = int;
inline constexpr int kPorts = 6;

inline constexpr int port_add(int p, int k) { return ((p + k) % 6 + 6) % 6; }

inline constexpr bool is_right_port(PortId p) { return p == 0 || p == 1 || p == 5; }
inline constexpr bool is_left_port(PortId p) { return p == 2 || p == 3 || p == 4; }
inline constexpr bool is_horizontal_port(PortId p) { return p == 0 || p == 3; }

struct Displacement {
    int dx;
    int dy;
};

namespace detail {
inline constexpr std::array<Displacement, 6> kStandardTable{
    {{2, 0}, {1, 1}, {-1, 1}, {-2, 0}, {-1, -1}, {1, -1}}};
}

inline constexpr Displacement port_displacement(PortId p, Chirality c) {
    Displacement d = detail::kStandardTable[static_cast<std::size_t>(p)];
    if (c == Chirality::Flipped) d.dy = -d.dy;
    return d;
}

inline NodeCoord neighbor_of(NodeCoord u, PortId p, Chirality c) {
    const Displacement d = port_displacement(p, c);
    return {u.x + d.dx, u.y + d.dy};
}

class NotAdjacent : public std::invalid_argument {
public:
    NotAdjacent(NodeCoord u, NodeCoord v)
        : std::invalid_argument("nodes " + to_string(u) + " and " + to_string(v) +
                                " are not adjacent") {}
};

// Returns -1 instead of throwing; used on hot paths.
inline PortId try_port_between(NodeCoord u, NodeCoord v, Chirality c) {
    const int dx = v.x - u.x;
    const int dy = v.y - u.y;
    for (PortId p = 0; p < 6; ++p) {
        const Displacement d = port_displacement(p, c);
        if (d.dx == dx && d.dy == dy) return p;
    }
    return -1;
}

inline PortId port_between(NodeCoord u, NodeCoord v, Chirality c) {
    const PortId p = try_port_between(u, v, c);
    if (p < 0) throw NotAdjacent(u, v);
    return p;
}

inline bool lattice_adjacent(NodeCoord u, NodeCoord v) {
    return try_port_between(u, v, Chirality::Standard) >= 0;
}

inline std::array<NodeCoord, 6> lattice_neighbors(NodeCoord u) {
    std::array<NodeCoord, 6> out{};
    for (PortId p = 0; p < 6; ++p) out[static_cast<std::size_t>(p)] = neighbor_of(u, p, Chirality::Standard);
    return out;
}

struct Configuration {
    std::vector<NodeCoord> nodes;
    std::vector<Chirality> chirality;  // parallel to nodes
    std::uint64_t seed = 0;

    std::size_t size() const { return nodes.size(); }
};

enum class ValidationErrorKind { None, Empty, ParityViolation, Duplicate, Disconnected, ChiralityMismatch };

inline const char* to_string(ValidationErrorKind k) {
    switch (k) {
        case ValidationErrorKind::None: return "ok";
        case ValidationErrorKind::Empty: return "Empty";
        case ValidationErrorKind::ParityViolation: return "ParityViolation";
        case ValidationErrorKind::Duplicate: return "Duplicate";
        case ValidationErrorKind::Disconnected: return "Disconnected";
        case ValidationErrorKind::ChiralityMismatch: return "ChiralityMismatch";
    }
    return "?";
}

struct ValidationResult {
    ValidationErrorKind kind = ValidationErrorKind::None;
    std::vector<NodeCoord> offending;

    bool ok() const { return kind == ValidationErrorKind::None; }
    std::string message() const {
        std::string s = to_string(kind);
        for (const auto& c : offending) s += " " + to_string(c);
        return s;
    }
};

class InvalidConfiguration : public std::runtime_error {
public:
    explicit InvalidConfiguration(ValidationResult r)
        : std::runtime_error(r.message()), result(std::move(r)) {}
    ValidationResult result;
};

inline ValidationResult validate(const Configuration& config) {
    ValidationResult r;
    if (config.nodes.empty()) {
        r.kind = ValidationErrorKind::Empty;
        return r;
    }
    if (!config.chirality.empty() && config.chirality.size() != config.nodes.size()) {
        r.kind = ValidationErrorKind::ChiralityMismatch;
        return r;
    }
    for (const auto& c : config.nodes) {
        if (((c.x + c.y) % 2 + 2) % 2 != 0) r.offending.push_back(c);
    }
    if (!r.offending.empty()) {
        r.kind = ValidationErrorKind::ParityViolation;
        return r;
    }
    std::set<NodeCoord> seen;
    for (const auto& c : config.nodes) {
        if (!seen.insert(c).second) r.offending.push_back(c);
    }
    if (!r.offending.empty()) {
        r.kind = ValidationErrorKind::Duplicate;
        return r;
    }
    std::set<NodeCoord> reached{config.nodes.front()};
    std::vector<NodeCoord> stack{config.nodes.front()};
    while (!stack.empty()) {
        const NodeCoord u = stack.back();
        stack.pop_back();
        for (const auto& v : lattice_neighbors(u)) {
            if (seen.count(v) && reached.insert(v).second) stack.push_back(v);
        }
    }
    if (reached.size() != seen.size()) {
        r.kind = ValidationErrorKind::Disconnected;
        for (const auto& c : config.nodes)
            if (!reached.count(c)) r.offending.push_back(c);
    }
    return r;
}

// Fills in missing chirality from the configuration seed.
inline void assign_chirality_from_seed(Configuration& config) {
    if (config.chirality.size() == config.nodes.size()) return;
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::bernoulli_distribution flip(0.5);
    config.chirality.clear();
    for (std::size_t i = 0; i < config.nodes.size(); ++i)
        config.chirality.push_back(flip(rng) ? Chirality::Flipped : Chirality::Standard);
}

// Occupancy lookup over a configuration.
class OccupancyIndex {
public:
    OccupancyIndex() = default;
    explicit OccupancyIndex(const std::vector<NodeCoord>& nodes) {
        index_.reserve(nodes.size() * 2);
        for (std::size_t i = 0; i < nodes.size(); ++i) index_.emplace(nodes[i], static_cast<int>(i));
    }
    int find(NodeCoord c) const {
        auto it = index_.find(c);
        return it == index_.end() ? -1 : it->second;
    }
    bool contains(NodeCoord c) const { return index_.count(c) != 0; }

private:
    std::unordered_map<NodeCoord, int, NodeCoordHash> index_;
};

}  // namespace pmelect
