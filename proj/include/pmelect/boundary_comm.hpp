#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "topology.hpp"

namespace pmelect {

enum class ChiralityRelation : std::uint8_t { Same, Different };

inline ChiralityRelation compose(ChiralityRelation a, ChiralityRelation b) {
    return a == b ? ChiralityRelation::Same : ChiralityRelation::Different;
}

class HorizontalPort : public std::invalid_argument {
public:
    HorizontalPort() : std::invalid_argument("grey chirality rule needs non-horizontal ports") {}
};

class NoMediator : public std::invalid_argument {
public:
    NoMediator() : std::invalid_argument("edge has no occupied common neighbour") {}
};

class NotOnBoundary : public std::invalid_argument {
public:
    NotOnBoundary() : std::invalid_argument("boundary label does not point to an unoccupied node") {}
};

// i is the port at one end of a non-horizontal edge, i_prime the port at the other end.
inline ChiralityRelation detect_common_chirality_grey(PortId i, PortId i_prime) {
    if (is_horizontal_port(i) || is_horizontal_port(i_prime)) throw HorizontalPort();
    return (port_add(i, 3) == i_prime && port_add(i_prime, 3) == i) ? ChiralityRelation::Same
                                                                      : ChiralityRelation::Different;
}

// Legs are the verdicts p-mediator and mediator-p'. The mediator must be occupied.
inline ChiralityRelation detect_common_chirality_lbe(ChiralityRelation p_to_mediator,
                                                     ChiralityRelation mediator_to_p_prime) {
    return compose(p_to_mediator, mediator_to_p_prime);
}

// Outgoing boundary label for a hop through own port x whose shared empty node is at own port i.
// y is the receiver's port back to the sender.
inline PortId outgoing_boundary_label(ChiralityRelation rel, PortId x, PortId i, PortId y) {
    const bool minus = (i == port_add(x, -1));
    if (!minus && i != port_add(x, 1)) throw NotOnBoundary();
    const bool plus_one = (rel == ChiralityRelation::Same) == minus;
    return port_add(y, plus_one ? 1 : -1);
}

// Particle-local result of forwarding: next port, own port to the witness, and the sector size swept.
struct ForwardDecision {
    PortId next_port = 0;
    PortId witness_port = 0;
    int swept = 0;
};

// visible: bitmask of occupied non-dark-blue ports in the particle's own labelling.
inline ForwardDecision forward_on_boundary(std::uint8_t visible, PortId z, PortId boundary_label) {
    if (visible & (1u << boundary_label)) throw NotOnBoundary();
    const int dir = (boundary_label == port_add(z, 1)) ? 1 : -1;
    if (dir == -1 && boundary_label != port_add(z, -1)) throw NotOnBoundary();
    ForwardDecision d;
    PortId p = boundary_label;
    while (!(visible & (1u << p))) {
        ++d.swept;
        p = port_add(p, dir);
    }
    d.next_port = p;
    d.witness_port = port_add(p, -dir);
    return d;
}

// Observer-side record of one boundary hop.
struct BoundaryHop {
    NodeCoord from;
    NodeCoord to;
    PortId boundary_label = 0;  // receiver's port to the shared unoccupied node
};

// Static neighbourhood of one particle as it can sense it locally.
struct LocalView {
    std::array<int, 6> nbr{{-1, -1, -1, -1, -1, -1}};  // particle index per port
    std::array<std::int8_t, 6> rev{{-1, -1, -1, -1, -1, -1}};  // neighbour's port back to us
    std::uint8_t occupied = 0;
    std::uint8_t dark_blue = 0;
    std::uint8_t visible = 0;  // occupied and not dark blue
    std::uint8_t same_chirality = 0;  // meaningful on visible ports only
    std::array<std::int8_t, 6> sector_of{{-1, -1, -1, -1, -1, -1}};  // per empty/masked port
    std::array<std::int8_t, 3> sector_start{{0, 0, 0}};
    std::array<std::int8_t, 3> sector_len{{0, 0, 0}};
    std::int8_t sectors = 0;

    bool has(std::uint8_t mask, PortId p) const { return (mask >> p) & 1u; }
    ChiralityRelation relation(PortId p) const {
        return has(same_chirality, p) ? ChiralityRelation::Same : ChiralityRelation::Different;
    }
};

namespace detail {

inline void fill_sectors(LocalView& v) {
    v.sectors = 0;
    if (v.visible == 0 || v.visible == 0x3f) return;
    for (PortId p = 0; p < 6; ++p) {
        if (v.has(v.visible, p) && !v.has(v.visible, port_add(p, 1))) {
            const int s = v.sectors++;
            int len = 0;
            while (!v.has(v.visible, port_add(p, 1 + len))) {
                v.sector_of[static_cast<std::size_t>(port_add(p, 1 + len))] = static_cast<std::int8_t>(s);
                ++len;
            }
            v.sector_start[static_cast<std::size_t>(s)] = static_cast<std::int8_t>(port_add(p, 1));
            v.sector_len[static_cast<std::size_t>(s)] = static_cast<std::int8_t>(len);
        }
    }
}

}  // namespace detail

// Builds every particle's local view. Chirality verdicts use only the local rules above;
// dark-blue edges get no verdict.
inline std::vector<LocalView> build_local_views(const Configuration& config) {
    const Layout layout(config);
    const std::size_t n = config.nodes.size();
    std::vector<LocalView> views(n);
    for (std::size_t i = 0; i < n; ++i) {
        LocalView& v = views[i];
        const NodeCoord u = config.nodes[i];
        const Chirality cu = config.chirality[i];
        for (PortId p = 0; p < 6; ++p) {
            const int j = layout.find(neighbor_of(u, p, cu));
            if (j < 0) continue;
            v.nbr[static_cast<std::size_t>(p)] = j;
            v.rev[static_cast<std::size_t>(p)] = static_cast<std::int8_t>(
                port_between(config.nodes[static_cast<std::size_t>(j)], u, config.chirality[static_cast<std::size_t>(j)]));
            v.occupied |= static_cast<std::uint8_t>(1u << p);
        }
        for (PortId p : {0, 3}) {
            if (v.has(v.occupied, p) && !v.has(v.occupied, port_add(p, 1)) && !v.has(v.occupied, port_add(p, -1)))
                v.dark_blue |= static_cast<std::uint8_t>(1u << p);
        }
        v.visible = static_cast<std::uint8_t>(v.occupied & ~v.dark_blue);
        detail::fill_sectors(v);
    }
    // Grey verdicts first, then mediated verdicts for horizontal non-dark-blue edges.
    for (std::size_t i = 0; i < n; ++i) {
        LocalView& v = views[i];
        for (PortId p : {1, 2, 4, 5}) {
            if (!v.has(v.occupied, p)) continue;
            if (detect_common_chirality_grey(p, v.rev[static_cast<std::size_t>(p)]) == ChiralityRelation::Same)
                v.same_chirality |= static_cast<std::uint8_t>(1u << p);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        LocalView& v = views[i];
        for (PortId p : {0, 3}) {
            if (!v.has(v.visible, p)) continue;
            const PortId m = v.has(v.occupied, port_add(p, 1)) ? port_add(p, 1) : port_add(p, -1);
            const LocalView& q = views[static_cast<std::size_t>(v.nbr[static_cast<std::size_t>(m)])];
            // The mediator's port towards the far end sits next to its port back to us.
            const PortId back = v.rev[static_cast<std::size_t>(m)];
            PortId far = -1;
            for (PortId c : {port_add(back, 1), port_add(back, -1)}) {
                if (q.has(q.occupied, c) && q.nbr[static_cast<std::size_t>(c)] == v.nbr[static_cast<std::size_t>(p)]) far = c;
            }
            if (far < 0) throw NoMediator();
            const auto rel = detect_common_chirality_lbe(v.relation(m), q.relation(far));
            if (rel == ChiralityRelation::Same) v.same_chirality |= static_cast<std::uint8_t>(1u << p);
        }
    }
    return views;
}

}  // namespace pmelect
