#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "boundary_comm.hpp"
#include "topology.hpp"

namespace pmelect {

enum class Direction : std::uint8_t { D1 = 0, D2 = 1 };

struct HeadRecord {
    Direction direction = Direction::D1;
    PortId a = 0;  // port to the boundary successor in this direction
    int k = 1;
    std::vector<PortId> computed_ids;
};

struct CensusOutcome {
    std::vector<int> word;
    int own_offset = 0;
    int turning = 0;
    bool inner() const { return turning > 0; }
};

inline int turning_of_word(const std::vector<int>& word) {
    int s = 0;
    for (int c : word) s += 2 - c;
    return s;
}

struct HeadElection {
    bool head = false;
    int k = 0;
};

inline HeadElection elect_heads(const std::vector<int>& word, int own_offset) {
    const auto rot = minimal_rotations(word);
    HeadElection h;
    h.k = static_cast<int>(rot.size());
    h.head = std::find(rot.begin(), rot.end(), own_offset) != rot.end();
    return h;
}

inline std::vector<PortId> computed_ids(PortId a, int k) {
    std::vector<PortId> ids;
    for (int i = 0; i < k; ++i) ids.push_back(port_add(a, i * 6 / k));
    return ids;
}

inline HeadRecord make_head_record(Direction d, PortId a, int k) {
    return HeadRecord{d, a, k, computed_ids(a, k)};
}

// 0 > 3 > {1,5} > {2,4}
inline int id_rank(PortId id) {
    switch (id) {
        case 0: return 3;
        case 3: return 2;
        case 1:
        case 5: return 1;
        default: return 0;
    }
}

inline bool select_survivor(const HeadRecord& r) {
    int best = -1;
    for (PortId id : r.computed_ids) best = std::max(best, id_rank(id));
    return id_rank(r.a) == best;
}

// First hop of an agent's probe or token: direction 0 leaves towards the neighbour after the
// sector in port order, direction 1 towards the neighbour before it.
struct AgentHop {
    PortId x = 0;  // port to the next particle
    PortId i = 0;  // port to the shared unoccupied node
};

inline AgentHop first_hop(const LocalView& v, int sector, int dir) {
    const int start = v.sector_start[static_cast<std::size_t>(sector)];
    const int len = v.sector_len[static_cast<std::size_t>(sector)];
    if (dir == 0) {
        const PortId x = port_add(start, len);
        return {x, port_add(x, -1)};
    }
    return {port_add(start, -1), start};
}

// Single meeting particle tie rule: the token that arrived through the smaller local port wins.
// A particle's own token counts with the port it would leave through.
inline int tie_key(int arrival_port, int out_port) { return arrival_port >= 0 ? arrival_port : out_port; }

}  // namespace pmelect
