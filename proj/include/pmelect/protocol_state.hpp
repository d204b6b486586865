#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "competition.hpp"
#include "grey_election.hpp"
#include "tree_engine.hpp"

namespace pmelect {

enum class MsgKind : std::uint8_t {
    BoundaryProbe,
    Competition,
    LeaderMsg,
    FollowerMsg,
    LabelTransfer,
    TerminationMsg,
    InMerge,
    MergeComplete,
    AbortMerge,
    NotParticipating,
    DoneConvergecast,
    StartPhase,
    DfsToken,
    RootReport,
    RootBroadcast,
    BarrierSync,
    BarrierAck,
};

inline const char* to_string(MsgKind k) {
    switch (k) {
        case MsgKind::BoundaryProbe: return "BoundaryProbe";
        case MsgKind::Competition: return "Competition";
        case MsgKind::LeaderMsg: return "LeaderMsg";
        case MsgKind::FollowerMsg: return "FollowerMsg";
        case MsgKind::LabelTransfer: return "LabelTransfer";
        case MsgKind::TerminationMsg: return "TerminationMsg";
        case MsgKind::InMerge: return "InMerge";
        case MsgKind::MergeComplete: return "MergeComplete";
        case MsgKind::AbortMerge: return "AbortMerge";
        case MsgKind::NotParticipating: return "NotParticipating";
        case MsgKind::DoneConvergecast: return "DoneConvergecast";
        case MsgKind::StartPhase: return "StartPhase";
        case MsgKind::DfsToken: return "DfsToken";
        case MsgKind::RootReport: return "RootReport";
        case MsgKind::RootBroadcast: return "RootBroadcast";
        case MsgKind::BarrierSync: return "BarrierSync";
        case MsgKind::BarrierAck: return "BarrierAck";
    }
    return "?";
}

inline bool travels_on_boundary(MsgKind k) {
    return k == MsgKind::BoundaryProbe || k == MsgKind::Competition || k == MsgKind::LeaderMsg ||
           k == MsgKind::FollowerMsg;
}

enum class ReportKind : std::uint8_t { Wake, OutResponse, Result, MergeDone };
enum class BroadcastKind : std::uint8_t { Begin, Resolve };

struct Message {
    MsgKind kind = MsgKind::BoundaryProbe;
    std::int8_t boundary_label = -1;  // present iff the message travels along a boundary
    std::uint8_t sub = 0;             // report/broadcast subtype, tour number, merge direction
    std::uint8_t a = 0;               // channel, flags, child index
    std::uint8_t b = 0;               // agent index, outcome, second flag
    std::uint32_t value = 0;          // label or sequence number
    std::uint32_t epoch = 0;          // comparison epoch of label-channel traffic
    // BoundaryProbe payload: the turn word, O(boundary length)
    std::int32_t dx = 0;
    std::int32_t dy = 0;
    std::uint8_t parity = 0;
    std::int8_t origin_sector = 0;
    std::uint8_t origin_dir = 0;
    std::vector<std::uint8_t> word;
    std::uint32_t trace_id = 0;  // observer only
};

enum class GreyRole : std::uint8_t { Undecided, Leader, Follower };
enum class CensusResult : std::uint8_t { Pending, Inner, NotHead, Withdrawn, Survivor };

struct HeldToken {
    std::int8_t back = -1;        // arrival port, -1 for the particle's own token
    std::int8_t back_label = -1;  // own port to the witness on the arrival side
    std::int8_t out_x = 0;
    std::int8_t out_i = 0;
    std::uint8_t dir = 0;
    std::uint32_t trace_id = 0;
    friend bool operator==(const HeldToken&, const HeldToken&) = default;
};

struct GreyState {
    bool started = false;
    bool decided = false;
    GreyRole role = GreyRole::Undecided;
    std::array<std::array<CensusResult, 2>, 3> result{};
    std::array<std::uint8_t, 2> k{};  // per direction, last computed head count
    std::uint8_t ntok = 0;
    std::array<HeldToken, 2> tok{};
    std::array<std::int8_t, 2> launched_x{{-1, -1}};
    std::array<std::int8_t, 2> launched_i{{-1, -1}};
    friend bool operator==(const GreyState&, const GreyState&) = default;
};

struct TreeState {
    bool in_tree = false;
    std::int8_t parent = -1;
    std::uint8_t children = 0;
    std::uint8_t done_from = 0;
    bool done_sent = false;
    friend bool operator==(const TreeState&, const TreeState&) = default;
};

enum class EpPhase : std::uint8_t { Idle, Active, Lfc, Ready, Compete, Decided, WinWait, LoserMerging };

struct Endpoint {
    EpPhase phase = EpPhase::Idle;
    ComparisonOutcome outcome = ComparisonOutcome::None;
    bool compared = false;
    bool chosen = false;  // outgoing side
    bool active = false;  // label shows D_ at this port
    std::uint8_t seq = 0;  // outgoing: choice episode; incoming: activated episode
    bool handled = false;  // incoming: partner episode already seen
    bool rejected = false;
    std::uint8_t handled_seq = 0;
    std::uint8_t gen = 0;
    std::uint8_t seen_partner_gen = 0;
    std::uint8_t pending = 0;  // loser action awaiting the winner: 1 merge, 2 abort
    std::uint16_t index = 0;
    std::uint32_t prev = 0;
    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

inline constexpr int kMaxAgents = 7;

struct Channel {
    std::uint32_t epoch = 0;
    InitiatorPhase iphase = InitiatorPhase::None;
    std::array<LfcAgent, kMaxAgents> ag{};
    friend bool operator==(const Channel&, const Channel&) = default;
};

// Ring links and label frozen when a comparison round begins.
struct Frozen {
    std::uint32_t epoch = 0;
    std::uint8_t children = 0;
    std::int8_t parent = -1;
    std::uint8_t x = 0;  // own position among the parent's children, 1-based
    std::uint8_t count = 0;
    NeighborLabel label{};
    friend bool operator==(const Frozen&, const Frozen&) = default;
};

enum class RootPhase : std::uint8_t { Off, Idle, Tour1, Tour2, WaitOut, Comparing, Merging, Barrier };

struct RootCtl {
    RootPhase phase = RootPhase::Off;
    std::uint32_t epoch = 0;
    bool pending_wake = false;
    bool reset_next = false;
    bool found_out = false;
    bool found_in = false;
    bool out_resp = false;
    bool out_act = false;
    std::uint8_t needed = 0;
    std::uint8_t got = 0;
    std::array<ComparisonOutcome, 2> res{};
    friend bool operator==(const RootCtl&, const RootCtl&) = default;
};

struct NodeComp {
    bool started = false;
    bool in_round = false;
    bool scan_passed = false;
    std::int8_t merge_from = -1;  // -2: this node started the climb
    bool sync_pending = false;
    bool sync_active = false;
    std::uint8_t acks_wait = 0;
    std::uint32_t ack_epoch = 0;
    friend bool operator==(const NodeComp&, const NodeComp&) = default;
};

struct ParticleState {
    GreyState grey;
    TreeState tree;
    NodeComp comp;
    std::array<Endpoint, 2> ep{};
    std::array<Channel, 2> ch{};
    Frozen fz;
    RootCtl root;
    friend bool operator==(const ParticleState&, const ParticleState&) = default;

    bool is_leader() const { return grey.role == GreyRole::Leader; }
};

inline constexpr PortId endpoint_port(int e) { return e == 0 ? 0 : 3; }

inline int popcount6(std::uint8_t m) {
    int c = 0;
    for (int p = 0; p < 6; ++p) c += (m >> p) & 1;
    return c;
}

// Port of the j-th (1-based) set bit.
inline PortId nth_port(std::uint8_t m, int j) {
    for (PortId p = 0; p < 6; ++p)
        if ((m >> p) & 1)
            if (--j == 0) return p;
    return -1;
}

}  // namespace pmelect
