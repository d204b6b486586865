#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace pmelect {

// Rank order P > C > D > D_ > E > N equals the numeric value.
enum class LabelChar : std::uint8_t { N = 0, E = 1, DU = 2, D = 3, C = 4, P = 5 };

inline char label_char_symbol(LabelChar c) {
    switch (c) {
        case LabelChar::N: return 'N';
        case LabelChar::E: return 'E';
        case LabelChar::DU: return 'd';
        case LabelChar::D: return 'D';
        case LabelChar::C: return 'C';
        case LabelChar::P: return 'P';
    }
    return '?';
}

// Six 3-bit characters, then the root-label and last-node marks.
struct NeighborLabel {
    std::uint32_t bits = 0;

    static constexpr std::uint32_t kRootMark = 1u << 18;
    static constexpr std::uint32_t kLastMark = 1u << 19;
    static constexpr std::uint32_t kCharMask = (1u << 18) - 1;

    LabelChar at(PortId p) const { return static_cast<LabelChar>((bits >> (3 * p)) & 7u); }
    void set(PortId p, LabelChar c) {
        bits &= ~(7u << (3 * p));
        bits |= static_cast<std::uint32_t>(c) << (3 * p);
    }
    bool root_mark() const { return bits & kRootMark; }
    bool last_mark() const { return bits & kLastMark; }
    std::uint32_t chars() const { return bits & kCharMask; }

    std::string str() const {
        std::string s;
        for (PortId p = 0; p < 6; ++p) s += label_char_symbol(at(p));
        if (root_mark()) s += '*';
        if (last_mark()) s += '$';
        return s;
    }
    friend bool operator==(const NeighborLabel&, const NeighborLabel&) = default;
};

// -1, 0, +1 comparing characters port by port; marks are ignored.
inline int compare_label_chars(NeighborLabel a, NeighborLabel b) {
    for (PortId p = 0; p < 6; ++p) {
        const auto x = a.at(p);
        const auto y = b.at(p);
        if (x != y) return x < y ? -1 : 1;
    }
    return 0;
}

// Abstract rooted tree with ordered children (increasing port order on the lattice).
struct RootedTree {
    int root = 0;
    std::vector<int> parent;                 // -1 at the root
    std::vector<std::vector<int>> children;  // ordered

    int size() const { return static_cast<int>(parent.size()); }
};

struct RingAgent {
    int node = 0;
    int visit_index = 1;  // j: j-1 children already visited
    int pre = 0;          // agent index
    int next = 0;
};

struct EulerRing {
    std::vector<RingAgent> agents;  // in ring order starting at root.agent_1
    int root_label_agent = 0;
    int last_node_agent = 0;

    int size() const { return static_cast<int>(agents.size()); }
    std::vector<int> visit_order() const {
        std::vector<int> out;
        for (const auto& a : agents) out.push_back(a.node);
        return out;
    }
};

inline EulerRing euler_ring(const RootedTree& t) {
    const int n = t.size();
    std::vector<int> offset(static_cast<std::size_t>(n) + 1, 0);
    for (int v = 0; v < n; ++v)
        offset[static_cast<std::size_t>(v) + 1] =
            offset[static_cast<std::size_t>(v)] + static_cast<int>(t.children[static_cast<std::size_t>(v)].size()) + 1;
    auto agent = [&](int v, int j) { return offset[static_cast<std::size_t>(v)] + j - 1; };
    auto last = [&](int v) { return agent(v, static_cast<int>(t.children[static_cast<std::size_t>(v)].size()) + 1); };
    auto child_index = [&](int v) {
        const auto& sib = t.children[static_cast<std::size_t>(t.parent[static_cast<std::size_t>(v)])];
        return static_cast<int>(std::find(sib.begin(), sib.end(), v) - sib.begin()) + 1;
    };
    const int total = offset[static_cast<std::size_t>(n)];
    std::vector<RingAgent> flat(static_cast<std::size_t>(total));
    for (int v = 0; v < n; ++v) {
        const auto& ch = t.children[static_cast<std::size_t>(v)];
        const int c = static_cast<int>(ch.size());
        for (int j = 1; j <= c + 1; ++j) {
            RingAgent& a = flat[static_cast<std::size_t>(agent(v, j))];
            a.node = v;
            a.visit_index = j;
            if (j <= c) {
                a.next = agent(ch[static_cast<std::size_t>(j - 1)], 1);
            } else if (v == t.root) {
                a.next = agent(v, 1);
            } else {
                a.next = agent(t.parent[static_cast<std::size_t>(v)], child_index(v) + 1);
            }
            if (j > 1) {
                a.pre = last(ch[static_cast<std::size_t>(j - 2)]);
            } else if (v == t.root) {
                a.pre = last(v);
            } else {
                a.pre = agent(t.parent[static_cast<std::size_t>(v)], child_index(v));
            }
        }
    }
    // Reindex in ring order from root.agent_1.
    std::vector<int> order;
    std::vector<int> pos(static_cast<std::size_t>(total), -1);
    int cur = agent(t.root, 1);
    for (int k = 0; k < total; ++k) {
        if (pos[static_cast<std::size_t>(cur)] >= 0) throw std::logic_error("euler ring is not a single cycle");
        pos[static_cast<std::size_t>(cur)] = k;
        order.push_back(cur);
        cur = flat[static_cast<std::size_t>(cur)].next;
    }
    if (cur != agent(t.root, 1)) throw std::logic_error("euler ring does not close");
    EulerRing r;
    for (int k = 0; k < total; ++k) {
        RingAgent a = flat[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        a.next = pos[static_cast<std::size_t>(a.next)];
        a.pre = pos[static_cast<std::size_t>(a.pre)];
        r.agents.push_back(a);
    }
    r.root_label_agent = 0;
    r.last_node_agent = total - 1;
    return r;
}

// ---- Label forwarding cycle: per-agent rules shared by the ring simulator and the particles.

struct LfcAgent {
    std::uint8_t count = 0;
    bool token = false;
    std::array<std::uint32_t, 2> q{};  // q[0] is the oldest

    void push_back(std::uint32_t label) { q[count++] = label; }
    std::uint32_t pop_front() {
        const std::uint32_t l = q[0];
        q[0] = q[1];
        q[1] = 0;
        --count;
        return l;
    }
    friend bool operator==(const LfcAgent&, const LfcAgent&) = default;
};

enum class InitiatorPhase : std::uint8_t { None, Aligning, TermWait, Ready, Compete, Done };

// What an agent can see of its pre-node agent.
struct LfcPreView {
    bool loaded = false;
    int count = 0;  // held plus in flight
    bool accepting_initiator = false;
};

struct LfcAction {
    bool push = false;
    std::uint32_t label = 0;
    bool token = false;
};

inline bool initiator_accepting(InitiatorPhase ph, int visible_count) {
    return (ph == InitiatorPhase::Aligning || ph == InitiatorPhase::Compete) && visible_count < 2;
}

// Non-initiator agent: pass the termination token when holding one label,
// otherwise push the oldest label when holding two, when pre is empty, or when the initiator pulls.
inline LfcAction lfc_relay_step(LfcAgent& a, const LfcPreView& pre) {
    LfcAction out;
    if (!pre.loaded) return out;
    if (a.token && a.count == 1) {
        a.token = false;
        out.token = true;
        return out;
    }
    if (a.count >= 1 && pre.count < 2 && (a.count == 2 || pre.count == 0 || pre.accepting_initiator)) {
        out.push = true;
        out.label = a.pop_front();
    }
    return out;
}

// Initiator during alignment: hand the current label back while adopting the received one.
// Once a received root-label is current, launch the termination token.
inline LfcAction lfc_initiator_align_step(LfcAgent& a, InitiatorPhase& ph, const LfcPreView& pre) {
    LfcAction out;
    if (ph != InitiatorPhase::Aligning || !pre.loaded) return out;
    if (a.count == 2 && pre.count < 2) {
        out.push = true;
        out.label = a.pop_front();
        if (a.q[0] & NeighborLabel::kRootMark) {
            ph = InitiatorPhase::TermWait;
            out.token = true;
        }
    }
    return out;
}

// Initiator during comparison: move to the next label if one is waiting.
inline LfcAction lfc_initiator_advance(LfcAgent& a, const LfcPreView& pre) {
    LfcAction out;
    if (!pre.loaded || a.count != 2 || pre.count >= 2) return out;
    out.push = true;
    out.label = a.pop_front();
    return out;
}

class LfcStall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stand-alone LFC over an Euler ring with one mailbox per agent; used to check label order.
class LfcRing {
public:
    LfcRing(const EulerRing& ring, std::vector<std::uint32_t> labels, int initiator)
        : ring_(ring), agents_(static_cast<std::size_t>(ring.size())), inbox_(static_cast<std::size_t>(ring.size())),
          initiator_(initiator) {
        for (int k = 0; k < ring.size(); ++k) agents_[static_cast<std::size_t>(k)].push_back(labels[static_cast<std::size_t>(k)]);
        // A one-agent ring already holds its root-label.
        phase_ = ring.size() == 1 ? InitiatorPhase::Ready : InitiatorPhase::Aligning;
    }

    // Runs under a seeded sequential-random schedule until the initiator is Ready.
    // Returns the labels received by the initiator in arrival order.
    std::vector<std::uint32_t> run_alignment(std::uint64_t seed, std::uint64_t max_steps = 10'000'000) {
        std::mt19937_64 rng(seed);
        const int m = ring_.size();
        std::uniform_int_distribution<int> pick(0, m - 1);
        std::uint64_t idle = 0;
        for (std::uint64_t s = 0; s < max_steps; ++s) {
            if (phase_ == InitiatorPhase::Ready) return received_;
            const bool progressed = activate(pick(rng));
            idle = progressed ? 0 : idle + 1;
            if (idle > static_cast<std::uint64_t>(50 * m + 100)) throw LfcStall("no LFC progress");
        }
        throw LfcStall("LFC step budget exhausted");
    }

    // Activations of agents other than the initiator so far.
    std::uint64_t relay_activations() const { return relay_steps_; }
    const std::vector<LfcAgent>& agents() const { return agents_; }

private:
    struct Mail {
        bool token;
        std::uint32_t label;
    };

    LfcPreView pre_view(int k) const {
        const int p = ring_.agents[static_cast<std::size_t>(k)].pre;
        LfcPreView v;
        v.loaded = true;
        int in_flight = 0;
        for (const auto& m : inbox_[static_cast<std::size_t>(p)]) in_flight += m.token ? 0 : 1;
        v.count = agents_[static_cast<std::size_t>(p)].count + in_flight;
        v.accepting_initiator = p == initiator_ && initiator_accepting(phase_, v.count);
        return v;
    }

    bool activate(int k) {
        bool progressed = false;
        auto& a = agents_[static_cast<std::size_t>(k)];
        for (const auto& m : inbox_[static_cast<std::size_t>(k)]) {
            progressed = true;
            if (m.token) {
                if (k == initiator_ && phase_ == InitiatorPhase::TermWait)
                    phase_ = InitiatorPhase::Ready;
                else
                    a.token = true;
            } else {
                a.push_back(m.label);
                if (k == initiator_) received_.push_back(m.label);
            }
        }
        inbox_[static_cast<std::size_t>(k)].clear();
        const LfcPreView pv = pre_view(k);
        LfcAction act;
        if (k == initiator_) {
            act = lfc_initiator_align_step(a, phase_, pv);
        } else {
            ++relay_steps_;
            act = lfc_relay_step(a, pv);
        }
        const int p = ring_.agents[static_cast<std::size_t>(k)].pre;
        if (act.push) inbox_[static_cast<std::size_t>(p)].push_back({false, act.label});
        if (act.token) inbox_[static_cast<std::size_t>(p)].push_back({true, 0});
        return progressed || act.token || act.push;
    }

    const EulerRing& ring_;
    std::vector<LfcAgent> agents_;
    std::vector<std::vector<Mail>> inbox_;
    int initiator_;
    InitiatorPhase phase_ = InitiatorPhase::None;
    std::vector<std::uint32_t> received_;
    std::uint64_t relay_steps_ = 0;
};

}  // namespace pmelect
