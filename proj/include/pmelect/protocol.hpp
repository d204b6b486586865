#pragma once

#include <algorithm>
#include <string>

#include "protocol_state.hpp"
#include "runtime.hpp"

namespace pmelect {

struct ElectionProtocol {
    using State = ParticleState;
    using Message = pmelect::Message;

    static void init(State&, const LocalView&) {}
    static void activate(Activation<ElectionProtocol>& ctx);
    static std::string phase_name(const State& s);
    static const char* message_name(const Message& m) { return to_string(m.kind); }
    static MsgKind kind_of(const Message& m) { return m.kind; }
};

namespace detail {

class Engine {
public:
    using Ctx = Activation<ElectionProtocol>;

    explicit Engine(Ctx& c) : c_(c), s_(c.state()), v_(c.view()) {}

    void run() {
        for (const auto& env : c_.inbox()) handle(env.msg, env.recv_port);
        grey_poll();
        tree_poll();
        if (s_.comp.started) {
            for (int e = 0; e < 2; ++e) endpoint_poll(e);
            for (int ch = 0; ch < 2; ++ch) channel_poll(ch);
            barrier_poll();
        }
    }

private:
    // ---------------------------------------------------------------- messages
    void handle(const Message& m, PortId z) {
        switch (m.kind) {
            case MsgKind::BoundaryProbe: on_probe(m, z); break;
            case MsgKind::Competition: on_token(m, z); break;
            case MsgKind::LeaderMsg:
            case MsgKind::FollowerMsg: on_reply(m, z); break;
            case MsgKind::DoneConvergecast: s_.tree.done_from |= bit(z); break;
            case MsgKind::StartPhase: start_phase(); break;
            case MsgKind::DfsToken: on_tour(m, z); break;
            case MsgKind::RootReport: report(static_cast<ReportKind>(m.sub), m.a, m.b); break;
            case MsgKind::RootBroadcast:
                if (m.sub == static_cast<std::uint8_t>(BroadcastKind::Begin))
                    on_begin(m.value, m.a);
                else
                    on_resolve(m.a, m.b);
                break;
            case MsgKind::LabelTransfer: on_transfer(m); break;
            case MsgKind::TerminationMsg: on_termination(m); break;
            case MsgKind::NotParticipating: on_not_participating(m, z); break;
            case MsgKind::AbortMerge: on_abort(z); break;
            case MsgKind::InMerge: on_in_merge(m, z); break;
            case MsgKind::MergeComplete: report(ReportKind::MergeDone, 0, 0); break;
            case MsgKind::BarrierSync:
                s_.comp.sync_pending = true;
                break;
            case MsgKind::BarrierAck: on_ack(m, z); break;
        }
    }

    static std::uint8_t bit(PortId p) { return static_cast<std::uint8_t>(1u << p); }

    void send(PortId p, Message m) { c_.send(p, m); }

    void send_boundary(PortId x, PortId i, Message m) {
        m.boundary_label = static_cast<std::int8_t>(
            outgoing_boundary_label(v_.relation(x), x, i, v_.rev[static_cast<std::size_t>(x)]));
        c_.send(x, m);
    }

    // ---------------------------------------------------------------- grey election
    void grey_poll() {
        auto& g = s_.grey;
        if (!g.started) {
            g.started = true;
            if (v_.visible == 0) {
                become_leader();
                g.decided = true;
                return;
            }
            for (int sct = 0; sct < v_.sectors; ++sct) {
                for (int d = 0; d < 2; ++d) {
                    const AgentHop h = first_hop(v_, sct, d);
                    Message m;
                    m.kind = MsgKind::BoundaryProbe;
                    m.origin_sector = static_cast<std::int8_t>(sct);
                    m.origin_dir = static_cast<std::uint8_t>(d);
                    m.word.push_back(static_cast<std::uint8_t>(v_.sector_len[static_cast<std::size_t>(sct)]));
                    add_displacement(m, h.x);
                    m.trace_id = c_.new_trace_id();
                    send_boundary(h.x, h.i, m);
                }
            }
            check_decided();
        }
        token_rules();
    }

    void add_displacement(Message& m, PortId x) {
        const Displacement d = port_displacement(x, Chirality::Standard);
        m.dx += d.dx;
        m.dy += m.parity ? -d.dy : d.dy;
        if (v_.relation(x) == ChiralityRelation::Different) m.parity ^= 1;
    }

    void on_probe(Message m, PortId z) {
        const ForwardDecision fd = forward_on_boundary(v_.visible, z, m.boundary_label);
        const int here = v_.sector_of[static_cast<std::size_t>(m.boundary_label)];
        if (m.dx == 0 && m.dy == 0 && m.origin_sector == here) {
            census_done(here, m.origin_dir, m.word);
            return;
        }
        m.word.push_back(static_cast<std::uint8_t>(fd.swept));
        add_displacement(m, fd.next_port);
        send_boundary(fd.next_port, fd.witness_port, m);
    }

    void census_done(int sct, int dir, const std::vector<std::uint8_t>& w) {
        std::vector<int> word(w.begin(), w.end());
        auto& r = s_.grey.result[static_cast<std::size_t>(sct)][static_cast<std::size_t>(dir)];
        if (turning_of_word(word) > 0) {
            r = CensusResult::Inner;
        } else {
            const HeadElection h = elect_heads(word, 0);
            s_.grey.k[static_cast<std::size_t>(dir)] = static_cast<std::uint8_t>(h.k);
            if (!h.head) {
                r = CensusResult::NotHead;
            } else {
                const HeadRecord rec = make_head_record(static_cast<Direction>(dir), first_hop(v_, sct, dir).x, h.k);
                r = select_survivor(rec) ? CensusResult::Survivor : CensusResult::Withdrawn;
            }
        }
        check_decided();
    }

    void check_decided() {
        auto& g = s_.grey;
        if (g.decided) return;
        bool survive[2] = {false, false};
        int surv_sector[2] = {-1, -1};
        for (int sct = 0; sct < v_.sectors; ++sct)
            for (int d = 0; d < 2; ++d) {
                const auto r = g.result[static_cast<std::size_t>(sct)][static_cast<std::size_t>(d)];
                if (r == CensusResult::Pending) return;
                if (r == CensusResult::Survivor) {
                    survive[d] = true;
                    surv_sector[d] = sct;
                }
            }
        g.decided = true;
        if (survive[0] && survive[1]) {
            become_leader();
            return;
        }
        for (int d = 0; d < 2; ++d) {
            if (!survive[d]) continue;
            const AgentHop h = first_hop(v_, surv_sector[d], d);
            HeldToken t;
            t.out_x = static_cast<std::int8_t>(h.x);
            t.out_i = static_cast<std::int8_t>(h.i);
            t.dir = static_cast<std::uint8_t>(d);
            t.trace_id = c_.new_trace_id();
            g.tok[g.ntok++] = t;
        }
    }

    void become_leader() {
        s_.grey.role = GreyRole::Leader;
        s_.tree.in_tree = true;
        s_.tree.parent = -1;
    }

    void set_follower() {
        if (s_.grey.role != GreyRole::Leader) s_.grey.role = GreyRole::Follower;
    }

    void on_token(const Message& m, PortId z) {
        const ForwardDecision fd = forward_on_boundary(v_.visible, z, m.boundary_label);
        HeldToken t;
        t.back = static_cast<std::int8_t>(z);
        t.back_label = m.boundary_label;
        t.out_x = static_cast<std::int8_t>(fd.next_port);
        t.out_i = static_cast<std::int8_t>(fd.witness_port);
        t.trace_id = m.trace_id;
        auto& g = s_.grey;
        if (g.ntok >= 2) throw std::logic_error("more than two competition tokens at one particle");
        g.tok[g.ntok++] = t;
    }

    // Does the neighbour behind port x hold or receive a token heading back to us?
    bool opposing_token(PortId x) const {
        const PortId back = v_.rev[static_cast<std::size_t>(x)];
        const auto& nb = c_.neighbor(x);
        for (int k = 0; k < nb.grey.ntok; ++k)
            if (nb.grey.tok[static_cast<std::size_t>(k)].out_x == back) return true;
        const LocalView& nv = c_.neighbor_view(x);
        for (const auto& env : c_.neighbor_inbox(x)) {
            if (env.msg.kind != MsgKind::Competition) continue;
            if (forward_on_boundary(nv.visible, env.recv_port, env.msg.boundary_label).next_port == back) return true;
        }
        return false;
    }

    void reply(const HeldToken& t, MsgKind kind) {
        if (t.back < 0) {
            if (kind == MsgKind::LeaderMsg)
                become_leader();
            else
                set_follower();
            return;
        }
        Message m;
        m.kind = kind;
        m.trace_id = c_.new_trace_id();
        send_boundary(t.back, t.back_label, m);
    }

    void drop_token(int k) {
        auto& g = s_.grey;
        if (k == 0) g.tok[0] = g.tok[1];
        g.tok[1] = HeldToken{};
        --g.ntok;
    }

    void token_rules() {
        auto& g = s_.grey;
        if (g.ntok == 2) {
            const auto& a = g.tok[0];
            const auto& b = g.tok[1];
            const bool a_wins = tie_key(a.back, a.out_x) < tie_key(b.back, b.out_x);
            const HeldToken w = a_wins ? a : b;
            const HeldToken l = a_wins ? b : a;
            g.ntok = 0;
            g.tok = {};
            reply(w, MsgKind::LeaderMsg);
            reply(l, MsgKind::FollowerMsg);
            return;
        }
        if (g.ntok != 1) return;
        const HeldToken t = g.tok[0];
        // Of two adjacent tokens heading at each other, the westward one waits for the other to arrive.
        if (is_left_port(t.out_x) && opposing_token(t.out_x)) return;
        if (!g.decided) return;
        drop_token(0);
        if (t.back < 0) {
            g.launched_x[t.dir] = t.out_x;
            g.launched_i[t.dir] = t.out_i;
        }
        Message m;
        m.kind = MsgKind::Competition;
        m.trace_id = t.trace_id;
        send_boundary(t.out_x, t.out_i, m);
    }

    void on_reply(const Message& m, PortId z) {
        auto& g = s_.grey;
        for (int k = 0; k < g.ntok; ++k) {
            const HeldToken t = g.tok[static_cast<std::size_t>(k)];
            if (t.out_x == z && t.out_i == m.boundary_label) {
                drop_token(k);
                reply(t, m.kind);
                return;
            }
        }
        for (int d = 0; d < 2; ++d) {
            if (g.launched_x[static_cast<std::size_t>(d)] == z && g.launched_i[static_cast<std::size_t>(d)] == m.boundary_label) {
                g.launched_x[static_cast<std::size_t>(d)] = -1;
                g.launched_i[static_cast<std::size_t>(d)] = -1;
                if (m.kind == MsgKind::LeaderMsg)
                    become_leader();
                else
                    set_follower();
                return;
            }
        }
        const ForwardDecision fd = forward_on_boundary(v_.visible, z, m.boundary_label);
        Message f = m;
        send_boundary(fd.next_port, fd.witness_port, f);
    }

    // ---------------------------------------------------------------- tree construction
    void tree_poll() {
        auto& t = s_.tree;
        if (!t.in_tree) {
            for (PortId p = 0; p < 6; ++p) {
                if (v_.has(v_.visible, p) && c_.neighbor(p).tree.in_tree) {
                    t.in_tree = true;
                    t.parent = static_cast<std::int8_t>(p);
                    set_follower();
                    break;
                }
            }
            return;
        }
        if (t.done_sent) return;
        bool all_in = true;
        std::uint8_t children = 0;
        for (PortId p = 0; p < 6; ++p) {
            if (!v_.has(v_.visible, p)) continue;
            const auto& nb = c_.neighbor(p).tree;
            if (!nb.in_tree) {
                all_in = false;
                continue;
            }
            if (nb.parent == v_.rev[static_cast<std::size_t>(p)]) children |= bit(p);
        }
        t.children = children;
        if (!all_in || (t.done_from & children) != children) return;
        t.done_sent = true;
        if (t.parent < 0) {
            start_phase();
            s_.root.phase = RootPhase::Idle;
            start_round();
        } else {
            Message m;
            m.kind = MsgKind::DoneConvergecast;
            send(t.parent, m);
        }
    }

    void start_phase() {
        s_.comp.started = true;
        Message m;
        m.kind = MsgKind::StartPhase;
        for (PortId p = 0; p < 6; ++p)
            if (s_.tree.children & bit(p)) send(p, m);
    }

    // ---------------------------------------------------------------- labels and endpoints
    bool tree_edge(PortId p) const { return s_.tree.parent == p || (s_.tree.children & bit(p)); }

    bool present(int e) const {
        const PortId p = endpoint_port(e);
        return v_.has(v_.dark_blue, p) && !tree_edge(p);
    }

    NeighborLabel node_label() const {
        NeighborLabel l;
        for (PortId p = 0; p < 6; ++p) {
            LabelChar ch = LabelChar::E;
            if (s_.tree.parent == p)
                ch = LabelChar::P;
            else if (s_.tree.children & bit(p))
                ch = LabelChar::C;
            else if (v_.has(v_.dark_blue, p))
                ch = s_.ep[p == 0 ? 0 : 1].active ? LabelChar::DU : LabelChar::D;
            else if (v_.has(v_.occupied, p))
                ch = LabelChar::N;
            l.set(p, ch);
        }
        return l;
    }

    void report(ReportKind k, int a, int b) {
        if (s_.tree.parent >= 0) {
            Message m;
            m.kind = MsgKind::RootReport;
            m.sub = static_cast<std::uint8_t>(k);
            m.a = static_cast<std::uint8_t>(a);
            m.b = static_cast<std::uint8_t>(b);
            send(s_.tree.parent, m);
            return;
        }
        root_report(k, a, b);
    }

    void endpoint_poll(int e) {
        auto& ep = s_.ep[static_cast<std::size_t>(e)];
        if (!present(e)) return;
        const PortId port = endpoint_port(e);
        const ParticleState& nb = c_.neighbor(port);
        if (!nb.comp.started) return;
        const Endpoint& pt = nb.ep[static_cast<std::size_t>(1 - e)];
        if (pt.gen != ep.seen_partner_gen) {
            ep.seen_partner_gen = pt.gen;
            ep.compared = false;
            report(ReportKind::Wake, 0, 0);
        }
        switch (ep.phase) {
            case EpPhase::Idle:
                if (e == 0 && ep.chosen) {
                    if (pt.phase != EpPhase::Idle && pt.active && pt.seq == ep.seq) {
                        ep.active = true;
                        ep.chosen = false;
                        ep.phase = EpPhase::Active;
                        report(ReportKind::OutResponse, 1, 0);
                    }
                } else if (e == 1 && pt.chosen && (!ep.handled || ep.handled_seq != pt.seq)) {
                    ep.handled = true;
                    ep.handled_seq = pt.seq;
                    ep.rejected = false;
                    if (s_.comp.in_round && s_.comp.scan_passed)
                        reject(ep, pt.seq);
                    else
                        report(ReportKind::Wake, 0, 0);
                }
                break;
            case EpPhase::Ready:
                if (pt.phase == EpPhase::Ready || pt.phase == EpPhase::Compete || pt.phase == EpPhase::Decided ||
                    pt.phase == EpPhase::WinWait) {
                    ep.phase = EpPhase::Compete;
                    ep.index = 0;
                    compete(e, nb);
                }
                break;
            case EpPhase::Compete: compete(e, nb); break;
            case EpPhase::Decided:
                if (ep.outcome == ComparisonOutcome::Lose && ep.pending && pt.phase == EpPhase::WinWait) loser_act(e);
                if (ep.outcome == ComparisonOutcome::Draw && pt.phase != EpPhase::Active && pt.phase != EpPhase::Lfc &&
                    pt.phase != EpPhase::Ready && pt.phase != EpPhase::Compete) {
                    ep.compared = true;
                    ep.active = false;
                    ep.phase = EpPhase::Idle;
                }
                break;
            case EpPhase::WinWait:
                if (!s_.comp.in_round && nb.tree.parent == v_.rev[static_cast<std::size_t>(port)]) {
                    s_.tree.children |= bit(port);
                    ep.active = false;
                    ep.phase = EpPhase::Idle;
                    ++c_.events().merges;
                    report(ReportKind::MergeDone, 0, 0);
                }
                break;
            default: break;
        }
    }

    void reject(Endpoint& ep, std::uint8_t seq) {
        ep.rejected = true;
        ep.handled = true;
        ep.handled_seq = seq;
        Message m;
        m.kind = MsgKind::NotParticipating;
        m.value = seq;
        send(endpoint_port(1), m);
    }

    void compete(int e, const ParticleState& nb) {
        auto& ep = s_.ep[static_cast<std::size_t>(e)];
        auto& ch = s_.ch[static_cast<std::size_t>(e)];
        const Endpoint& pt = nb.ep[static_cast<std::size_t>(1 - e)];
        const auto& pch = nb.ch[static_cast<std::size_t>(1 - e)];
        const int pi = pt.phase == EpPhase::Ready ? 0 : pt.index;
        ch.iphase = InitiatorPhase::Compete;
        for (;;) {
            NeighborLabel other;
            if (pi == ep.index)
                other.bits = pch.ag[0].q[0];
            else if (pi == ep.index + 1)
                other.bits = pt.prev;
            else
                return;
            NeighborLabel own;
            own.bits = ch.ag[0].q[0];
            const ComparisonOutcome o = decide_position(own, other);
            if (o != ComparisonOutcome::None) {
                ep.outcome = o;
                ep.phase = o == ComparisonOutcome::Win ? EpPhase::WinWait : EpPhase::Decided;
                ch.iphase = InitiatorPhase::Done;
                if (e == 0) ++c_.events().comparisons;
                report(ReportKind::Result, e, static_cast<int>(o));
                return;
            }
            const PreRef pre = pre_of(e, 0);
            if (!pre.view.loaded) return;
            const std::uint32_t old = ch.ag[0].q[0];
            const LfcAction act = lfc_initiator_advance(ch.ag[0], pre.view);
            if (!act.push) return;
            deliver(e, pre, act);
            ep.prev = old;
            ++ep.index;
        }
    }

    void on_not_participating(const Message& m, PortId z) {
        if (z != endpoint_port(0)) return;
        auto& ep = s_.ep[0];
        if (!ep.chosen || ep.seq != m.value) return;
        ep.chosen = false;
        report(ReportKind::OutResponse, 0, 0);
    }

    void on_abort(PortId z) {
        const int e = z == endpoint_port(0) ? 0 : 1;
        auto& ep = s_.ep[static_cast<std::size_t>(e)];
        if (ep.phase != EpPhase::WinWait) return;
        ep.active = false;
        ep.compared = false;
        ep.phase = EpPhase::Idle;
        report(ReportKind::Wake, 0, 0);
    }

    // ---------------------------------------------------------------- label forwarding channels
    struct PreRef {
        PortId port = -1;  // -1: agent of this particle
        int agent = 0;
        LfcPreView view;
    };

    int in_flight(PortId port, int c, int agent) const {
        int n = 0;
        const auto epoch = s_.ch[static_cast<std::size_t>(c)].epoch;
        for (const auto& env : c_.neighbor_inbox(port))
            if (env.msg.kind == MsgKind::LabelTransfer && env.msg.a == c && env.msg.b == agent && env.msg.epoch == epoch)
                ++n;
        return n;
    }

    PreRef pre_of(int c, int k) const {
        PreRef r;
        const auto& ch = s_.ch[static_cast<std::size_t>(c)];
        const Frozen& fz = s_.fz;
        if (k == 0 && fz.parent < 0) {
            r.agent = fz.count - 1;
            r.view.loaded = true;
            r.view.count = ch.ag[static_cast<std::size_t>(r.agent)].count;
            r.view.accepting_initiator = r.agent == 0 && initiator_accepting(ch.iphase, r.view.count);
            return r;
        }
        r.port = k == 0 ? fz.parent : nth_port(fz.children, k);
        const ParticleState& nb = c_.neighbor(r.port);
        const auto& nch = nb.ch[static_cast<std::size_t>(c)];
        if (nch.epoch != ch.epoch || nb.fz.epoch != ch.epoch) return r;
        r.agent = k == 0 ? fz.x - 1 : nb.fz.count - 1;
        r.view.loaded = true;
        r.view.count = nch.ag[static_cast<std::size_t>(r.agent)].count + in_flight(r.port, c, r.agent);
        r.view.accepting_initiator = r.agent == 0 && initiator_accepting(nch.iphase, r.view.count);
        return r;
    }

    void deliver(int c, const PreRef& pre, const LfcAction& act) {
        auto& ch = s_.ch[static_cast<std::size_t>(c)];
        if (pre.port < 0) {
            auto& a = ch.ag[static_cast<std::size_t>(pre.agent)];
            if (act.push) a.push_back(act.label);
            if (act.token) a.token = true;
            return;
        }
        Message m;
        m.a = static_cast<std::uint8_t>(c);
        m.b = static_cast<std::uint8_t>(pre.agent);
        m.epoch = ch.epoch;
        if (act.push) {
            m.kind = MsgKind::LabelTransfer;
            m.value = act.label;
            send(pre.port, m);
        }
        if (act.token) {
            m.kind = MsgKind::TerminationMsg;
            m.value = 0;
            send(pre.port, m);
        }
    }

    void channel_poll(int c) {
        auto& ch = s_.ch[static_cast<std::size_t>(c)];
        if (s_.fz.count == 0 || ch.epoch != s_.fz.epoch) return;
        for (int k = 0; k < s_.fz.count; ++k) {
            auto& a = ch.ag[static_cast<std::size_t>(k)];
            const bool initiator = k == 0 && ch.iphase != InitiatorPhase::None;
            if (initiator && ch.iphase != InitiatorPhase::Aligning) continue;
            const PreRef pre = pre_of(c, k);
            const LfcAction act = initiator ? lfc_initiator_align_step(a, ch.iphase, pre.view) : lfc_relay_step(a, pre.view);
            if (act.push || act.token) deliver(c, pre, act);
        }
    }

    void on_transfer(const Message& m) {
        auto& ch = s_.ch[m.a];
        if (m.epoch != ch.epoch) return;
        auto& a = ch.ag[m.b];
        if (a.count >= 2) throw std::logic_error("label channel capacity exceeded");
        a.push_back(m.value);
    }

    void on_termination(const Message& m) {
        auto& ch = s_.ch[m.a];
        if (m.epoch != ch.epoch) return;
        if (m.b == 0 && ch.iphase == InitiatorPhase::TermWait) {
            ch.iphase = InitiatorPhase::Ready;
            s_.ep[m.a].phase = EpPhase::Ready;
            return;
        }
        ch.ag[m.b].token = true;
    }

    void on_begin(std::uint32_t epoch, int x) {
        Frozen& fz = s_.fz;
        fz.epoch = epoch;
        fz.children = s_.tree.children;
        fz.parent = s_.tree.parent;
        fz.x = static_cast<std::uint8_t>(x);
        fz.count = static_cast<std::uint8_t>(popcount6(fz.children) + 1);
        fz.label = node_label();
        for (int c = 0; c < 2; ++c) {
            auto& ch = s_.ch[static_cast<std::size_t>(c)];
            ch = Channel{};
            ch.epoch = epoch;
            for (int k = 0; k < fz.count; ++k) {
                NeighborLabel l = fz.label;
                if (fz.parent < 0 && k == 0) l.bits |= NeighborLabel::kRootMark;
                if (fz.parent < 0 && k == fz.count - 1) l.bits |= NeighborLabel::kLastMark;
                ch.ag[static_cast<std::size_t>(k)].push_back(l.bits);
            }
            auto& ep = s_.ep[static_cast<std::size_t>(c)];
            if (ep.phase != EpPhase::Active) continue;
            if (fz.parent < 0 && fz.count == 1) {
                ch.iphase = InitiatorPhase::Ready;
                ep.phase = EpPhase::Ready;
            } else {
                ch.iphase = InitiatorPhase::Aligning;
                ep.phase = EpPhase::Lfc;
            }
        }
        Message m;
        m.kind = MsgKind::RootBroadcast;
        m.sub = static_cast<std::uint8_t>(BroadcastKind::Begin);
        m.value = epoch;
        for (int j = 1; j <= fz.count - 1; ++j) {
            m.a = static_cast<std::uint8_t>(j);
            send(nth_port(fz.children, j), m);
        }
    }

    // ---------------------------------------------------------------- root controller
    void start_round() {
        auto& r = s_.root;
        ++c_.events().rounds;
        const bool reset = r.reset_next;
        r.reset_next = false;
        r.pending_wake = false;
        r.found_out = r.found_in = false;
        r.out_resp = r.out_act = false;
        r.needed = 0;
        r.got = 0;
        r.res = {};
        r.phase = RootPhase::Tour1;
        Message m;
        m.kind = MsgKind::DfsToken;
        m.sub = 1;
        m.a = reset ? 1 : 0;
        visit(m);
        tour_next(m, -1);
    }

    void on_tour(Message m, PortId z) {
        if (z == s_.tree.parent) {
            visit(m);
            tour_next(m, -1);
        } else {
            tour_next(m, z);
        }
    }

    void tour_next(const Message& m, PortId after) {
        for (PortId p = after + 1; p < 6; ++p) {
            if (s_.tree.children & bit(p)) {
                send(p, m);
                return;
            }
        }
        if (s_.tree.parent >= 0)
            send(s_.tree.parent, m);
        else
            tour_done(m);
    }

    void visit(Message& m) {
        auto& cp = s_.comp;
        if (m.sub == 1) {
            cp.in_round = true;
            cp.scan_passed = false;
            if (m.a) {
                for (int e = 0; e < 2; ++e) {
                    if (!present(e)) continue;
                    ++s_.ep[static_cast<std::size_t>(e)].gen;
                    s_.ep[static_cast<std::size_t>(e)].compared = false;
                }
            }
            auto& ep = s_.ep[0];
            if (!m.b && present(0) && ep.phase == EpPhase::Idle && !ep.compared && !ep.chosen) {
                ep.chosen = true;
                ++ep.seq;
                m.b = 1;
            }
            return;
        }
        auto& ep = s_.ep[1];
        if (present(1) && ep.phase == EpPhase::Idle) {
            const ParticleState& nb = c_.neighbor(endpoint_port(1));
            const Endpoint& pt = nb.ep[0];
            if (nb.comp.started && pt.chosen) {
                if (!m.b && !(ep.rejected && ep.handled_seq == pt.seq)) {
                    ep.active = true;
                    ep.phase = EpPhase::Active;
                    ep.seq = pt.seq;
                    ep.handled = true;
                    ep.handled_seq = pt.seq;
                    ep.rejected = false;
                    m.b = 1;
                } else {
                    reject(ep, pt.seq);
                }
            }
        }
        cp.scan_passed = true;
    }

    void tour_done(const Message& m) {
        auto& r = s_.root;
        if (m.sub == 1) {
            r.found_out = m.b != 0;
            r.phase = RootPhase::Tour2;
            Message t;
            t.kind = MsgKind::DfsToken;
            t.sub = 2;
            visit(t);
            tour_next(t, -1);
            return;
        }
        r.found_in = m.b != 0;
        if (r.found_out && !r.out_resp) {
            r.phase = RootPhase::WaitOut;
            return;
        }
        proceed_compare();
    }

    void proceed_compare() {
        auto& r = s_.root;
        r.needed = static_cast<std::uint8_t>((r.found_in ? 1 : 0) + (r.out_act ? 1 : 0));
        if (r.needed == 0) {
            resolve();
            return;
        }
        r.phase = RootPhase::Comparing;
        on_begin(r.epoch + 1, 0);
        r.epoch += 1;
    }

    void root_report(ReportKind k, int a, int b) {
        auto& r = s_.root;
        switch (k) {
            case ReportKind::MergeDone:
                r.reset_next = true;
                [[fallthrough]];
            case ReportKind::Wake:
                if (r.phase == RootPhase::Idle)
                    start_round();
                else
                    r.pending_wake = true;
                break;
            case ReportKind::OutResponse:
                r.out_resp = true;
                r.out_act = a == 1;
                if (a == 0) r.pending_wake = true;
                if (r.phase == RootPhase::WaitOut) proceed_compare();
                break;
            case ReportKind::Result:
                r.res[static_cast<std::size_t>(a)] = static_cast<ComparisonOutcome>(b);
                ++r.got;
                if (r.phase == RootPhase::Comparing && r.got == r.needed) resolve();
                break;
        }
    }

    void resolve() {
        auto& r = s_.root;
        int merge_ch = 2;
        int abort_ch = 2;
        if (r.res[0] == ComparisonOutcome::Lose)
            merge_ch = 0;
        else if (r.res[1] == ComparisonOutcome::Lose)
            merge_ch = 1;
        if (r.res[0] == ComparisonOutcome::Lose && r.res[1] == ComparisonOutcome::Lose) abort_ch = 1;
        if (merge_ch < 2) {
            r.phase = RootPhase::Merging;
        } else {
            r.phase = RootPhase::Barrier;
            s_.comp.sync_pending = true;
        }
        on_resolve(merge_ch, abort_ch);
    }

    void on_resolve(int merge_ch, int abort_ch) {
        auto& cp = s_.comp;
        cp.in_round = false;
        cp.scan_passed = false;
        Message m;
        m.kind = MsgKind::RootBroadcast;
        m.sub = static_cast<std::uint8_t>(BroadcastKind::Resolve);
        m.a = static_cast<std::uint8_t>(merge_ch);
        m.b = static_cast<std::uint8_t>(abort_ch);
        for (PortId p = 0; p < 6; ++p)
            if (s_.tree.children & bit(p)) send(p, m);
        for (int e = 0; e < 2; ++e) {
            auto& ep = s_.ep[static_cast<std::size_t>(e)];
            if (ep.phase != EpPhase::Decided || ep.outcome != ComparisonOutcome::Lose) continue;
            if (e == merge_ch) ep.pending = 1;
            if (e == abort_ch) ep.pending = 2;
        }
    }

    // Runs once the winner has seen the decision.
    void loser_act(int e) {
        auto& ep = s_.ep[static_cast<std::size_t>(e)];
        const PortId port = endpoint_port(e);
        const int action = ep.pending;
        ep.pending = 0;
        if (action == 1) {
            if (s_.tree.parent < 0) {
                s_.tree.parent = static_cast<std::int8_t>(port);
                s_.grey.role = GreyRole::Follower;
                s_.root.phase = RootPhase::Off;
                ep.active = false;
                ep.phase = EpPhase::Idle;
            } else {
                ep.phase = EpPhase::LoserMerging;
                s_.comp.merge_from = -2;
                Message up;
                up.kind = MsgKind::InMerge;
                up.sub = 0;
                send(s_.tree.parent, up);
            }
        } else {
            Message ab;
            ab.kind = MsgKind::AbortMerge;
            send(port, ab);
            ep.active = false;
            ep.compared = false;
            ep.phase = EpPhase::Idle;
        }
    }

    void on_in_merge(const Message& m, PortId z) {
        auto& t = s_.tree;
        auto& cp = s_.comp;
        Message f;
        f.kind = MsgKind::InMerge;
        if (m.sub == 0) {
            if (t.parent < 0) {
                s_.grey.role = GreyRole::Follower;
                s_.root.phase = RootPhase::Off;
                t.parent = static_cast<std::int8_t>(z);
                t.children &= static_cast<std::uint8_t>(~bit(z));
                f.sub = 1;
                send(z, f);
            } else {
                cp.merge_from = static_cast<std::int8_t>(z);
                f.sub = 0;
                send(t.parent, f);
            }
            return;
        }
        t.children |= bit(z);
        if (cp.merge_from == -2) {
            for (int e = 0; e < 2; ++e) {
                auto& ep = s_.ep[static_cast<std::size_t>(e)];
                if (ep.phase != EpPhase::LoserMerging) continue;
                t.parent = static_cast<std::int8_t>(endpoint_port(e));
                ep.active = false;
                ep.phase = EpPhase::Idle;
            }
        } else {
            t.parent = cp.merge_from;
            t.children &= static_cast<std::uint8_t>(~bit(cp.merge_from));
            f.sub = 1;
            send(cp.merge_from, f);
        }
        cp.merge_from = -1;
    }

    // ---------------------------------------------------------------- barrier
    bool settled() const {
        if (s_.comp.in_round || s_.comp.merge_from != -1) return false;
        for (const auto& ep : s_.ep)
            if (ep.phase != EpPhase::Idle) return false;
        return true;
    }

    void barrier_poll() {
        auto& cp = s_.comp;
        if (cp.sync_pending && settled()) {
            cp.sync_pending = false;
            cp.sync_active = true;
            cp.acks_wait = s_.tree.children;
            cp.ack_epoch = std::max(s_.ch[0].epoch, s_.ch[1].epoch);
            Message m;
            m.kind = MsgKind::BarrierSync;
            for (PortId p = 0; p < 6; ++p)
                if (cp.acks_wait & bit(p)) send(p, m);
        }
        if (cp.sync_active && cp.acks_wait == 0) {
            cp.sync_active = false;
            if (s_.tree.parent >= 0) {
                Message m;
                m.kind = MsgKind::BarrierAck;
                m.epoch = cp.ack_epoch;
                send(s_.tree.parent, m);
            } else {
                barrier_done(cp.ack_epoch);
            }
        }
    }

    void on_ack(const Message& m, PortId z) {
        auto& cp = s_.comp;
        cp.acks_wait &= static_cast<std::uint8_t>(~bit(z));
        cp.ack_epoch = std::max(cp.ack_epoch, m.epoch);
    }

    void barrier_done(std::uint32_t epoch) {
        auto& r = s_.root;
        if (r.phase != RootPhase::Barrier) return;
        r.epoch = std::max(r.epoch, epoch);
        if (r.needed > 0 || r.pending_wake)
            start_round();
        else
            r.phase = RootPhase::Idle;
    }

    Ctx& c_;
    ParticleState& s_;
    const LocalView& v_;
};

}  // namespace detail

inline std::string ElectionProtocol::phase_name(const State& s) {
    std::string out = s.grey.role == GreyRole::Leader     ? "Leader"
                      : s.grey.role == GreyRole::Follower ? "Follower"
                                                          : "Undecided";
    if (s.root.phase != RootPhase::Off) out += "/R" + std::to_string(static_cast<int>(s.root.phase));
    return out;
}

inline void ElectionProtocol::activate(Activation<ElectionProtocol>& ctx) {
    detail::Engine(ctx).run();
}

}  // namespace pmelect

