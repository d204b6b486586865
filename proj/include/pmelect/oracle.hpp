#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "competition.hpp"
#include "protocol.hpp"
#include "topology.hpp"

namespace pmelect::oracle {

using ElectionWorld = World<ElectionProtocol>;

// Particle behind port p of particle i, or -1.
inline int neighbor_index(const ElectionWorld& w, int i, PortId p) {
    return w.views()[static_cast<std::size_t>(i)].nbr[static_cast<std::size_t>(p)];
}

struct ForestReport {
    std::string error;  // empty when consistent
    std::vector<int> root_of;
    bool ok() const { return error.empty(); }
};

// Follows live parent pointers. Among particles already in a tree, roots are exactly the Leaders.
inline ForestReport parent_forest(const ElectionWorld& w) {
    ForestReport r;
    const int n = w.size();
    r.root_of.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        int cur = i;
        for (int steps = 0;; ++steps) {
            if (steps > n) {
                r.error = "parent cycle through " + to_string(w.coord(i));
                return r;
            }
            const int p = w.state(cur).tree.parent;
            if (p < 0) break;
            cur = neighbor_index(w, cur, p);
            if (cur < 0) {
                r.error = "parent port points at an empty node from " + to_string(w.coord(i));
                return r;
            }
        }
        r.root_of[static_cast<std::size_t>(i)] = cur;
        const auto& st = w.state(i);
        const bool root = st.tree.parent < 0;
        if ((st.tree.in_tree || st.is_leader()) && root != st.is_leader()) {
            r.error = "root/leader mismatch at " + to_string(w.coord(i));
            return r;
        }
    }
    return r;
}

// Parent/child registers agree, one root, members-1 edges, acyclic.
inline std::string tree_axioms(const ElectionWorld& w, const std::vector<int>& members) {
    const std::set<int> in(members.begin(), members.end());
    int roots = 0;
    int edges = 0;
    for (int i : members) {
        const auto& t = w.state(i).tree;
        if (t.parent < 0) {
            ++roots;
        } else {
            ++edges;
            const int q = neighbor_index(w, i, t.parent);
            if (q < 0 || !in.count(q)) return "parent outside component at " + to_string(w.coord(i));
            const PortId back = w.views()[static_cast<std::size_t>(i)].rev[static_cast<std::size_t>(t.parent)];
            if (!(w.state(q).tree.children & (1u << back))) return "parent does not list child at " + to_string(w.coord(q));
        }
        for (PortId p = 0; p < 6; ++p) {
            if (!(t.children & (1u << p))) continue;
            const int c = neighbor_index(w, i, p);
            if (c < 0) return "child port points at an empty node at " + to_string(w.coord(i));
            const PortId back = w.views()[static_cast<std::size_t>(i)].rev[static_cast<std::size_t>(p)];
            if (w.state(c).tree.parent != back) return "child does not point back at " + to_string(w.coord(c));
        }
    }
    if (roots != 1) return "expected one root, found " + std::to_string(roots);
    if (edges != static_cast<int>(members.size()) - 1) return "edge count " + std::to_string(edges);
    const ForestReport f = parent_forest(w);
    if (!f.ok()) return f.error;
    return {};
}

// Frozen comparison tree of the component holding particle i, as a rooted tree with node labels.
struct FrozenTree {
    RootedTree tree;
    std::vector<NeighborLabel> labels;
    std::vector<int> particle;  // tree node -> particle index
    std::string error;
};

inline FrozenTree frozen_tree(const ElectionWorld& w, int i) {
    FrozenTree out;
    int root = i;
    for (int steps = 0; w.state(root).fz.parent >= 0; ++steps) {
        if (steps > w.size()) {
            out.error = "frozen parent cycle";
            return out;
        }
        root = neighbor_index(w, root, w.state(root).fz.parent);
    }
    std::vector<std::pair<int, int>> stack{{root, -1}};
    while (!stack.empty()) {
        const auto [p, par] = stack.back();
        stack.pop_back();
        const int node = static_cast<int>(out.particle.size());
        if (node > w.size()) {
            out.error = "frozen child cycle";
            return out;
        }
        out.particle.push_back(p);
        out.tree.parent.push_back(par);
        out.tree.children.emplace_back();
        if (par >= 0) out.tree.children[static_cast<std::size_t>(par)].push_back(node);
        NeighborLabel l = w.state(p).fz.label;
        l.bits &= NeighborLabel::kCharMask;
        out.labels.push_back(l);
        const auto& fz = w.state(p).fz;
        for (PortId q = 5; q >= 0; --q)
            if (fz.children & (1u << q)) stack.emplace_back(neighbor_index(w, p, q), node);
    }
    // Children were pushed in reverse port order; restore increasing port order.
    std::vector<std::vector<int>> ordered(out.tree.children.size());
    for (std::size_t v = 0; v < out.tree.children.size(); ++v) {
        const int pv = out.particle[v];
        for (PortId q = 0; q < 6; ++q) {
            if (!(w.state(pv).fz.children & (1u << q))) continue;
            const int c = neighbor_index(w, pv, q);
            for (int child : out.tree.children[v])
                if (out.particle[static_cast<std::size_t>(child)] == c) ordered[v].push_back(child);
        }
    }
    out.tree.children = std::move(ordered);
    out.tree.root = 0;
    return out;
}

inline std::vector<NeighborLabel> frozen_sequence(const ElectionWorld& w, int i) {
    const FrozenTree t = frozen_tree(w, i);
    if (!t.error.empty()) return {};
    return ring_label_sequence(euler_ring(t.tree), t.labels);
}

// Boundaries the protocol can see: one entry per grey component.
struct ComponentBoundaries {
    std::vector<NodeCoord> members;
    std::vector<Boundary> boundaries;
};

inline std::vector<ComponentBoundaries> visible_boundaries(const Configuration& config) {
    const Layout layout(config);
    std::vector<ComponentBoundaries> out;
    for (const auto& comp : grey_components(layout))
        out.push_back({comp, comp.size() > 1 ? extract_boundaries(layout, comp, BoundaryMask::MaskDarkBlue)
                                              : std::vector<Boundary>{}});
    return out;
}

// A message trace is closed if its hops follow consecutive ring steps of one boundary in one orientation.
inline bool is_boundary_arc(const std::vector<Boundary>& all, const std::vector<LocalBoundary>& hops) {
    if (hops.empty()) return true;
    for (const auto& b : all) {
        const int len = static_cast<int>(b.ring.size());
        for (int dir : {1, -1}) {
            for (int start = 0; start < len; ++start) {
                bool ok = true;
                for (std::size_t j = 0; j < hops.size() && ok; ++j) {
                    const int idx = ((start + dir * static_cast<int>(j)) % len + len) % len;
                    const auto& r = b.ring[static_cast<std::size_t>(idx)];
                    const LocalBoundary expect = dir == 1 ? r : LocalBoundary{r.v, r.u, r.o};
                    ok = expect == hops[j];
                }
                if (ok) return true;
            }
        }
    }
    return false;
}

// Observer that groups boundary-message hops by trace.
class BoundaryRecorder {
public:
    void attach(ElectionWorld& w) {
        ElectionWorld* wp = &w;
        w.set_send_observer([this, wp](const Envelope<Message>& e) {
            if (!travels_on_boundary(e.msg.kind)) return;
            const NodeCoord to = wp->coord(e.to);
            const Chirality c = wp->config().chirality[static_cast<std::size_t>(e.to)];
            traces_[e.msg.trace_id].push_back({wp->coord(e.from), to, neighbor_of(to, e.msg.boundary_label, c)});
        });
    }
    const std::map<std::uint32_t, std::vector<LocalBoundary>>& traces() const { return traces_; }

private:
    std::map<std::uint32_t, std::vector<LocalBoundary>> traces_;
};

// Number of traces that are not an arc of one boundary.
inline int boundary_violations(const Configuration& config, const BoundaryRecorder& rec) {
    std::vector<Boundary> all;
    for (const auto& c : visible_boundaries(config))
        all.insert(all.end(), c.boundaries.begin(), c.boundaries.end());
    int bad = 0;
    for (const auto& [id, hops] : rec.traces())
        if (!is_boundary_arc(all, hops)) ++bad;
    return bad;
}

// Grey leaders never reappear after a merge, so callers record every particle that was ever Leader.
inline void note_leaders(const ElectionWorld& w, std::vector<char>& was_leader) {
    was_leader.resize(static_cast<std::size_t>(w.size()), 0);
    for (int i = 0; i < w.size(); ++i)
        if (w.state(i).is_leader()) was_leader[static_cast<std::size_t>(i)] = 1;
}

// One grey Leader per grey component, on its Outer boundary, with valid head counts.
inline std::string grey_check(const ElectionWorld& w, const std::vector<char>& was_leader) {
    const Configuration& config = w.config();
    std::map<NodeCoord, int> index;
    for (int i = 0; i < w.size(); ++i) index[w.coord(i)] = i;
    for (const auto& comp : visible_boundaries(config)) {
        int leaders = 0;
        int leader = -1;
        for (const auto& c : comp.members) {
            const int i = index.at(c);
            if (was_leader[static_cast<std::size_t>(i)]) {
                ++leaders;
                leader = i;
            }
        }
        if (leaders != 1) return "component at " + to_string(comp.members.front()) + " has " + std::to_string(leaders) + " leaders";
        if (comp.members.size() == 1) continue;
        const Boundary* outer = nullptr;
        for (const auto& b : comp.boundaries)
            if (b.kind == BoundaryKind::Outer) outer = &b;
        if (!outer) return "component without outer boundary";
        bool on = false;
        for (const auto& a : outer->agents) on = on || a.node == w.coord(leader);
        if (!on) return "leader " + to_string(w.coord(leader)) + " is not on the outer boundary";
        const int k = static_cast<int>(minimal_rotations(outer->word()).size());
        const int len = static_cast<int>(outer->agents.size());
        if (k != 1 && k != 2 && k != 3 && k != 6) return "head count " + std::to_string(k);
        if (len % k != 0) return "head count does not divide ring length";
        for (const auto& c : comp.members) {
            for (auto kk : w.state(index.at(c)).grey.k)
                if (kk != 0 && kk != k) return "particle " + to_string(c) + " computed k=" + std::to_string(kk);
        }
    }
    return {};
}

inline bool grey_phase_done(const ElectionWorld& w) {
    for (int i = 0; i < w.size(); ++i) {
        const auto& g = w.state(i).grey;
        if (!g.decided || g.ntok != 0 || g.launched_x[0] >= 0 || g.launched_x[1] >= 0) return false;
    }
    for (const auto& box : w.inboxes())
        for (const auto& e : box)
            if (travels_on_boundary(e.msg.kind)) return false;
    return true;
}

inline int leader_count(const ElectionWorld& w) {
    int c = 0;
    for (const auto& s : w.states()) c += s.is_leader() ? 1 : 0;
    return c;
}

}  // namespace pmelect::oracle
