#include <gtest/gtest.h>

#include "pmelect/competition.hpp"
#include "pmelect/tree_engine.hpp"

using namespace pmelect;

namespace {

RootedTree tree_of(std::vector<int> parent) {
    RootedTree t;
    t.parent = parent;
    t.children.assign(parent.size(), {});
    for (std::size_t v = 0; v < parent.size(); ++v) {
        if (parent[v] < 0)
            t.root = static_cast<int>(v);
        else
            t.children[static_cast<std::size_t>(parent[v])].push_back(static_cast<int>(v));
    }
    return t;
}

NeighborLabel label(const std::string& s) {
    NeighborLabel l;
    for (PortId p = 0; p < 6; ++p) {
        LabelChar c = LabelChar::N;
        switch (s[static_cast<std::size_t>(p)]) {
            case 'P': c = LabelChar::P; break;
            case 'C': c = LabelChar::C; break;
            case 'D': c = LabelChar::D; break;
            case 'd': c = LabelChar::DU; break;
            case 'E': c = LabelChar::E; break;
            default: break;
        }
        l.set(p, c);
    }
    return l;
}

std::vector<std::uint32_t> bits(const std::vector<NeighborLabel>& v) {
    std::vector<std::uint32_t> out;
    for (const auto& l : v) out.push_back(l.bits);
    return out;
}

}  // namespace

TEST(TreeEngine, FiveNodeTreeVisitOrder) {
    const auto t = tree_of({-1, 0, 1, 1, 0});  // root, B, C, D, E
    const EulerRing r = euler_ring(t);
    EXPECT_EQ(r.visit_order(), (std::vector<int>{0, 1, 2, 1, 3, 1, 0, 4, 0}));
    EXPECT_EQ(r.size(), 9);
    EXPECT_EQ(r.agents[static_cast<std::size_t>(r.root_label_agent)].node, 0);
    EXPECT_EQ(r.agents[static_cast<std::size_t>(r.last_node_agent)].node, 0);
    EXPECT_EQ(r.root_label_agent, 0);
    EXPECT_EQ(r.last_node_agent, 8);
}

TEST(TreeEngine, RingLinksCloseTheCycle) {
    const auto t = tree_of({-1, 0, 1, 1, 0});
    const EulerRing r = euler_ring(t);
    int k = 0;
    for (int step = 0; step < r.size(); ++step) {
        const auto& a = r.agents[static_cast<std::size_t>(k)];
        EXPECT_EQ(r.agents[static_cast<std::size_t>(a.next)].pre, k);
        k = a.next;
    }
    EXPECT_EQ(k, 0);
}

TEST(TreeEngine, VisitIndexCountsVisitedChildren) {
    const EulerRing r = euler_ring(tree_of({-1, 0, 1, 1, 0}));
    std::vector<int> idx;
    for (const auto& a : r.agents) idx.push_back(a.visit_index);
    EXPECT_EQ(idx, (std::vector<int>{1, 1, 1, 2, 1, 3, 2, 1, 3}));
}

TEST(TreeEngine, RingLengthIsTwiceNodesMinusOne) {
    EXPECT_EQ(euler_ring(tree_of({-1, 0, 0, 1, 1})).size(), 9);
    EXPECT_EQ(euler_ring(tree_of({-1, 0, 1, 2, 3, 4, 5})).size(), 13);
    EXPECT_EQ(euler_ring(tree_of({-1, 0, 0, 0, 0, 0, 0})).size(), 13);
}

TEST(TreeEngine, SingleNodeRing) {
    const EulerRing r = euler_ring(tree_of({-1}));
    ASSERT_EQ(r.size(), 1);
    EXPECT_EQ(r.agents[0].next, 0);
    EXPECT_EQ(r.agents[0].pre, 0);
}

TEST(TreeEngine, LabelCharsAndMarks) {
    NeighborLabel l = label("PCDdEN");
    EXPECT_EQ(l.str(), "PCDdEN");
    EXPECT_EQ(l.at(0), LabelChar::P);
    EXPECT_EQ(l.at(3), LabelChar::DU);
    l.bits |= NeighborLabel::kRootMark;
    EXPECT_TRUE(l.root_mark());
    EXPECT_FALSE(l.last_mark());
    EXPECT_EQ(compare_label_chars(l, label("PCDdEN")), 0);
    EXPECT_GT(compare_label_chars(label("PNNNNN"), label("CNNNNN")), 0);
    EXPECT_GT(compare_label_chars(label("DNNNNN"), label("dNNNNN")), 0);
    EXPECT_GT(compare_label_chars(label("ENNNNN"), label("NNNNNN")), 0);
}

TEST(TreeEngine, RingSequenceMarksEnds) {
    const auto t = tree_of({-1, 0, 0});
    const std::vector<NeighborLabel> labels{label("CCNNNN"), label("PNNNNN"), label("NPNNNN")};
    const auto seq = ring_label_sequence(euler_ring(t), labels);
    ASSERT_EQ(seq.size(), 5u);
    EXPECT_TRUE(seq.front().root_mark());
    EXPECT_TRUE(seq.back().last_mark());
    EXPECT_FALSE(seq[1].root_mark() || seq[1].last_mark());
}

TEST(TreeEngine, LfcThreeAgentRing) {
    // Agents A*, B, C with B as initiator.
    EulerRing ring;
    ring.agents = {{0, 1, 2, 1}, {1, 1, 0, 2}, {2, 1, 1, 0}};
    const std::uint32_t A = label("CNNNNN").bits | NeighborLabel::kRootMark;
    const std::uint32_t B = label("PNNNNN").bits;
    const std::uint32_t C = label("NNNNNE").bits;
    LfcRing lfc(ring, {A, B, C}, 1);
    const auto got = lfc.run_alignment(1);
    EXPECT_EQ(got, (std::vector<std::uint32_t>{C, A}));
    EXPECT_EQ(lfc.agents()[1].q[0], A);
    for (const auto& a : lfc.agents()) EXPECT_EQ(a.count, 1);
}

TEST(TreeEngine, LfcFullCircleFromRootAgent) {
    const auto t = tree_of({-1, 0, 1, 1, 0});
    std::vector<NeighborLabel> labels;
    for (const char* s : {"CNNCNN", "PCNNCN", "NNNPNN", "NNPNNN", "NNNNNP"}) labels.push_back(label(s));
    const EulerRing ring = euler_ring(t);
    const auto seq = bits(ring_label_sequence(ring, labels));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        LfcRing lfc(ring, seq, 0);
        const auto got = lfc.run_alignment(seed);
        std::vector<std::uint32_t> want(seq.begin() + 1, seq.end());
        want.push_back(seq.front());
        EXPECT_EQ(got, want);
    }
}

TEST(TreeEngine, LfcOneAgentRing) {
    const EulerRing ring = euler_ring(tree_of({-1}));
    LfcRing lfc(ring, {label("NNNNNN").bits | NeighborLabel::kRootMark | NeighborLabel::kLastMark}, 0);
    EXPECT_TRUE(lfc.run_alignment(0).empty());
    EXPECT_EQ(lfc.relay_activations(), 0u);
}

TEST(TreeEngine, LfcFromEveryInitiator) {
    const auto t = tree_of({-1, 0, 0, 1, 1, 2, 5});
    std::vector<NeighborLabel> labels;
    for (int v = 0; v < 7; ++v) {
        NeighborLabel l;
        for (PortId p = 0; p < 6; ++p) l.set(p, static_cast<LabelChar>((v + p) % 6));
        labels.push_back(l);
    }
    const EulerRing ring = euler_ring(t);
    const auto seq = bits(ring_label_sequence(ring, labels));
    const int m = ring.size();
    for (int k = 0; k < m; ++k) {
        LfcRing lfc(ring, seq, k);
        const auto got = lfc.run_alignment(static_cast<std::uint64_t>(k));
        std::vector<std::uint32_t> want;
        for (int j = 1; j <= (k == 0 ? m : m - k); ++j) want.push_back(seq[static_cast<std::size_t>((k + j) % m)]);
        EXPECT_EQ(got, want) << "initiator " << k;
    }
}

TEST(TreeEngine, RelayRules) {
    LfcAgent a;
    a.push_back(7);
    LfcPreView pre{true, 0, false};
    auto act = lfc_relay_step(a, pre);
    EXPECT_TRUE(act.push);
    EXPECT_EQ(act.label, 7u);
    EXPECT_EQ(a.count, 0);

    LfcAgent b;
    b.push_back(1);
    pre = {true, 1, false};
    EXPECT_FALSE(lfc_relay_step(b, pre).push);  // one label, pre busy, no pull
    pre.accepting_initiator = true;
    EXPECT_TRUE(lfc_relay_step(b, pre).push);

    LfcAgent c;
    c.push_back(1);
    c.push_back(2);
    pre = {true, 2, false};
    EXPECT_FALSE(lfc_relay_step(c, pre).push);  // pre full
    pre.count = 1;
    act = lfc_relay_step(c, pre);
    EXPECT_EQ(act.label, 1u);  // oldest first

    LfcAgent d;
    d.push_back(3);
    d.token = true;
    act = lfc_relay_step(d, {true, 1, false});
    EXPECT_TRUE(act.token);
    EXPECT_FALSE(act.push);
    EXPECT_EQ(d.count, 1);
}
