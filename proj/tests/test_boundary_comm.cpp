#include <gtest/gtest.h>

#include "pmelect/boundary_comm.hpp"
#include "pmelect/generators.hpp"

using namespace pmelect;

TEST(BoundaryComm, GreyDetectionExamples) {
    EXPECT_EQ(detect_common_chirality_grey(1, 4), ChiralityRelation::Same);
    EXPECT_EQ(detect_common_chirality_grey(1, 2), ChiralityRelation::Different);
    EXPECT_EQ(detect_common_chirality_grey(2, 5), ChiralityRelation::Same);
    EXPECT_THROW(detect_common_chirality_grey(0, 3), HorizontalPort);
    EXPECT_THROW(detect_common_chirality_grey(1, 3), HorizontalPort);
}

TEST(BoundaryComm, LbeDetectionExamples) {
    using R = ChiralityRelation;
    EXPECT_EQ(detect_common_chirality_lbe(R::Same, R::Same), R::Same);
    EXPECT_EQ(detect_common_chirality_lbe(R::Same, R::Different), R::Different);
    EXPECT_EQ(detect_common_chirality_lbe(R::Different, R::Different), R::Same);
}

TEST(BoundaryComm, OutgoingLabelExamples) {
    EXPECT_EQ(outgoing_boundary_label(ChiralityRelation::Same, 2, 1, 5), 0);
    EXPECT_EQ(outgoing_boundary_label(ChiralityRelation::Different, 2, 1, 5), 4);
    EXPECT_EQ(outgoing_boundary_label(ChiralityRelation::Same, 2, 3, 5), 4);
    EXPECT_EQ(outgoing_boundary_label(ChiralityRelation::Different, 2, 3, 5), 0);
    EXPECT_THROW(outgoing_boundary_label(ChiralityRelation::Same, 2, 5, 5), NotOnBoundary);
}

TEST(BoundaryComm, OutgoingLabelPointsAtSharedEmptyNode) {
    // Receiver port y, sender port x and i: the label must name the same empty node from the receiver.
    const Chirality both[] = {Chirality::Standard, Chirality::Flipped};
    const NodeCoord u{0, 0};
    for (PortId d = 0; d < 6; ++d) {
        for (Chirality cu : both) {
            for (Chirality cv : both) {
                const NodeCoord v = neighbor_of(u, d, Chirality::Standard);
                const PortId x = port_between(u, v, cu);
                const PortId y = port_between(v, u, cv);
                const auto rel = cu == cv ? ChiralityRelation::Same : ChiralityRelation::Different;
                for (PortId i : {port_add(x, 1), port_add(x, -1)}) {
                    const NodeCoord o = neighbor_of(u, i, cu);
                    const PortId j = outgoing_boundary_label(rel, x, i, y);
                    EXPECT_EQ(neighbor_of(v, j, cv), o);
                }
            }
        }
    }
}

TEST(BoundaryComm, ForwardPicksFirstOccupiedPort) {
    // Visible ports 3 and 0; message came in through 3 with label 4: sweep 4, 5 then 0.
    const std::uint8_t visible = (1u << 0) | (1u << 3);
    const auto d = forward_on_boundary(visible, 3, 4);
    EXPECT_EQ(d.next_port, 0);
    EXPECT_EQ(d.witness_port, 5);
    const auto e = forward_on_boundary(visible, 3, 2);
    EXPECT_EQ(e.next_port, 0);
    EXPECT_EQ(e.witness_port, 1);
    EXPECT_THROW(forward_on_boundary(visible, 3, 0), NotOnBoundary);
    EXPECT_THROW(forward_on_boundary(visible, 3, 5), NotOnBoundary);
}

TEST(BoundaryComm, ForwardReturnsToSenderAtALeaf) {
    const std::uint8_t visible = 1u << 1;
    const auto d = forward_on_boundary(visible, 1, 2);
    EXPECT_EQ(d.next_port, 1);
    EXPECT_EQ(d.witness_port, 0);
}

TEST(BoundaryComm, LocalViewsMaskDarkBlue) {
    Configuration c;
    c.nodes = {{0, 0}, {2, 0}, {1, 1}, {4, 0}};
    c.chirality = {Chirality::Standard, Chirality::Flipped, Chirality::Standard, Chirality::Flipped};
    const auto v = build_local_views(c);
    EXPECT_TRUE(v[0].has(v[0].visible, 0));
    EXPECT_FALSE(v[1].has(v[1].visible, 0));
    EXPECT_TRUE(v[1].has(v[1].dark_blue, 0));
    EXPECT_TRUE(v[3].has(v[3].dark_blue, 3));
    EXPECT_EQ(v[0].relation(0), ChiralityRelation::Different);
    EXPECT_EQ(v[0].relation(1), ChiralityRelation::Same);
    EXPECT_EQ(v[1].relation(4), ChiralityRelation::Different);
}

TEST(BoundaryComm, SectorsCoverEmptyPorts) {
    const Configuration c = [] {
        Configuration k = gen_random(35, 9);
        assign_chirality_from_seed(k);
        return k;
    }();
    const auto views = build_local_views(c);
    for (const auto& v : views) {
        int covered = 0;
        for (int s = 0; s < v.sectors; ++s) covered += v.sector_len[static_cast<std::size_t>(s)];
        int empty = 0;
        for (PortId p = 0; p < 6; ++p) empty += v.has(v.visible, p) ? 0 : 1;
        if (v.visible != 0) {
            EXPECT_EQ(covered, empty);
        }
        EXPECT_LE(v.sectors, 3);
    }
}
