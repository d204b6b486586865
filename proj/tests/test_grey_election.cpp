#include <gtest/gtest.h>

#include "pmelect/grey_election.hpp"

using namespace pmelect;

TEST(GreyElection, TurningOfWords) {
    EXPECT_EQ(turning_of_word({4, 4, 4}), -6);
    EXPECT_EQ(turning_of_word({1, 1, 1, 1, 1, 1}), 6);
    EXPECT_EQ(turning_of_word({5, 5}), -6);
}

TEST(GreyElection, ElectHeadsExamples) {
    for (int off = 0; off < 3; ++off) {
        const auto h = elect_heads({4, 4, 4}, off);
        EXPECT_TRUE(h.head);
        EXPECT_EQ(h.k, 3);
    }
    EXPECT_TRUE(elect_heads({3, 4, 3, 2}, 3).head);
    EXPECT_EQ(elect_heads({3, 4, 3, 2}, 3).k, 1);
    for (int off : {0, 1, 2}) EXPECT_FALSE(elect_heads({3, 4, 3, 2}, off).head);
    EXPECT_TRUE(elect_heads({1, 2, 1, 2}, 0).head);
    EXPECT_TRUE(elect_heads({1, 2, 1, 2}, 2).head);
    EXPECT_FALSE(elect_heads({1, 2, 1, 2}, 1).head);
    EXPECT_EQ(elect_heads({1, 2, 1, 2}, 0).k, 2);
}

TEST(GreyElection, ComputedIds) {
    EXPECT_EQ(computed_ids(5, 2), (std::vector<PortId>{5, 2}));
    EXPECT_EQ(computed_ids(1, 3), (std::vector<PortId>{1, 3, 5}));
    EXPECT_EQ(computed_ids(4, 6), (std::vector<PortId>{4, 5, 0, 1, 2, 3}));
    EXPECT_EQ(computed_ids(2, 1), (std::vector<PortId>{2}));
}

TEST(GreyElection, SurvivorExamples) {
    EXPECT_TRUE(select_survivor(make_head_record(Direction::D1, 0, 1)));
    EXPECT_TRUE(select_survivor(make_head_record(Direction::D1, 5, 2)));
    EXPECT_FALSE(select_survivor(make_head_record(Direction::D1, 2, 2)));
    HeadRecord r{Direction::D2, 4, 2, {4, 3}};
    EXPECT_FALSE(select_survivor(r));
}

TEST(GreyElection, ExactlyOneSurvivorAmongSymmetricHeads) {
    // Heads at symmetric positions see ports rotated by 6/k; exactly one outranks the rest.
    for (int k : {1, 2, 3, 6}) {
        for (PortId a = 0; a < 6; ++a) {
            int survivors = 0;
            for (PortId id : computed_ids(a, k)) survivors += select_survivor(make_head_record(Direction::D1, id, k));
            EXPECT_EQ(survivors, 1) << "k=" << k << " a=" << a;
            if (k == 3 || k == 6) {
                const auto ids = computed_ids(a, k);
                EXPECT_TRUE(std::find(ids.begin(), ids.end(), 0) != ids.end() ||
                            std::find(ids.begin(), ids.end(), 3) != ids.end());
            }
        }
    }
}

TEST(GreyElection, RankOrder) {
    EXPECT_GT(id_rank(0), id_rank(3));
    EXPECT_GT(id_rank(3), id_rank(1));
    EXPECT_EQ(id_rank(1), id_rank(5));
    EXPECT_GT(id_rank(5), id_rank(2));
    EXPECT_EQ(id_rank(2), id_rank(4));
}

TEST(GreyElection, TieKeyPrefersSmallerArrivalPort) {
    EXPECT_LT(tie_key(1, 4), tie_key(2, 0));
    EXPECT_EQ(tie_key(-1, 3), 3);
}
