#include <gtest/gtest.h>

#include "pmelect/competition.hpp"

using namespace pmelect;

namespace {

NeighborLabel L(LabelChar c0, bool last = false) {
    NeighborLabel l;
    l.set(0, c0);
    if (last) l.bits |= NeighborLabel::kLastMark;
    return l;
}

}  // namespace

TEST(Competition, IdenticalEncodingsDraw) {
    const std::vector<NeighborLabel> s{L(LabelChar::C), L(LabelChar::P), L(LabelChar::C, true)};
    EXPECT_EQ(compare_streams(s, s), ComparisonOutcome::Draw);
    EXPECT_EQ(lexicographic_oracle(s, s), ComparisonOutcome::Draw);
}

TEST(Competition, FirstDifferenceDecides) {
    const std::vector<NeighborLabel> own{L(LabelChar::C), L(LabelChar::N, true)};
    const std::vector<NeighborLabel> other{L(LabelChar::D), L(LabelChar::P, true)};
    EXPECT_EQ(compare_streams(own, other), ComparisonOutcome::Win);
    EXPECT_EQ(compare_streams(other, own), ComparisonOutcome::Lose);
}

TEST(Competition, SymbolOrder) {
    const LabelChar order[] = {LabelChar::P, LabelChar::C, LabelChar::D, LabelChar::DU, LabelChar::E, LabelChar::N};
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            const auto o = decide_position(L(order[a]), L(order[b]));
            const auto want = a < b ? ComparisonOutcome::Win : a > b ? ComparisonOutcome::Lose : ComparisonOutcome::None;
            EXPECT_EQ(o, want);
        }
    }
}

TEST(Competition, ShorterEqualPrefixLoses) {
    const std::vector<NeighborLabel> own{L(LabelChar::E), L(LabelChar::E, true)};
    const std::vector<NeighborLabel> other{L(LabelChar::E), L(LabelChar::E), L(LabelChar::E, true)};
    EXPECT_EQ(compare_streams(own, other), ComparisonOutcome::Lose);
    EXPECT_EQ(compare_streams(other, own), ComparisonOutcome::Win);
    EXPECT_EQ(lexicographic_oracle(own, other), ComparisonOutcome::Lose);
}

TEST(Competition, DrawTakesPrecedenceOverLastMark) {
    EXPECT_EQ(decide_position(L(LabelChar::N, true), L(LabelChar::N, true)), ComparisonOutcome::Draw);
    EXPECT_EQ(decide_position(L(LabelChar::N, true), L(LabelChar::N)), ComparisonOutcome::Lose);
    EXPECT_EQ(decide_position(L(LabelChar::N), L(LabelChar::N, true)), ComparisonOutcome::Win);
    EXPECT_EQ(decide_position(L(LabelChar::P, true), L(LabelChar::N)), ComparisonOutcome::Win);
}

TEST(Competition, Duality) {
    EXPECT_EQ(dual(ComparisonOutcome::Win), ComparisonOutcome::Lose);
    EXPECT_EQ(dual(ComparisonOutcome::Lose), ComparisonOutcome::Win);
    EXPECT_EQ(dual(ComparisonOutcome::Draw), ComparisonOutcome::Draw);
}

TEST(Competition, StreamsMatchOracleOnSmallAlphabet) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> len(1, 6), ch(0, 1);
    for (int it = 0; it < 500; ++it) {
        std::vector<NeighborLabel> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
        for (auto& l : a) l = L(static_cast<LabelChar>(ch(rng)));
        for (auto& l : b) l = L(static_cast<LabelChar>(ch(rng)));
        a.back().bits |= NeighborLabel::kLastMark;
        b.back().bits |= NeighborLabel::kLastMark;
        EXPECT_EQ(compare_streams(a, b), lexicographic_oracle(a, b));
        EXPECT_EQ(compare_streams(b, a), dual(compare_streams(a, b)));
    }
}
