#pragma once

#include <cstdint>
#include <vector>

#include "tree_engine.hpp"

namespace pmelect {

enum class ComparisonOutcome : std::uint8_t { None, Win, Lose, Draw };

inline const char* to_string(ComparisonOutcome o) {
    switch (o) {
        case ComparisonOutcome::None: return "None";
        case ComparisonOutcome::Win: return "Win";
        case ComparisonOutcome::Lose: return "Lose";
        case ComparisonOutcome::Draw: return "Draw";
    }
    return "?";
}

inline ComparisonOutcome dual(ComparisonOutcome o) {
    if (o == ComparisonOutcome::Win) return ComparisonOutcome::Lose;
    if (o == ComparisonOutcome::Lose) return ComparisonOutcome::Win;
    return o;
}

// One lockstep position. Returns None when both labels agree and neither stream ended.
// Both-last is checked before the one-sided rules.
inline ComparisonOutcome decide_position(NeighborLabel own, NeighborLabel other) {
    const int c = compare_label_chars(own, other);
    if (c > 0) return ComparisonOutcome::Win;
    if (c < 0) return ComparisonOutcome::Lose;
    if (own.last_mark() && other.last_mark()) return ComparisonOutcome::Draw;
    if (own.last_mark()) return ComparisonOutcome::Lose;
    if (other.last_mark()) return ComparisonOutcome::Win;
    return ComparisonOutcome::None;
}

// Streams are cyclic-DFS label sequences starting at the root-label and ending with the last-node mark.
inline ComparisonOutcome compare_streams(const std::vector<NeighborLabel>& own, const std::vector<NeighborLabel>& other) {
    for (std::size_t i = 0; i < own.size() && i < other.size(); ++i) {
        const auto o = decide_position(own[i], other[i]);
        if (o != ComparisonOutcome::None) return o;
    }
    return ComparisonOutcome::None;
}

// Global oracle: lexicographic order of the character sequences, shorter sequence loses a tie.
inline ComparisonOutcome lexicographic_oracle(const std::vector<NeighborLabel>& own,
                                              const std::vector<NeighborLabel>& other) {
    const std::size_t m = std::min(own.size(), other.size());
    for (std::size_t i = 0; i < m; ++i) {
        const int c = compare_label_chars(own[i], other[i]);
        if (c != 0) return c > 0 ? ComparisonOutcome::Win : ComparisonOutcome::Lose;
    }
    if (own.size() == other.size()) return ComparisonOutcome::Draw;
    return own.size() < other.size() ? ComparisonOutcome::Lose : ComparisonOutcome::Win;
}

// Sequence of node labels in Euler-ring order with the two root marks set.
inline std::vector<NeighborLabel> ring_label_sequence(const EulerRing& ring, const std::vector<NeighborLabel>& node_labels) {
    std::vector<NeighborLabel> out;
    for (const auto& a : ring.agents) out.push_back(node_labels[static_cast<std::size_t>(a.node)]);
    if (!out.empty()) {
        out.front().bits |= NeighborLabel::kRootMark;
        out.back().bits |= NeighborLabel::kLastMark;
    }
    return out;
}

}  // namespace pmelect
