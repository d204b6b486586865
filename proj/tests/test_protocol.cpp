#include <gtest/gtest.h>

#include <sstream>

#include "pmelect/experiment.hpp"

using namespace pmelect;

namespace {

const char* const kModes[] = {"sync", "seqrr", "seqrand", "async"};

}  // namespace

TEST(Protocol, FamiliesElectOneLeaderInEveryMode) {
    const std::vector<Configuration> configs{gen_s1(), gen_fig1(), gen_path(7), gen_fig5(8), gen_fig6(2),
                                             gen_random(25, 11)};
    for (const auto& c : configs) {
        for (const char* mode : kModes) {
            for (std::uint64_t seed : {1u, 2u}) {
                const RunRecord r = run_once(c, mode, seed);
                EXPECT_TRUE(r.quiescent) << mode << " n=" << c.size();
                EXPECT_EQ(r.leaders, 1) << mode << " n=" << c.size();
                EXPECT_EQ(r.tree_error, "") << mode << " n=" << c.size();
            }
        }
    }
}

TEST(Protocol, MergesJoinAllGreyComponents) {
    const Configuration c = gen_fig5(16);
    const RunRecord r = run_once(c, "sync", 3);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.metrics.merges, 9u);
    EXPECT_GT(r.metrics.comparisons, 0u);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Configuration g = gen_random(30, 100 + seed);
        const RunRecord q = run_once(g, "async", seed);
        ASSERT_TRUE(q.ok());
        EXPECT_EQ(q.metrics.merges + 1, grey_components(q.config).size());
    }
}

TEST(Protocol, TreeIsRootedAtTheLeader) {
    const Configuration c = gen_fig1();
    oracle::ElectionWorld w(c, 9);
    w.run_to_quiescence(ScheduleMode::async_subset(), 10 * c.size());
    const auto forest = oracle::parent_forest(w);
    EXPECT_TRUE(forest.error.empty()) << forest.error;
    int roots = 0;
    for (int i = 0; i < w.size(); ++i)
        if (w.state(i).tree.parent < 0) {
            ++roots;
            EXPECT_TRUE(w.state(i).is_leader());
        }
    EXPECT_EQ(roots, 1);
}

TEST(Protocol, RunsAreDeterministic) {
    const Configuration c = gen_random(20, 4);
    for (const char* mode : kModes) {
        std::ostringstream a, b;
        const RunRecord ra = run_once(c, mode, 8, 0, 0, &a);
        const RunRecord rb = run_once(c, mode, 8, 0, 0, &b);
        EXPECT_EQ(a.str(), b.str());
        EXPECT_EQ(metrics_csv_row(ra), metrics_csv_row(rb));
        EXPECT_EQ(ra.final_state.dump(), rb.final_state.dump());
    }
}

TEST(Protocol, TraceHasOneLinePerTick) {
    std::ostringstream t;
    const RunRecord r = run_once(gen_s1(), "seqrand", 1, 0, 0, &t);
    const std::string s = t.str();
    EXPECT_EQ(static_cast<std::uint64_t>(std::count(s.begin(), s.end(), '\n')), r.metrics.ticks);
    EXPECT_EQ(s.rfind("t=0 ", 0), 0u);
}
