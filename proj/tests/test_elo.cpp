#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "eloreview/elo.hpp"
#include "eloreview/rng.hpp"
#include "support.hpp"

using namespace eloreview;
using namespace testsupport;

namespace {

// Independent positional oracle: sort ids by score descending, hand out the
// base rewards by position, then average positions within each score class.
std::map<std::string, int> positional_deltas(const std::map<std::string, int>& scores,
                                             const RankReward& rewards = {}) {
    std::vector<std::pair<std::string, int>> ordered(scores.begin(), scores.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        return a.second > b.second;
    });
    std::map<std::string, int> out;
    std::size_t i = 0;
    while (i < ordered.size()) {
        std::size_t j = i;
        int sum = 0;
        while (j < ordered.size() && ordered[j].second == ordered[i].second) {
            sum += rewards.base[j];
            ++j;
        }
        const int span = static_cast<int>(j - i);
        REQUIRE(sum % span == 0);
        for (std::size_t k = i; k < j; ++k) out[ordered[k].first] = sum / span;
        i = j;
    }
    return out;
}

}  // namespace

TEST_CASE("distinct scores rank into three singleton groups") {
    const auto ranking = rank_triplet({{"A", 9}, {"B", 5}, {"C", 2}});
    REQUIRE(ranking.size() == 3);
    CHECK(ranking[0] == TieGroup{"A"});
    CHECK(ranking[1] == TieGroup{"B"});
    CHECK(ranking[2] == TieGroup{"C"});
}

TEST_CASE("a three-way tie collapses into a single group") {
    const auto ranking = rank_triplet({{"A", 7}, {"B", 7}, {"C", 7}});
    REQUIRE(ranking.size() == 1);
    CHECK(ranking[0] == TieGroup{"A", "B", "C"});
}

TEST_CASE("a two-way tie forms one pair group") {
    const auto ranking = rank_triplet({{"A", 8}, {"B", 8}, {"C", 3}});
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0] == TieGroup{"A", "B"});
    CHECK(ranking[1] == TieGroup{"C"});
}

TEST_CASE("rank_triplet rejects anything but three scores") {
    CHECK_THROWS_AS(rank_triplet({{"A", 1}, {"B", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(rank_triplet({{"A", 1}, {"B", 2}, {"C", 3}, {"D", 4}}),
                    std::invalid_argument);
}

TEST_CASE("deltas for a clean ranking are the base rewards") {
    const auto deltas = elo_deltas(rank_triplet({{"A", 9}, {"B", 5}, {"C", 2}}));
    CHECK(deltas == std::map<std::string, int>{{"A", 100}, {"B", 0}, {"C", -100}});
}

TEST_CASE("tie groups split the spanned rewards integer-exactly") {
    const auto top_tie = elo_deltas(rank_triplet({{"A", 8}, {"B", 8}, {"C", 3}}));
    CHECK(top_tie == std::map<std::string, int>{{"A", 50}, {"B", 50}, {"C", -100}});

    const auto bottom_tie = elo_deltas(rank_triplet({{"A", 7}, {"B", 4}, {"C", 4}}));
    CHECK(bottom_tie == std::map<std::string, int>{{"A", 100}, {"B", -50}, {"C", -50}});

    const auto full_tie = elo_deltas(rank_triplet({{"A", 6}, {"B", 6}, {"C", 6}}));
    CHECK(full_tie == std::map<std::string, int>{{"A", 0}, {"B", 0}, {"C", 0}});
}

TEST_CASE("custom rewards flow through tie splitting") {
    const RankReward rewards{{60, 0, -60}};
    const auto deltas = elo_deltas(rank_triplet({{"A", 8}, {"B", 8}, {"C", 3}}), rewards);
    CHECK(deltas == std::map<std::string, int>{{"A", 30}, {"B", 30}, {"C", -60}});
}

TEST_CASE("reward validation names each broken rule") {
    CHECK(validate_rewards({}).empty());
    CHECK(validate_rewards({{100, 0, -100}}).empty());

    auto errors = validate_rewards({{100, 10, -100}});
    REQUIRE(errors.size() == 1);
    CHECK(errors[0] == "base rewards must sum to 0");

    errors = validate_rewards({{0, 0, 0}});
    REQUIRE(errors.size() == 1);
    CHECK(errors[0] == "base rewards must be strictly descending");

    errors = validate_rewards({{101, 0, -101}});
    REQUIRE(errors.size() == 1);
    CHECK(errors[0] == "adjacent base reward sums must be even for integer tie splits");
}

TEST_CASE("elo_deltas rejects invalid rewards and malformed rankings") {
    const auto ranking = rank_triplet({{"A", 9}, {"B", 5}, {"C", 2}});
    CHECK_THROWS_WITH_AS(elo_deltas(ranking, RankReward{{100, 0, -50}}),
                         doctest::Contains("invalid rank rewards"),
                         std::invalid_argument);
    CHECK_THROWS_AS(elo_deltas(Ranking{{"A"}, {"B"}}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(elo_deltas(Ranking{{"A"}, {"A"}, {"B"}}),
                         doctest::Contains("duplicate reviewer"),
                         std::invalid_argument);
}

TEST_CASE("random score triplets obey the delta invariants") {
    Rng rng(20260818);
    const std::vector<int> allowed = {-100, -50, 0, 50, 100};
    for (int iteration = 0; iteration < 10000; ++iteration) {
        const std::map<std::string, int> scores{
            {"A", 1 + static_cast<int>(rng.below(10))},
            {"B", 1 + static_cast<int>(rng.below(10))},
            {"C", 1 + static_cast<int>(rng.below(10))}};
        const auto deltas = elo_deltas(rank_triplet(scores));

        int sum = 0;
        for (const auto& [id, delta] : deltas) {
            sum += delta;
            REQUIRE(std::find(allowed.begin(), allowed.end(), delta) != allowed.end());
        }
        REQUIRE(sum == 0);

        for (const auto& [a, score_a] : scores) {
            for (const auto& [b, score_b] : scores) {
                if (score_a > score_b) REQUIRE(deltas.at(a) > deltas.at(b));
                if (score_a == score_b) REQUIRE(deltas.at(a) == deltas.at(b));
            }
        }

        REQUIRE(deltas == positional_deltas(scores));
    }
}

TEST_CASE("delta computation ignores id insertion order") {
    const std::map<std::string, int> forward{{"A", 4}, {"B", 4}, {"C", 9}};
    std::map<std::string, int> reversed;
    reversed.emplace("C", 9);
    reversed.emplace("B", 4);
    reversed.emplace("A", 4);
    CHECK(elo_deltas(rank_triplet(forward)) == elo_deltas(rank_triplet(reversed)));
}

TEST_CASE("apply_round updates rating and history for participants only") {
    std::vector<ReviewerState> states;
    for (int i = 1; i <= 6; ++i)
        states.push_back({"r" + std::to_string(i), kAllPersonas[i - 1], 1500, "", {}});

    const std::vector<TripletDeltas> round = {
        {"p1", {{"r1", 100}, {"r2", 0}, {"r3", -100}}}};
    const auto after = apply_round(states, 1, round);

    CHECK(after[0].elo == 1600);
    CHECK(after[1].elo == 1500);
    CHECK(after[2].elo == 1400);
    REQUIRE(after[0].history.size() == 1);
    CHECK(after[0].history[0] == HistoryEntry{1, "p1", 100});
    REQUIRE(after[1].history.size() == 1);
    CHECK(after[1].history[0].delta == 0);
    for (int i = 3; i < 6; ++i) {
        CHECK(after[i].elo == 1500);
        CHECK(after[i].history.empty());
    }
}

TEST_CASE("apply_round rejects unknown and doubly-assigned reviewers") {
    std::vector<ReviewerState> states = {{"r1", PersonaId::Expert, 1500, "", {}},
                                         {"r2", PersonaId::Critic, 1500, "", {}},
                                         {"r3", PersonaId::Bluffer, 1500, "", {}}};
    CHECK_THROWS_WITH_AS(
        apply_round(states, 1, {{"p1", {{"r9", 100}, {"r2", 0}, {"r3", -100}}}}),
        doctest::Contains("unknown reviewer id 'r9'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        apply_round(states, 1,
                    {{"p1", {{"r1", 100}, {"r2", 0}, {"r3", -100}}},
                     {"p2", {{"r1", 100}, {"r2", 0}, {"r3", -100}}}}),
        doctest::Contains("more than one triplet"), std::invalid_argument);
}

TEST_CASE("thirty rounds of deltas track a running-sum oracle exactly") {
    std::vector<ReviewerState> states;
    for (int i = 1; i <= 6; ++i)
        states.push_back({"r" + std::to_string(i), kAllPersonas[i - 1], 1500, "", {}});
    std::map<std::string, int> oracle;
    for (const auto& state : states) oracle[state.id] = 1500;

    Rng rng(99);
    for (int round = 1; round <= 30; ++round) {
        std::vector<std::string> ids = {"r1", "r2", "r3", "r4", "r5", "r6"};
        rng.shuffle(ids);
        std::vector<TripletDeltas> round_deltas;
        for (int t = 0; t < 2; ++t) {
            std::map<std::string, int> scores;
            for (int k = 0; k < 3; ++k)
                scores[ids[t * 3 + k]] = 1 + static_cast<int>(rng.below(10));
            const auto deltas = elo_deltas(rank_triplet(scores));
            for (const auto& [id, delta] : deltas) oracle[id] += delta;
            round_deltas.push_back({"p" + std::to_string(round * 2 + t), deltas});
        }
        states = apply_round(std::move(states), round, round_deltas);
    }

    int total = 0;
    for (const auto& state : states) {
        CHECK(state.elo == oracle[state.id]);
        CHECK(state.history.size() == 30);
        int reconstructed = 1500;
        for (const auto& entry : state.history) reconstructed += entry.delta;
        CHECK(reconstructed == state.elo);
        total += state.elo;
    }
    CHECK(total == 9000);
}
