#pragma once

#include <map>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"

namespace eloreview {

// Fixed base rewards for the top, middle, and bottom rank of a triplet.
// Must sum to zero, be strictly descending, and have even adjacent-pair
// sums so every tie split stays integer-exact.
struct RankReward {
    std::array<int, 3> base = {100, 0, -100};

    friend bool operator==(const RankReward&, const RankReward&) = default;
};

std::vector<std::string> validate_rewards(const RankReward& rewards);

// Reviewers grouped by equal quality score, groups in descending score
// order. Ids within a group are sorted; no rank order is implied among them.
using TieGroup = std::vector<std::string>;
using Ranking = std::vector<TieGroup>;

// Groups exactly three scored reviewers into a descending ranking.
// Throws std::invalid_argument on wrong cardinality.
Ranking rank_triplet(const std::map<std::string, int>& scores);

// Assigns base rewards by rank. A tie group spanning several ranks receives
// the exact arithmetic mean of the rewards it spans, each member equally,
// so the output always sums to zero. With the default rewards the only tie
// values are +50, 0, and -50.
std::map<std::string, int> elo_deltas(const Ranking& ranking,
                                      const RankReward& rewards = {});

// Deltas for one paper's triplet, kept with the paper so reviewer history
// can name what was reviewed.
struct TripletDeltas {
    std::string paper_id;
    std::map<std::string, int> deltas;
};

// Applies one round's deltas: elo incremented, history appended, everyone
// else untouched. All triplets of a round are applied together. Throws
// std::invalid_argument on an unknown reviewer id or a reviewer appearing
// in more than one triplet.
std::vector<ReviewerState> apply_round(std::vector<ReviewerState> states,
                                       int round_index,
                                       const std::vector<TripletDeltas>& round_deltas);

}  // namespace eloreview
