#include "eloreview/elo.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace eloreview {

std::vector<std::string> validate_rewards(const RankReward& rewards) {
    std::vector<std::string> errors;
    const auto& b = rewards.base;
    if (b[0] + b[1] + b[2] != 0) errors.push_back("base rewards must sum to 0");
    if (!(b[0] > b[1] && b[1] > b[2]))
        errors.push_back("base rewards must be strictly descending");
    if ((b[0] + b[1]) % 2 != 0 || (b[1] + b[2]) % 2 != 0)
        errors.push_back("adjacent base reward sums must be even for integer tie splits");
    return errors;
}

Ranking rank_triplet(const std::map<std::string, int>& scores) {
    if (scores.size() != kTripletSize)
        throw std::invalid_argument("rank_triplet requires exactly 3 scores, got " +
                                    std::to_string(scores.size()));

    // Distinct scores, descending.
    std::set<int, std::greater<int>> levels;
    for (const auto& [id, score] : scores) levels.insert(score);

    Ranking ranking;
    for (int level : levels) {
        TieGroup group;
        for (const auto& [id, score] : scores) {
            if (score == level) group.push_back(id);
        }
        std::sort(group.begin(), group.end());
        ranking.push_back(std::move(group));
    }
    return ranking;
}

std::map<std::string, int> elo_deltas(const Ranking& ranking, const RankReward& rewards) {
    const auto reward_errors = validate_rewards(rewards);
    if (!reward_errors.empty())
        throw std::invalid_argument("invalid rank rewards: " + reward_errors.front());

    std::size_t covered = 0;
    for (const auto& group : ranking) covered += group.size();
    if (covered != kTripletSize || ranking.empty())
        throw std::invalid_argument("ranking must cover exactly 3 reviewers");

    std::map<std::string, int> deltas;
    std::size_t rank = 0;
    for (const auto& group : ranking) {
        // Mean of the base rewards this tie group spans.
        int span_sum = 0;
        for (std::size_t i = 0; i < group.size(); ++i)
            span_sum += rewards.base[rank + i];
        const int size = static_cast<int>(group.size());
        if (span_sum % size != 0)
            throw std::logic_error("tie split is not integer-exact");
        const int share = span_sum / size;
        for (const auto& id : group) {
            if (!deltas.emplace(id, share).second)
                throw std::invalid_argument("duplicate reviewer '" + id + "' in ranking");
        }
        rank += group.size();
    }
    return deltas;
}

std::vector<ReviewerState> apply_round(std::vector<ReviewerState> states,
                                       int round_index,
                                       const std::vector<TripletDeltas>& round_deltas) {
    std::set<std::string> touched;
    for (const auto& triplet : round_deltas) {
        for (const auto& [reviewer_id, delta] : triplet.deltas) {
            if (!touched.insert(reviewer_id).second)
                throw std::invalid_argument("reviewer '" + reviewer_id +
                                            "' appears in more than one triplet");
            auto it = std::find_if(states.begin(), states.end(),
                                   [&](const ReviewerState& s) { return s.id == reviewer_id; });
            if (it == states.end())
                throw std::invalid_argument("unknown reviewer id '" + reviewer_id + "'");
            it->elo += delta;
            it->history.push_back({round_index, triplet.paper_id, delta});
        }
    }
    return states;
}

}  // namespace eloreview
