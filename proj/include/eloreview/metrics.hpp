#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eloreview/domain.hpp"
#include "eloreview/transcript.hpp"

namespace eloreview {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accept is the positive class throughout.
struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;

    long long total() const { return tp + fp + fn + tn; }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const std::vector<std::pair<Decision, Decision>>& decisions);

struct Scores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Undefined ratios (zero denominators) are reported as 0 rather than NaN.
// Throws std::invalid_argument when all counts are zero.
Scores metrics(const ConfusionCounts& counts);

// (predicted, ground truth) for every AC decision, with ground truth looked
// up in the pool embedded in the transcript header.
std::vector<std::pair<Decision, Decision>> decision_pairs(const Transcript& transcript);

// Per-reviewer Elo series over round boundaries: index 0 is the initial Elo,
// index k the Elo after round k. Every series has length rounds + 1.
using TrajectorySet = std::map<std::string, std::vector<int>>;

TrajectorySet trajectories(const Transcript& transcript);

std::string render_elo_svg(const TrajectorySet& series, int initial_elo);

// Writes metrics.csv, trajectories.csv, elo.svg, and report.txt into out_dir
// (created if needed). CSVs carry full precision; report.txt rounds to two
// decimals for presentation only.
void emit_report(const Transcript& transcript, const std::filesystem::path& out_dir);

}  // namespace eloreview
