#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace eloreview {

using json = nlohmann::json;

// Disclosure regime for one experiment. Baseline hides Elo from everyone,
// ACAccess shows it to the area chair only, FullAccess additionally feeds
// each reviewer its own rating change and enables the memory module.
enum class Mode { Baseline, ACAccess, FullAccess };

enum class Decision { Accept, Reject };

enum class ReviewStage { Initial, Second };

// Closed set of reviewer behavior profiles.
enum class PersonaId { Expert, Critic, Bluffer, Optimist, Harmonizer, Skimmer };

inline constexpr std::array<PersonaId, 6> kAllPersonas = {
    PersonaId::Expert,    PersonaId::Critic,     PersonaId::Bluffer,
    PersonaId::Optimist,  PersonaId::Harmonizer, PersonaId::Skimmer,
};

inline constexpr int kReviewerCount = 6;
inline constexpr int kTripletSize = 3;

std::string to_string(Mode mode);
std::string to_string(Decision decision);
std::string to_string(ReviewStage stage);
std::string to_string(PersonaId persona);

Mode mode_from_string(const std::string& text);
Decision decision_from_string(const std::string& text);
ReviewStage stage_from_string(const std::string& text);
PersonaId persona_from_string(const std::string& text);

// One submission in the review pool. ground_truth is the externally supplied
// accept/reject label decisions are later scored against.
struct Paper {
    std::string id;
    std::string title;
    std::string body;
    double avg_rating = 0.0;       // source-venue average score, in [1, 10]
    double rating_variance = 0.0;  // >= 0
    Decision ground_truth = Decision::Reject;

    friend bool operator==(const Paper&, const Paper&) = default;
};

std::vector<std::string> validate_paper(const Paper& paper);

struct HistoryEntry {
    int round_index = 0;
    std::string paper_id;
    int delta = 0;

    friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct ReviewerState {
    std::string id;
    PersonaId persona = PersonaId::Expert;
    int elo = 0;
    std::string memory;  // empty at all times outside FullAccess
    std::vector<HistoryEntry> history;

    friend bool operator==(const ReviewerState&, const ReviewerState&) = default;
};

struct Review {
    std::string paper_id;
    std::string reviewer_id;
    ReviewStage stage = ReviewStage::Initial;
    int rating = 0;      // 1..10
    int confidence = 0;  // 1..5
    std::string summary;
    std::string strengths;
    std::string weaknesses;

    friend bool operator==(const Review&, const Review&) = default;
};

std::vector<std::string> validate_review(const Review& review);

struct ACOutcome {
    std::string paper_id;
    Decision decision = Decision::Reject;
    std::map<std::string, int> quality_scores;  // reviewer id -> 1..10
    std::string rationale;

    friend bool operator==(const ACOutcome&, const ACOutcome&) = default;
};

// Full record of one round: who reviewed what, both review stages, AC
// outcomes, and the Elo bookkeeping. elo_after covers all six reviewers.
struct RoundRecord {
    int round_index = 0;  // 1-based
    std::map<std::string, std::array<std::string, 3>> assignments;
    std::vector<Review> initial_reviews;
    std::vector<Review> second_reviews;
    std::vector<ACOutcome> ac_outcomes;
    std::map<std::string, int> elo_deltas;
    std::map<std::string, int> elo_after;

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

std::vector<std::string> validate_round_record(const RoundRecord& record);

struct ProviderSettings {
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    int max_retries = 3;          // additional attempts after the first
    int retry_backoff_ms = 500;   // doubled per retry
    int concurrency = 4;          // in-flight request cap
    double requests_per_second = 4.0;  // token bucket rate, 0 disables

    friend bool operator==(const ProviderSettings&, const ProviderSettings&) = default;
};

struct ExperimentConfig {
    Mode mode = Mode::Baseline;
    int rounds = 30;
    int papers_per_round = 2;
    int initial_elo = 1500;
    std::uint64_t rng_seed = 0;
    ProviderSettings provider;
    int memory_word_cap = 150;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Returns the complete list of invariant violations; empty means valid.
std::vector<std::string> validate_config(const ExperimentConfig& config);

void to_json(json& j, const Paper& paper);
void from_json(const json& j, Paper& paper);
void to_json(json& j, const HistoryEntry& entry);
void from_json(const json& j, HistoryEntry& entry);
void to_json(json& j, const ReviewerState& state);
void from_json(const json& j, ReviewerState& state);
void to_json(json& j, const Review& review);
void from_json(const json& j, Review& review);
void to_json(json& j, const ACOutcome& outcome);
void from_json(const json& j, ACOutcome& outcome);
void to_json(json& j, const RoundRecord& record);
void from_json(const json& j, RoundRecord& record);
void to_json(json& j, const ProviderSettings& settings);
void from_json(const json& j, ProviderSettings& settings);
void to_json(json& j, const ExperimentConfig& config);
void from_json(const json& j, ExperimentConfig& config);

}  // namespace eloreview
