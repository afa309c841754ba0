#include "eloreview/domain.hpp"

#include <set>
#include <stdexcept>

namespace eloreview {

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Baseline: return "baseline";
        case Mode::ACAccess: return "ac-access";
        case Mode::FullAccess: return "full-access";
    }
    throw std::logic_error("unknown mode");
}

std::string to_string(Decision decision) {
    return decision == Decision::Accept ? "Accept" : "Reject";
}

std::string to_string(ReviewStage stage) {
    return stage == ReviewStage::Initial ? "Initial" : "Second";
}

std::string to_string(PersonaId persona) {
    switch (persona) {
        case PersonaId::Expert: return "expert";
        case PersonaId::Critic: return "critic";
        case PersonaId::Bluffer: return "bluffer";
        case PersonaId::Optimist: return "optimist";
        case PersonaId::Harmonizer: return "harmonizer";
        case PersonaId::Skimmer: return "skimmer";
    }
    throw std::logic_error("unknown persona");
}

Mode mode_from_string(const std::string& text) {
    if (text == "baseline") return Mode::Baseline;
    if (text == "ac-access") return Mode::ACAccess;
    if (text == "full-access") return Mode::FullAccess;
    throw std::invalid_argument("unknown mode '" + text +
                                "' (expected baseline, ac-access, or full-access)");
}

Decision decision_from_string(const std::string& text) {
    if (text == "Accept") return Decision::Accept;
    if (text == "Reject") return Decision::Reject;
    throw std::invalid_argument("unknown decision '" + text + "' (expected Accept or Reject)");
}

ReviewStage stage_from_string(const std::string& text) {
    if (text == "Initial") return ReviewStage::Initial;
    if (text == "Second") return ReviewStage::Second;
    throw std::invalid_argument("unknown review stage '" + text + "'");
}

PersonaId persona_from_string(const std::string& text) {
    for (PersonaId p : kAllPersonas) {
        if (to_string(p) == text) return p;
    }
    throw std::invalid_argument("unknown persona '" + text + "'");
}

std::vector<std::string> validate_paper(const Paper& paper) {
    std::vector<std::string> errors;
    if (paper.id.empty()) errors.push_back("id must be non-empty");
    if (paper.id.find('/') != std::string::npos)
        errors.push_back("id must not contain '/' (ids are embedded in call tags)");
    if (paper.avg_rating < 1.0 || paper.avg_rating > 10.0)
        errors.push_back("avg_rating must be in [1, 10]");
    if (paper.rating_variance < 0.0)
        errors.push_back("rating_variance must be >= 0");
    return errors;
}

std::vector<std::string> validate_review(const Review& review) {
    std::vector<std::string> errors;
    if (review.rating < 1 || review.rating > 10)
        errors.push_back("rating must be in [1, 10]");
    if (review.confidence < 1 || review.confidence > 5)
        errors.push_back("confidence must be in [1, 5]");
    return errors;
}

std::vector<std::string> validate_round_record(const RoundRecord& record) {
    std::vector<std::string> errors;
    if (record.round_index < 1) errors.push_back("round_index must be >= 1");

    std::set<std::string> seen;
    for (const auto& [paper_id, triplet] : record.assignments) {
        for (const auto& reviewer : triplet) {
            if (!seen.insert(reviewer).second)
                errors.push_back("reviewer '" + reviewer + "' assigned to more than one triplet");
        }
    }
    if (record.assignments.size() == 2 && seen.size() != kReviewerCount)
        errors.push_back("two triplets must cover exactly 6 distinct reviewers");

    // Zero-sum per triplet.
    for (const auto& [paper_id, triplet] : record.assignments) {
        int sum = 0;
        bool complete = true;
        for (const auto& reviewer : triplet) {
            auto it = record.elo_deltas.find(reviewer);
            if (it == record.elo_deltas.end()) {
                errors.push_back("missing elo delta for reviewer '" + reviewer + "'");
                complete = false;
            } else {
                sum += it->second;
            }
        }
        if (complete && sum != 0)
            errors.push_back("elo deltas for paper '" + paper_id + "' sum to " +
                             std::to_string(sum) + ", expected 0");
    }

    // Second-stage reviews require a matching initial review.
    for (const auto& second : record.second_reviews) {
        bool found = false;
        for (const auto& initial : record.initial_reviews) {
            if (initial.paper_id == second.paper_id &&
                initial.reviewer_id == second.reviewer_id) {
                found = true;
                break;
            }
        }
        if (!found)
            errors.push_back("second review by '" + second.reviewer_id + "' for '" +
                             second.paper_id + "' has no initial review");
    }
    return errors;
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
    std::vector<std::string> errors;
    if (config.rounds < 1) errors.push_back("rounds must be >= 1");
    if (config.papers_per_round < 1)
        errors.push_back("papers_per_round must be >= 1");
    else if (config.papers_per_round * kTripletSize > kReviewerCount)
        errors.push_back("papers_per_round: insufficient reviewers (" +
                         std::to_string(config.papers_per_round) + " papers need " +
                         std::to_string(config.papers_per_round * kTripletSize) +
                         " reviewers, have " + std::to_string(kReviewerCount) + ")");
    if (config.memory_word_cap < 1) errors.push_back("memory_word_cap must be >= 1");
    if (config.provider.temperature < 0.0)
        errors.push_back("provider.temperature must be >= 0");
    if (config.provider.max_output_tokens < 1)
        errors.push_back("provider.max_output_tokens must be >= 1");
    if (config.provider.max_retries < 0)
        errors.push_back("provider.max_retries must be >= 0");
    if (config.provider.retry_backoff_ms < 0)
        errors.push_back("provider.retry_backoff_ms must be >= 0");
    if (config.provider.concurrency < 1)
        errors.push_back("provider.concurrency must be >= 1");
    if (config.provider.requests_per_second < 0.0)
        errors.push_back("provider.requests_per_second must be >= 0");
    return errors;
}

void to_json(json& j, const Paper& paper) {
    j = json{{"id", paper.id},
             {"title", paper.title},
             {"body", paper.body},
             {"avg_rating", paper.avg_rating},
             {"rating_variance", paper.rating_variance},
             {"ground_truth", to_string(paper.ground_truth)}};
}

void from_json(const json& j, Paper& paper) {
    j.at("id").get_to(paper.id);
    j.at("title").get_to(paper.title);
    j.at("body").get_to(paper.body);
    j.at("avg_rating").get_to(paper.avg_rating);
    j.at("rating_variance").get_to(paper.rating_variance);
    paper.ground_truth = decision_from_string(j.at("ground_truth").get<std::string>());
}

void to_json(json& j, const HistoryEntry& entry) {
    j = json{{"round_index", entry.round_index},
             {"paper_id", entry.paper_id},
             {"delta", entry.delta}};
}

void from_json(const json& j, HistoryEntry& entry) {
    j.at("round_index").get_to(entry.round_index);
    j.at("paper_id").get_to(entry.paper_id);
    j.at("delta").get_to(entry.delta);
}

void to_json(json& j, const ReviewerState& state) {
    j = json{{"id", state.id},
             {"persona", to_string(state.persona)},
             {"elo", state.elo},
             {"memory", state.memory},
             {"history", state.history}};
}

void from_json(const json& j, ReviewerState& state) {
    j.at("id").get_to(state.id);
    state.persona = persona_from_string(j.at("persona").get<std::string>());
    j.at("elo").get_to(state.elo);
    j.at("memory").get_to(state.memory);
    j.at("history").get_to(state.history);
}

void to_json(json& j, const Review& review) {
    j = json{{"paper_id", review.paper_id},
             {"reviewer_id", review.reviewer_id},
             {"stage", to_string(review.stage)},
             {"rating", review.rating},
             {"confidence", review.confidence},
             {"summary", review.summary},
             {"strengths", review.strengths},
             {"weaknesses", review.weaknesses}};
}

void from_json(const json& j, Review& review) {
    j.at("paper_id").get_to(review.paper_id);
    j.at("reviewer_id").get_to(review.reviewer_id);
    review.stage = stage_from_string(j.at("stage").get<std::string>());
    j.at("rating").get_to(review.rating);
    j.at("confidence").get_to(review.confidence);
    j.at("summary").get_to(review.summary);
    j.at("strengths").get_to(review.strengths);
    j.at("weaknesses").get_to(review.weaknesses);
}

void to_json(json& j, const ACOutcome& outcome) {
    j = json{{"paper_id", outcome.paper_id},
             {"decision", to_string(outcome.decision)},
             {"quality_scores", outcome.quality_scores},
             {"rationale", outcome.rationale}};
}

void from_json(const json& j, ACOutcome& outcome) {
    j.at("paper_id").get_to(outcome.paper_id);
    outcome.decision = decision_from_string(j.at("decision").get<std::string>());
    j.at("quality_scores").get_to(outcome.quality_scores);
    j.at("rationale").get_to(outcome.rationale);
}

void to_json(json& j, const RoundRecord& record) {
    j = json{{"round_index", record.round_index},
             {"assignments", record.assignments},
             {"initial_reviews", record.initial_reviews},
             {"second_reviews", record.second_reviews},
             {"ac_outcomes", record.ac_outcomes},
             {"elo_deltas", record.elo_deltas},
             {"elo_after", record.elo_after}};
}

void from_json(const json& j, RoundRecord& record) {
    j.at("round_index").get_to(record.round_index);
    j.at("assignments").get_to(record.assignments);
    j.at("initial_reviews").get_to(record.initial_reviews);
    j.at("second_reviews").get_to(record.second_reviews);
    j.at("ac_outcomes").get_to(record.ac_outcomes);
    j.at("elo_deltas").get_to(record.elo_deltas);
    j.at("elo_after").get_to(record.elo_after);
}

void to_json(json& j, const ProviderSettings& settings) {
    j = json{{"endpoint", settings.endpoint},
             {"model", settings.model},
             {"temperature", settings.temperature},
             {"max_output_tokens", settings.max_output_tokens},
             {"max_retries", settings.max_retries},
             {"retry_backoff_ms", settings.retry_backoff_ms},
             {"concurrency", settings.concurrency},
             {"requests_per_second", settings.requests_per_second}};
}

void from_json(const json& j, ProviderSettings& settings) {
    j.at("endpoint").get_to(settings.endpoint);
    j.at("model").get_to(settings.model);
    j.at("temperature").get_to(settings.temperature);
    j.at("max_output_tokens").get_to(settings.max_output_tokens);
    j.at("max_retries").get_to(settings.max_retries);
    j.at("retry_backoff_ms").get_to(settings.retry_backoff_ms);
    j.at("concurrency").get_to(settings.concurrency);
    j.at("requests_per_second").get_to(settings.requests_per_second);
}

void to_json(json& j, const ExperimentConfig& config) {
    j = json{{"mode", to_string(config.mode)},
             {"rounds", config.rounds},
             {"papers_per_round", config.papers_per_round},
             {"initial_elo", config.initial_elo},
             {"rng_seed", config.rng_seed},
             {"provider", config.provider},
             {"memory_word_cap", config.memory_word_cap}};
}

void from_json(const json& j, ExperimentConfig& config) {
    config.mode = mode_from_string(j.at("mode").get<std::string>());
    j.at("rounds").get_to(config.rounds);
    j.at("papers_per_round").get_to(config.papers_per_round);
    j.at("initial_elo").get_to(config.initial_elo);
    j.at("rng_seed").get_to(config.rng_seed);
    j.at("provider").get_to(config.provider);
    j.at("memory_word_cap").get_to(config.memory_word_cap);
}

}  // namespace eloreview
