#include "eloreview/agents.hpp"

#include <cctype>
#include <sstream>

namespace eloreview {

namespace {

constexpr const char* kReviewJsonInstruction =
    "Respond with a single JSON object and nothing else:\n"
    "{\"summary\": \"...\", \"strengths\": \"...\", \"weaknesses\": \"...\", "
    "\"rating\": <integer 1-10>, \"confidence\": <integer 1-5>}\n"
    "Rating scale: 1 (strong reject) to 10 (strong accept). "
    "Confidence scale: 1 (educated guess) to 5 (certain).";

std::string memory_block(const std::string& memory) {
    if (memory.empty()) return "";
    std::ostringstream out;
    out << kMemoryBlockBegin << '\n'
        << memory << '\n'
        << kMemoryBlockEnd << "\n\n";
    return out.str();
}

// Review body without reviewer identity, for peer and AC consumption.
void render_review_body(std::ostringstream& out, const Review& review) {
    out << "Rating: " << review.rating << "/10, Confidence: " << review.confidence
        << "/5\n"
        << "Summary: " << review.summary << '\n'
        << "Strengths: " << review.strengths << '\n'
        << "Weaknesses: " << review.weaknesses << '\n';
}

}  // namespace

PromptBundle build_initial_review_prompt(const PersonaSpec& persona,
                                         const std::string& memory,
                                         const Paper& paper, Mode mode) {
    if (!memory.empty() && mode != Mode::FullAccess)
        throw std::invalid_argument("reviewer memory must be empty outside full-access mode");

    std::ostringstream user;
    user << memory_block(memory);
    user << "You are assigned to review the following submission.\n\n"
         << "Title: " << paper.title << "\n\n"
         << "Paper:\n"
         << paper.body << "\n\n"
         << "Write your review strictly in your assigned reviewing style. "
         << kReviewJsonInstruction;
    return {persona.system_prompt, user.str(), ResponseSchema::ReviewJson};
}

PromptBundle build_second_review_prompt(const PersonaSpec& persona,
                                        const std::string& memory,
                                        const Paper& paper,
                                        const Review& own_initial,
                                        const std::vector<Review>& peer_reviews) {
    if (peer_reviews.size() != 2)
        throw std::invalid_argument("second review prompt requires exactly 2 peer reviews, got " +
                                    std::to_string(peer_reviews.size()));
    for (const auto& peer : peer_reviews) {
        if (peer.reviewer_id == own_initial.reviewer_id)
            throw std::invalid_argument("peer reviews must not include the reviewer's own");
    }

    std::ostringstream user;
    user << memory_block(memory);
    user << "You previously reviewed the following submission. The other reviewers' "
            "assessments are now shared with you. You may keep your assessment or "
            "revise it.\n\n"
         << "Title: " << paper.title << "\n\n"
         << "Paper:\n"
         << paper.body << "\n\n"
         << "Your initial review:\n";
    render_review_body(user, own_initial);
    for (std::size_t i = 0; i < peer_reviews.size(); ++i) {
        user << "\n[Reviewer " << (i + 1) << "]\n";
        render_review_body(user, peer_reviews[i]);
    }
    user << "\nWrite your final review in your assigned reviewing style, keeping or "
            "revising your rating as you see fit. "
         << kReviewJsonInstruction;
    return {persona.system_prompt, user.str(), ResponseSchema::ReviewJson};
}

PromptBundle build_ac_prompt(const Paper& paper,
                             const std::vector<Review>& final_reviews,
                             bool elo_visible,
                             const std::map<std::string, int>& elos) {
    if (final_reviews.size() != 3)
        throw std::invalid_argument("AC prompt requires exactly 3 reviews, got " +
                                    std::to_string(final_reviews.size()));
    for (const auto& review : final_reviews) {
        if (review.stage != ReviewStage::Second)
            throw std::invalid_argument("AC prompt requires second-stage reviews");
    }

    std::ostringstream system;
    system << "You are the area chair for a machine learning conference. You read the "
              "final reviews of a submission, decide whether to accept it, and rate "
              "the overall quality of each review on a scale of 1 (useless) to 10 "
              "(outstanding).";

    std::ostringstream user;
    user << "Submission under decision.\n\n"
         << "Title: " << paper.title << "\n\n"
         << "Final reviews:\n";
    for (const auto& review : final_reviews) {
        user << "\n[Reviewer " << review.reviewer_id;
        if (elo_visible) {
            auto it = elos.find(review.reviewer_id);
            if (it == elos.end())
                throw std::invalid_argument("missing Elo for reviewer '" +
                                            review.reviewer_id + "'");
            user << " | " << kEloRatingMarker << it->second;
        }
        user << "]\n";
        render_review_body(user, review);
    }
    if (elo_visible) {
        user << "\nEach reviewer's current Elo rating reflects how their past reviews "
                "were rated; you may use it as auxiliary information when weighing the "
                "reviews.";
    }
    user << "\nDecide whether to accept the submission and rate each review. "
            "Respond with a single JSON object and nothing else:\n"
            "{\"decision\": \"Accept\" or \"Reject\", \"quality_scores\": {";
    for (std::size_t i = 0; i < final_reviews.size(); ++i) {
        if (i > 0) user << ", ";
        user << '"' << final_reviews[i].reviewer_id << "\": <integer 1-10>";
    }
    user << "}, \"rationale\": \"...\"}";
    return {system.str(), user.str(), ResponseSchema::ACJson};
}

PromptBundle build_memory_update_prompt(const PersonaSpec& persona,
                                        const std::string& old_memory,
                                        int elo_delta, int quality_score,
                                        int word_cap) {
    std::ostringstream user;
    user << "Round feedback on your reviewing.\n"
         << kEloDeltaMarker << (elo_delta >= 0 ? "+" : "") << elo_delta << '\n'
         << "Area chair quality score for your review: " << quality_score << "/10\n\n";
    if (old_memory.empty()) {
        user << "You have no previous strategy notes.\n";
    } else {
        user << "Your previous strategy notes:\n" << old_memory << '\n';
    }
    user << "\nWrite an updated strategy note to yourself, at most " << word_cap
         << " words, with concrete adjustments aimed at improving your Elo in future "
            "rounds. The note must stay within your assigned reviewing persona; do "
            "not abandon it. Respond with a single JSON object and nothing else:\n"
            "{\"memory\": \"...\"}";
    return {persona.system_prompt, user.str(), ResponseSchema::MemoryJson};
}

std::optional<json> extract_first_json_object(const std::string& text) {
    std::size_t start = text.find('{');
    while (start != std::string::npos) {
        // Walk a balanced object, honoring strings and escapes.
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    json j = json::parse(text.substr(start, i - start + 1), nullptr, false);
                    if (!j.is_discarded() && j.is_object()) return j;
                    break;
                }
            }
        }
        start = text.find('{', start + 1);
    }
    return std::nullopt;
}

namespace {

int require_int_field(const json& j, const char* field, int lo, int hi) {
    if (!j.contains(field))
        throw ParseError(std::string("missing field '") + field + "'");
    const auto& v = j.at(field);
    if (!v.is_number_integer())
        throw ParseError(std::string("field '") + field + "' must be an integer");
    const int value = v.get<int>();
    if (value < lo || value > hi)
        throw ParseError(std::string("field '") + field + "' out of range [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                         std::to_string(value));
    return value;
}

std::string require_string_field(const json& j, const char* field) {
    if (!j.contains(field))
        throw ParseError(std::string("missing field '") + field + "'");
    if (!j.at(field).is_string())
        throw ParseError(std::string("field '") + field + "' must be a string");
    return j.at(field).get<std::string>();
}

}  // namespace

Review parse_review(const std::string& raw, const std::string& paper_id,
                    const std::string& reviewer_id, ReviewStage stage) {
    auto j = extract_first_json_object(raw);
    if (!j) throw ParseError("no JSON object found in response");

    Review review;
    review.paper_id = paper_id;
    review.reviewer_id = reviewer_id;
    review.stage = stage;
    review.rating = require_int_field(*j, "rating", 1, 10);
    review.confidence = require_int_field(*j, "confidence", 1, 5);
    review.summary = require_string_field(*j, "summary");
    review.strengths = require_string_field(*j, "strengths");
    review.weaknesses = require_string_field(*j, "weaknesses");
    return review;
}

ACOutcome parse_ac(const std::string& raw, const std::string& paper_id,
                   const std::vector<std::string>& expected_reviewers) {
    auto j = extract_first_json_object(raw);
    if (!j) throw ParseError("no JSON object found in response");

    ACOutcome outcome;
    outcome.paper_id = paper_id;

    const std::string decision = require_string_field(*j, "decision");
    if (decision == "Accept" || decision == "accept" || decision == "ACCEPT") {
        outcome.decision = Decision::Accept;
    } else if (decision == "Reject" || decision == "reject" || decision == "REJECT") {
        outcome.decision = Decision::Reject;
    } else {
        throw ParseError("field 'decision' must be Accept or Reject, got '" + decision + "'");
    }

    if (!j->contains("quality_scores") || !j->at("quality_scores").is_object())
        throw ParseError("missing field 'quality_scores'");
    const auto& scores = j->at("quality_scores");
    for (const auto& reviewer : expected_reviewers) {
        if (!scores.contains(reviewer))
            throw ParseError("quality_scores missing reviewer '" + reviewer + "'");
        outcome.quality_scores[reviewer] = require_int_field(scores, reviewer.c_str(), 1, 10);
    }
    if (scores.size() != expected_reviewers.size())
        throw ParseError("quality_scores must have exactly one entry per assigned reviewer");

    outcome.rationale = j->contains("rationale") && j->at("rationale").is_string()
                            ? j->at("rationale").get<std::string>()
                            : "";
    return outcome;
}

std::string parse_memory(const std::string& raw, int word_cap) {
    auto j = extract_first_json_object(raw);
    if (!j) throw ParseError("no JSON object found in response");
    const std::string memory = require_string_field(*j, "memory");
    return truncate_words(memory, word_cap);
}

std::string truncate_words(const std::string& text, int cap) {
    if (cap < 0) throw std::invalid_argument("word cap must be >= 0");
    int words = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (!space && !in_word) {
            in_word = true;
            ++words;
        } else if (space && in_word) {
            in_word = false;
        }
        if (in_word && words == cap + 1) {
            // The cap-th word ended just before this word began.
            std::size_t end = i;
            while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1])))
                --end;
            return text.substr(0, end);
        }
    }
    return text;
}

}  // namespace eloreview
