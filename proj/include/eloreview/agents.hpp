#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"
#include "eloreview/personas.hpp"

namespace eloreview {

// Which parser accepts the response to a prompt.
enum class ResponseSchema { ReviewJson, ACJson, MemoryJson };

struct PromptBundle {
    std::string system_prompt;
    std::string user_message;
    ResponseSchema expected_schema = ResponseSchema::ReviewJson;
};

// Fixed marker strings. The mode-isolation audit keys on these, so prompt
// templates must use them and nothing else may emit them.
inline constexpr const char* kMemoryBlockBegin = "=== Private strategy notes ===";
inline constexpr const char* kMemoryBlockEnd = "=== End of strategy notes ===";
inline constexpr const char* kEloRatingMarker = "Elo rating: ";
inline constexpr const char* kEloDeltaMarker = "Elo change this round: ";

// Initial-stage review prompt. The memory block is prepended only when the
// memory text is non-empty, which the mode contract restricts to FullAccess;
// a non-empty memory outside FullAccess throws std::invalid_argument.
// Reviewer prompts never carry Elo values in any mode.
PromptBundle build_initial_review_prompt(const PersonaSpec& persona,
                                         const std::string& memory,
                                         const Paper& paper, Mode mode);

// Second-stage prompt: the reviewer's own initial review plus exactly two
// peer reviews, anonymized to "Reviewer 1"/"Reviewer 2" with reviewer ids
// and personas stripped.
PromptBundle build_second_review_prompt(const PersonaSpec& persona,
                                        const std::string& memory,
                                        const Paper& paper,
                                        const Review& own_initial,
                                        const std::vector<Review>& peer_reviews);

// Area-chair prompt over the three final (second-stage) reviews. Reviewer
// Elo ratings are included iff elo_visible.
PromptBundle build_ac_prompt(const Paper& paper,
                             const std::vector<Review>& final_reviews,
                             bool elo_visible,
                             const std::map<std::string, int>& elos);

// FullAccess-only memory refresh: states the Elo delta and the AC quality
// score, asks for a strategy note within the word cap, and instructs the
// agent to keep its persona.
PromptBundle build_memory_update_prompt(const PersonaSpec& persona,
                                        const std::string& old_memory,
                                        int elo_delta, int quality_score,
                                        int word_cap);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First balanced JSON object embedded anywhere in the text, or nullopt.
std::optional<json> extract_first_json_object(const std::string& text);

// Parses a model reply into a Review. Context fields (paper, reviewer,
// stage) come from the call site, not the model. Throws ParseError.
Review parse_review(const std::string& raw, const std::string& paper_id,
                    const std::string& reviewer_id, ReviewStage stage);

// Parses the AC reply; quality_scores must cover exactly expected_reviewers.
ACOutcome parse_ac(const std::string& raw, const std::string& paper_id,
                   const std::vector<std::string>& expected_reviewers);

// Parses a memory reply and truncates it to word_cap words at a word
// boundary instead of erroring on overflow.
std::string parse_memory(const std::string& raw, int word_cap);

// Cuts text after `cap` whitespace-separated words, preserving original
// spacing of the kept prefix. Text within the cap is returned unchanged.
std::string truncate_words(const std::string& text, int cap);

}  // namespace eloreview
