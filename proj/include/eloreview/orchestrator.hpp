#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"
#include "eloreview/personas.hpp"
#include "eloreview/provider.hpp"
#include "eloreview/rng.hpp"
#include "eloreview/transcript.hpp"

namespace eloreview {

struct OrchestratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Call tags identify every provider request. They are the join key between
// the call log, scripted replay, and the mode-isolation audit.
std::string review_tag(int round_index, const std::string& paper_id,
                       const std::string& reviewer_id, ReviewStage stage);
std::string ac_tag(int round_index, const std::string& paper_id);
std::string memory_tag(int round_index, const std::string& reviewer_id);

// Appended to a tag when the first response failed to parse and the request
// is re-issued once with a repair instruction.
inline constexpr const char* kRepairSuffix = "/repair";

struct ExperimentState {
    ExperimentConfig config;
    std::array<PersonaSpec, 6> personas;
    std::vector<ReviewerState> reviewers;  // r1..r6, one persona each
    std::vector<Paper> remaining_pool;
    std::vector<RoundRecord> completed;
};

// Six reviewers r1..r6 bound to the personas in enum order, all at initial_elo.
std::vector<ReviewerState> make_reviewers(int initial_elo);

ExperimentState make_initial_state(ExperimentConfig config, std::vector<Paper> pool,
                                   std::array<PersonaSpec, 6> personas = builtin_personas());

// Uniformly random partition of the reviewers into one disjoint triplet per
// paper. Throws std::invalid_argument on duplicate ids or too few reviewers.
std::map<std::string, std::array<std::string, 3>> assign_triplets(
    const std::vector<std::string>& reviewer_ids,
    const std::vector<std::string>& paper_ids, Rng& rng);

// Runs one full round against the provider: draw, assign, initial reviews,
// second reviews, AC decisions, Elo application, then memory updates in
// FullAccess. All state mutation and the transcript flush happen together
// after every stage has succeeded; any provider or parse failure leaves
// state and transcript exactly as they were. The round's RNG is derived
// from (config.rng_seed, round index), so no generator state is carried.
RoundRecord run_round(ExperimentState& state, CompletionProvider& provider,
                      TranscriptWriter* writer = nullptr);

// Reconstructs mid-run state from a partial transcript: pool reduced by the
// drawn papers, Elo and history replayed from the recorded deltas (checked
// against elo_after), and FullAccess memories re-parsed from the call log.
ExperimentState rebuild_state(const ExperimentConfig& config, std::vector<Paper> pool,
                              const Transcript& transcript,
                              std::array<PersonaSpec, 6> personas = builtin_personas());

// Runs config.rounds rounds, writing the transcript to transcript_path with
// a flush per round. If the file already exists it must carry an identical
// header line, and the run resumes after its last recorded round. Errors
// propagate after the transcript is left partial and resumable. Returns the
// finished transcript re-read from disk.
Transcript run_experiment(const ExperimentConfig& config, std::vector<Paper> pool,
                          CompletionProvider& provider,
                          const std::filesystem::path& transcript_path,
                          std::array<PersonaSpec, 6> personas = builtin_personas());

}  // namespace eloreview
