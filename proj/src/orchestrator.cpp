#include "eloreview/orchestrator.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

#include "eloreview/agents.hpp"
#include "eloreview/elo.hpp"
#include "eloreview/pool.hpp"

namespace eloreview {

std::string review_tag(int round_index, const std::string& paper_id,
                       const std::string& reviewer_id, ReviewStage stage) {
    return "round" + std::to_string(round_index) + "/" + paper_id + "/" + reviewer_id +
           (stage == ReviewStage::Initial ? "/initial" : "/second");
}

std::string ac_tag(int round_index, const std::string& paper_id) {
    return "round" + std::to_string(round_index) + "/" + paper_id + "/ac";
}

std::string memory_tag(int round_index, const std::string& reviewer_id) {
    return "round" + std::to_string(round_index) + "/" + reviewer_id + "/memory";
}

std::vector<ReviewerState> make_reviewers(int initial_elo) {
    std::vector<ReviewerState> reviewers;
    reviewers.reserve(kAllPersonas.size());
    int n = 1;
    for (PersonaId persona : kAllPersonas) {
        ReviewerState reviewer;
        reviewer.id = "r" + std::to_string(n++);
        reviewer.persona = persona;
        reviewer.elo = initial_elo;
        reviewers.push_back(std::move(reviewer));
    }
    return reviewers;
}

ExperimentState make_initial_state(ExperimentConfig config, std::vector<Paper> pool,
                                   std::array<PersonaSpec, 6> personas) {
    ExperimentState state;
    state.reviewers = make_reviewers(config.initial_elo);
    state.config = std::move(config);
    state.personas = std::move(personas);
    state.remaining_pool = std::move(pool);
    return state;
}

std::map<std::string, std::array<std::string, 3>> assign_triplets(
    const std::vector<std::string>& reviewer_ids,
    const std::vector<std::string>& paper_ids, Rng& rng) {
    const std::set<std::string> reviewer_set(reviewer_ids.begin(), reviewer_ids.end());
    if (reviewer_set.size() != reviewer_ids.size())
        throw std::invalid_argument("assign_triplets: duplicate reviewer ids");
    const std::set<std::string> paper_set(paper_ids.begin(), paper_ids.end());
    if (paper_set.size() != paper_ids.size())
        throw std::invalid_argument("assign_triplets: duplicate paper ids");
    if (paper_ids.empty()) throw std::invalid_argument("assign_triplets: no papers");
    if (reviewer_ids.size() < paper_ids.size() * kTripletSize)
        throw std::invalid_argument("assign_triplets: " + std::to_string(paper_ids.size()) +
                                    " papers need " +
                                    std::to_string(paper_ids.size() * kTripletSize) +
                                    " reviewers, have " + std::to_string(reviewer_ids.size()));

    std::vector<std::string> order = reviewer_ids;
    rng.shuffle(order);
    std::map<std::string, std::array<std::string, 3>> assignments;
    for (std::size_t p = 0; p < paper_ids.size(); ++p) {
        assignments[paper_ids[p]] = {order[3 * p], order[3 * p + 1], order[3 * p + 2]};
    }
    return assignments;
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

CompletionRequest make_request(const PromptBundle& bundle, const ProviderSettings& settings,
                               std::string tag) {
    return {bundle.system_prompt,
            {bundle.user_message},
            settings.temperature,
            settings.max_output_tokens,
            std::move(tag)};
}

CompletionRequest repair_request(const CompletionRequest& original, const std::string& raw,
                                 const std::string& error) {
    CompletionRequest repaired = original;
    repaired.tag += kRepairSuffix;
    repaired.user_messages.push_back(
        "Your previous response could not be used: " + error + "\nPrevious response:\n" +
        raw + "\nRespond again with exactly one JSON object in the required format and "
              "nothing else.");
    return repaired;
}

// Completes the whole batch concurrently; the provider enforces its own
// rate and concurrency limits. Any failure propagates after every in-flight
// request has finished.
std::vector<std::string> dispatch(CompletionProvider& provider,
                                  const std::vector<CompletionRequest>& batch) {
    std::vector<std::future<std::string>> futures;
    futures.reserve(batch.size());
    for (const auto& request : batch) {
        futures.push_back(std::async(std::launch::async, [&provider, &request] {
            return provider.complete(request).text;
        }));
    }
    std::vector<std::string> texts;
    texts.reserve(batch.size());
    std::exception_ptr failure;
    for (auto& future : futures) {
        try {
            texts.push_back(future.get());
        } catch (...) {
            if (!failure) failure = std::current_exception();
            texts.emplace_back();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return texts;
}

// The provider logs attempts in completion order, which is nondeterministic
// under concurrency. Canonical transcript order is batch order, then attempt.
void append_batch_calls(std::vector<CallRecord>& out, std::vector<CallRecord> drained,
                        const std::vector<CompletionRequest>& batch) {
    std::map<std::string, std::size_t> order;
    for (std::size_t i = 0; i < batch.size(); ++i) order.emplace(batch[i].tag, i);
    std::stable_sort(drained.begin(), drained.end(),
                     [&](const CallRecord& a, const CallRecord& b) {
                         auto ia = order.find(a.request.tag);
                         auto ib = order.find(b.request.tag);
                         const std::size_t ka = ia == order.end() ? order.size() : ia->second;
                         const std::size_t kb = ib == order.end() ? order.size() : ib->second;
                         if (ka != kb) return ka < kb;
                         if (a.request.tag != b.request.tag) return a.request.tag < b.request.tag;
                         return a.attempt < b.attempt;
                     });
    for (auto& record : drained) out.push_back(std::move(record));
}

// Dispatches a batch and parses every response, re-requesting once with a
// repair instruction on parse failure. Appends all attempts to round_calls.
template <typename Parsed>
std::vector<Parsed> run_batch(
    CompletionProvider& provider, const std::vector<CompletionRequest>& batch,
    const std::vector<std::function<Parsed(const std::string&)>>& parsers,
    std::vector<CallRecord>& round_calls) {
    std::vector<std::string> texts = dispatch(provider, batch);
    append_batch_calls(round_calls, provider.drain_log(), batch);

    std::vector<Parsed> parsed;
    parsed.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        try {
            parsed.push_back(parsers[i](texts[i]));
            continue;
        } catch (const ParseError& first_error) {
            const CompletionRequest retry = repair_request(batch[i], texts[i], first_error.what());
            std::string retry_text;
            try {
                retry_text = provider.complete(retry).text;
            } catch (...) {
                append_batch_calls(round_calls, provider.drain_log(), {retry});
                throw;
            }
            append_batch_calls(round_calls, provider.drain_log(), {retry});
            try {
                parsed.push_back(parsers[i](retry_text));
            } catch (const ParseError& second_error) {
                throw ParseError("call '" + retry.tag + "': " + second_error.what());
            }
        }
    }
    return parsed;
}

const PersonaSpec& persona_for(const ExperimentState& state, const ReviewerState& reviewer) {
    for (const auto& spec : state.personas) {
        if (spec.id == reviewer.persona) return spec;
    }
    throw std::logic_error("no persona spec for reviewer '" + reviewer.id + "'");
}

const ReviewerState& reviewer_by_id(const ExperimentState& state, const std::string& id) {
    for (const auto& reviewer : state.reviewers) {
        if (reviewer.id == id) return reviewer;
    }
    throw std::logic_error("unknown reviewer id '" + id + "'");
}

int quality_for(const RoundRecord& record, const std::string& reviewer_id) {
    for (const auto& outcome : record.ac_outcomes) {
        auto it = outcome.quality_scores.find(reviewer_id);
        if (it != outcome.quality_scores.end()) return it->second;
    }
    throw std::logic_error("no quality score recorded for reviewer '" + reviewer_id + "'");
}

}  // namespace

RoundRecord run_round(ExperimentState& state, CompletionProvider& provider,
                      TranscriptWriter* writer) {
    const ExperimentConfig& cfg = state.config;
    const int round_index = static_cast<int>(state.completed.size()) + 1;
    Rng rng(Rng::derive(cfg.rng_seed, static_cast<std::uint64_t>(round_index)));

    provider.drain_log();  // drop leftovers from an aborted round

    auto [papers, reduced_pool] =
        draw_round_papers(state.remaining_pool, cfg.papers_per_round, rng);

    std::vector<std::string> reviewer_ids;
    for (const auto& reviewer : state.reviewers) reviewer_ids.push_back(reviewer.id);
    std::vector<std::string> paper_ids;
    for (const auto& paper : papers) paper_ids.push_back(paper.id);

    RoundRecord record;
    record.round_index = round_index;
    record.assignments = assign_triplets(reviewer_ids, paper_ids, rng);

    // Canonical slot order: papers in draw order, reviewers in triplet order.
    // Every batch, tag sequence, and transcript line follows it.
    struct Slot {
        const Paper* paper;
        const ReviewerState* reviewer;
    };
    std::vector<Slot> slots;
    for (const auto& paper : papers) {
        for (const auto& reviewer_id : record.assignments.at(paper.id)) {
            slots.push_back({&paper, &reviewer_by_id(state, reviewer_id)});
        }
    }

    std::vector<CallRecord> round_calls;

    {
        std::vector<CompletionRequest> batch;
        std::vector<std::function<Review(const std::string&)>> parsers;
        for (const auto& slot : slots) {
            const auto bundle = build_initial_review_prompt(
                persona_for(state, *slot.reviewer), slot.reviewer->memory, *slot.paper,
                cfg.mode);
            batch.push_back(make_request(
                bundle, cfg.provider,
                review_tag(round_index, slot.paper->id, slot.reviewer->id,
                           ReviewStage::Initial)));
            parsers.push_back([paper_id = slot.paper->id, reviewer_id = slot.reviewer->id](
                                  const std::string& raw) {
                return parse_review(raw, paper_id, reviewer_id, ReviewStage::Initial);
            });
        }
        record.initial_reviews = run_batch<Review>(provider, batch, parsers, round_calls);
    }

    {
        std::vector<CompletionRequest> batch;
        std::vector<std::function<Review(const std::string&)>> parsers;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const Slot& slot = slots[i];
            const std::size_t base = (i / kTripletSize) * kTripletSize;
            std::vector<Review> peers;
            for (std::size_t k = base; k < base + kTripletSize; ++k) {
                if (k != i) peers.push_back(record.initial_reviews[k]);
            }
            const auto bundle = build_second_review_prompt(
                persona_for(state, *slot.reviewer), slot.reviewer->memory, *slot.paper,
                record.initial_reviews[i], peers);
            batch.push_back(make_request(
                bundle, cfg.provider,
                review_tag(round_index, slot.paper->id, slot.reviewer->id,
                           ReviewStage::Second)));
            parsers.push_back([paper_id = slot.paper->id, reviewer_id = slot.reviewer->id](
                                  const std::string& raw) {
                return parse_review(raw, paper_id, reviewer_id, ReviewStage::Second);
            });
        }
        record.second_reviews = run_batch<Review>(provider, batch, parsers, round_calls);
    }

    {
        const bool elo_visible = cfg.mode != Mode::Baseline;
        std::vector<CompletionRequest> batch;
        std::vector<std::function<ACOutcome(const std::string&)>> parsers;
        for (std::size_t p = 0; p < papers.size(); ++p) {
            const Paper& paper = papers[p];
            const auto& triplet = record.assignments.at(paper.id);
            std::vector<Review> finals(
                record.second_reviews.begin() + static_cast<std::ptrdiff_t>(p * kTripletSize),
                record.second_reviews.begin() +
                    static_cast<std::ptrdiff_t>((p + 1) * kTripletSize));
            std::map<std::string, int> elos;
            for (const auto& reviewer_id : triplet)
                elos[reviewer_id] = reviewer_by_id(state, reviewer_id).elo;
            const auto bundle = build_ac_prompt(paper, finals, elo_visible, elos);
            batch.push_back(
                make_request(bundle, cfg.provider, ac_tag(round_index, paper.id)));
            parsers.push_back(
                [paper_id = paper.id,
                 expected = std::vector<std::string>(triplet.begin(), triplet.end())](
                    const std::string& raw) { return parse_ac(raw, paper_id, expected); });
        }
        record.ac_outcomes = run_batch<ACOutcome>(provider, batch, parsers, round_calls);
    }

    std::vector<TripletDeltas> round_deltas;
    for (const auto& outcome : record.ac_outcomes) {
        round_deltas.push_back({outcome.paper_id, elo_deltas(rank_triplet(outcome.quality_scores))});
    }
    std::vector<ReviewerState> updated = apply_round(state.reviewers, round_index, round_deltas);
    for (const auto& triplet_deltas : round_deltas) {
        for (const auto& [reviewer_id, delta] : triplet_deltas.deltas)
            record.elo_deltas[reviewer_id] = delta;
    }
    int elo_sum = 0;
    for (const auto& reviewer : updated) {
        record.elo_after[reviewer.id] = reviewer.elo;
        elo_sum += reviewer.elo;
    }
    if (elo_sum != kReviewerCount * cfg.initial_elo)
        throw std::logic_error("round " + std::to_string(round_index) +
                               ": elo conservation violated, total " +
                               std::to_string(elo_sum));

    std::vector<std::pair<std::string, std::string>> new_memories;
    if (cfg.mode == Mode::FullAccess) {
        std::vector<CompletionRequest> batch;
        std::vector<std::function<std::string(const std::string&)>> parsers;
        std::vector<std::string> participants;
        for (const auto& reviewer : state.reviewers) {
            auto it = record.elo_deltas.find(reviewer.id);
            if (it == record.elo_deltas.end()) continue;
            const auto bundle = build_memory_update_prompt(
                persona_for(state, reviewer), reviewer.memory, it->second,
                quality_for(record, reviewer.id), cfg.memory_word_cap);
            batch.push_back(
                make_request(bundle, cfg.provider, memory_tag(round_index, reviewer.id)));
            parsers.push_back([cap = cfg.memory_word_cap](const std::string& raw) {
                return parse_memory(raw, cap);
            });
            participants.push_back(reviewer.id);
        }
        const auto memories = run_batch<std::string>(provider, batch, parsers, round_calls);
        for (std::size_t i = 0; i < participants.size(); ++i)
            new_memories.emplace_back(participants[i], memories[i]);
    }

    const auto violations = validate_round_record(record);
    if (!violations.empty())
        throw std::logic_error("round " + std::to_string(round_index) +
                               " produced an invalid record: " + join(violations, "; "));

    // Write-ahead commit: the round reaches the transcript before any state
    // mutation, so a crash in between is repaired by resume, not lost.
    if (writer) writer->flush_round(record, round_calls);

    state.remaining_pool = std::move(reduced_pool);
    state.reviewers = std::move(updated);
    for (const auto& [reviewer_id, memory] : new_memories) {
        for (auto& reviewer : state.reviewers) {
            if (reviewer.id == reviewer_id) {
                reviewer.memory = memory;
                break;
            }
        }
    }
    state.completed.push_back(record);
    return record;
}

ExperimentState rebuild_state(const ExperimentConfig& config, std::vector<Paper> pool,
                              const Transcript& transcript,
                              std::array<PersonaSpec, 6> personas) {
    ExperimentState state =
        make_initial_state(config, std::move(pool), std::move(personas));

    std::map<std::string, std::string> responses;  // tag -> last successful text
    for (const auto& call : transcript.calls) {
        if (call.response) responses[call.request.tag] = call.response->text;
    }

    for (const auto& record : transcript.rounds) {
        const int expected = static_cast<int>(state.completed.size()) + 1;
        const std::string where = "transcript round " + std::to_string(record.round_index);
        if (record.round_index != expected)
            throw TranscriptError(where + ": expected round " + std::to_string(expected));
        const auto violations = validate_round_record(record);
        if (!violations.empty())
            throw TranscriptError(where + ": " + join(violations, "; "));

        std::vector<TripletDeltas> round_deltas;
        for (const auto& [paper_id, triplet] : record.assignments) {
            auto it = std::find_if(state.remaining_pool.begin(), state.remaining_pool.end(),
                                   [&](const Paper& p) { return p.id == paper_id; });
            if (it == state.remaining_pool.end())
                throw TranscriptError(where + ": paper '" + paper_id +
                                      "' is not in the pool");
            state.remaining_pool.erase(it);

            TripletDeltas deltas{paper_id, {}};
            for (const auto& reviewer_id : triplet)
                deltas.deltas[reviewer_id] = record.elo_deltas.at(reviewer_id);
            round_deltas.push_back(std::move(deltas));
        }

        state.reviewers = apply_round(std::move(state.reviewers), record.round_index,
                                      round_deltas);
        for (const auto& reviewer : state.reviewers) {
            auto it = record.elo_after.find(reviewer.id);
            if (it == record.elo_after.end() || it->second != reviewer.elo)
                throw TranscriptError(where + ": elo_after mismatch for '" + reviewer.id +
                                      "'");
        }

        if (config.mode == Mode::FullAccess) {
            for (auto& reviewer : state.reviewers) {
                if (record.elo_deltas.find(reviewer.id) == record.elo_deltas.end())
                    continue;
                const std::string tag = memory_tag(record.round_index, reviewer.id);
                auto it = responses.find(tag + kRepairSuffix);
                if (it == responses.end()) it = responses.find(tag);
                if (it == responses.end())
                    throw TranscriptError(where + ": no memory response for '" +
                                          reviewer.id + "' in the call log");
                reviewer.memory = parse_memory(it->second, config.memory_word_cap);
            }
        }
        state.completed.push_back(record);
    }
    return state;
}

Transcript run_experiment(const ExperimentConfig& config, std::vector<Paper> pool,
                          CompletionProvider& provider,
                          const std::filesystem::path& transcript_path,
                          std::array<PersonaSpec, 6> personas) {
    const auto config_violations = validate_config(config);
    if (!config_violations.empty())
        throw OrchestratorError("invalid config: " + join(config_violations, "; "));
    const auto persona_violations = validate_personas(personas);
    if (!persona_violations.empty())
        throw OrchestratorError("invalid personas: " + join(persona_violations, "; "));

    const std::size_t needed =
        static_cast<std::size_t>(config.rounds) *
        static_cast<std::size_t>(config.papers_per_round);
    if (pool.size() < needed)
        throw OrchestratorError("pool too small: " + std::to_string(config.rounds) +
                                " rounds need " + std::to_string(needed) +
                                " papers, have " + std::to_string(pool.size()));

    const TranscriptHeader header = make_header(config, pool);

    ExperimentState state;
    std::optional<TranscriptWriter> writer;
    std::error_code ec;
    if (std::filesystem::exists(transcript_path, ec) &&
        std::filesystem::file_size(transcript_path, ec) > 0) {
        TranscriptFile existing = read_transcript_file(transcript_path);
        if (existing.header_line != serialize_header_line(header))
            throw OrchestratorError("existing transcript '" + transcript_path.string() +
                                    "' was produced by a different configuration or pool");
        state = rebuild_state(config, std::move(pool), existing.transcript,
                              std::move(personas));
        writer.emplace(transcript_path, existing);
    } else {
        state = make_initial_state(config, std::move(pool), std::move(personas));
        writer.emplace(transcript_path, header);
    }

    while (static_cast<int>(state.completed.size()) < config.rounds) {
        const int round_index = static_cast<int>(state.completed.size()) + 1;
        try {
            run_round(state, provider, &*writer);
        } catch (const std::exception& e) {
            throw OrchestratorError("round " + std::to_string(round_index) + ": " +
                                    e.what());
        }
    }
    return read_transcript(transcript_path);
}

}  // namespace eloreview
