#include "eloreview/audit.hpp"

#include <cstdlib>
#include <map>
#include <set>

#include "eloreview/agents.hpp"
#include "eloreview/orchestrator.hpp"

namespace eloreview {

namespace {

enum class CallKind { InitialReview, SecondReview, AreaChair, MemoryUpdate, Unknown };

struct TagInfo {
    CallKind kind = CallKind::Unknown;
    int round = 0;
    std::string paper_id;
    std::string reviewer_id;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

TagInfo parse_tag(std::string tag) {
    TagInfo info;
    const std::string repair = kRepairSuffix;
    if (tag.size() > repair.size() &&
        tag.compare(tag.size() - repair.size(), repair.size(), repair) == 0) {
        tag.resize(tag.size() - repair.size());
    }
    const auto parts = split(tag, '/');
    if (parts.empty() || parts[0].rfind("round", 0) != 0) return info;
    char* end = nullptr;
    const long round = std::strtol(parts[0].c_str() + 5, &end, 10);
    if (end == nullptr || *end != '\0' || round < 1) return info;
    info.round = static_cast<int>(round);

    if (parts.size() == 3 && parts[2] == "ac") {
        info.kind = CallKind::AreaChair;
        info.paper_id = parts[1];
    } else if (parts.size() == 3 && parts[2] == "memory") {
        info.kind = CallKind::MemoryUpdate;
        info.reviewer_id = parts[1];
    } else if (parts.size() == 4 && (parts[3] == "initial" || parts[3] == "second")) {
        info.kind = parts[3] == "initial" ? CallKind::InitialReview : CallKind::SecondReview;
        info.paper_id = parts[1];
        info.reviewer_id = parts[2];
    }
    return info;
}

std::string full_prompt(const CompletionRequest& request) {
    std::string text = request.system_prompt;
    for (const auto& message : request.user_messages) {
        text += '\n';
        text += message;
    }
    return text;
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// Removes every begin..end memory region; model-authored memory content is
// exempt from the Elo scan. Returns false on an unterminated block.
bool strip_memory_blocks(std::string& text) {
    while (true) {
        const std::size_t begin = text.find(kMemoryBlockBegin);
        if (begin == std::string::npos) return true;
        const std::size_t end = text.find(kMemoryBlockEnd, begin);
        if (end == std::string::npos) return false;
        text.erase(begin, end + std::string(kMemoryBlockEnd).size() - begin);
    }
}

std::string signed_delta(int delta) {
    return (delta >= 0 ? "+" : "") + std::to_string(delta);
}

}  // namespace

std::vector<AuditFinding> audit_mode_isolation(const Transcript& transcript) {
    std::vector<AuditFinding> findings;
    const Mode mode = transcript.header.config.mode;
    const int initial_elo = transcript.header.config.initial_elo;

    // Pre-round Elo and the round records by index, for AC and delta checks.
    std::map<int, std::map<std::string, int>> pre_elo;
    std::map<int, const RoundRecord*> records;
    std::map<std::string, int> current;
    for (const auto& record : transcript.rounds) {
        if (current.empty()) {
            for (const auto& [reviewer_id, elo] : record.elo_after)
                current[reviewer_id] = initial_elo;
        }
        pre_elo[record.round_index] = current;
        records[record.round_index] = &record;
        current = record.elo_after;
    }

    std::set<std::pair<int, std::string>> memory_calls_seen;

    for (const auto& call : transcript.calls) {
        const std::string& tag = call.request.tag;
        const TagInfo info = parse_tag(tag);
        auto flag = [&](const std::string& message) { findings.push_back({tag, message}); };

        if (info.kind == CallKind::Unknown) {
            flag("unrecognized call tag");
            continue;
        }
        auto record_it = records.find(info.round);
        if (record_it == records.end()) {
            flag("call for a round with no record");
            continue;
        }
        const RoundRecord& record = *record_it->second;

        std::string text = full_prompt(call.request);

        const bool review_call =
            info.kind == CallKind::InitialReview || info.kind == CallKind::SecondReview;

        if (mode != Mode::FullAccess && info.kind == CallKind::MemoryUpdate) {
            flag("memory-update call outside full-access mode");
            continue;
        }
        if (mode != Mode::FullAccess && contains(text, kMemoryBlockBegin)) {
            flag("memory block outside full-access mode");
        }

        switch (mode) {
            case Mode::Baseline:
                if (contains(text, "Elo")) flag("Elo disclosed in baseline mode");
                break;

            case Mode::ACAccess:
                if (review_call && contains(text, "Elo"))
                    flag("Elo disclosed to a reviewer");
                break;

            case Mode::FullAccess:
                if (review_call) {
                    if (contains(text, kMemoryBlockBegin) && !strip_memory_blocks(text)) {
                        flag("unterminated memory block");
                        break;
                    }
                    if (contains(text, "Elo"))
                        flag("Elo disclosed to a reviewer outside the memory block");
                }
                break;
        }

        if (info.kind == CallKind::AreaChair && mode != Mode::Baseline) {
            auto triplet_it = record.assignments.find(info.paper_id);
            if (triplet_it == record.assignments.end()) {
                flag("AC call for an unassigned paper");
                continue;
            }
            if (contains(text, kEloDeltaMarker))
                flag("Elo delta disclosed in an AC prompt");
            if (contains(text, kMemoryBlockBegin))
                flag("memory block in an AC prompt");
            const auto& before = pre_elo.at(info.round);
            for (const auto& reviewer_id : triplet_it->second) {
                auto elo_it = before.find(reviewer_id);
                if (elo_it == before.end()) {
                    flag("no pre-round Elo for reviewer '" + reviewer_id + "'");
                    continue;
                }
                const std::string expected =
                    std::string(kEloRatingMarker) + std::to_string(elo_it->second);
                if (!contains(text, expected))
                    flag("AC prompt is missing '" + expected + "' for reviewer '" +
                         reviewer_id + "'");
            }
        }
        if (info.kind == CallKind::AreaChair && mode == Mode::Baseline) {
            // covered by the blanket Elo scan above
        }

        if (info.kind == CallKind::MemoryUpdate) {
            memory_calls_seen.insert({info.round, info.reviewer_id});
            auto delta_it = record.elo_deltas.find(info.reviewer_id);
            if (delta_it == record.elo_deltas.end()) {
                flag("memory update for a reviewer with no delta this round");
                continue;
            }
            const std::string expected =
                std::string(kEloDeltaMarker) + signed_delta(delta_it->second);
            if (!contains(text, expected))
                flag("memory prompt is missing '" + expected + "'");
            if (contains(text, kEloRatingMarker))
                flag("absolute Elo rating disclosed in a memory prompt");
        }
    }

    if (mode == Mode::FullAccess) {
        for (const auto& record : transcript.rounds) {
            for (const auto& [reviewer_id, delta] : record.elo_deltas) {
                if (!memory_calls_seen.count({record.round_index, reviewer_id}))
                    findings.push_back(
                        {"", "round " + std::to_string(record.round_index) +
                                 ": no memory-update call for '" + reviewer_id + "'"});
            }
        }
    }
    return findings;
}

}  // namespace eloreview
