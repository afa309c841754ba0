#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"
#include "eloreview/provider.hpp"

namespace eloreview {

inline constexpr const char* kTranscriptSuffix = ".transcript.jsonl";

struct TranscriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line 1 of every transcript file. The paper pool is embedded so that replay
// and reporting need nothing but the transcript itself.
struct TranscriptHeader {
    ExperimentConfig config;
    std::uint64_t pool_digest = 0;
    std::vector<Paper> pool;

    friend bool operator==(const TranscriptHeader&, const TranscriptHeader&) = default;
};

TranscriptHeader make_header(const ExperimentConfig& config, const std::vector<Paper>& pool);

struct Transcript {
    TranscriptHeader header;
    std::vector<RoundRecord> rounds;
    std::vector<CallRecord> calls;
};

// Parsed transcript plus the exact lines it was read from, for byte-preserving resume.
struct TranscriptFile {
    Transcript transcript;
    std::string header_line;
    std::vector<std::string> round_lines;
    std::vector<std::string> call_lines;
};

std::string serialize_header_line(const TranscriptHeader& header);
std::string serialize_round_line(const RoundRecord& record);
std::string serialize_call_line(const CallRecord& record);

TranscriptFile read_transcript_file(const std::filesystem::path& path);
Transcript read_transcript(const std::filesystem::path& path);

// Accumulates one line per RoundRecord followed by the call log, and rewrites
// the whole file atomically (temp file + rename) on every flush. Rounds are
// durable once flush_round returns; a killed run leaves the previous flush intact.
class TranscriptWriter {
public:
    TranscriptWriter(std::filesystem::path path, const TranscriptHeader& header);
    TranscriptWriter(std::filesystem::path path, const TranscriptFile& existing);

    void flush_round(const RoundRecord& record, const std::vector<CallRecord>& calls);

    const std::filesystem::path& path() const { return path_; }
    std::size_t rounds_flushed() const { return round_lines_.size(); }

private:
    void rewrite() const;

    std::filesystem::path path_;
    std::string header_line_;
    std::vector<std::string> round_lines_;
    std::vector<std::string> call_lines_;
};

}  // namespace eloreview
