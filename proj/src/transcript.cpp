#include "eloreview/transcript.hpp"

#include <fstream>

#include "eloreview/pool.hpp"

namespace eloreview {

TranscriptHeader make_header(const ExperimentConfig& config, const std::vector<Paper>& pool) {
    return {config, pool_digest(pool), pool};
}

std::string serialize_header_line(const TranscriptHeader& header) {
    json j;
    j["type"] = "header";
    j["config"] = header.config;
    j["seed"] = header.config.rng_seed;
    j["pool_digest"] = header.pool_digest;
    j["pool"] = header.pool;
    return j.dump();
}

std::string serialize_round_line(const RoundRecord& record) {
    json j = record;
    j["type"] = "round";
    return j.dump();
}

std::string serialize_call_line(const CallRecord& record) {
    json j = record;
    j["type"] = "call";
    return j.dump();
}

TranscriptFile read_transcript_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TranscriptError("cannot open transcript '" + path.string() + "'");

    TranscriptFile file;
    std::string line;
    std::size_t line_no = 0;
    bool saw_call = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw TranscriptError("transcript '" + path.string() + "' line " +
                                  std::to_string(line_no) + ": malformed JSON");
        const std::string type = j.value("type", "");
        if (line_no == 1) {
            if (type != "header")
                throw TranscriptError("transcript '" + path.string() +
                                      "' line 1: expected a header line");
            try {
                j.at("config").get_to(file.transcript.header.config);
                j.at("pool_digest").get_to(file.transcript.header.pool_digest);
                j.at("pool").get_to(file.transcript.header.pool);
            } catch (const json::exception& e) {
                throw TranscriptError("transcript '" + path.string() +
                                      "' line 1: bad header: " + e.what());
            }
            file.header_line = line;
            continue;
        }
        if (type == "round") {
            if (saw_call)
                throw TranscriptError("transcript '" + path.string() + "' line " +
                                      std::to_string(line_no) +
                                      ": round line after the call log began");
            try {
                file.transcript.rounds.push_back(j.get<RoundRecord>());
            } catch (const json::exception& e) {
                throw TranscriptError("transcript '" + path.string() + "' line " +
                                      std::to_string(line_no) + ": bad round record: " +
                                      e.what());
            }
            file.round_lines.push_back(line);
        } else if (type == "call") {
            saw_call = true;
            try {
                file.transcript.calls.push_back(j.get<CallRecord>());
            } catch (const json::exception& e) {
                throw TranscriptError("transcript '" + path.string() + "' line " +
                                      std::to_string(line_no) + ": bad call record: " +
                                      e.what());
            }
            file.call_lines.push_back(line);
        } else {
            throw TranscriptError("transcript '" + path.string() + "' line " +
                                  std::to_string(line_no) + ": unknown line type '" +
                                  type + "'");
        }
    }
    if (line_no == 0)
        throw TranscriptError("transcript '" + path.string() + "' is empty");
    return file;
}

Transcript read_transcript(const std::filesystem::path& path) {
    return read_transcript_file(path).transcript;
}

TranscriptWriter::TranscriptWriter(std::filesystem::path path, const TranscriptHeader& header)
    : path_(std::move(path)), header_line_(serialize_header_line(header)) {
    rewrite();
}

TranscriptWriter::TranscriptWriter(std::filesystem::path path, const TranscriptFile& existing)
    : path_(std::move(path)),
      header_line_(existing.header_line),
      round_lines_(existing.round_lines),
      call_lines_(existing.call_lines) {}

void TranscriptWriter::flush_round(const RoundRecord& record,
                                   const std::vector<CallRecord>& calls) {
    round_lines_.push_back(serialize_round_line(record));
    for (const auto& call : calls) call_lines_.push_back(serialize_call_line(call));
    rewrite();
}

void TranscriptWriter::rewrite() const {
    const std::filesystem::path tmp = path_.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw TranscriptError("cannot write transcript '" + tmp.string() + "'");
        out << header_line_ << '\n';
        for (const auto& line : round_lines_) out << line << '\n';
        for (const auto& line : call_lines_) out << line << '\n';
        out.flush();
        if (!out)
            throw TranscriptError("write failure on transcript '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path_, ec);
    if (ec)
        throw TranscriptError("cannot replace transcript '" + path_.string() +
                              "': " + ec.message());
}

}  // namespace eloreview
