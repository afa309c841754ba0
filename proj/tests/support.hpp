#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"
#include "eloreview/provider.hpp"

namespace testsupport {

using namespace eloreview;

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate = base / ("eloreview-test-" + std::to_string(rd()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create a temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

struct CaptureStream {
    explicit CaptureStream(std::ostream& stream)
        : stream_(stream), old_(stream.rdbuf(buffer_.rdbuf())) {}
    ~CaptureStream() { stream_.rdbuf(old_); }
    std::string text() const { return buffer_.str(); }

private:
    std::ostream& stream_;
    std::ostringstream buffer_;
    std::streambuf* old_;
};

inline std::vector<std::string> split_tag(std::string tag) {
    const std::string repair = "/repair";
    if (tag.size() > repair.size() &&
        tag.compare(tag.size() - repair.size(), repair.size(), repair) == 0)
        tag.resize(tag.size() - repair.size());
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = tag.find('/', start);
        if (pos == std::string::npos) {
            parts.push_back(tag.substr(start));
            return parts;
        }
        parts.push_back(tag.substr(start, pos - start));
        start = pos + 1;
    }
}

// Fixed AC quality score per reviewer: r1 (expert persona) always ranks top
// of any triplet it is in, r6 (skimmer) always bottom. All values distinct
// so rule-driven rounds never tie.
inline int quality_of(const std::string& reviewer_id) {
    static const std::map<std::string, int> table{{"r1", 10}, {"r2", 7}, {"r3", 5},
                                                  {"r4", 6},  {"r5", 8}, {"r6", 1}};
    const auto it = table.find(reviewer_id);
    if (it != table.end()) return it->second;
    return 1 + static_cast<int>(fnv1a(reviewer_id) % 10);
}

inline std::vector<std::string> ac_reviewer_ids(const CompletionRequest& request) {
    std::vector<std::string> ids;
    for (const auto& message : request.user_messages) {
        std::size_t pos = 0;
        const std::string label = "[Reviewer ";
        while ((pos = message.find(label, pos)) != std::string::npos) {
            pos += label.size();
            const auto end = message.find_first_of(" ]|", pos);
            ids.push_back(message.substr(pos, end - pos));
        }
    }
    return ids;
}

// Deterministic stand-in for a model: every response is a valid JSON
// document derived from the call tag alone (plus, for AC calls, the
// reviewer ids named in the prompt). The wording deliberately avoids
// persona names, reviewer ids, and the string "Elo" so audit and
// anonymization scans stay meaningful.
inline std::string rule_response(const CompletionRequest& request) {
    const auto parts = split_tag(request.tag);
    if (parts.size() == 4 && (parts[3] == "initial" || parts[3] == "second")) {
        const std::string& paper_id = parts[1];
        const std::string& reviewer_id = parts[2];
        const std::uint64_t h = fnv1a(paper_id + "|" + reviewer_id + "|" + parts[3]);
        json j{{"summary",
                "The submission studies a focused method and reports consistent gains "
                "on standard benchmarks (case " +
                    std::to_string(h % 997) + ")."},
               {"strengths", "Clear motivation and a tidy empirical section."},
               {"weaknesses", "Sparse ablations and claims that outpace the evidence."},
               {"rating", 1 + static_cast<int>(h % 10)},
               {"confidence", 1 + static_cast<int>(h % 5)}};
        return j.dump();
    }
    if (parts.size() == 3 && parts[2] == "ac") {
        const std::string& paper_id = parts[1];
        json scores = json::object();
        for (const auto& reviewer_id : ac_reviewer_ids(request))
            scores[reviewer_id] = quality_of(reviewer_id);
        json j{{"decision", fnv1a(paper_id) % 2 == 0 ? "Accept" : "Reject"},
               {"quality_scores", scores},
               {"rationale",
                "Votes weighed by depth of engagement shown in each assessment."}};
        return j.dump();
    }
    if (parts.size() == 3 && parts[2] == "memory") {
        json j{{"memory", parts[0] + " notes: keep ratings grounded in stated results "
                          "and flag missing baselines tersely."}};
        return j.dump();
    }
    throw std::runtime_error("rule provider: unrecognized tag '" + request.tag + "'");
}

inline ExperimentConfig test_config(Mode mode, int rounds, std::uint64_t seed) {
    ExperimentConfig config;
    config.mode = mode;
    config.rounds = rounds;
    config.rng_seed = seed;
    return config;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

}  // namespace testsupport
