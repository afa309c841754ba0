#pragma once

#include <string>
#include <vector>

#include "eloreview/transcript.hpp"

namespace eloreview {

struct AuditFinding {
    std::string tag;      // empty for transcript-level findings
    std::string message;

    friend bool operator==(const AuditFinding&, const AuditFinding&) = default;
};

// Substring audit of the complete call log against the disclosure rules of
// the transcript's mode. Baseline: no Elo values, no memory blocks, no
// memory calls anywhere. ACAccess: additionally requires every AC prompt to
// carry each assigned reviewer's pre-round Elo, while reviewer prompts stay
// clean. FullAccess: reviewer review prompts may carry a memory block (whose
// content is exempt, being model-authored) but nothing Elo-related outside
// it; every participant gets a memory-update call stating its signed delta.
// Empty result means the transcript is clean.
std::vector<AuditFinding> audit_mode_isolation(const Transcript& transcript);

}  // namespace eloreview
