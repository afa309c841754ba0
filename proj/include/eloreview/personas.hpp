#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"

namespace eloreview {

// Behavior profile for one reviewer agent. trait_seed is the one-line
// description of the profile; the system prompt expands it and must contain
// it verbatim. rating_tendency is a documentation note only and never
// reaches a prompt.
struct PersonaSpec {
    PersonaId id = PersonaId::Expert;
    std::string trait_seed;
    std::string system_prompt;
    std::string rating_tendency;

    friend bool operator==(const PersonaSpec&, const PersonaSpec&) = default;
};

void to_json(json& j, const PersonaSpec& spec);
void from_json(const json& j, PersonaSpec& spec);

// Compiled-in registry, one spec per persona, byte-identical to the JSON
// documents under personas/.
const std::array<PersonaSpec, 6>& builtin_personas();

const PersonaSpec& persona_spec(PersonaId id);

// Loads <persona>.json for all six personas from a directory and validates
// the set. Throws std::runtime_error listing any violations.
std::array<PersonaSpec, 6> load_personas(const std::filesystem::path& dir);

// Exactly six specs, one per persona, each with a non-empty system prompt
// containing its trait seed. Empty result means valid.
std::vector<std::string> validate_personas(const std::array<PersonaSpec, 6>& specs);

}  // namespace eloreview
