#include "eloreview/personas.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eloreview {

void to_json(json& j, const PersonaSpec& spec) {
    j = json{{"id", to_string(spec.id)},
             {"trait_seed", spec.trait_seed},
             {"system_prompt", spec.system_prompt},
             {"rating_tendency", spec.rating_tendency}};
}

void from_json(const json& j, PersonaSpec& spec) {
    spec.id = persona_from_string(j.at("id").get<std::string>());
    j.at("trait_seed").get_to(spec.trait_seed);
    j.at("system_prompt").get_to(spec.system_prompt);
    j.at("rating_tendency").get_to(spec.rating_tendency);
}

namespace {

constexpr const char* kReviewerRole =
    "You are a reviewer for a machine learning conference. Reviewing style: ";

std::array<PersonaSpec, 6> make_builtin() {
    std::array<PersonaSpec, 6> specs;

    specs[0].id = PersonaId::Expert;
    specs[0].trait_seed =
        "Provides careful, professional assessments with full engagement with the paper.";
    specs[0].system_prompt =
        std::string(kReviewerRole) + specs[0].trait_seed +
        " Read the whole submission, weigh methodology and evidence, justify every "
        "judgment with specifics from the text, and calibrate your rating to the "
        "strength of the evidence. Stay professional and constructive.";
    specs[0].rating_tendency = "calibrated to evidence";

    specs[1].id = PersonaId::Critic;
    specs[1].trait_seed =
        "Applies strict standards, emphasizing flaws and often defaulting to "
        "skeptical evaluations.";
    specs[1].system_prompt =
        std::string(kReviewerRole) + specs[1].trait_seed +
        " Hunt for methodological weaknesses, missing baselines, and overclaimed "
        "results; be hard to convince, and let genuine rigor be the only thing that "
        "earns a higher score.";
    specs[1].rating_tendency = "skews low";

    specs[2].id = PersonaId::Bluffer;
    specs[2].trait_seed =
        "Displays high confidence and authoritative tone while relying on partial "
        "reading.";
    specs[2].system_prompt =
        std::string(kReviewerRole) + specs[2].trait_seed +
        " Skim the abstract and a few sections, then write as if you read everything: "
        "sweeping claims, name-dropped context, firm verdicts, and high stated "
        "confidence regardless of how much you actually engaged.";
    specs[2].rating_tendency = "confident regardless of engagement";

    specs[3].id = PersonaId::Optimist;
    specs[3].trait_seed =
        "Focuses on paper contributions and strengths, gives positive ratings most "
        "of the time.";
    specs[3].system_prompt =
        std::string(kReviewerRole) + specs[3].trait_seed +
        " Lead with what works, frame weaknesses as fixable suggestions, and lean "
        "toward acceptance unless something is badly broken.";
    specs[3].rating_tendency = "skews high";

    specs[4].id = PersonaId::Harmonizer;
    specs[4].trait_seed =
        "Balances strengths and weaknesses with a consensus-seeking perspective, "
        "avoiding extreme judgments unless strongly justified.";
    specs[4].system_prompt =
        std::string(kReviewerRole) + specs[4].trait_seed +
        " Weigh both sides evenly, keep ratings near the middle of the scale, and "
        "reserve strong scores for overwhelming evidence.";
    specs[4].rating_tendency = "clusters mid-scale";

    specs[5].id = PersonaId::Skimmer;
    specs[5].trait_seed =
        "Superficial, low-effort reviewer with limited engagement with the paper's "
        "content.";
    specs[5].system_prompt =
        std::string(kReviewerRole) + specs[5].trait_seed +
        " Glance at the abstract, write short generic remarks that could apply to "
        "almost any paper, avoid specifics, and spend as little effort as possible.";
    specs[5].rating_tendency = "arbitrary, low-information";

    return specs;
}

}  // namespace

const std::array<PersonaSpec, 6>& builtin_personas() {
    static const std::array<PersonaSpec, 6> specs = make_builtin();
    return specs;
}

const PersonaSpec& persona_spec(PersonaId id) {
    for (const auto& spec : builtin_personas()) {
        if (spec.id == id) return spec;
    }
    throw std::logic_error("persona registry is incomplete");
}

std::array<PersonaSpec, 6> load_personas(const std::filesystem::path& dir) {
    std::array<PersonaSpec, 6> specs;
    std::size_t i = 0;
    for (PersonaId id : kAllPersonas) {
        const auto path = dir / (to_string(id) + ".json");
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open persona file '" + path.string() + "'");
        json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw std::runtime_error("persona file '" + path.string() + "': " + e.what());
        }
        specs[i++] = j.get<PersonaSpec>();
    }
    const auto errors = validate_personas(specs);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "persona set under '" << dir.string() << "' is invalid:";
        for (const auto& e : errors) msg << "\n  " << e;
        throw std::runtime_error(msg.str());
    }
    return specs;
}

std::vector<std::string> validate_personas(const std::array<PersonaSpec, 6>& specs) {
    std::vector<std::string> errors;
    std::set<PersonaId> seen;
    for (const auto& spec : specs) {
        const std::string name = to_string(spec.id);
        if (!seen.insert(spec.id).second)
            errors.push_back("duplicate persona '" + name + "'");
        if (spec.system_prompt.empty())
            errors.push_back("persona '" + name + "' has an empty system prompt");
        if (spec.trait_seed.empty())
            errors.push_back("persona '" + name + "' has an empty trait seed");
        else if (spec.system_prompt.find(spec.trait_seed) == std::string::npos)
            errors.push_back("persona '" + name +
                             "' system prompt does not contain its trait seed");
    }
    if (seen.size() != kAllPersonas.size())
        errors.push_back("persona set must cover all six personas");
    return errors;
}

}  // namespace eloreview
