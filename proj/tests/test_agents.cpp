#include <doctest.h>

#include <algorithm>
#include <cctype>

#include "eloreview/agents.hpp"
#include "eloreview/rng.hpp"
#include "support.hpp"

using namespace eloreview;
using namespace testsupport;

namespace {

std::string lower(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return text;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + 1))
        ++count;
    return count;
}

const Paper kPaper{"syn-0001", "Adaptive spectral routing for dense prediction",
                   "We present a routing method and evaluate it on three standard "
                   "suites, where it improves on strong baselines by small but "
                   "consistent margins.",
                   6.4, 0.8, Decision::Accept};

Review make_review(const std::string& reviewer_id, ReviewStage stage, int rating) {
    Review review;
    review.paper_id = kPaper.id;
    review.reviewer_id = reviewer_id;
    review.stage = stage;
    review.rating = rating;
    review.confidence = 3;
    review.summary = "A focused method with believable gains.";
    review.strengths = "Good coverage of evaluation suites.";
    review.weaknesses = "The gains are small and variance is not shown.";
    return review;
}

const std::vector<std::string> kPersonaNames = {"expert",    "critic",     "bluffer",
                                                "optimist",  "harmonizer", "skimmer"};

void check_anonymized(const std::string& text) {
    for (const auto& name : kPersonaNames) CHECK_FALSE(contains_ci(text, name));
    for (int i = 1; i <= 6; ++i)
        CHECK(text.find("r" + std::to_string(i)) == std::string::npos);
}

}  // namespace

TEST_CASE("initial review prompts carry persona, paper, and format contract") {
    const auto& persona = persona_spec(PersonaId::Critic);
    const auto bundle =
        build_initial_review_prompt(persona, "", kPaper, Mode::Baseline);

    CHECK(bundle.system_prompt == persona.system_prompt);
    CHECK(bundle.expected_schema == ResponseSchema::ReviewJson);
    CHECK(count_occurrences(bundle.user_message, kPaper.title) == 1);
    CHECK(bundle.user_message.find(kPaper.body) != std::string::npos);
    CHECK(bundle.user_message.find("\"rating\": <integer 1-10>") != std::string::npos);
    CHECK(bundle.user_message.find("1 (strong reject) to 10 (strong accept)") !=
          std::string::npos);
}

TEST_CASE("reviewer prompts never mention Elo in any mode") {
    for (Mode mode : {Mode::Baseline, Mode::ACAccess, Mode::FullAccess}) {
        const auto bundle = build_initial_review_prompt(
            persona_spec(PersonaId::Expert), "", kPaper, mode);
        CHECK(bundle.system_prompt.find("Elo") == std::string::npos);
        CHECK(bundle.user_message.find("Elo") == std::string::npos);
    }
}

TEST_CASE("the memory block opens the prompt only when memory exists") {
    const std::string memory = "Be more thorough and cite concrete sections.";
    const auto bundle = build_initial_review_prompt(
        persona_spec(PersonaId::Skimmer), memory, kPaper, Mode::FullAccess);

    CHECK(bundle.user_message.rfind(kMemoryBlockBegin, 0) == 0);
    const auto memory_pos = bundle.user_message.find(memory);
    const auto end_pos = bundle.user_message.find(kMemoryBlockEnd);
    const auto title_pos = bundle.user_message.find(kPaper.title);
    REQUIRE(memory_pos != std::string::npos);
    REQUIRE(end_pos != std::string::npos);
    CHECK(memory_pos < end_pos);
    CHECK(end_pos < title_pos);

    const auto bare = build_initial_review_prompt(persona_spec(PersonaId::Skimmer), "",
                                                  kPaper, Mode::FullAccess);
    CHECK(bare.user_message.find(kMemoryBlockBegin) == std::string::npos);
}

TEST_CASE("non-empty memory outside full access is a hard error") {
    for (Mode mode : {Mode::Baseline, Mode::ACAccess}) {
        CHECK_THROWS_WITH_AS(
            build_initial_review_prompt(persona_spec(PersonaId::Expert), "notes",
                                        kPaper, mode),
            "reviewer memory must be empty outside full-access mode",
            std::invalid_argument);
    }
}

TEST_CASE("second-stage prompts anonymize peers and keep the own review") {
    const auto own = make_review("r1", ReviewStage::Initial, 5);
    const std::vector<Review> peers = {make_review("r2", ReviewStage::Initial, 7),
                                       make_review("r3", ReviewStage::Initial, 3)};
    const auto bundle = build_second_review_prompt(persona_spec(PersonaId::Optimist),
                                                   "", kPaper, own, peers);

    CHECK(bundle.user_message.find("[Reviewer 1]") != std::string::npos);
    CHECK(bundle.user_message.find("[Reviewer 2]") != std::string::npos);
    CHECK(bundle.user_message.find("Your initial review:") != std::string::npos);
    CHECK(bundle.user_message.find("Rating: 5/10") != std::string::npos);
    CHECK(bundle.user_message.find("Rating: 7/10") != std::string::npos);
    CHECK(bundle.user_message.find("Rating: 3/10") != std::string::npos);
    CHECK(bundle.user_message.find("keep your assessment or revise") !=
          std::string::npos);
    CHECK_FALSE(contains_ci(bundle.user_message, "rebuttal"));
    CHECK(bundle.user_message.find("Elo") == std::string::npos);
    check_anonymized(bundle.user_message);
}

TEST_CASE("second-stage prompts demand exactly two foreign peer reviews") {
    const auto own = make_review("r1", ReviewStage::Initial, 5);
    const auto peer = make_review("r2", ReviewStage::Initial, 7);
    CHECK_THROWS_WITH_AS(
        build_second_review_prompt(persona_spec(PersonaId::Expert), "", kPaper, own,
                                   {peer}),
        doctest::Contains("exactly 2 peer reviews"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        build_second_review_prompt(persona_spec(PersonaId::Expert), "", kPaper, own,
                                   {peer, make_review("r1", ReviewStage::Initial, 4)}),
        doctest::Contains("reviewer's own"), std::invalid_argument);
}

TEST_CASE("the AC prompt lists all three reviews and the response template") {
    const std::vector<Review> finals = {make_review("r1", ReviewStage::Second, 8),
                                        make_review("r4", ReviewStage::Second, 5),
                                        make_review("r6", ReviewStage::Second, 2)};
    const auto bundle = build_ac_prompt(kPaper, finals, false, {});

    CHECK(bundle.expected_schema == ResponseSchema::ACJson);
    CHECK(bundle.system_prompt.find("area chair") != std::string::npos);
    CHECK(bundle.system_prompt.find("1 (useless) to 10 (outstanding)") !=
          std::string::npos);
    CHECK(count_occurrences(bundle.user_message, "[Reviewer ") == 3);
    CHECK(bundle.user_message.find("[Reviewer r4]") != std::string::npos);
    CHECK(bundle.user_message.find("\"r6\": <integer 1-10>") != std::string::npos);
    CHECK(bundle.user_message.find("Elo") == std::string::npos);
    CHECK(bundle.system_prompt.find("Elo") == std::string::npos);
}

TEST_CASE("AC Elo disclosure is exact and per reviewer") {
    const std::vector<Review> finals = {make_review("r1", ReviewStage::Second, 8),
                                        make_review("r2", ReviewStage::Second, 5),
                                        make_review("r3", ReviewStage::Second, 2)};
    const std::map<std::string, int> elos = {{"r1", 1620}, {"r2", 1500}, {"r3", 1380}};
    const auto bundle = build_ac_prompt(kPaper, finals, true, elos);

    CHECK(bundle.user_message.find("[Reviewer r1 | Elo rating: 1620]") !=
          std::string::npos);
    CHECK(bundle.user_message.find("[Reviewer r2 | Elo rating: 1500]") !=
          std::string::npos);
    CHECK(bundle.user_message.find("[Reviewer r3 | Elo rating: 1380]") !=
          std::string::npos);
    CHECK(count_occurrences(bundle.user_message, kEloRatingMarker) == 3);
    CHECK(bundle.user_message.find(kEloDeltaMarker) == std::string::npos);

    CHECK_THROWS_WITH_AS(
        build_ac_prompt(kPaper, finals, true, {{"r1", 1620}, {"r2", 1500}}),
        doctest::Contains("missing Elo for reviewer 'r3'"), std::invalid_argument);
}

TEST_CASE("the AC prompt rejects malformed review sets") {
    const std::vector<Review> two = {make_review("r1", ReviewStage::Second, 8),
                                     make_review("r2", ReviewStage::Second, 5)};
    CHECK_THROWS_WITH_AS(build_ac_prompt(kPaper, two, false, {}),
                         doctest::Contains("exactly 3 reviews"), std::invalid_argument);

    const std::vector<Review> wrong_stage = {make_review("r1", ReviewStage::Second, 8),
                                             make_review("r2", ReviewStage::Initial, 5),
                                             make_review("r3", ReviewStage::Second, 2)};
    CHECK_THROWS_WITH_AS(build_ac_prompt(kPaper, wrong_stage, false, {}),
                         doctest::Contains("second-stage"), std::invalid_argument);
}

TEST_CASE("memory prompts state the signed delta, the score, and the cap") {
    const auto& persona = persona_spec(PersonaId::Bluffer);
    const auto gain = build_memory_update_prompt(persona, "", 100, 9, 150);
    CHECK(gain.expected_schema == ResponseSchema::MemoryJson);
    CHECK(gain.user_message.find("Elo change this round: +100") != std::string::npos);
    CHECK(gain.user_message.find("9/10") != std::string::npos);
    CHECK(gain.user_message.find("at most 150 words") != std::string::npos);
    CHECK(gain.user_message.find("no previous strategy notes") != std::string::npos);
    CHECK(gain.user_message.find("do not abandon") != std::string::npos);
    CHECK(gain.user_message.find(kEloRatingMarker) == std::string::npos);

    const auto loss =
        build_memory_update_prompt(persona, "Trust brevity less.", -50, 3, 80);
    CHECK(loss.user_message.find("Elo change this round: -50") != std::string::npos);
    CHECK(loss.user_message.find("Trust brevity less.") != std::string::npos);
    CHECK(loss.user_message.find("no previous strategy notes") == std::string::npos);
    CHECK(loss.user_message.find("at most 80 words") != std::string::npos);
}

TEST_CASE("JSON extraction finds the first balanced object that parses") {
    CHECK(extract_first_json_object(R"({"a": 1})")->at("a") == 1);
    CHECK(extract_first_json_object("Sure! {\"a\": 1} done")->at("a") == 1);
    CHECK(extract_first_json_object(R"({"outer": {"inner": 2}})")->at("outer")
              .at("inner") == 2);
    CHECK(extract_first_json_object(R"({"s": "braces } { in string"})")->at("s") ==
          "braces } { in string");
    CHECK(extract_first_json_object(R"({"s": "escaped \" quote"})")->at("s") ==
          "escaped \" quote");
    CHECK(extract_first_json_object("{not json} then {\"a\": 3}")->at("a") == 3);
    CHECK_FALSE(extract_first_json_object("no braces at all").has_value());
    CHECK_FALSE(extract_first_json_object("{truncated: ").has_value());
    CHECK_FALSE(extract_first_json_object("[1, 2, 3]").has_value());
}

TEST_CASE("review parsing fills call-site context and validates ranges") {
    const std::string raw =
        R"(Here is my verdict. {"summary": "Solid.", "strengths": "Tight.",)"
        R"( "weaknesses": "Narrow.", "rating": 8, "confidence": 4} Thanks!)";
    const auto review = parse_review(raw, "p7", "r2", ReviewStage::Second);
    CHECK(review.paper_id == "p7");
    CHECK(review.reviewer_id == "r2");
    CHECK(review.stage == ReviewStage::Second);
    CHECK(review.rating == 8);
    CHECK(review.confidence == 4);
    CHECK(review.summary == "Solid.");

    const json base{{"summary", "s"}, {"strengths", "s"}, {"weaknesses", "w"},
                    {"rating", 8},    {"confidence", 4}};
    json bad = base;
    bad["rating"] = 11;
    CHECK_THROWS_WITH_AS(parse_review(bad.dump(), "p", "r", ReviewStage::Initial),
                         doctest::Contains("'rating' out of range [1, 10], got 11"),
                         ParseError);
    bad = base;
    bad["rating"] = "8";
    CHECK_THROWS_WITH_AS(parse_review(bad.dump(), "p", "r", ReviewStage::Initial),
                         doctest::Contains("'rating' must be an integer"), ParseError);
    bad = base;
    bad.erase("summary");
    CHECK_THROWS_WITH_AS(parse_review(bad.dump(), "p", "r", ReviewStage::Initial),
                         doctest::Contains("missing field 'summary'"), ParseError);
    CHECK_THROWS_WITH_AS(parse_review("nothing here", "p", "r", ReviewStage::Initial),
                         "no JSON object found in response", ParseError);
}

TEST_CASE("AC parsing enforces the exact reviewer set") {
    const std::vector<std::string> reviewers = {"r1", "r4", "r6"};
    const json good{{"decision", "Accept"},
                    {"quality_scores", {{"r1", 9}, {"r4", 6}, {"r6", 2}}},
                    {"rationale", "Depth won."}};
    const auto outcome = parse_ac("prefix " + good.dump(), "p3", reviewers);
    CHECK(outcome.paper_id == "p3");
    CHECK(outcome.decision == Decision::Accept);
    CHECK(outcome.quality_scores ==
          std::map<std::string, int>{{"r1", 9}, {"r4", 6}, {"r6", 2}});
    CHECK(outcome.rationale == "Depth won.");

    json variant = good;
    variant["decision"] = "reject";
    CHECK(parse_ac(variant.dump(), "p3", reviewers).decision == Decision::Reject);
    variant["decision"] = "ACCEPT";
    CHECK(parse_ac(variant.dump(), "p3", reviewers).decision == Decision::Accept);
    variant["decision"] = "maybe";
    CHECK_THROWS_WITH_AS(parse_ac(variant.dump(), "p3", reviewers),
                         doctest::Contains("must be Accept or Reject, got 'maybe'"),
                         ParseError);

    json missing = good;
    missing["quality_scores"].erase("r4");
    CHECK_THROWS_WITH_AS(parse_ac(missing.dump(), "p3", reviewers),
                         doctest::Contains("missing reviewer 'r4'"), ParseError);

    json extra = good;
    extra["quality_scores"]["r9"] = 5;
    CHECK_THROWS_WITH_AS(parse_ac(extra.dump(), "p3", reviewers),
                         doctest::Contains("exactly one entry per assigned reviewer"),
                         ParseError);

    json zero = good;
    zero["quality_scores"]["r1"] = 0;
    CHECK_THROWS_AS(parse_ac(zero.dump(), "p3", reviewers), ParseError);

    json silent = good;
    silent.erase("rationale");
    CHECK(parse_ac(silent.dump(), "p3", reviewers).rationale.empty());
}

TEST_CASE("memory parsing truncates at the word cap instead of failing") {
    std::string many;
    for (int i = 0; i < 200; ++i) many += "word" + std::to_string(i) + " ";
    const json raw{{"memory", many}};
    const auto memory = parse_memory(raw.dump(), 150);

    std::istringstream counter(memory);
    std::string token;
    int words = 0;
    while (counter >> token) ++words;
    CHECK(words == 150);
    CHECK(memory.find("word149") != std::string::npos);
    CHECK(memory.find("word150") == std::string::npos);

    CHECK(parse_memory(R"({"memory": "short note"})", 150) == "short note");
    CHECK_THROWS_WITH_AS(parse_memory(R"({"note": "wrong key"})", 150),
                         doctest::Contains("missing field 'memory'"), ParseError);
}

TEST_CASE("word truncation preserves internal spacing and exact boundaries") {
    CHECK(truncate_words("one two three", 3) == "one two three");
    CHECK(truncate_words("one two three", 5) == "one two three");
    CHECK(truncate_words("one  two   three", 2) == "one  two");
    CHECK(truncate_words("line one\nline two", 3) == "line one\nline");
    CHECK(truncate_words("anything", 0) == "");
    CHECK(truncate_words("", 10) == "");
    CHECK_THROWS_AS(truncate_words("x", -1), std::invalid_argument);
}

TEST_CASE("wrapped model output parses back to the exact review") {
    Rng rng(0xa9fL);
    const std::vector<std::string> prefixes = {
        "", "Sure thing! ", "My review follows.\n\n", "{oops} ",
        "Note: use of { brackets } is fine. "};
    const std::vector<std::string> suffixes = {"", " Done.", "\nLet me know.",
                                               " }} extra braces }}"};
    const std::string alphabet =
        "abcdefghij KLMNOP\"\\{}[]:,0123456789\n\t";

    for (int iteration = 0; iteration < 300; ++iteration) {
        std::string summary;
        const auto length = rng.below(40);
        for (std::uint64_t i = 0; i < length; ++i)
            summary += alphabet[rng.below(alphabet.size())];

        Review expected;
        expected.paper_id = "p";
        expected.reviewer_id = "r";
        expected.stage = ReviewStage::Initial;
        expected.rating = 1 + static_cast<int>(rng.below(10));
        expected.confidence = 1 + static_cast<int>(rng.below(5));
        expected.summary = summary;
        expected.strengths = "s";
        expected.weaknesses = "w";

        const json j{{"summary", expected.summary},
                     {"strengths", expected.strengths},
                     {"weaknesses", expected.weaknesses},
                     {"rating", expected.rating},
                     {"confidence", expected.confidence}};
        const std::string wrapped = prefixes[rng.below(prefixes.size())] + j.dump() +
                                    suffixes[rng.below(suffixes.size())];
        CHECK(parse_review(wrapped, "p", "r", ReviewStage::Initial) == expected);
    }
}

TEST_CASE("persona files on disk match the compiled-in registry") {
    const auto from_disk = load_personas(ELOREVIEW_SOURCE_DIR "/personas");
    const auto& builtin = builtin_personas();
    for (std::size_t i = 0; i < builtin.size(); ++i) CHECK(from_disk[i] == builtin[i]);
}

TEST_CASE("the builtin persona set is internally consistent") {
    const auto& specs = builtin_personas();
    CHECK(validate_personas(specs).empty());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        CHECK(specs[i].id == kAllPersonas[i]);
        CHECK(specs[i].system_prompt.find(specs[i].trait_seed) != std::string::npos);
        CHECK(specs[i].system_prompt.find("Elo") == std::string::npos);
        for (const auto& name : kPersonaNames)
            CHECK_FALSE(contains_ci(specs[i].system_prompt, name));
    }
    CHECK(persona_spec(PersonaId::Harmonizer).id == PersonaId::Harmonizer);
}

TEST_CASE("persona validation pinpoints broken specs") {
    auto specs = builtin_personas();
    specs[2].system_prompt = "A prompt that forgot its seed.";
    specs[4].trait_seed = "";
    const auto errors = validate_personas(specs);
    REQUIRE(errors.size() == 2);
    CHECK(errors[0] == "persona 'bluffer' system prompt does not contain its trait seed");
    CHECK(errors[1] == "persona 'harmonizer' has an empty trait seed");

    auto duplicated = builtin_personas();
    duplicated[1] = duplicated[0];
    const auto dup_errors = validate_personas(duplicated);
    CHECK(std::any_of(dup_errors.begin(), dup_errors.end(), [](const std::string& e) {
        return e.find("duplicate persona 'expert'") != std::string::npos;
    }));

    TempDir dir;
    CHECK_THROWS_WITH_AS(load_personas(dir.path),
                         doctest::Contains("cannot open persona file"),
                         std::runtime_error);
}
