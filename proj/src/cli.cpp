#include "eloreview/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "eloreview/metrics.hpp"
#include "eloreview/orchestrator.hpp"
#include "eloreview/pool.hpp"

namespace eloreview {

CliConfig::CliConfig()
    : pool_max_variance(kDefaultMaxVariance), pool_interval_edges(kDefaultIntervalEdges) {}

namespace {

// Stream salt for the pre-run stratified sample, distinct from every
// per-round stream (rounds use their 1-based index).
constexpr std::uint64_t kSampleStream = 0x73616d706c65ULL;

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key,
               std::vector<std::string>& errors);

template <>
long long parse_number<long long>(const std::string& value, const std::string& key,
                                  std::vector<std::string>& errors) {
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(value, &used);
        if (used == value.size()) return parsed;
    } catch (const std::exception&) {
    }
    errors.push_back(key + ": expected an integer, got '" + value + "'");
    return 0;
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& value, const std::string& key,
                                          std::vector<std::string>& errors) {
    try {
        std::size_t used = 0;
        const unsigned long long parsed = std::stoull(value, &used);
        if (used == value.size()) return parsed;
    } catch (const std::exception&) {
    }
    errors.push_back(key + ": expected an unsigned integer, got '" + value + "'");
    return 0;
}

template <>
double parse_number<double>(const std::string& value, const std::string& key,
                            std::vector<std::string>& errors) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used == value.size()) return parsed;
    } catch (const std::exception&) {
    }
    errors.push_back(key + ": expected a number, got '" + value + "'");
    return 0.0;
}

std::vector<double> parse_edges(const std::string& value, const std::string& key,
                                std::vector<std::string>& errors) {
    std::vector<double> edges;
    std::string rest = value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string piece = trim(rest.substr(0, comma));
        edges.push_back(parse_number<double>(piece, key, errors));
        if (comma == std::string::npos) break;
        rest = rest.substr(comma + 1);
    }
    return edges;
}

}  // namespace

CliConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");

    CliConfig config;
    std::vector<std::string> errors;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty() || content[0] == '#') continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        const std::size_t before = errors.size();
        auto& exp = config.experiment;

        if (key == "mode") {
            try {
                exp.mode = mode_from_string(value);
            } catch (const std::exception& e) {
                errors.push_back(e.what());
            }
        } else if (key == "rounds") {
            exp.rounds = static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "papers_per_round") {
            exp.papers_per_round = static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "initial_elo") {
            exp.initial_elo = static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "rng_seed") {
            exp.rng_seed = parse_number<std::uint64_t>(value, key, errors);
        } else if (key == "memory_word_cap") {
            exp.memory_word_cap = static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "provider.endpoint") {
            exp.provider.endpoint = value;
        } else if (key == "provider.model") {
            exp.provider.model = value;
        } else if (key == "provider.temperature") {
            exp.provider.temperature = parse_number<double>(value, key, errors);
        } else if (key == "provider.max_output_tokens") {
            exp.provider.max_output_tokens =
                static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "provider.max_retries") {
            exp.provider.max_retries =
                static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "provider.retry_backoff_ms") {
            exp.provider.retry_backoff_ms =
                static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "provider.concurrency") {
            exp.provider.concurrency =
                static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "provider.requests_per_second") {
            exp.provider.requests_per_second = parse_number<double>(value, key, errors);
        } else if (key == "pool.max_variance") {
            if (value == "inf") {
                config.pool_max_variance = std::numeric_limits<double>::infinity();
            } else {
                config.pool_max_variance = parse_number<double>(value, key, errors);
            }
        } else if (key == "pool.interval_edges") {
            config.pool_interval_edges = parse_edges(value, key, errors);
        } else if (key == "pool.sample_n") {
            config.pool_sample_n = static_cast<int>(parse_number<long long>(value, key, errors));
        } else if (key == "personas_dir") {
            config.personas_dir = value;
        } else {
            errors.push_back("unknown key '" + key + "'");
        }
        for (std::size_t i = before; i < errors.size(); ++i)
            errors[i] = "line " + std::to_string(line_no) + ": " + errors[i];
    }
    if (!errors.empty()) {
        std::string message = "config file '" + path.string() + "':";
        for (const auto& error : errors) message += "\n  " + error;
        throw std::runtime_error(message);
    }
    return config;
}

namespace {

struct Diagnostics {
    bool json_mode = false;

    int fail(int code, const std::string& message) const {
        if (json_mode) {
            std::cerr << json{{"level", "error"}, {"message", message}}.dump() << '\n';
        } else {
            std::cerr << "error: " << message << '\n';
        }
        return code;
    }
};

struct RunOptions {
    std::string config_path;
    std::string pool_path;
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int rounds = 0;
    bool rounds_set = false;
    std::string out_path;
    std::string provider;
    std::string script_path;
};

int do_run(const RunOptions& options, const Diagnostics& diag) {
    CliConfig config;
    try {
        if (!options.config_path.empty()) config = parse_config_file(options.config_path);
    } catch (const std::exception& e) {
        return diag.fail(1, e.what());
    }
    if (!options.mode.empty()) {
        try {
            config.experiment.mode = mode_from_string(options.mode);
        } catch (const std::exception& e) {
            return diag.fail(2, e.what());
        }
    }
    if (options.seed_set) config.experiment.rng_seed = options.seed;
    if (options.rounds_set) config.experiment.rounds = options.rounds;

    const auto violations = validate_config(config.experiment);
    if (!violations.empty()) {
        std::string message = "invalid config:";
        for (const auto& violation : violations) message += "\n  " + violation;
        return diag.fail(1, message);
    }
    if (options.provider == "scripted" && options.script_path.empty())
        return diag.fail(2, "--provider scripted requires --script");

    try {
        std::vector<Paper> pool = load_pool(options.pool_path);
        pool = variance_filter(std::move(pool), config.pool_max_variance);
        if (config.pool_sample_n) {
            Rng rng(Rng::derive(config.experiment.rng_seed, kSampleStream));
            pool = stratified_sample(pool, config.pool_interval_edges, *config.pool_sample_n,
                                     rng);
        }
        const auto personas = config.personas_dir
                                  ? load_personas(*config.personas_dir)
                                  : builtin_personas();

        std::unique_ptr<CompletionProvider> provider;
        if (options.provider == "scripted") {
            provider = std::make_unique<ScriptedProvider>(load_script_table(options.script_path));
        } else {
            const char* key = std::getenv("ELOREVIEW_API_KEY");
            provider = make_http_provider(config.experiment.provider, key ? key : "");
        }

        std::string out = options.out_path;
        if (out.empty())
            out = to_string(config.experiment.mode) + "-seed" +
                  std::to_string(config.experiment.rng_seed) + kTranscriptSuffix;

        const Transcript transcript =
            run_experiment(config.experiment, std::move(pool), *provider, out, personas);
        std::cout << "transcript written: " << out << " (" << transcript.rounds.size()
                  << " rounds, " << transcript.calls.size() << " calls)\n";
        return 0;
    } catch (const std::exception& e) {
        return diag.fail(1, e.what());
    }
}

int do_replay(const std::string& transcript_path, const Diagnostics& diag) {
    try {
        const TranscriptFile file = read_transcript_file(transcript_path);
        std::map<std::string, std::string> table;
        for (const auto& call : file.transcript.calls) {
            if (call.response) table[call.request.tag] = call.response->text;
        }
        ScriptedProvider provider(std::move(table));
        ExperimentState state = make_initial_state(file.transcript.header.config,
                                                   file.transcript.header.pool);
        for (std::size_t i = 0; i < file.round_lines.size(); ++i) {
            const RoundRecord rerun = run_round(state, provider, nullptr);
            if (serialize_round_line(rerun) != file.round_lines[i]) {
                std::cout << "MISMATCH at round " << (i + 1) << '\n';
                return 1;
            }
        }
        std::cout << "MATCH\n";
        return 0;
    } catch (const std::exception& e) {
        return diag.fail(1, e.what());
    }
}

int do_report(const std::string& transcript_path, const std::string& out_dir,
              const Diagnostics& diag) {
    try {
        const Transcript transcript = read_transcript(transcript_path);
        emit_report(transcript, out_dir);
        for (const char* name : {"metrics.csv", "trajectories.csv", "elo.svg", "report.txt"})
            std::cout << (std::filesystem::path(out_dir) / name).string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        return diag.fail(1, e.what());
    }
}

int do_validate_pool(const std::string& pool_path, const Diagnostics& diag) {
    try {
        const auto pool = load_pool(pool_path);
        std::cout << "pool OK: " << pool.size() << " papers\n";
        return 0;
    } catch (const std::exception& e) {
        return diag.fail(1, e.what());
    }
}

int do_gen_pool(int n, std::uint64_t seed, const std::string& out_path,
                const Diagnostics& diag) {
    try {
        const auto pool = generate_synthetic_pool(n, seed);
        save_pool(out_path, pool);
        std::cout << "wrote " << pool.size() << " papers to " << out_path << '\n';
        return 0;
    } catch (const std::exception& e) {
        return diag.fail(1, e.what());
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    Diagnostics diag;
    CLI::App app{"Elo-ranked conference peer review simulator"};
    app.require_subcommand(1);
    app.add_flag("--json", diag.json_mode, "diagnostics as JSON lines on stderr");

    RunOptions run_options;
    auto* run = app.add_subcommand("run", "run an experiment and write its transcript");
    run->add_option("--config", run_options.config_path, "key-value config file");
    run->add_option("--pool", run_options.pool_path, "paper pool (JSONL)")->required();
    run->add_option("--mode", run_options.mode, "baseline | ac-access | full-access");
    auto* seed_opt = run->add_option("--seed", run_options.seed, "RNG seed");
    auto* rounds_opt = run->add_option("--rounds", run_options.rounds, "number of rounds");
    run->add_option("--out", run_options.out_path, "transcript path");
    run->add_option("--provider", run_options.provider, "live | scripted")
        ->required()
        ->check(CLI::IsMember({"live", "scripted"}));
    run->add_option("--script", run_options.script_path,
                    "script table or transcript for --provider scripted");

    std::string transcript_path;
    std::string out_dir;
    auto* report = app.add_subcommand("report", "emit metrics and charts from a transcript");
    report->add_option("--transcript", transcript_path, "transcript path")->required();
    report->add_option("--out", out_dir, "output directory")->required();

    auto* replay = app.add_subcommand("replay", "re-run a transcript against itself");
    replay->add_option("--transcript", transcript_path, "transcript path")->required();

    std::string pool_path;
    auto* validate = app.add_subcommand("validate-pool", "check a pool file");
    validate->add_option("path", pool_path, "pool file (JSONL)")->required();

    int gen_n = 60;
    std::uint64_t gen_seed = 7;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-pool", "generate a synthetic pool");
    gen->add_option("--n", gen_n, "number of papers");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return diag.fail(2, e.what());
    }

    run_options.seed_set = seed_opt->count() > 0;
    run_options.rounds_set = rounds_opt->count() > 0;

    if (app.got_subcommand(run)) return do_run(run_options, diag);
    if (app.got_subcommand(report)) return do_report(transcript_path, out_dir, diag);
    if (app.got_subcommand(replay)) return do_replay(transcript_path, diag);
    if (app.got_subcommand(validate)) return do_validate_pool(pool_path, diag);
    if (app.got_subcommand(gen)) return do_gen_pool(gen_n, gen_seed, gen_out, diag);
    return 2;
}

}  // namespace eloreview
