#include "eloreview/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eloreview {

ConfusionCounts confusion(const std::vector<std::pair<Decision, Decision>>& decisions) {
    ConfusionCounts counts;
    for (const auto& [predicted, truth] : decisions) {
        if (predicted == Decision::Accept) {
            (truth == Decision::Accept ? counts.tp : counts.fp) += 1;
        } else {
            (truth == Decision::Accept ? counts.fn : counts.tn) += 1;
        }
    }
    return counts;
}

Scores metrics(const ConfusionCounts& counts) {
    const long long total = counts.total();
    if (total < 1) throw std::invalid_argument("metrics require at least one decision");
    Scores scores;
    scores.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(total);
    const long long predicted_positive = counts.tp + counts.fp;
    const long long actual_positive = counts.tp + counts.fn;
    scores.precision = predicted_positive == 0
                           ? 0.0
                           : static_cast<double>(counts.tp) /
                                 static_cast<double>(predicted_positive);
    scores.recall = actual_positive == 0 ? 0.0
                                         : static_cast<double>(counts.tp) /
                                               static_cast<double>(actual_positive);
    scores.f1 = scores.precision + scores.recall == 0.0
                    ? 0.0
                    : 2.0 * scores.precision * scores.recall /
                          (scores.precision + scores.recall);
    return scores;
}

std::vector<std::pair<Decision, Decision>> decision_pairs(const Transcript& transcript) {
    std::map<std::string, Decision> truth;
    for (const auto& paper : transcript.header.pool) truth[paper.id] = paper.ground_truth;

    std::vector<std::pair<Decision, Decision>> pairs;
    for (const auto& record : transcript.rounds) {
        for (const auto& outcome : record.ac_outcomes) {
            auto it = truth.find(outcome.paper_id);
            if (it == truth.end())
                throw MetricsError("paper '" + outcome.paper_id +
                                   "' is not in the transcript pool");
            pairs.emplace_back(outcome.decision, it->second);
        }
    }
    return pairs;
}

TrajectorySet trajectories(const Transcript& transcript) {
    TrajectorySet series;
    if (transcript.rounds.empty()) return series;

    const int initial = transcript.header.config.initial_elo;
    for (const auto& [reviewer_id, elo] : transcript.rounds.front().elo_after)
        series[reviewer_id] = {initial};

    for (const auto& record : transcript.rounds) {
        for (auto& [reviewer_id, values] : series) {
            auto it = record.elo_after.find(reviewer_id);
            if (it == record.elo_after.end())
                throw MetricsError("round " + std::to_string(record.round_index) +
                                   " is missing elo_after for '" + reviewer_id + "'");
            values.push_back(it->second);
        }
        if (record.elo_after.size() != series.size())
            throw MetricsError("round " + std::to_string(record.round_index) +
                               " tracks a different reviewer set");
    }
    return series;
}

namespace {

std::string format(const char* fmt, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), fmt, value);
    return buffer;
}

std::string series_label(const std::string& reviewer_id) {
    if (reviewer_id.size() == 2 && reviewer_id[0] == 'r' && reviewer_id[1] >= '1' &&
        reviewer_id[1] <= '6') {
        const auto persona = kAllPersonas[static_cast<std::size_t>(reviewer_id[1] - '1')];
        return reviewer_id + " (" + to_string(persona) + ")";
    }
    return reviewer_id;
}

double nice_step(double range, int target_ticks) {
    const double raw = range / target_ticks;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (raw <= m * magnitude) return m * magnitude;
    }
    return 10.0 * magnitude;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MetricsError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw MetricsError("write failure on '" + path.string() + "'");
}

}  // namespace

std::string render_elo_svg(const TrajectorySet& series, int initial_elo) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#9467bd",
                                     "#2ca02c", "#ff7f0e", "#7f7f7f"};
    const double width = 900, height = 520;
    const double left = 70, right = 40, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::size_t points = 0;
    double lo = initial_elo, hi = initial_elo;
    for (const auto& [id, values] : series) {
        points = std::max(points, values.size());
        for (int v : values) {
            lo = std::min(lo, static_cast<double>(v));
            hi = std::max(hi, static_cast<double>(v));
        }
    }
    const int last_round = points > 1 ? static_cast<int>(points - 1) : 1;
    if (hi - lo < 1.0) {
        lo -= 100;
        hi += 100;
    }
    const double pad = std::max((hi - lo) * 0.08, 20.0);
    lo -= pad;
    hi += pad;

    const auto x_at = [&](double round) { return left + round * plot_w / last_round; };
    const auto y_at = [&](double elo) { return top + (hi - elo) * plot_h / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << ' '
        << height << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    const double step = nice_step(hi - lo, 6);
    for (double tick = std::ceil(lo / step) * step; tick <= hi; tick += step) {
        const double y = y_at(tick);
        svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w
            << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\">" << static_cast<long long>(std::llround(tick))
            << "</text>\n";
    }
    const int x_step = std::max(1, (last_round + 9) / 10);
    for (int round = 0; round <= last_round; round += x_step) {
        const double x = x_at(round);
        svg << "<line x1=\"" << x << "\" y1=\"" << top + plot_h << "\" x2=\"" << x
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"#444444\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 20
            << "\" text-anchor=\"middle\">" << round << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">round</text>\n";
    svg << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + plot_h / 2
        << ")\">Elo</text>\n";

    // Reference line at the shared starting rating.
    svg << "<line x1=\"" << left << "\" y1=\"" << y_at(initial_elo) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << y_at(initial_elo)
        << "\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n";

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444444\"/>\n";

    std::size_t index = 0;
    for (const auto& [id, values] : series) {
        const char* color = kPalette[index % 6];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) svg << ' ';
            svg << x_at(static_cast<double>(i)) << ',' << y_at(values[i]);
        }
        svg << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(index);
        svg << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w - 126 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + plot_w - 120 << "\" y=\"" << ly + 4 << "\">"
            << series_label(id) << "</text>\n";
        ++index;
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(const Transcript& transcript, const std::filesystem::path& out_dir) {
    const auto pairs = decision_pairs(transcript);
    if (pairs.empty()) throw MetricsError("transcript has no decided papers");
    const ConfusionCounts counts = confusion(pairs);
    const Scores scores = metrics(counts);
    const TrajectorySet series = trajectories(transcript);
    const int initial = transcript.header.config.initial_elo;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw MetricsError("cannot create '" + out_dir.string() + "': " + ec.message());

    std::ostringstream metrics_csv;
    metrics_csv << "tp,fp,fn,tn,accuracy,precision,recall,f1\n"
                << counts.tp << ',' << counts.fp << ',' << counts.fn << ',' << counts.tn
                << ',' << format("%.17g", scores.accuracy) << ','
                << format("%.17g", scores.precision) << ','
                << format("%.17g", scores.recall) << ',' << format("%.17g", scores.f1)
                << '\n';
    write_file(out_dir / "metrics.csv", metrics_csv.str());

    std::ostringstream traj_csv;
    traj_csv << "round";
    for (const auto& [id, values] : series) traj_csv << ',' << id;
    traj_csv << '\n';
    const std::size_t rows = series.empty() ? 0 : series.begin()->second.size();
    for (std::size_t row = 0; row < rows; ++row) {
        traj_csv << row;
        for (const auto& [id, values] : series) traj_csv << ',' << values[row];
        traj_csv << '\n';
    }
    write_file(out_dir / "trajectories.csv", traj_csv.str());

    write_file(out_dir / "elo.svg", render_elo_svg(series, initial));

    std::ostringstream report;
    report << "mode: " << to_string(transcript.header.config.mode) << '\n'
           << "rounds: " << transcript.rounds.size() << '\n'
           << "papers decided: " << counts.total() << '\n'
           << '\n'
           << "decision metrics (Accept = positive)\n"
           << "  tp " << counts.tp << "  fp " << counts.fp << "  fn " << counts.fn
           << "  tn " << counts.tn << '\n'
           << "  accuracy  " << format("%.2f", scores.accuracy) << '\n'
           << "  precision " << format("%.2f", scores.precision) << '\n'
           << "  recall    " << format("%.2f", scores.recall) << '\n'
           << "  f1        " << format("%.2f", scores.f1) << '\n'
           << '\n'
           << "final Elo (start " << initial << ")\n";
    for (const auto& [id, values] : series) {
        report << "  " << series_label(id) << ": " << values.back() << '\n';
    }
    write_file(out_dir / "report.txt", report.str());
}

}  // namespace eloreview
