#include "mitplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mitplan/errors.hpp"
#include "mitplan/jsonio.hpp"

namespace mitplan {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<ChartSeries>& series) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const ChartSeries& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    const double width = 760, height = 420;
    const double left = 70, right = 170, top = 40, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    const auto sy = [&](double y) { return top + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";

    // axes with 5 ticks each
    out << "<g font-size=\"11\" font-family=\"sans-serif\" fill=\"#333\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << top << "\" x2=\"" << sx(fx) << "\" y2=\""
            << top + plot_h << "\" stroke=\"#eee\"/>\n"
            << "<text x=\"" << sx(fx) << "\" y=\"" << top + plot_h + 16
            << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n"
            << "<line x1=\"" << left << "\" y1=\"" << sy(fy) << "\" x2=\"" << left + plot_w
            << "\" y2=\"" << sy(fy) << "\" stroke=\"#eee\"/>\n"
            << "<text x=\"" << left - 6 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
        << "<text x=\"16\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">"
        << y_label << "</text>\n</g>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#999\"/>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[k].points) out << sx(x) << "," << sy(y) << " ";
        out << "\"/>\n";
        const double ly = top + 14 + 16 * static_cast<double>(k);
        out << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << left + plot_w + 34 << "\" y=\"" << ly + 4
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << series[k].name << "</text>\n";
    }
    out << "</svg>\n";
}

void write_training_curve(const std::filesystem::path& path,
                          const std::vector<TrainLogEntry>& log, const std::string& title) {
    ChartSeries replay{"replay mean reward", {}};
    ChartSeries ret{"episode return", {}};
    for (const TrainLogEntry& e : log) {
        replay.points.emplace_back(static_cast<double>(e.episode), e.replay_mean_reward);
        ret.points.emplace_back(static_cast<double>(e.episode), e.episode_return);
    }
    write_line_chart_svg(path, title, "episode", "reward", {replay, ret});
}

void save_train_log(const std::filesystem::path& path, const std::vector<TrainLogEntry>& log) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const TrainLogEntry& e : log) {
        Json rec{{"episode", e.episode},
                 {"epsilon", e.epsilon},
                 {"mixing_weight", e.mixing_weight},
                 {"episode_return", e.episode_return},
                 {"loss", std::isfinite(e.loss) ? Json(e.loss) : Json(nullptr)},
                 {"replay_mean_reward", e.replay_mean_reward},
                 {"outcome", to_string(e.outcome)}};
        out << rec.dump() << '\n';
    }
}

std::vector<TrainLogEntry> load_train_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<TrainLogEntry> log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const Json rec = Json::parse(line);
        TrainLogEntry e;
        e.episode = rec.value("episode", std::size_t{0});
        e.epsilon = rec.value("epsilon", 0.0);
        e.mixing_weight = rec.value("mixing_weight", 0.0);
        e.episode_return = rec.value("episode_return", 0.0);
        e.loss = rec["loss"].is_null() ? std::nan("") : rec["loss"].get<double>();
        e.replay_mean_reward = rec.value("replay_mean_reward", 0.0);
        const std::string oc = rec.value("outcome", std::string("running"));
        e.outcome = oc == "win" ? Outcome::Win
                                : (oc == "loss" ? Outcome::Loss
                                                : (oc == "truncated" ? Outcome::Truncated
                                                                     : Outcome::Running));
        log.push_back(std::move(e));
    }
    return log;
}

}  // namespace mitplan
