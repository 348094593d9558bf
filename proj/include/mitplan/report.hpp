#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mitplan/dqn.hpp"

namespace mitplan {

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Minimal self-contained SVG line chart (training curves, ablation plots).
void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<ChartSeries>& series);

// Training log as a windowed-mean reward curve (the replay-buffer mean).
void write_training_curve(const std::filesystem::path& path,
                          const std::vector<TrainLogEntry>& log, const std::string& title);

// Line-delimited training log records for downstream plotting.
void save_train_log(const std::filesystem::path& path, const std::vector<TrainLogEntry>& log);
std::vector<TrainLogEntry> load_train_log(const std::filesystem::path& path);

}  // namespace mitplan
