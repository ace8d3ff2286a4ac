#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace regbf::cli {

// Reals use scientific notation with 17 significant digits; NaN marks missing values.
std::string format_real(double v);

class CsvTable {
 public:
  // Column names carry units, e.g. "period[t]".
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  // Row with a leading text label.
  void add_row(const std::string& label, const std::vector<double>& values);

  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

struct SvgSeries {
  std::string label{};
  std::vector<double> x{};
  std::vector<double> y{};
  bool markers{false};
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x{false};
  bool log_y{false};
  std::vector<SvgSeries> series{};
  // Vertical reference lines (x, label).
  std::vector<std::pair<double, std::string>> vlines{};

  std::string render(const std::string& config_hash) const;
  void write(const std::filesystem::path& path, const std::string& config_hash) const;
};

// Writes pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace regbf::cli
