#include "cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "regbf/errors.hpp"

namespace regbf::cli {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.16e}", v);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("CSV header must not be empty");
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw ConfigError("CSV row width does not match header");
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_real(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::string& label, const std::vector<double>& values) {
  if (values.size() + 1 != header_.size()) throw ConfigError("CSV row width does not match header");
  std::string row = label;
  for (const double v : values) row += ',' + format_real(v);
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

std::string SvgPlot::render(const std::string& config_hash) const {
  constexpr double W = 640, H = 440, L = 80, R = 20, T = 40, B = 60;
  auto tx = [this](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [this](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [](double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], log_x) || !usable(s.y[i], log_y)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  for (const auto& [v, label] : vlines) {
    if (usable(v, log_x)) {
      x0 = std::min(x0, tx(v));
      x1 = std::max(x1, tx(v));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
  const double px = (x1 - x0) * 0.04, py = (y1 - y0) * 0.06;
  x0 -= px, x1 += px, y0 -= py, y1 += py;
  auto sx = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<metadata>config-hash: {}</metadata>\n"
      "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      W, H, W, H, config_hash, W, H);
  out += fmt::format("<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n", W / 2,
                     escape_xml(title));
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                     W - L - R, H - T - B);
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double vx = log_x ? std::pow(10.0, fx) : fx, vy = log_y ? std::pow(10.0, fy) : fy;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n",
                       L + (W - L - R) * i / 4.0, H - B + 16, vx);
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n", L - 6,
                       H - B - (H - T - B) * i / 4.0 + 4, vy);
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n", (L + W - R) / 2,
                     H - 18, escape_xml(x_label + (log_x ? " (log)" : "")));
  out += fmt::format(
      "<text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
      (T + H - B) / 2, (T + H - B) / 2, escape_xml(y_label + (log_y ? " (log)" : "")));
  for (const auto& [v, label] : vlines) {
    if (!usable(v, log_x)) continue;
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4}\" font-size=\"11\" fill=\"gray\">{5}</text>\n",
        sx(v), T, H - B, sx(v) + 3, T + 12, escape_xml(label));
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], log_x) || !usable(s.y[i], log_y)) continue;
      pts += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), sy(s.y[i]));
      if (s.markers) {
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(s.x[i]), sy(s.y[i]),
                           color);
      }
    }
    if (!pts.empty()) {
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", L + 10,
                       T + 16 + 15 * si, color, escape_xml(s.label));
  }
  out += "</svg>\n";
  return out;
}

void SvgPlot::write(const std::filesystem::path& path, const std::string& config_hash) const {
  write_text(path, render(config_hash));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace regbf::cli
