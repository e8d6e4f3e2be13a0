#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dfs {

// RFC-4180: CRLF line endings, header row first, quoting only when needed.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string csv_escape(const std::string& field);

// Self-contained SVG line plot; one polyline per series.
void write_svg_lines(const std::filesystem::path& path,
                     const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& names,
                     const std::string& title, const std::string& x_label,
                     const std::string& y_label);

}  // namespace dfs
