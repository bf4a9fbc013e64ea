#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwhull/stats.hpp"

namespace rwhull::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "RWHULL_OUT_DIR";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag values; reported with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs one command line. Never throws; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Whitespace-separated `x y` per line; blank lines and `#` comments are
/// skipped. Throws std::runtime_error naming the offending line.
std::vector<Point2> parse_points(std::istream& in);

/// JSON with hull vertices, perimeter, diameter and area.
std::string hull_report(const std::vector<Point2>& points);

/// Two-palette heatmap: cool for neglog <= 2, warm above. Row i is the i-th
/// smallest sigma1, column j the j-th smallest sigma2.
std::string render_heatmap_svg(const std::vector<GridCell>& cells, char functional, const std::string& title = "");

}  // namespace rwhull::cli
