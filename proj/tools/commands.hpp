#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qzzb/bound.hpp"

namespace qzzb_cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kSelftestFailure = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kNumericFailure = 3;

struct RunConfig {
    std::string probe = "optimal";  // optimal | noon | squeezed
    std::string noise = "none";     // none | loss | diffusion
    std::vector<double> d;  // bound/sweep default to {2}; figures pick their own
    std::vector<double> n;  // bound/sweep default to {10}
    std::vector<double> w;      // empty: auto width (100x validity threshold)
    std::vector<double> eta;    // loss transmissivity
    std::vector<double> beta;   // diffusion strength
    std::vector<double> r;      // squeezing override (squeezed probe only)
    double lambda = 0.7246;
    std::size_t quad_points = 4096;
    bool valley_fill = true;
    bool integrate = false;
    std::string format = "csv";  // csv | json
    std::string output;          // empty: stdout
    std::string figure;          // figure name for cmd_figure
};

// One evaluated sweep cell.
struct RowResult {
    double d = 0, n = 0, w = 0;
    std::optional<double> eta, beta, r;
    std::optional<double> advantage;  // IE-MT over SE-ML ratio, optimal probe only
    qzzb::BoundReport report;
};

std::string format_double(double v);
std::string config_json(const RunConfig& cfg);

// Parses "x", "a,b,c" or "lo:hi[:steps]" into an explicit list.
std::vector<double> parse_range(const std::string& text);

int cmd_bound(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_figure(const RunConfig& cfg);

} // namespace qzzb_cli
