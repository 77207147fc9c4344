#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "snlab/error.hpp"

namespace snlab {

enum class SweepKind { bifurcation, chi, gammas, mather, misiurewicz, br_scan, measure, windows, scaling };

std::string to_string(SweepKind k);
std::optional<SweepKind> parse_sweep_kind(std::string_view s);

// Flat configuration; keys in the text format match the member names with '_' written as '-'.
struct SweepConfig {
    SweepKind kind = SweepKind::chi;
    std::string family = "quadratic";
    // bifurcation
    double native_lo = 3.8;
    double native_hi = 3.86;
    int columns = 2000;
    int retained = 400;
    long transient = 1000;
    // ladder, Mather, Misiurewicz
    int lmin = 20;
    int lmax = 200;
    int grid = 4096;
    int jmax = 4000;
    int period = 1;
    // recurrence
    int l = 120;
    std::optional<double> center;  // unset: the Misiurewicz parameter of rung l
    double eps = 0.05;
    double alpha = 0.05;
    double delta = std::exp(-10.0);
    double iota = 0.3;
    long horizon = 100000;
    // intermittency
    double gamma_min = 1e-6;
    double gamma_max = 1e-3;
    int points = 12;
    long n = 10000000;
    int seeds = 8;
    long window_n = 1000000;
    std::string mode = "base";
    double gamma = 1e-5;
    int bins = 4096;
    // plumbing
    std::uint64_t seed = 1;
    int workers = 1;
    std::string output = "-";
    std::string format = "csv";

    bool operator==(const SweepConfig&) const = default;
};

// Defaults for a kind; grids and horizons differ between experiments.
SweepConfig default_config(SweepKind kind);

class ConfigError : public Error {
public:
    ConfigError(ErrorCode code, std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// `key = value` lines, `#` comments. The kind comes from the `kind` key unless given.
SweepConfig parse_config(std::string_view text, std::optional<SweepKind> kind = std::nullopt);
std::string emit_config(const SweepConfig& cfg);
std::vector<std::string> validate(const SweepConfig& cfg);
// Sets one key from its text form; returns a problem description or nothing.
std::optional<std::string> set_config_value(SweepConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

using Cell = std::variant<long, double, std::string>;

struct SweepResult {
    SweepKind kind = SweepKind::chi;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;  // grid-index order
    std::vector<std::pair<std::string, Cell>> summary;
    std::string config_hash;
    std::string version;
};

SweepResult run_sweep(const SweepConfig& cfg);

// 17 significant digits, round-trip exact.
std::string render_number(double v);
std::string emit_csv(const SweepResult& r);
std::string emit_json(const SweepResult& r);

std::string config_hash(const SweepConfig& cfg);
inline constexpr std::string_view build_version = "0.1.0";

}  // namespace snlab
