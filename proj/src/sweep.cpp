#include "snlab/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "snlab/intermittency.hpp"
#include "snlab/mather.hpp"
#include "snlab/numerics.hpp"
#include "snlab/parallel.hpp"
#include "snlab/recurrence.hpp"

namespace snlab {

namespace {

constexpr std::pair<SweepKind, std::string_view> kind_names[] = {
    {SweepKind::bifurcation, "bifurcation"}, {SweepKind::chi, "chi"},       {SweepKind::gammas, "gammas"},
    {SweepKind::mather, "mather"},           {SweepKind::misiurewicz, "misiurewicz"},
    {SweepKind::br_scan, "br-scan"},         {SweepKind::measure, "measure"}, {SweepKind::windows, "windows"},
    {SweepKind::scaling, "scaling"},
};

std::string_view trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
std::optional<T> parse_integer(const std::string& s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Key {
    std::string name;
    std::function<std::string(const SweepConfig&)> get;
    std::function<std::optional<std::string>(SweepConfig&, const std::string&)> set;
};

template <class T>
Key integer_key(std::string name, T SweepConfig::*field) {
    return {name, [field](const SweepConfig& c) { return std::to_string(c.*field); },
            [name, field](SweepConfig& c, const std::string& v) -> std::optional<std::string> {
                auto x = parse_integer<T>(v);
                if (!x) return "key '" + name + "': expected an integer, got '" + v + "'";
                c.*field = *x;
                return std::nullopt;
            }};
}

Key real_key(std::string name, double SweepConfig::*field) {
    return {name, [field](const SweepConfig& c) { return render_number(c.*field); },
            [name, field](SweepConfig& c, const std::string& v) -> std::optional<std::string> {
                auto x = parse_real(v);
                if (!x) return "key '" + name + "': expected a finite number, got '" + v + "'";
                c.*field = *x;
                return std::nullopt;
            }};
}

Key text_key(std::string name, std::string SweepConfig::*field) {
    return {name, [field](const SweepConfig& c) { return c.*field; },
            [field](SweepConfig& c, const std::string& v) -> std::optional<std::string> {
                c.*field = v;
                return std::nullopt;
            }};
}

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back({"kind", [](const SweepConfig& c) { return to_string(c.kind); },
                     [](SweepConfig& c, const std::string& v) -> std::optional<std::string> {
                         auto kind = parse_sweep_kind(v);
                         if (!kind) return "key 'kind': unknown experiment '" + v + "'";
                         c.kind = *kind;
                         return std::nullopt;
                     }});
        k.push_back(text_key("family", &SweepConfig::family));
        k.push_back(real_key("native-lo", &SweepConfig::native_lo));
        k.push_back(real_key("native-hi", &SweepConfig::native_hi));
        k.push_back(integer_key("columns", &SweepConfig::columns));
        k.push_back(integer_key("retained", &SweepConfig::retained));
        k.push_back(integer_key("transient", &SweepConfig::transient));
        k.push_back(integer_key("lmin", &SweepConfig::lmin));
        k.push_back(integer_key("lmax", &SweepConfig::lmax));
        k.push_back(integer_key("grid", &SweepConfig::grid));
        k.push_back(integer_key("jmax", &SweepConfig::jmax));
        k.push_back(integer_key("period", &SweepConfig::period));
        k.push_back(integer_key("l", &SweepConfig::l));
        k.push_back({"center", [](const SweepConfig& c) { return c.center ? render_number(*c.center) : std::string("auto"); },
                     [](SweepConfig& c, const std::string& v) -> std::optional<std::string> {
                         if (v == "auto") {
                             c.center.reset();
                             return std::nullopt;
                         }
                         auto x = parse_real(v);
                         if (!x) return "key 'center': expected a number or 'auto', got '" + v + "'";
                         c.center = *x;
                         return std::nullopt;
                     }});
        k.push_back(real_key("eps", &SweepConfig::eps));
        k.push_back(real_key("alpha", &SweepConfig::alpha));
        k.push_back(real_key("delta", &SweepConfig::delta));
        k.push_back(real_key("iota", &SweepConfig::iota));
        k.push_back(integer_key("horizon", &SweepConfig::horizon));
        k.push_back(real_key("gamma-min", &SweepConfig::gamma_min));
        k.push_back(real_key("gamma-max", &SweepConfig::gamma_max));
        k.push_back(integer_key("points", &SweepConfig::points));
        k.push_back(integer_key("n", &SweepConfig::n));
        k.push_back(integer_key("seeds", &SweepConfig::seeds));
        k.push_back(integer_key("window-n", &SweepConfig::window_n));
        k.push_back(text_key("mode", &SweepConfig::mode));
        k.push_back(real_key("gamma", &SweepConfig::gamma));
        k.push_back(integer_key("bins", &SweepConfig::bins));
        k.push_back(integer_key("seed", &SweepConfig::seed));
        k.push_back(integer_key("workers", &SweepConfig::workers));
        k.push_back(text_key("output", &SweepConfig::output));
        k.push_back(text_key("format", &SweepConfig::format));
        return k;
    }();
    return keys;
}

const Key* find_key(const std::string& name) {
    for (const auto& k : key_table())
        if (k.name == name) return &k;
    return nullptr;
}

std::string location(size_t line, size_t col) {
    return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": ";
}

}  // namespace

std::string to_string(SweepKind k) {
    for (auto [kind, name] : kind_names)
        if (kind == k) return std::string(name);
    return "chi";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view s) {
    for (auto [kind, name] : kind_names)
        if (name == s) return kind;
    return std::nullopt;
}

SweepConfig default_config(SweepKind kind) {
    SweepConfig c;
    c.kind = kind;
    switch (kind) {
        case SweepKind::br_scan: c.grid = 512; break;
        case SweepKind::misiurewicz:
            c.lmin = 120;
            c.lmax = 160;
            break;
        case SweepKind::windows: c.n = 1000000; break;
        default: break;
    }
    return c;
}

ConfigError::ConfigError(ErrorCode code, std::vector<std::string> problems)
    : Error(code,
            [&] {
                std::string s;
                for (size_t i = 0; i < problems.size(); ++i) s += (i ? "; " : "") + problems[i];
                return s;
            }()),
      problems_(std::move(problems)) {}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
}

std::optional<std::string> set_config_value(SweepConfig& cfg, const std::string& key, const std::string& value) {
    const Key* k = find_key(key);
    if (!k) return "unknown key '" + key + "'";
    return k->set(cfg, value);
}

SweepConfig parse_config(std::string_view text, std::optional<SweepKind> kind) {
    struct Entry {
        std::string key, value;
        size_t line;
    };
    std::vector<Entry> entries;
    std::map<std::string, size_t> seen;
    size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        size_t hash = raw.find('#');
        std::string_view body = raw.substr(0, hash);
        if (trim(body).empty()) {
            if (end == text.size()) break;
            continue;
        }
        const size_t first = body.find_first_not_of(" \t") + 1;
        const size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(ErrorCode::parse, {location(line_no, first) + "expected 'key = value'"});
        std::string_view key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError(ErrorCode::parse, {location(line_no, first) + "missing key before '='"});
        for (size_t i = 0; i < key.size(); ++i) {
            char ch = key[i];
            if (!((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-'))
                throw ConfigError(ErrorCode::parse,
                                  {location(line_no, first + i) + "invalid character in key '" + std::string(key) + "'"});
        }
        std::string_view value = trim(body.substr(eq + 1));
        if (value.empty()) throw ConfigError(ErrorCode::parse, {location(line_no, eq + 2) + "missing value"});
        std::string k(key);
        if (seen.count(k))
            throw ConfigError(ErrorCode::parse, {location(line_no, first) + "duplicate key '" + k + "' (first on line " +
                                                 std::to_string(seen[k]) + ")"});
        seen[k] = line_no;
        entries.push_back({k, std::string(value), line_no});
        if (end == text.size()) break;
    }

    std::vector<std::string> problems;
    SweepKind chosen = SweepKind::chi;
    if (kind) {
        chosen = *kind;
    } else if (seen.count("kind")) {
        for (const auto& e : entries)
            if (e.key == "kind") {
                if (auto k = parse_sweep_kind(e.value)) chosen = *k;
            }
    } else {
        problems.push_back("missing key 'kind'");
    }
    SweepConfig cfg = default_config(chosen);
    for (const auto& e : entries) {
        if (e.key == "kind" && kind) {
            if (parse_sweep_kind(e.value) != kind)
                problems.push_back("key 'kind': file says '" + e.value + "' but the experiment is '" + to_string(*kind) + "'");
            continue;
        }
        if (auto p = set_config_value(cfg, e.key, e.value)) problems.push_back(*p);
    }
    cfg.kind = chosen;
    for (auto& p : validate(cfg)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(ErrorCode::validation, problems);
    return cfg;
}

std::string emit_config(const SweepConfig& cfg) {
    std::string out;
    for (const auto& k : key_table()) out += k.name + " = " + k.get(cfg) + "\n";
    return out;
}

std::vector<std::string> validate(const SweepConfig& c) {
    std::vector<std::string> p;
    auto need = [&](bool ok, const std::string& key, const std::string& what) {
        if (!ok) p.push_back("key '" + key + "': " + what);
    };
    need(c.family == "quadratic", "family", "only 'quadratic' is available");
    need(c.native_lo < c.native_hi && c.native_lo > 0.0 && c.native_hi <= 4.0, "native-lo",
         "window must satisfy 0 < native-lo < native-hi <= 4");
    need(c.columns >= 1, "columns", "must be positive");
    need(c.retained >= 1, "retained", "must be positive");
    need(c.transient >= 0, "transient", "must be non-negative");
    need(c.lmin >= 2 && c.lmin <= c.lmax, "lmin", "need 2 <= lmin <= lmax");
    need(c.grid >= (c.kind == SweepKind::br_scan ? 256 : 1), "grid",
         c.kind == SweepKind::br_scan ? "must be at least 256" : "must be positive");
    need(c.jmax >= 1, "jmax", "must be positive");
    need(c.period >= 1, "period", "must be positive");
    need(c.l >= 2, "l", "must be at least 2");
    need(c.eps > 0.0 && c.eps <= 0.5, "eps", "must lie in (0, 0.5]");
    need(c.alpha > 0.0, "alpha", "must be positive");
    need(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
    need(c.iota > 0.0 && c.iota < 1.0, "iota", "must lie in (0, 1)");
    need(c.horizon >= 1 && c.horizon <= 10000000, "horizon", "must lie in [1, 1e7]");
    need(c.gamma_min > 0.0 && c.gamma_min <= c.gamma_max, "gamma-min", "need 0 < gamma-min <= gamma-max");
    need(c.points >= 1, "points", "must be positive");
    need(c.n >= 1, "n", "must be positive");
    need(c.seeds >= 8, "seeds", "must be at least 8");
    need(c.window_n >= 1000000, "window-n", "must be at least 1e6");
    need(c.mode == "base" || c.mode == "induced" || c.mode == "pushforward", "mode",
         "must be base, induced or pushforward");
    need(c.gamma > 0.0 || c.mode == "base", "gamma", "induced measures need gamma > 0");
    need(c.bins >= 1, "bins", "must be positive");
    need(c.workers >= 1, "workers", "must be positive");
    need(!c.output.empty(), "output", "must not be empty");
    need(c.format == "csv" || c.format == "json", "format", "must be csv or json");
    return p;
}

std::string render_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string config_hash(const SweepConfig& cfg) {
    SweepConfig c = cfg;
    c.workers = 1;
    c.output = "-";
    c.format = "csv";
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : emit_config(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

namespace {

std::string render_cell(const Cell& c) {
    if (auto* i = std::get_if<long>(&c)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&c)) return render_number(*d);
    return std::get<std::string>(c);
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
            out += ch;
        } else if (static_cast<unsigned char>(ch) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", ch);
            out += buf;
        } else {
            out += ch;
        }
    }
    return out + "\"";
}

std::string json_cell(const Cell& c) {
    if (auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? render_number(*d) : "null";
    if (std::holds_alternative<long>(c)) return render_cell(c);
    return json_string(std::get<std::string>(c));
}

std::string status_of(const Error& e) { return std::string(to_string(e.code())); }

// Rungs bracketing gamma, widened until the ladder covers it.
Ladder ladder_around(const FlowGeometry& geo, double gamma) {
    int l = std::max(3, static_cast<int>(std::lround(std::sqrt(0.137 / gamma))));
    for (int pad = 3; pad < 4096; pad *= 2) {
        Ladder lad = gamma_ladder(geo, std::max(2, l - pad), l + pad);
        if (gamma <= lad.gammas.front() && gamma >= lad.gammas.back()) return lad;
    }
    throw Error(ErrorCode::no_root_in_rung, "no rung brackets the requested gamma");
}

PeriodicPointTrack pick_target(const FlowGeometry& geo, int period) {
    auto tracks = repelling_points_of_f0(geo.family, period, geo.laminar, 20000);
    for (const auto& t : tracks)
        if (t.period == period && t.points.front() > 1e-9) return t;
    throw Error(ErrorCode::no_root_in_rung, "no repelling orbit of the requested period");
}

void run_bifurcation(const SweepConfig& c, SweepResult& r) {
    r.columns = {"column", "mu", "x", "status"};
    const auto fam = UnimodalFamily::quadratic();
    const double x0 = low_discrepancy_points(c.seed, 1, 0.05, 0.95).front();
    std::vector<std::vector<std::vector<Cell>>> blocks(static_cast<size_t>(c.columns));
    parallel_for(blocks.size(), c.workers, [&](size_t i) {
        const double mu = c.columns == 1 ? c.native_lo : c.native_lo + (c.native_hi - c.native_lo) * i / (c.columns - 1);
        auto& rows = blocks[i];
        try {
            double x = x0;
            evaluate(fam, x, mu);
            for (long k = 0; k < c.transient; ++k) x = fam.value(x, mu);
            for (int k = 0; k < c.retained; ++k) {
                rows.push_back({static_cast<long>(i), mu, x, std::string("ok")});
                x = fam.value(x, mu);
            }
        } catch (const Error& e) {
            rows = {{static_cast<long>(i), mu, NAN, status_of(e)}};
        }
    });
    for (auto& b : blocks)
        for (auto& row : b) r.rows.push_back(std::move(row));
}

void run_gammas(const SweepConfig& c, SweepResult& r) {
    r.columns = {"l", "gamma_l", "l2gamma_l", "status"};
    const auto& geo = quadratic_geometry();
    std::vector<std::vector<Cell>> rows(static_cast<size_t>(c.lmax - c.lmin + 1));
    // Rungs are independent once seeded from the asymptotic law.
    parallel_for(rows.size(), c.workers, [&](size_t i) {
        const int l = c.lmin + static_cast<int>(i);
        try {
            double g = gamma_root(geo, l);
            rows[i] = {static_cast<long>(l), g, static_cast<double>(l) * l * g, std::string("ok")};
        } catch (const Error& e) {
            rows[i] = {static_cast<long>(l), NAN, NAN, status_of(e)};
        }
    });
    r.rows = std::move(rows);
}

void run_mather(const SweepConfig& c, SweepResult& r) {
    r.columns = {"tau", "Mbar", "R", "N", "in_V", "status"};
    const auto& geo = quadratic_geometry();
    MatherOptions opts;
    opts.grid = c.grid;
    opts.j_max = c.jmax;
    opts.workers = c.workers;
    auto table = mather_grid(geo, zero_charts(geo), opts);
    for (size_t i = 0; i < table.samples.size(); ++i) {
        const auto& s = table.samples[i];
        r.rows.push_back({s.tau, s.mbar, s.r, s.n, static_cast<long>(table.in_v(i, c.jmax)),
                          std::string(s.truncated ? "orbit-escape" : "ok")});
    }
    r.summary.push_back({"v_measure", table.v_measure(c.jmax)});
    r.summary.push_back({"discontinuities", static_cast<long>(table.discontinuities.size())});
}

void run_misiurewicz(const SweepConfig& c, SweepResult& r) {
    r.columns = {"l", "gamma_star", "theta_star", "residual", "status"};
    const auto& geo = quadratic_geometry();
    auto lad = gamma_ladder(geo, std::max(2, c.lmin - 1), c.lmax + 1);
    auto seq = misiurewicz_sequence(geo, lad, pick_target(geo, c.period), c.lmin, c.lmax, c.workers);
    for (const auto& e : seq.entries)
        r.rows.push_back({static_cast<long>(e.l), e.gamma, e.theta, e.residual,
                          e.found ? std::string("ok") : std::string(to_string(e.failure))});
    r.summary.push_back({"theta_limit", seq.theta_star});
    r.summary.push_back({"m", static_cast<long>(seq.m)});
    r.summary.push_back({"preimage", seq.preimage});
}

void run_br_scan(const SweepConfig& c, SweepResult& r) {
    r.columns = {"theta", "gamma", "br_pass", "first_fail", "ce_slope", "status"};
    const auto& geo = quadratic_geometry();
    auto lad = gamma_ladder(geo, std::max(2, c.l - 2), c.l + 2);
    double center;
    if (c.center) {
        center = *c.center;
    } else {
        auto seq = misiurewicz_sequence(geo, lad, pick_target(geo, c.period), c.l, c.l, 1);
        const auto& e = seq.entries.front();
        if (!e.found) throw Error(e.failure, "no Misiurewicz parameter in rung " + std::to_string(c.l));
        center = e.theta;
    }
    auto params = delta_partition(geo.c, c.alpha, c.delta, c.iota);
    auto scan = br_scan(geo, lad, c.l, center, c.eps, c.grid, params, c.horizon, c.workers);
    for (const auto& p : scan.points)
        r.rows.push_back({p.theta, p.gamma, static_cast<long>(p.br_pass), p.first_fail, p.ce_slope,
                          p.ok ? std::string("ok") : std::string(to_string(p.failure))});
    r.summary.push_back({"center", center});
    r.summary.push_back({"survival", scan.survival});
    r.summary.push_back({"survival_ce", scan.survival_ce});
}

std::vector<WindowPoint> masks(const SweepConfig& c, const std::vector<double>& grid) {
    return window_detect(quadratic_geometry().family, grid, c.window_n, c.workers);
}

void run_chi(const SweepConfig& c, SweepResult& r) {
    r.columns = {"gamma", "chi", "stderr", "masked", "status"};
    const auto& geo = quadratic_geometry();
    auto grid = geometric_grid(c.gamma_min, c.gamma_max, c.points);
    auto w = masks(c, grid);
    auto region = laminar_region(geo);
    std::vector<std::vector<Cell>> rows(grid.size());
    parallel_for(grid.size(), c.workers, [&](size_t i) {
        try {
            auto est = chi_estimate(geo.family, grid[i], c.seeds, c.n, region, c.seed, 1);
            rows[i] = {grid[i], est.chi, est.stderr_mean, static_cast<long>(w[i].masked), std::string("ok")};
        } catch (const Error& e) {
            rows[i] = {grid[i], NAN, NAN, static_cast<long>(w[i].masked), status_of(e)};
        }
    });
    r.rows = std::move(rows);
}

void run_scaling(const SweepConfig& c, SweepResult& r) {
    r.columns = {"gamma", "chi", "stderr", "mean_laminar", "masked", "status"};
    const auto& geo = quadratic_geometry();
    auto grid = geometric_grid(c.gamma_min, c.gamma_max, c.points);
    auto w = masks(c, grid);
    std::vector<bool> masked;
    for (const auto& p : w) masked.push_back(p.masked);
    try {
        auto fit = scaling_fit(geo.family, grid, c.n, laminar_region(geo), masked, c.seeds, c.seed, c.workers);
        for (const auto& p : fit.points)
            r.rows.push_back({p.gamma, p.chi, p.stderr_mean, p.mean_laminar, static_cast<long>(p.masked),
                              std::string("ok")});
        r.summary.push_back({"slope", fit.slope});
        r.summary.push_back({"slope_stderr", fit.slope_stderr});
        r.summary.push_back({"laminar_slope", fit.laminar_slope});
        r.summary.push_back({"band_min", fit.band_min});
        r.summary.push_back({"band_max", fit.band_max});
    } catch (const Error& e) {
        for (size_t i = 0; i < grid.size(); ++i)
            r.rows.push_back({grid[i], NAN, NAN, NAN, static_cast<long>(masked[i]), status_of(e)});
    }
}

void run_measure(const SweepConfig& c, SweepResult& r) {
    r.columns = {"bin_lo", "bin_hi", "mass"};
    const auto& geo = quadratic_geometry();
    const auto mode = parse_measure_mode(c.mode);
    Ladder lad;
    if (mode != MeasureMode::base) lad = ladder_around(geo, c.gamma);
    auto m = measure_estimate(geo, lad, c.gamma, mode, c.n, c.bins, c.seed);
    for (size_t i = 0; i < m.masses.size(); ++i) r.rows.push_back({m.bin_lo(i), m.bin_hi(i), m.masses[i]});
    r.summary.push_back({"samples", m.samples});
}

void run_windows(const SweepConfig& c, SweepResult& r) {
    r.columns = {"gamma", "lyapunov", "masked", "period", "status"};
    auto grid = geometric_grid(c.gamma_min, c.gamma_max, c.points);
    std::vector<WindowPoint> w;
    try {
        SweepConfig wc = c;
        wc.window_n = std::max(c.n, c.window_n);
        w = masks(wc, grid);
    } catch (const Error& e) {
        for (double g : grid) r.rows.push_back({g, NAN, 0L, 0L, status_of(e)});
        return;
    }
    for (const auto& p : w) r.rows.push_back({p.gamma, p.lyapunov, static_cast<long>(p.masked), p.period, std::string("ok")});
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    auto problems = validate(cfg);
    if (!problems.empty()) throw ConfigError(ErrorCode::validation, problems);
    SweepResult r;
    r.kind = cfg.kind;
    r.config_hash = config_hash(cfg);
    r.version = std::string(build_version);
    try {
        switch (cfg.kind) {
            case SweepKind::bifurcation: run_bifurcation(cfg, r); break;
            case SweepKind::gammas: run_gammas(cfg, r); break;
            case SweepKind::mather: run_mather(cfg, r); break;
            case SweepKind::misiurewicz: run_misiurewicz(cfg, r); break;
            case SweepKind::br_scan: run_br_scan(cfg, r); break;
            case SweepKind::chi: run_chi(cfg, r); break;
            case SweepKind::scaling: run_scaling(cfg, r); break;
            case SweepKind::measure: run_measure(cfg, r); break;
            case SweepKind::windows: run_windows(cfg, r); break;
        }
    } catch (const Error& e) {
        // A failure of shared setup leaves no grid to report on; the status says why.
        r.summary.push_back({"status", status_of(e)});
    }
    return r;
}

std::string emit_csv(const SweepResult& r) {
    std::string out;
    for (size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i];
    out += '\n';
    for (const auto& row : r.rows) {
        for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + render_cell(row[i]);
        out += '\n';
    }
    return out;
}

std::string emit_json(const SweepResult& r) {
    std::string out = "{\"kind\":" + json_string(to_string(r.kind)) + ",\"version\":" + json_string(r.version) +
                      ",\"config_hash\":" + json_string(r.config_hash) + ",\"columns\":[";
    for (size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + json_string(r.columns[i]);
    out += "],\"rows\":[";
    for (size_t k = 0; k < r.rows.size(); ++k) {
        out += k ? ",[" : "[";
        for (size_t i = 0; i < r.rows[k].size(); ++i) out += (i ? "," : "") + json_cell(r.rows[k][i]);
        out += "]";
    }
    out += "],\"summary\":{";
    for (size_t i = 0; i < r.summary.size(); ++i)
        out += (i ? "," : "") + json_string(r.summary[i].first) + ":" + json_cell(r.summary[i].second);
    out += "}}\n";
    return out;
}

}  // namespace snlab
