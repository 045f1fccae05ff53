#include "stomod/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "stomod/errors.hpp"
#include "stomod/units.hpp"

namespace stomod::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view token) {
    token = trim(token);
    double value = 0.0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end || token.empty() || !std::isfinite(value))
        throw ConfigError(fmt::format("expected a number, got '{}'", token));
    return value;
}

int parse_int(std::string_view token) {
    token = trim(token);
    int value = 0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end || token.empty())
        throw ConfigError(fmt::format("expected an integer, got '{}'", token));
    return value;
}

std::vector<int> parse_int_list(std::string_view value) {
    std::vector<int> out;
    if (trim(value).empty()) return out;
    for (auto token : split(value, ',')) out.push_back(parse_int(token));
    return out;
}

std::vector<std::string> parse_labels(std::string_view value) {
    std::vector<std::string> out;
    if (trim(value).empty()) return out;
    for (auto token : split(value, ',')) {
        if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
            })) {
            throw ConfigError(fmt::format("invalid label '{}' (letters, digits, '_' and '-' only)", token));
        }
        out.emplace_back(token);
    }
    return out;
}

std::string exact(double v) { return fmt::format("{:.17g}", v); }

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + exact(v[i]);
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
    return out;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

struct Field {
    std::string_view section;
    std::string_view key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number(std::string_view section, std::string_view key, T RunConfig::*member) {
    return {section, key,
            [member](RunConfig& c, std::string_view v) {
                if constexpr (std::is_same_v<T, int>) {
                    c.*member = parse_int(v);
                } else {
                    c.*member = parse_double(v);
                }
            },
            [member](const RunConfig& c) {
                if constexpr (std::is_same_v<T, int>) {
                    return std::to_string(c.*member);
                } else {
                    return exact(c.*member);
                }
            }};
}

Field device(std::string_view key, double DeviceParams::*member) {
    return {"device", key, [member](RunConfig& c, std::string_view v) { c.device.*member = parse_double(v); },
            [member](const RunConfig& c) { return exact(c.device.*member); }};
}

Field spectrum(std::string_view key, int SpectrumOptions::*member) {
    return {"spectrum", key, [member](RunConfig& c, std::string_view v) { c.spectrum.*member = parse_int(v); },
            [member](const RunConfig& c) { return std::to_string(c.spectrum.*member); }};
}

Field grid(std::string_view section, std::string_view key, std::vector<double> RunConfig::*member) {
    return {section, key, [member](RunConfig& c, std::string_view v) { c.*member = parse_grid(v); },
            [member](const RunConfig& c) { return join_doubles(c.*member); }};
}

Field int_list(std::string_view section, std::string_view key, std::vector<int> RunConfig::*member) {
    return {section, key, [member](RunConfig& c, std::string_view v) { c.*member = parse_int_list(v); },
            [member](const RunConfig& c) { return join_ints(c.*member); }};
}

template <class Enum>
Field choice(std::string_view section, std::string_view key, Enum RunConfig::*member,
             std::vector<std::pair<std::string_view, Enum>> options) {
    return {section, key,
            [member, options](RunConfig& c, std::string_view v) {
                v = trim(v);
                for (const auto& [name, value] : options) {
                    if (name == v) {
                        c.*member = value;
                        return;
                    }
                }
                throw ConfigError(fmt::format("unknown option '{}'", v));
            },
            [member, options](const RunConfig& c) {
                for (const auto& [name, value] : options) {
                    if (c.*member == value) return std::string(name);
                }
                return std::string("?");
            }};
}

// Order here is the canonical order of the rendered configuration.
const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(device("mu0_h_app_t", &DeviceParams::mu0_h_app_t));
        f.push_back(device("mu0_ms_t", &DeviceParams::mu0_ms_t));
        f.push_back(device("gamma_hz_per_t", &DeviceParams::gamma_hz_per_t));
        f.push_back(device("alpha", &DeviceParams::alpha));
        f.push_back(device("nu", &DeviceParams::nu));

        f.push_back({"operating_points", "labels",
                     [](RunConfig& c, std::string_view v) { c.op_labels = parse_labels(v); },
                     [](const RunConfig& c) { return join_strings(c.op_labels); }});
        f.push_back(grid("operating_points", "xi", &RunConfig::op_xi));

        f.push_back(grid("operating_point", "xi_grid", &RunConfig::dispersion_xi));

        f.push_back(number("solver", "n_harmonics", &RunConfig::n_harmonics));
        f.push_back(choice<SolveMethod>("solver", "method", &RunConfig::method,
                                        {{"matrix", SolveMethod::matrix}, {"recursive", SolveMethod::recursive}}));
        f.push_back(number("solver", "mu_max", &RunConfig::mu_max));
        f.push_back(number("solver", "backsolve_tolerance", &RunConfig::backsolve_tolerance));

        f.push_back(spectrum("j_max", &SpectrumOptions::j_max));
        f.push_back(spectrum("k_max", &SpectrumOptions::k_max));
        f.push_back(spectrum("samples_per_period", &SpectrumOptions::samples_per_period));
        f.push_back(spectrum("n_periods", &SpectrumOptions::n_periods));
        f.push_back(choice<PowerScale>("spectrum", "power_scale", &RunConfig::power_scale,
                                       {{"unit", PowerScale::unit}, {"p0", PowerScale::p0}}));

        f.push_back(number("psd_map", "f_m_hz", &RunConfig::psd_f_m_hz));
        f.push_back(grid("psd_map", "beta1", &RunConfig::psd_beta1));
        f.push_back(choice<SpectrumPath>("psd_map", "path", &RunConfig::psd_path,
                                         {{"analytic", SpectrumPath::analytic}, {"fft", SpectrumPath::fft}}));

        f.push_back(grid("asymmetry_map", "beta1", &RunConfig::asym_beta1));
        f.push_back(grid("asymmetry_map", "f_m_hz", &RunConfig::asym_f_m_hz));
        f.push_back(number("asymmetry_map", "slice_f_m_hz", &RunConfig::asym_slice_f_m_hz));

        f.push_back(number("bandwidth", "mu", &RunConfig::bw_mu));
        f.push_back(grid("bandwidth", "f_m_hz", &RunConfig::bw_f_m_hz));
        f.push_back(number("bandwidth", "seed_mu", &RunConfig::bw_seed_mu));
        f.push_back(number("bandwidth", "seed_fraction", &RunConfig::bw_seed_fraction));

        f.push_back({"error_analysis", "op_label",
                     [](RunConfig& c, std::string_view v) {
                         auto labels = parse_labels(v);
                         if (labels.size() != 1) throw ConfigError("error_analysis.op_label takes one label");
                         c.err_op_label = labels.front();
                     },
                     [](const RunConfig& c) { return c.err_op_label; }});
        f.push_back(number("error_analysis", "mu", &RunConfig::err_mu));
        f.push_back(grid("error_analysis", "f_m_hz", &RunConfig::err_f_m_hz));
        f.push_back(int_list("error_analysis", "n_values", &RunConfig::err_n_values));
        f.push_back(number("error_analysis", "n_ref", &RunConfig::err_n_ref));
        f.push_back(int_list("error_analysis", "recursive_n", &RunConfig::err_recursive_n));
        f.push_back(grid("error_analysis", "beta1", &RunConfig::err_beta1));
        f.push_back(number("error_analysis", "mu_max", &RunConfig::err_mu_max));

        f.push_back({"output", "format",
                     [](RunConfig& c, std::string_view v) { c.format = std::string(trim(v)); },
                     [](const RunConfig& c) { return c.format; }});
        return f;
    }();
    return table;
}

const Field& find_field(std::string_view section, std::string_view key) {
    for (const auto& f : fields()) {
        if (f.section == section && f.key == key) return f;
    }
    throw ConfigError(fmt::format("unknown configuration key '{}.{}'", section, key));
}

void set_field(RunConfig& config, std::string_view section, std::string_view key, std::string_view value) {
    const Field& field = find_field(section, key);
    try {
        field.set(config, value);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}.{}: {}", section, key, e.what()));
    }
}

void require_grid(const std::vector<double>& grid, std::string_view name) {
    if (grid.empty()) throw ConfigError(fmt::format("{} must not be empty", name));
}

void require_positive(const std::vector<double>& grid, std::string_view name) {
    require_grid(grid, name);
    for (double v : grid) {
        if (!(v > 0.0)) throw ConfigError(fmt::format("{} values must be positive", name));
    }
}

void require_non_negative(const std::vector<double>& grid, std::string_view name) {
    require_grid(grid, name);
    for (double v : grid) {
        if (!(v >= 0.0)) throw ConfigError(fmt::format("{} values must be >= 0", name));
    }
}

}  // namespace

RunConfig::RunConfig() {
    dispersion_xi = parse_grid("linspace(1, 4, 31)");
    psd_beta1 = parse_grid("linspace(0, 3, 31)");
    asym_beta1 = parse_grid("linspace(0, 1.4, 15)");
    asym_f_m_hz = parse_grid("20e6, 40e6, 60e6, 80e6, 100e6, 150e6, 200e6");
    bw_f_m_hz = parse_grid("logspace(1e7, 1e9, 21)");
    err_beta1 = parse_grid("linspace(0.2, 5, 25)");
}

std::vector<LabeledPoint> RunConfig::operating_points() const {
    if (op_labels.size() != op_xi.size()) {
        throw ConfigError(fmt::format("operating_points: {} labels but {} xi values", op_labels.size(),
                                      op_xi.size()));
    }
    std::vector<LabeledPoint> out;
    for (std::size_t i = 0; i < op_labels.size(); ++i) out.push_back({op_labels[i], op_xi[i]});
    return out;
}

std::vector<double> parse_grid(std::string_view value) {
    value = trim(value);
    for (std::string_view fn : {"linspace", "logspace"}) {
        if (value.substr(0, fn.size()) != fn) continue;
        auto rest = trim(value.substr(fn.size()));
        if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')')
            throw ConfigError(fmt::format("malformed grid '{}'", value));
        const auto args = split(rest.substr(1, rest.size() - 2), ',');
        if (args.size() != 3) throw ConfigError(fmt::format("{} takes (start, stop, count)", fn));
        const double start = parse_double(args[0]);
        const double stop = parse_double(args[1]);
        const int count = parse_int(args[2]);
        if (count < 1) throw ConfigError("grid count must be >= 1");
        const bool log = fn == "logspace";
        if (log && !(start > 0.0 && stop > 0.0)) throw ConfigError("logspace bounds must be positive");

        std::vector<double> out(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            out[static_cast<std::size_t>(i)] =
                log ? std::exp(std::log(start) + frac * (std::log(stop) - std::log(start)))
                    : start + frac * (stop - start);
        }
        // Pin the endpoints exactly so grids like linspace(0, 3, 31) hit 3.
        out.back() = count == 1 ? start : stop;
        out.front() = start;
        return out;
    }
    std::vector<double> out;
    if (value.empty()) return out;
    for (auto token : split(value, ',')) out.push_back(parse_double(token));
    return out;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError("unterminated section header");
                section = std::string(trim(line.substr(1, line.size() - 2)));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError("expected key = value");
            if (section.empty()) throw ConfigError("key outside of any [section]");
            set_field(base, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("config line {}: {}", line_no, e.what()));
        }
    }
    return base;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
        throw ConfigError(fmt::format("override '{}' must look like section.key=value", assignment));
    set_field(config, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
              trim(assignment.substr(eq + 1)));
}

void filter_operating_points(RunConfig& config, std::string_view labels) {
    const auto wanted = parse_labels(labels);
    const auto points = config.operating_points();
    std::vector<std::string> kept_labels;
    std::vector<double> kept_xi;
    for (const auto& label : wanted) {
        auto it = std::find_if(points.begin(), points.end(), [&](const LabeledPoint& p) { return p.label == label; });
        if (it == points.end()) throw ConfigError(fmt::format("--op-label: no operating point '{}'", label));
        kept_labels.push_back(it->label);
        kept_xi.push_back(it->xi);
    }
    if (!kept_labels.empty() &&
        std::find(kept_labels.begin(), kept_labels.end(), config.err_op_label) == kept_labels.end()) {
        config.err_op_label = kept_labels.front();
    }
    config.op_labels = std::move(kept_labels);
    config.op_xi = std::move(kept_xi);
}

OperatingPoint operating_point_for(const RunConfig& config, const LabeledPoint& point) {
    DeviceParams params = config.device;
    params.xi = point.xi;
    return derive_operating_point(params);
}

void validate(const RunConfig& config) {
    validate_device(config.device);

    const auto points = config.operating_points();
    if (points.empty()) throw ConfigError("at least one operating point is required");
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (points[i].label == points[j].label)
                throw ConfigError(fmt::format("duplicate operating point label '{}'", points[i].label));
        }
        if (!(points[i].xi > 1.0))
            throw BelowThresholdError(fmt::format("operating point {} has xi = {} <= 1", points[i].label, points[i].xi));
        (void)operating_point_for(config, points[i]);
    }

    require_grid(config.dispersion_xi, "operating_point.xi_grid");
    for (double xi : config.dispersion_xi) {
        if (!(xi >= 1.0)) throw ConfigError("operating_point.xi_grid values must be >= 1");
    }

    if (config.n_harmonics < 1) throw ConfigError("solver.n_harmonics must be >= 1");
    if (!(config.mu_max > 0.0)) throw ConfigError("solver.mu_max must be positive");
    if (!(config.backsolve_tolerance > 0.0)) throw ConfigError("solver.backsolve_tolerance must be positive");

    const auto& s = config.spectrum;
    if (s.j_max < 1) throw ConfigError("spectrum.j_max must be >= 1");
    if (s.k_max < 1) throw ConfigError("spectrum.k_max must be >= 1");
    if (s.samples_per_period < 16) throw ConfigError("spectrum.samples_per_period must be >= 16");
    if (s.n_periods < 1) throw ConfigError("spectrum.n_periods must be >= 1");
    if (2 * s.k_max >= s.samples_per_period)
        throw ConfigError("spectrum.samples_per_period must exceed 2 * k_max");

    if (!(config.psd_f_m_hz > 0.0)) throw ConfigError("psd_map.f_m_hz must be positive");
    require_non_negative(config.psd_beta1, "psd_map.beta1");

    require_non_negative(config.asym_beta1, "asymmetry_map.beta1");
    require_positive(config.asym_f_m_hz, "asymmetry_map.f_m_hz");
    if (!(config.asym_slice_f_m_hz > 0.0)) throw ConfigError("asymmetry_map.slice_f_m_hz must be positive");

    if (!(config.bw_mu > 0.0)) throw ConfigError("bandwidth.mu must be positive");
    require_positive(config.bw_f_m_hz, "bandwidth.f_m_hz");
    if (!(config.bw_seed_mu > 0.0)) throw ConfigError("bandwidth.seed_mu must be positive");
    if (!(config.bw_seed_fraction > 0.0 && config.bw_seed_fraction < 0.5))
        throw ConfigError("bandwidth.seed_fraction must lie in (0, 0.5)");

    if (std::none_of(points.begin(), points.end(),
                     [&](const LabeledPoint& p) { return p.label == config.err_op_label; })) {
        throw ConfigError(fmt::format("error_analysis.op_label '{}' is not an operating point", config.err_op_label));
    }
    if (!(config.err_mu >= 0.0)) throw ConfigError("error_analysis.mu must be >= 0");
    require_positive(config.err_f_m_hz, "error_analysis.f_m_hz");
    if (config.err_n_values.empty()) throw ConfigError("error_analysis.n_values must not be empty");
    if (config.err_recursive_n.empty()) throw ConfigError("error_analysis.recursive_n must not be empty");
    for (int n : config.err_n_values) {
        if (n < 1 || n > config.err_n_ref) throw ConfigError("error_analysis.n_values must lie in [1, n_ref]");
    }
    for (int n : config.err_recursive_n) {
        if (n < 1) throw ConfigError("error_analysis.recursive_n values must be >= 1");
    }
    require_positive(config.err_beta1, "error_analysis.beta1");
    if (!(config.err_mu_max > 0.0)) throw ConfigError("error_analysis.mu_max must be positive");

    if (config.format != "csv") throw ConfigError(fmt::format("unsupported output format '{}'", config.format));
}

std::string canonical_text(const RunConfig& config) {
    std::string out;
    std::string_view section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out += '\n';
            section = f.section;
            out += fmt::format("[{}]\n", section);
        }
        out += fmt::format("{} = {}\n", f.key, f.get(config));
    }
    return out;
}

std::uint64_t config_hash(const RunConfig& config) {
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace stomod::cli
