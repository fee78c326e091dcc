#pragma once

// Scenario configuration: line-oriented `key = value` text, `#` comments.
//
//   algorithm      preference | binhash                      (required)
//   m              machine count >= 1                        (required)
//   n              job count; optional when sizes are listed
//   alpha          BinHash load factor in (0,1)              default 2 - sqrt(2)
//   sizes          identical | identical(v) | uniform(lo,hi) | pareto(shape,scale)
//                  | comma/space separated list of sizes     default identical
//   sizes_file     file with one or more sizes per line (alternative to sizes)
//   trace          churn | flap | sweep | file               default churn
//   trace_file     file with one state per line (machine ids), for trace = file
//   steps          number of states in a generated trace     default 100
//   up_probability per-machine up probability for churn      default 0.8
//   absent_machine machine that flaps for trace = flap       default 0
//   state          machine ids for `assign`                  default all machines
//   seed           master seed                               default 0
//   output         CSV path, "-" for stdout                  default -

#include <pilb/binhash.hpp>
#include <pilb/core.hpp>
#include <pilb/random.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pilb {

/// Configuration problem tied to a key and the line that set it (0 = command line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::size_t line, const std::string& what)
        : std::runtime_error(location(line) + ": key '" + key + "': " + what),
          key_(std::move(key)),
          line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string location(std::size_t line) {
        return line == 0 ? std::string("command line") : "line " + std::to_string(line);
    }

    std::string key_;
    std::size_t line_;
};

enum class AlgorithmKind { Preference, BinHash };
enum class TraceKind { Churn, Flap, Sweep, File };

struct InlineSizes {
    std::vector<double> sizes;
};
struct SizesFile {
    std::string path;
};
struct IdenticalSizes {
    double size = 1.0;
};
struct UniformSizes {
    double lo = 0.0;
    double hi = 1.0;
};
struct ParetoSizes {
    double shape = 1.0;
    double scale = 1.0;
};
using SizesSource = std::variant<IdenticalSizes, UniformSizes, ParetoSizes, InlineSizes, SizesFile>;

struct ScenarioConfig {
    AlgorithmKind algorithm = AlgorithmKind::BinHash;
    AlphaParam alpha;
    std::size_t n = 0;
    std::size_t m = 0;
    SizesSource sizes = IdenticalSizes{};
    TraceKind trace = TraceKind::Churn;
    std::string trace_file;
    std::size_t steps = 100;
    double up_probability = 0.8;
    MachineId absent_machine = 0;
    std::optional<std::vector<MachineId>> state;
    Seed seed = 0;
    std::string output = "-";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
    text = trim(text);
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

/// Splits on commas and whitespace, dropping empty pieces.
inline std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',' || text[i] == ' ' || text[i] == '\t') {
            if (i > start) out.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

/// "name(a,b)" -> {a, b}; "name" -> {}. nullopt if the shape is wrong.
inline std::optional<std::vector<double>> call_arguments(std::string_view text, std::string_view name) {
    if (text == name) return std::vector<double>{};
    if (text.size() < name.size() + 2 || text.substr(0, name.size()) != name) return std::nullopt;
    auto rest = trim(text.substr(name.size()));
    if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') return std::nullopt;
    std::vector<double> args;
    for (auto piece : split_list(rest.substr(1, rest.size() - 2))) {
        auto v = parse_number<double>(piece);
        if (!v) return std::nullopt;
        args.push_back(*v);
    }
    return args;
}

}  // namespace detail

/// Collects raw settings, then validates them as a whole.
class ConfigBuilder {
public:
    /// Records `key = value` from `line` (0 for command-line overrides).
    /// Later settings of the same key replace earlier ones.
    void set(std::string key, std::string value, std::size_t line) {
        static const char* const known[] = {"algorithm", "m",     "n",     "alpha",          "sizes",
                                            "sizes_file", "trace", "trace_file", "steps", "up_probability",
                                            "absent_machine", "state", "seed", "output"};
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(key, line, "unknown key");
        settings_[key] = {std::move(value), line};
    }

    /// Feeds every `key = value` line of `text`.
    void read(std::string_view text) {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto end = std::min(text.find('\n', pos), text.size());
            auto line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(std::string(line), line_no, "expected `key = value`");
            }
            const auto key = detail::trim(line.substr(0, eq));
            if (key.empty()) throw ConfigError("", line_no, "missing key before '='");
            set(std::string(key), std::string(detail::trim(line.substr(eq + 1))), line_no);
        }
    }

    ScenarioConfig build() const {
        ScenarioConfig cfg;

        if (auto v = get("algorithm")) {
            if (v->text == "preference") cfg.algorithm = AlgorithmKind::Preference;
            else if (v->text == "binhash") cfg.algorithm = AlgorithmKind::BinHash;
            else fail("algorithm", "expected 'preference' or 'binhash', got '" + v->text + "'");
        }

        if (auto v = get("alpha")) {
            const double a = number<double>("alpha");
            if (!(a > 0.0 && a < 1.0)) fail("alpha", "value " + v->text + " outside legal interval (0,1)");
            cfg.alpha = AlphaParam(a);
        }

        if (get("m")) {
            cfg.m = number<std::size_t>("m");
            if (cfg.m == 0) fail("m", "must be >= 1");
            if (cfg.m > std::numeric_limits<MachineId>::max()) fail("m", "too large");
        }
        const bool has_m = get("m") != nullptr;

        const auto sizes = get("sizes");
        const auto sizes_file = get("sizes_file");
        if (sizes && sizes_file) fail("sizes_file", "conflicts with 'sizes' on line " + std::to_string(sizes->line));
        std::optional<std::size_t> listed;
        if (sizes) {
            cfg.sizes = parse_sizes(sizes->text);
            if (auto* list = std::get_if<InlineSizes>(&cfg.sizes)) listed = list->sizes.size();
        } else if (sizes_file) {
            require_file("sizes_file", sizes_file->text);
            cfg.sizes = SizesFile{sizes_file->text};
        }

        if (get("n")) {
            cfg.n = number<std::size_t>("n");
            if (listed && *listed != cfg.n) {
                fail("n", "value " + std::to_string(cfg.n) + " disagrees with the " + std::to_string(*listed) +
                              " listed sizes");
            }
        } else if (listed) {
            cfg.n = *listed;
        }

        if (auto v = get("trace")) {
            if (v->text == "churn") cfg.trace = TraceKind::Churn;
            else if (v->text == "flap") cfg.trace = TraceKind::Flap;
            else if (v->text == "sweep") cfg.trace = TraceKind::Sweep;
            else if (v->text == "file") cfg.trace = TraceKind::File;
            else fail("trace", "expected churn, flap, sweep or file, got '" + v->text + "'");
        }
        if (auto v = get("trace_file")) {
            if (cfg.trace != TraceKind::File) fail("trace_file", "only meaningful with trace = file");
            require_file("trace_file", v->text);
            cfg.trace_file = v->text;
        } else if (cfg.trace == TraceKind::File) {
            fail("trace", "trace = file needs trace_file");
        }

        if (get("steps")) {
            cfg.steps = number<std::size_t>("steps");
            if (cfg.steps == 0) fail("steps", "must be >= 1");
        }
        if (auto v = get("up_probability")) {
            cfg.up_probability = number<double>("up_probability");
            if (!(cfg.up_probability > 0.0 && cfg.up_probability <= 1.0)) {
                fail("up_probability", "value " + v->text + " outside legal interval (0,1]");
            }
        }
        if (get("absent_machine")) {
            cfg.absent_machine = number<MachineId>("absent_machine");
            if (has_m && cfg.absent_machine >= cfg.m) fail("absent_machine", "must be < m = " + std::to_string(cfg.m));
        }
        if (has_m && cfg.trace == TraceKind::Flap && cfg.m < 2) {
            fail_at("m", "trace = flap needs m >= 2, got " + std::to_string(cfg.m));
        }

        if (auto v = get("state")) {
            std::vector<MachineId> ids;
            for (auto piece : detail::split_list(v->text)) {
                auto id = detail::parse_number<MachineId>(piece);
                if (!id) fail("state", "malformed machine id '" + std::string(piece) + "'");
                if (has_m && *id >= cfg.m) fail("state", "machine id " + std::to_string(*id) + " is not < m");
                ids.push_back(*id);
            }
            if (ids.empty()) fail("state", "must name at least one machine");
            cfg.state = std::move(ids);
        }

        if (get("seed")) cfg.seed = number<Seed>("seed");
        if (auto v = get("output")) {
            if (v->text.empty()) fail("output", "must not be empty");
            cfg.output = v->text;
        }

        if (!get("algorithm")) fail("algorithm", "missing required key");
        if (!has_m) fail("m", "missing required key");
        if (!get("n") && !listed && !sizes_file) fail("n", "missing required key (or list the sizes explicitly)");
        return cfg;
    }

private:
    struct Setting {
        std::string text;
        std::size_t line;
    };

    const Setting* get(const std::string& key) const {
        auto it = settings_.find(key);
        return it == settings_.end() ? nullptr : &it->second;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto* s = get(key);
        throw ConfigError(key, s ? s->line : 0, what);
    }

    /// Like fail, but falls back to the line of `trace` when `key` was never set.
    [[noreturn]] void fail_at(const std::string& key, const std::string& what) const {
        const auto* s = get(key);
        if (!s) s = get("trace");
        throw ConfigError(key, s ? s->line : 0, what);
    }

    template <class T>
    T number(const std::string& key) const {
        const auto* s = get(key);
        auto v = detail::parse_number<T>(s->text);
        if (!v) fail(key, "malformed value '" + s->text + "'");
        return *v;
    }

    void require_file(const std::string& key, const std::string& path) const {
        std::error_code ec;
        if (!std::filesystem::is_regular_file(path, ec)) fail(key, "file '" + path + "' does not exist");
    }

    SizesSource parse_sizes(const std::string& text) const {
        if (auto args = detail::call_arguments(text, "identical")) {
            if (args->empty()) return IdenticalSizes{};
            if (args->size() != 1 || !((*args)[0] >= 0.0)) fail("sizes", "identical(v) needs one value v >= 0");
            return IdenticalSizes{(*args)[0]};
        }
        if (auto args = detail::call_arguments(text, "uniform")) {
            if (args->size() != 2) fail("sizes", "uniform(lo,hi) needs two arguments");
            const double lo = (*args)[0];
            const double hi = (*args)[1];
            if (!(lo >= 0.0 && lo <= hi)) fail("sizes", "uniform(lo,hi) needs 0 <= lo <= hi");
            return UniformSizes{lo, hi};
        }
        if (auto args = detail::call_arguments(text, "pareto")) {
            if (args->size() != 2) fail("sizes", "pareto(shape,scale) needs two arguments");
            if (!((*args)[0] > 0.0 && (*args)[1] > 0.0)) fail("sizes", "pareto(shape,scale) needs shape, scale > 0");
            return ParetoSizes{(*args)[0], (*args)[1]};
        }
        InlineSizes list;
        for (auto piece : detail::split_list(text)) {
            auto v = detail::parse_number<double>(piece);
            if (!v || !(*v >= 0.0) || !std::isfinite(*v)) {
                fail("sizes", "malformed size '" + std::string(piece) + "'");
            }
            list.sizes.push_back(*v);
        }
        return list;
    }

    std::map<std::string, Setting> settings_;
};

/// Parses and validates a configuration; `overrides` (key, value) pairs from
/// the command line take precedence over the text.
inline ScenarioConfig parse_config(std::string_view text,
                                   const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    ConfigBuilder builder;
    builder.read(text);
    for (const auto& [key, value] : overrides) builder.set(key, value, 0);
    return builder.build();
}

}  // namespace pilb
