#pragma once

// Scenario configuration files, built-in presets and CSV output.
//
// Config grammar: UTF-8 text, one or more whitespace-separated `key=value`
// tokens per line, `#` starts a comment. A later occurrence of a key
// overrides an earlier one. See README.md for the key list.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dynamics.hpp"

namespace ionlambda {

struct TimeGrid {
    double start = 0.0;
    double stop = 50.0;
    unsigned samples = 2001;

    std::vector<double> points() const {
        std::vector<double> t(samples);
        const double step = (stop - start) / (samples - 1);
        for (unsigned i = 0; i < samples; ++i) t[i] = start + step * i;
        t.back() = stop;
        return t;
    }
};

struct Measures {
    bool linear = true;
    bool vn = true;
};

struct Outputs {
    std::string csv_path;
    Measures measures;
    bool report = false;
};

struct ScenarioConfig {
    ModeParams mode1;
    ModeParams mode2;
    bool unit_normalized = false;  ///< rescale amplitudes so that E_m(0) = 1
    PulseProfile profile;
    IonAmplitudes ion = ion_level(Level::two);
    FieldSpec field1;
    FieldSpec field2;
    TimeGrid grid;
    std::optional<Cutoffs> cutoffs;
    double gamma_eps = 1e-8;
    double dead_eps = 1e-3;
    Outputs outputs;

    Scenario scenario() const {
        Scenario sc;
        sc.mode1 = unit_normalized ? ionlambda::unit_normalized(mode1) : mode1;
        sc.mode2 = unit_normalized ? ionlambda::unit_normalized(mode2) : mode2;
        sc.profile = profile;
        sc.ion = ion;
        sc.field1 = field1;
        sc.field2 = field2;
        sc.times = grid.points();
        sc.cutoffs = cutoffs;
        return sc;
    }
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& key, const std::string& message)
        : std::runtime_error((line > 0 ? "config line " + std::to_string(line) : std::string("preset")) +
                             ", key '" + key + "': " + message),
          line_(line),
          key_(key) {}

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RawEntry {
    std::string value;
    int line = 0;
};

inline const std::vector<std::string_view>& known_keys() {
    static const std::vector<std::string_view> keys{
        "eta",       "eta1",      "eta2",      "amplitude", "amplitude1", "amplitude2",
        "gamma",     "gamma1",    "gamma2",    "quanta",    "quanta1",    "quanta2",
        "eta_power", "eta_power1", "eta_power2", "unit_normalized", "profile", "tau",
        "t_start",   "ion",       "ion_im",    "n1",        "n2",         "nbar1",
        "nbar2",     "tail_tol",  "start",     "stop",      "samples",    "cutoff1",
        "cutoff2",   "csv_path",  "measures",  "report",    "gamma_eps",  "dead_eps"};
    return keys;
}

class RawConfig {
public:
    explicit RawConfig(std::string_view text, std::string_view base = {}) {
        read(base, true);
        read(text, false);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    int line_of(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    std::optional<std::string> text(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    std::optional<double> real(const std::string& key) const {
        const auto s = text(key);
        if (!s) return std::nullopt;
        return parse_real(key, *s);
    }

    std::optional<unsigned> count(const std::string& key) const {
        const auto s = text(key);
        if (!s) return std::nullopt;
        unsigned v = 0;
        const auto* end = s->data() + s->size();
        const auto [ptr, ec] = std::from_chars(s->data(), end, v);
        if (ec != std::errc{} || ptr != end) fail(key, "not a non-negative integer: '" + *s + "'");
        return v;
    }

    std::optional<bool> flag(const std::string& key) const {
        const auto s = text(key);
        if (!s) return std::nullopt;
        if (*s == "true" || *s == "1" || *s == "yes" || *s == "on") return true;
        if (*s == "false" || *s == "0" || *s == "no" || *s == "off") return false;
        fail(key, "not a boolean: '" + *s + "'");
    }

    std::vector<double> real_list(const std::string& key) const {
        std::vector<double> out;
        const auto s = text(key);
        if (!s) return out;
        std::size_t pos = 0;
        while (pos <= s->size()) {
            const auto comma = s->find(',', pos);
            const auto end = comma == std::string::npos ? s->size() : comma;
            out.push_back(parse_real(key, s->substr(pos, end - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        throw ConfigError(line_of(key), key, message);
    }

private:
    double parse_real(const std::string& key, const std::string& s) const {
        double v = 0.0;
        const auto* end = s.data() + s.size();
        const auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
            fail(key, "not a finite number: '" + s + "'");
        }
        return v;
    }

    void read(std::string_view text, bool is_base) {
        int line_no = 0;
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream tokens(line);
            std::string tok;
            while (tokens >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ConfigError(is_base ? 0 : line_no, tok, "expected key=value");
                }
                std::string key = tok.substr(0, eq);
                bool known = false;
                for (auto k : known_keys()) known = known || k == key;
                if (!known) throw ConfigError(is_base ? 0 : line_no, key, "unknown key");
                entries_[key] = {tok.substr(eq + 1), is_base ? 0 : line_no};
            }
        }
    }

    std::map<std::string, RawEntry> entries_;
};

// Resolves `<base><suffix>` over the shared `<base>` key.
template <typename T, typename Get>
void per_mode(const RawConfig& raw, const std::string& base, Get get, T& mode1, T& mode2) {
    if (auto v = (raw.*get)(base)) mode1 = mode2 = *v;
    if (auto v = (raw.*get)(base + "1")) mode1 = *v;
    if (auto v = (raw.*get)(base + "2")) mode2 = *v;
}

inline std::string mode_key(const RawConfig& raw, const std::string& base, int which) {
    const std::string specific = base + std::to_string(which);
    return raw.has(specific) ? specific : base;
}

inline FieldSpec parse_field(const RawConfig& raw, int which, double tail_tol) {
    const std::string nkey = "n" + std::to_string(which);
    const std::string nbarkey = "nbar" + std::to_string(which);
    if (raw.has(nkey) && raw.has(nbarkey)) {
        raw.fail(nbarkey, "mode " + std::to_string(which) + " cannot be both Fock (" + nkey +
                              ") and coherent (" + nbarkey + ")");
    }
    if (auto nbar = raw.real(nbarkey)) {
        if (*nbar < 0.0) raw.fail(nbarkey, "mean occupation must be non-negative");
        return FieldSpec::coherent(*nbar, tail_tol);
    }
    FieldSpec f = FieldSpec::fock(raw.count(nkey).value_or(0));
    f.tail_tol = tail_tol;
    return f;
}

}  // namespace detail

/// Parses and validates a scenario; unset keys take their defaults. Keys in
/// `text` override those in `base` (used for preset + file layering).
inline ScenarioConfig parse_config(std::string_view text, std::string_view base = {}) {
    const detail::RawConfig raw(text, base);
    ScenarioConfig cfg;

    detail::per_mode(raw, "eta", &detail::RawConfig::real, cfg.mode1.eta, cfg.mode2.eta);
    detail::per_mode(raw, "amplitude", &detail::RawConfig::real, cfg.mode1.amplitude,
                     cfg.mode2.amplitude);
    detail::per_mode(raw, "gamma", &detail::RawConfig::real, cfg.mode1.gamma, cfg.mode2.gamma);
    detail::per_mode(raw, "quanta", &detail::RawConfig::count, cfg.mode1.quanta, cfg.mode2.quanta);
    detail::per_mode(raw, "eta_power", &detail::RawConfig::flag, cfg.mode1.include_eta_power,
                     cfg.mode2.include_eta_power);
    for (int which : {1, 2}) {
        const auto& m = which == 1 ? cfg.mode1 : cfg.mode2;
        if (!(m.eta > 0.0)) raw.fail(detail::mode_key(raw, "eta", which), "eta must be positive");
        if (m.gamma < 0.0) raw.fail(detail::mode_key(raw, "gamma", which), "gamma must be non-negative");
        if (m.quanta < 1) raw.fail(detail::mode_key(raw, "quanta", which), "quanta must be at least 1");
    }
    cfg.unit_normalized = raw.flag("unit_normalized").value_or(false);

    const std::string profile = raw.text("profile").value_or("constant");
    if (profile == "constant") {
        cfg.profile = PulseProfile::constant(raw.real("t_start").value_or(0.0));
    } else if (profile == "sech") {
        const double tau = raw.real("tau").value_or(1.0);
        if (!(tau > 0.0)) raw.fail("tau", "sech width must be positive");
        cfg.profile = PulseProfile::sech(tau, raw.real("t_start").value_or(-10.0 * tau));
    } else {
        raw.fail("profile", "expected 'constant' or 'sech', got '" + profile + "'");
    }

    if (auto level = raw.text("ion"); level && (*level == "1" || *level == "2" || *level == "3")) {
        cfg.ion = ion_level(static_cast<Level>(std::stoi(*level)));
    } else if (level) {
        const auto re = raw.real_list("ion");
        if (re.size() != 3) raw.fail("ion", "expected a level 1|2|3 or three comma-separated amplitudes");
        for (int i = 0; i < 3; ++i) cfg.ion[i] = re[i];
    }
    if (raw.has("ion_im")) {
        const auto im = raw.real_list("ion_im");
        if (im.size() != 3) raw.fail("ion_im", "expected three comma-separated values");
        for (int i = 0; i < 3; ++i) cfg.ion[i] = {cfg.ion[i].real(), im[i]};
    }
    double ion_norm = 0.0;
    for (const auto& a : cfg.ion) ion_norm += std::norm(a);
    if (!(ion_norm > 0.0)) raw.fail(raw.has("ion_im") ? "ion_im" : "ion", "ion state has zero norm");

    const double tail_tol = raw.real("tail_tol").value_or(1e-10);
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) raw.fail("tail_tol", "must lie in (0, 1)");
    cfg.field1 = detail::parse_field(raw, 1, tail_tol);
    cfg.field2 = detail::parse_field(raw, 2, tail_tol);

    cfg.grid.start = raw.real("start").value_or(cfg.profile.t_start);
    cfg.grid.stop = raw.real("stop").value_or(cfg.grid.start + 50.0);
    cfg.grid.samples = raw.count("samples").value_or(2001);
    if (cfg.grid.samples < 2) raw.fail("samples", "need at least 2 samples");
    if (cfg.grid.start < cfg.profile.t_start) {
        raw.fail(raw.has("start") ? "start" : "t_start", "grid start precedes the pulse start");
    }
    if (!(cfg.grid.stop > cfg.grid.start)) raw.fail(raw.has("stop") ? "stop" : "start", "stop must exceed start");

    if (raw.has("cutoff1") != raw.has("cutoff2")) {
        raw.fail(raw.has("cutoff1") ? "cutoff1" : "cutoff2", "cutoff1 and cutoff2 must be given together");
    }
    if (raw.has("cutoff1")) cfg.cutoffs = Cutoffs{*raw.count("cutoff1"), *raw.count("cutoff2")};

    cfg.gamma_eps = raw.real("gamma_eps").value_or(1e-8);
    cfg.dead_eps = raw.real("dead_eps").value_or(1e-3);
    if (!(cfg.gamma_eps > 0.0)) raw.fail("gamma_eps", "must be positive");
    if (!(cfg.dead_eps > 0.0)) raw.fail("dead_eps", "must be positive");

    cfg.outputs.csv_path = raw.text("csv_path").value_or("");
    if (auto m = raw.text("measures")) {
        cfg.outputs.measures = {false, false};
        std::istringstream in(*m);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item == "linear") cfg.outputs.measures.linear = true;
            else if (item == "vn") cfg.outputs.measures.vn = true;
            else raw.fail("measures", "unknown measure '" + item + "' (expected linear, vn)");
        }
        if (!cfg.outputs.measures.linear && !cfg.outputs.measures.vn) raw.fail("measures", "empty list");
    }
    cfg.outputs.report = raw.flag("report").value_or(false);
    return cfg;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"};
    return names;
}

/// Config text of a built-in preset. Fock presets put the ion in the |2>
/// member of triplet T(n, n), i.e. mode 2 carries n + m2 quanta: |2, n, n'>
/// with n' < m2 has no |3> partner and only undergoes a two-level rotation.
inline std::string preset_text(std::string_view name) {
    const std::string common =
        "eta=0.202 amplitude=0.01 gamma=1 unit_normalized=true ion=2 samples=2001\n";
    const std::string constant = "profile=constant t_start=0 start=0 stop=50\n";
    const std::string sech = "profile=sech tau=1 t_start=-10 start=-10 stop=60\n";
    if (name == "fig2a") return common + constant + "quanta=1 n1=0 n2=1\n";
    if (name == "fig2b") return common + constant + "quanta=1 nbar1=0 nbar2=0\n";
    if (name == "fig3a") return common + sech + "quanta=1 n1=0 n2=1\n";
    if (name == "fig3b") return common + sech + "quanta=1 n1=15 n2=16\n";
    if (name == "fig4a") return common + sech + "quanta=1 nbar1=10 nbar2=10\n";
    if (name == "fig4b") return common + sech + "quanta=2 nbar1=10 nbar2=10\n";
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected fig2a, fig2b, fig3a, fig3b, fig4a, fig4b)");
}

struct RunResult {
    EntropySeries series;
    PlateauReport report;
};

inline RunResult run(const ScenarioConfig& cfg) {
    RunResult r;
    r.series = entropy_series(cfg.scenario());
    r.report = classify_tail(r.series, cfg.profile, cfg.gamma_eps, cfg.dead_eps);
    return r;
}

inline RunResult run_preset(std::string_view name) { return run(parse_config("", preset_text(name))); }

/// Key=value lines that reproduce `sc` when parsed (amplitudes are the
/// effective ones, so unit_normalized is not echoed).
inline std::string scenario_echo(const Scenario& sc) {
    using detail::format_double;
    std::ostringstream out;
    for (int which : {1, 2}) {
        const auto& m = which == 1 ? sc.mode1 : sc.mode2;
        const auto s = std::to_string(which);
        out << "eta" << s << '=' << format_double(m.eta) << " amplitude" << s << '='
            << format_double(m.amplitude) << " gamma" << s << '=' << format_double(m.gamma)
            << " quanta" << s << '=' << m.quanta << " eta_power" << s << '='
            << (m.include_eta_power ? "true" : "false") << '\n';
    }
    out << "profile=" << to_string(sc.profile.kind);
    if (sc.profile.kind == PulseProfile::Kind::Sech) out << " tau=" << format_double(sc.profile.tau);
    out << " t_start=" << format_double(sc.profile.t_start) << '\n';
    out << "ion=" << format_double(sc.ion[0].real()) << ',' << format_double(sc.ion[1].real()) << ','
        << format_double(sc.ion[2].real()) << " ion_im=" << format_double(sc.ion[0].imag()) << ','
        << format_double(sc.ion[1].imag()) << ',' << format_double(sc.ion[2].imag()) << '\n';
    for (int which : {1, 2}) {
        const auto& f = which == 1 ? sc.field1 : sc.field2;
        if (f.kind == FieldSpec::Kind::Fock) out << 'n' << which << '=' << f.n << ' ';
        else out << "nbar" << which << '=' << format_double(f.nbar) << ' ';
    }
    out << "tail_tol=" << format_double(sc.field1.tail_tol) << '\n';
    const Cutoffs c = scenario_cutoffs(sc);
    out << "cutoff1=" << c.c1 << " cutoff2=" << c.c2 << '\n';
    if (!sc.times.empty()) {
        out << "start=" << format_double(sc.times.front()) << " stop=" << format_double(sc.times.back())
            << " samples=" << sc.times.size() << '\n';
    }
    return out.str();
}

inline void write_csv(std::ostream& out, const EntropySeries& series, const PlateauReport& report,
                      Measures measures = {}) {
    using detail::format_double;
    out << 't';
    if (measures.linear) out << ",s_linear";
    if (measures.vn) out << ",s_vn";
    out << '\n';
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out << format_double(series.times[i]);
        if (measures.linear) out << ',' << format_double(series.s_linear[i]);
        if (measures.vn) out << ',' << format_double(series.s_vn[i]);
        out << '\n';
    }
    out << "# classification=" << to_string(report.classification) << '\n'
        << "# t_freeze=" << format_double(report.t_freeze) << '\n'
        << "# s_frozen=" << format_double(report.s_frozen) << '\n'
        << "# tail_variation=" << format_double(report.tail_variation) << '\n'
        << "# t_death=" << format_double(report.t_death) << '\n'
        << "# gamma_eps=" << format_double(report.gamma_eps) << '\n'
        << "# dead_eps=" << format_double(report.dead_eps) << '\n';
    std::istringstream echo(scenario_echo(series.params));
    std::string line;
    while (std::getline(echo, line)) out << "# param " << line << '\n';
}

inline void emit_csv(const EntropySeries& series, const PlateauReport& report,
                     const std::string& path, Measures measures = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, series, report, measures);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;  ///< without the leading "# "
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::istringstream fields(line);
        std::string cell;
        if (header) {
            while (std::getline(fields, cell, ',')) table.columns.push_back(cell);
            header = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(fields, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size()) {
            throw std::runtime_error("csv row has " + std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(table.columns.size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace ionlambda
