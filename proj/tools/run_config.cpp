#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pcs::cli {

static std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin)
{
    ConfigFile cf;
    cf.origin_ = origin;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos)
            s = trim(s.substr(0, hash));
        if (s.empty())
            continue;
        auto where = origin + ":" + std::to_string(line) + ": ";
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(where + "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError(where + "empty section name");
            cf.sections_[section];
            cf.section_lines_.emplace(section, line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected key = value");
        if (section.empty())
            throw ConfigError(where + "key outside any [section]");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty())
            throw ConfigError(where + "missing key");
        auto& sec = cf.sections_[section];
        if (sec.count(key))
            throw ConfigError(where + "duplicate key '" + key + "' in [" + section + "]");
        sec[key] = {trim(s.substr(eq + 1)), line};
    }
    return cf;
}

ConfigFile ConfigFile::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const
{
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key);
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const
{
    if (!has(section, key))
        throw ConfigError(origin_ + ": missing [" + section + "] " + key);
    return sections_.at(section).at(key).value;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& why) const
{
    const auto& e = sections_.at(section).at(key);
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": [" + section + "] " + key +
                      ": " + why);
}

static bool to_double(const std::string& s, double& out)
{
    std::istringstream in(s);
    in >> out;
    return in && (in >> std::ws).eof();
}

double ConfigFile::number(const std::string& section, const std::string& key,
                          double fallback) const
{
    if (!has(section, key))
        return fallback;
    double x;
    if (!to_double(get(section, key), x))
        fail(section, key, "not a number: '" + get(section, key) + "'");
    return x;
}

int ConfigFile::integer(const std::string& section, const std::string& key, int fallback) const
{
    if (!has(section, key))
        return fallback;
    const double x = number(section, key, fallback);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        fail(section, key, "not an integer: '" + get(section, key) + "'");
    return static_cast<int>(x);
}

bool ConfigFile::flag(const std::string& section, const std::string& key, bool fallback) const
{
    if (!has(section, key))
        return fallback;
    const auto v = get(section, key);
    if (v == "true" || v == "yes" || v == "on" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "off" || v == "0")
        return false;
    fail(section, key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> ConfigFile::words(const std::string& section, const std::string& key) const
{
    std::vector<std::string> out;
    if (!has(section, key))
        return out;
    std::string v = get(section, key);
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    for (std::string w; in >> w;)
        out.push_back(w);
    return out;
}

std::vector<double> ConfigFile::numbers(const std::string& section, const std::string& key) const
{
    std::vector<double> out;
    for (const auto& w : words(section, key)) {
        double x;
        if (!to_double(w, x))
            fail(section, key, "not a number: '" + w + "'");
        out.push_back(x);
    }
    return out;
}

void ConfigFile::check_keys(const std::map<std::string, std::vector<std::string>>& allowed) const
{
    for (const auto& [sec, entries] : sections_) {
        auto it = allowed.find(sec);
        if (it == allowed.end()) {
            throw ConfigError(origin_ + ":" + std::to_string(section_lines_.at(sec)) +
                              ": unknown section [" + sec +
                              "]");
        }
        for (const auto& [key, e] : entries)
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" +
                                  key + "' in [" + sec + "]");
    }
}

DeltaGrid parse_delta_range(const std::string& text)
{
    DeltaGrid g;
    std::vector<double> v;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ':')) {
        double x;
        if (!to_double(trim(part), x))
            throw ConfigError("delta range '" + text + "': '" + part + "' is not a number");
        v.push_back(x);
    }
    if (v.size() != 3)
        throw ConfigError("delta range must look like LO:HI:STEP, got '" + text + "'");
    g.lo = v[0];
    g.hi = v[1];
    g.step = v[2];
    if (!(g.step > 0.0 && g.hi >= g.lo))
        throw ConfigError("delta range needs LO <= HI and STEP > 0");
    return g;
}

std::string fmt(double x)
{
    if (!std::isfinite(x))
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

static std::vector<double> read_table(const std::string& path, std::vector<double>& weights)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot read coupling table '" + path + "'");
    std::vector<double> nodes;
    std::string line;
    int n = 0;
    while (std::getline(f, line)) {
        ++n;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream in(line);
        double g, w;
        if (!(in >> g >> w))
            throw ConfigError(path + ":" + std::to_string(n) + ": expected 'g weight'");
        nodes.push_back(g);
        weights.push_back(w);
    }
    return nodes;
}

RunConfig resolve(const ConfigFile& cf)
{
    cf.check_keys({
        {"system",
         {"g_f", "fixed_drive", "scan_drive", "atomic_decay", "fock_cutoff", "bloch_order",
          "adaptive_order", "truncation_tol", "max_order", "couplings"}},
        {"scan",
         {"lo", "hi", "step", "one_atom", "two_atom", "background_subtract", "p0", "p1", "p2",
          "prominence_fraction", "threads"}},
        {"distribution", {"kind", "g_max", "F", "resolution", "table"}},
        {"suppression", {"selectors"}},
    });
    RunConfig rc;
    auto& s = rc.scan;
    s.g_f = cf.number("system", "g_f", s.g_f);
    s.fixed_drive = cf.number("system", "fixed_drive", s.fixed_drive);
    s.scan_drive = cf.number("system", "scan_drive", s.scan_drive);
    s.atomic_decay = cf.number("system", "atomic_decay", s.atomic_decay);
    s.fock_cutoff = cf.integer("system", "fock_cutoff", s.fock_cutoff);
    s.bloch_order = cf.integer("system", "bloch_order", s.bloch_order);
    s.solver.adaptive_order = cf.flag("system", "adaptive_order", s.solver.adaptive_order);
    s.solver.truncation_tol = cf.number("system", "truncation_tol", s.solver.truncation_tol);
    s.solver.max_order = cf.integer("system", "max_order", s.solver.max_order);
    rc.couplings = cf.numbers("system", "couplings");

    s.grid.lo = cf.number("scan", "lo", s.grid.lo);
    s.grid.hi = cf.number("scan", "hi", s.grid.hi);
    s.grid.step = cf.number("scan", "step", s.grid.step);
    s.one_atom = cf.flag("scan", "one_atom", s.one_atom);
    s.two_atom = cf.flag("scan", "two_atom", s.two_atom);
    s.background_subtract = cf.flag("scan", "background_subtract", s.background_subtract);
    s.p0 = cf.number("scan", "p0", s.p0);
    s.p1 = cf.number("scan", "p1", s.p1);
    s.p2 = cf.number("scan", "p2", s.p2);
    s.prominence_fraction = cf.number("scan", "prominence_fraction", s.prominence_fraction);
    s.threads = cf.integer("scan", "threads", s.threads);

    rc.distribution_kind = cf.has("distribution", "kind") ? cf.get("distribution", "kind")
                                                          : rc.distribution_kind;
    rc.g_max = cf.number("distribution", "g_max", rc.g_max);
    rc.resolution = cf.integer("distribution", "resolution", rc.resolution);
    rc.table_path = cf.has("distribution", "table") ? cf.get("distribution", "table") : "";
    rc.selectors = cf.words("suppression", "selectors");

    try {
        const auto kind = parse_distribution_kind(rc.distribution_kind);
        // defaults per beam model
        rc.F = cf.number("distribution", "F", kind == DistributionKind::MaskedBeam ? 0.5 : 0.1);
        switch (kind) {
        case DistributionKind::Delta:
            s.distribution = delta_distribution(rc.g_max);
            break;
        case DistributionKind::CustomTable: {
            if (rc.table_path.empty())
                throw ConfigError("[distribution] custom-table needs 'table = PATH'");
            std::vector<double> w;
            auto nodes = read_table(rc.table_path, w);
            s.distribution = custom_distribution(std::move(nodes), std::move(w), rc.g_max, rc.F);
            break;
        }
        default:
            s.distribution = build_distribution(kind, rc.g_max, rc.F, rc.resolution);
        }
        s.selectors = parse_selectors(rc.selectors);
        s.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return rc;
}

std::string echo(const RunConfig& rc)
{
    const auto& s = rc.scan;
    std::ostringstream o;
    o << "[system]\n"
      << "g_f = " << fmt(s.g_f) << "\n"
      << "fixed_drive = " << fmt(s.fixed_drive) << "\n"
      << "scan_drive = " << fmt(s.scan_drive) << "\n"
      << "atomic_decay = " << fmt(s.atomic_decay) << "\n"
      << "fock_cutoff = " << s.fock_cutoff << "\n"
      << "bloch_order = " << s.bloch_order << "\n"
      << "adaptive_order = " << (s.solver.adaptive_order ? "true" : "false") << "\n"
      << "truncation_tol = " << fmt(s.solver.truncation_tol) << "\n"
      << "max_order = " << s.solver.max_order << "\n";
    if (!rc.couplings.empty()) {
        o << "couplings =";
        for (double g : rc.couplings)
            o << " " << fmt(g);
        o << "\n";
    }
    o << "\n[scan]\n";
    if (s.grid.points_override.empty())
        o << "lo = " << fmt(s.grid.lo) << "\nhi = " << fmt(s.grid.hi)
          << "\nstep = " << fmt(s.grid.step) << "\n";
    o << "one_atom = " << (s.one_atom ? "true" : "false") << "\n"
      << "two_atom = " << (s.two_atom ? "true" : "false") << "\n"
      << "background_subtract = " << (s.background_subtract ? "true" : "false") << "\n"
      << "p0 = " << fmt(s.p0) << "\np1 = " << fmt(s.p1) << "\np2 = " << fmt(s.p2) << "\n"
      << "prominence_fraction = " << fmt(s.prominence_fraction) << "\n"
      << "\n[distribution]\n"
      << "kind = " << rc.distribution_kind << "\n"
      << "g_max = " << fmt(rc.g_max) << "\n"
      << "F = " << fmt(rc.F) << "\n"
      << "resolution = " << rc.resolution << "\n";
    if (!rc.table_path.empty())
        o << "table = " << rc.table_path << "\n";
    o << "\n[suppression]\nselectors =";
    for (const auto& sel : rc.selectors)
        o << " " << sel;
    o << "\n";
    return o.str();
}

} // namespace pcs::cli
