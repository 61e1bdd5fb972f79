#pragma once

#include "pcs/spectroscopy.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcs::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat "key = value" text with [section] headers; '#' and ';' start comments.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    int integer(const std::string& section, const std::string& key, int fallback) const;
    bool flag(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key) const;
    std::vector<std::string> words(const std::string& section, const std::string& key) const;

    // rejects keys outside the allowed set, naming the offending line
    void check_keys(const std::map<std::string, std::vector<std::string>>& allowed) const;

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& why) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_; // first header line
};

struct RunConfig {
    ScanConfig scan;
    std::vector<double> couplings; // [system] couplings, used by eig
    std::string distribution_kind = "uniform-beam";
    double g_max = 63.0;
    double F = 0.1;
    int resolution = 24;
    std::string table_path;        // custom-table source
    std::vector<std::string> selectors;
};

RunConfig resolve(const ConfigFile& file);
// INI text that resolve() maps back to the same RunConfig
std::string echo(const RunConfig& rc);

// "LO:HI:STEP"
DeltaGrid parse_delta_range(const std::string& text);

// 12 significant digits, scientific; "nan" for gaps
std::string fmt(double x);

} // namespace pcs::cli
