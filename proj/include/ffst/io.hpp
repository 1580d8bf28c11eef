// io.hpp — number formatting, CSV, key=value config files, atomic writes

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ffst::io {

// Shortest representation that round-trips exactly through a double parse
// (std::to_chars), so rerunning a seeded experiment reproduces files byte
// for byte and golden-file comparisons can be exact.
std::string format_double(double x);

double parse_double(const std::string& s);

// --- CSV ----------------------------------------------------------------------

// Comma-separated, '\n' line ends, a '#'-comment preamble allowed, then one
// header row, then data rows.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void comment(const std::string& line);           // before rows only
    void row(const std::vector<std::string>& cells); // must match header width
    void footer_comment(const std::string& line);    // after rows

    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::string> preamble_;
    std::vector<std::string> footers_;
    std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;

    int column(const std::string& name) const; // -1 when absent
};

CsvTable read_csv(const std::string& text);

// --- key=value config -----------------------------------------------------------

// Sections introduced by [name]; keys before any section live in section "".
// '#' starts a comment. Parse errors carry the 1-based line number.
struct KvConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::optional<std::string> find(const std::string& section, const std::string& key) const;
};

KvConfig parse_kv_config(const std::string& text);
KvConfig load_config_file(const std::string& path); // .json files accepted too

// --- files ----------------------------------------------------------------------

// Whole-file atomic write: temp file in the same directory, then rename.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);
std::vector<double> parse_double_list(const std::string& s);
std::string join_doubles(const std::vector<double>& xs);

} // namespace ffst::io
