#include "ffst/io.hpp"

#include "ffst/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ffst::io {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double out = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc()) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::comment(const std::string& line) { preamble_.push_back(line); }
void CsvWriter::footer_comment(const std::string& line) { footers_.push_back(line); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) {
        throw std::invalid_argument("csv row width does not match header");
    }
    rows_.push_back(cells);
}

static void append_joined(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

std::string CsvWriter::str() const {
    std::string out;
    for (const auto& c : preamble_) out += "# " + c + "\n";
    append_joined(out, header_);
    for (const auto& r : rows_) append_joined(out, r);
    for (const auto& c : footers_) out += "# " + c + "\n";
    return out;
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line);
            continue;
        }
        auto cells = split(line, ',');
        if (!have_header) {
            table.header = cells;
            have_header = true;
        } else {
            table.rows.push_back(cells);
        }
    }
    return table;
}

bool KvConfig::has(const std::string& section, const std::string& key) const {
    return find(section, key).has_value();
}

std::string KvConfig::get(const std::string& section, const std::string& key,
                          const std::string& fallback) const {
    auto v = find(section, key);
    return v ? *v : fallback;
}

std::optional<std::string> KvConfig::find(const std::string& section,
                                          const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

KvConfig parse_kv_config(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        cfg.sections[section][key] = value;
    }
    return cfg;
}

KvConfig load_config_file(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        KvConfig cfg;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("json config: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("json config: top level must be an object");
        for (auto& [sec, body] : j.items()) {
            if (!body.is_object()) throw ConfigError("json config: section '" + sec + "' must be an object");
            for (auto& [key, val] : body.items()) {
                std::string s;
                if (val.is_string()) {
                    s = val.get<std::string>();
                } else if (val.is_array()) {
                    for (std::size_t i = 0; i < val.size(); ++i) {
                        if (i) s += ',';
                        s += val[i].is_string() ? val[i].get<std::string>() : val[i].dump();
                    }
                } else {
                    s = val.dump();
                }
                cfg.sections[sec][key] = s;
            }
        }
        return cfg;
    }
    return parse_kv_config(text);
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t p = 0;
    while (p <= s.size()) {
        auto q = s.find(sep, p);
        if (q == std::string::npos) {
            out.push_back(s.substr(p));
            break;
        }
        out.push_back(s.substr(p, q - p));
        p = q + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_double(trim(tok)));
    return out;
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_double(xs[i]);
    }
    return out;
}

} // namespace ffst::io
