#include "gbpd/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "gbpd/error.hpp"
#include "gbpd/io.hpp"

namespace gbpd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
    Config cfg;
    cfg.source_ = source;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        const std::string t = trim(cut == std::string::npos ? line : line.substr(0, cut));
        if (t.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (t.front() == '[') {
            if (t.back() != ']') fail(ErrorCode::Parse, where + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) fail(ErrorCode::Parse, where + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(ErrorCode::Parse, where + ": expected 'key = value'");
        if (section.empty()) fail(ErrorCode::Parse, where + ": key outside of any [section]");
        Entry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno};
        if (e.key.empty()) fail(ErrorCode::Parse, where + ": empty key");
        cfg.sections_[section].push_back(std::move(e));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config " + path);
    return parse(in, path);
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) != 0; }

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key).has_value(); }

std::vector<Config::Entry> Config::all(const std::string& section, const std::string& key) const {
    std::vector<Entry> out;
    const auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    for (const auto& e : it->second)
        if (e.key == key) out.push_back(e);
    return out;
}

std::optional<Config::Entry> Config::find(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    std::optional<Entry> last;
    for (const auto& e : it->second)
        if (e.key == key) last = e;
    return last;
}

Config::Entry Config::require(const std::string& section, const std::string& key) const {
    auto e = find(section, key);
    if (!e) fail(ErrorCode::Parse, source_ + ": missing key '" + key + "' in section [" + section + "]");
    return *e;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    auto e = find(section, key);
    return e ? e->value : fallback;
}

double Config::get_real(const std::string& section, const std::string& key) const {
    const Entry e = require(section, key);
    return parse_real(e.value, where(e) + " [" + section + "] " + key);
}

double Config::get_real(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_real(section, key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
    const Entry e = require(section, key);
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || e.value.empty())
        fail(ErrorCode::Parse, where(e) + " [" + section + "] " + key + ": expected a non-negative integer, got '" +
                                   e.value + "'");
    return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
    return has(section, key) ? get_u64(section, key) : fallback;
}

std::vector<std::string> Config::get_words(const std::string& section, const std::string& key) const {
    std::istringstream ss(require(section, key).value);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<double> Config::get_reals(const std::string& section, const std::string& key) const {
    const Entry e = require(section, key);
    std::vector<double> out;
    for (const auto& w : get_words(section, key)) out.push_back(parse_real(w, where(e) + " [" + section + "] " + key));
    return out;
}

}  // namespace gbpd
