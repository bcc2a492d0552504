#pragma once

// Plain-text configuration: "[section]" headers and "key = value" lines.
// '#' and ';' start comments. Keys may repeat (e.g. one "generator" line per
// explicit generator). See docs/config.md for the recognized keys.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gbpd {

class Config {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };

    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config load(const std::string& path);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    // Every entry of `key` in order of appearance.
    std::vector<Entry> all(const std::string& section, const std::string& key) const;

    // Typed accessors; missing keys and malformed values throw Parse with
    // "source:line" diagnostics.
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& section, const std::string& key) const;
    double get_real(const std::string& section, const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_reals(const std::string& section, const std::string& key) const;
    // Whitespace-separated tokens.
    std::vector<std::string> get_words(const std::string& section, const std::string& key) const;

    std::string where(const Entry& e) const { return source_ + ":" + std::to_string(e.line); }
    const std::string& source() const { return source_; }

private:
    std::optional<Entry> find(const std::string& section, const std::string& key) const;
    Entry require(const std::string& section, const std::string& key) const;

    std::string source_;
    std::map<std::string, std::vector<Entry>> sections_;
};

}  // namespace gbpd
