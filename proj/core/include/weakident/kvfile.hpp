#pragma once

#include <string>
#include <utility>
#include <vector>

namespace weakident {

/// "key = value" text files, shared by WIDENT1 headers and run configs.
/// '#' starts a comment; blank lines are ignored; keys keep file order.
class KvFile {
public:
    static KvFile parse_string(const std::string& text, const std::string& origin = "<string>");
    static KvFile parse_file(const std::string& path);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const; // throws InputError("format")
    std::string get_or(const std::string& key, const std::string& fallback) const;
    long get_int(const std::string& key) const;
    double get_double(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    std::string serialize() const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::string origin_;
};

/// Shortest text that round-trips the double, capped at 17 significant digits.
std::string format_double(double v);

} // namespace weakident
