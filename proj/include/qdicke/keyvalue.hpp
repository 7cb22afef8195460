// keyvalue.hpp — flat `key = value` documents used for sweep specs and circuit descriptions

#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdicke::kv {

using Document = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Lines of `key = value` or `key: value`; `#` starts a comment. Keys are lower-cased.
inline Document parse(std::istream& in) {
    Document doc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        auto sep = t.find_first_of("=:");
        if (sep == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(t).substr(0, sep));
        std::string value = trim(std::string_view(t).substr(sep + 1));
        for (auto& c : key) c = char(std::tolower(static_cast<unsigned char>(c)));
        if (key.empty())
            throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
        if (doc.count(key))
            throw std::invalid_argument("line " + std::to_string(lineno) + ": duplicate key " + key);
        doc[key] = value;
    }
    return doc;
}

inline Document parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse(in);
}

/// Number, or `pi` / `k*pi` / `pi/k` for angles.
inline double to_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "pi") return std::numbers::pi;
    double x = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec == std::errc() && ptr == last) return x;
    if (ec == std::errc() && std::string_view(ptr, last) == "*pi") return x * std::numbers::pi;
    if (v.rfind("pi/", 0) == 0) return std::numbers::pi / to_double(key, v.substr(3));
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
}

inline int to_int(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    int x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument(key + ": not an integer: '" + value + "'");
    return x;
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& s : split_list(value)) out.push_back(to_double(key, s));
    return out;
}

inline std::vector<int> to_ints(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& s : split_list(value)) out.push_back(to_int(key, s));
    return out;
}

} // namespace qdicke::kv
