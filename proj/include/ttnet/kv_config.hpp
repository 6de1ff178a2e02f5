#pragma once

#include <ttnet/error.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ttnet {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

inline double parse_double(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValueError(std::string(what) + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

inline std::size_t parse_size(std::string_view s, std::string_view what) {
    s = trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValueError(std::string(what) + ": '" + std::string(s) + "' is not a non-negative integer");
    }
    return v;
}

// "a,b,c" -> sizes
inline std::vector<std::size_t> parse_size_list(std::string_view s, std::string_view what) {
    std::vector<std::size_t> out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_size(tok, what));
    return out;
}

inline std::vector<double> parse_double_list(std::string_view s, std::string_view what) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok, what));
    return out;
}

// Line-oriented "key = value" files. '#' starts a comment, keys may repeat (order kept).
class KeyValueConfig {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };

    static KeyValueConfig parse(std::string_view text, std::string source = "<config>") {
        KeyValueConfig cfg;
        cfg.source_ = std::move(source);
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto end = text.find('\n', start);
            std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (!line.empty()) {
                const auto eq = line.find('=');
                if (eq == std::string_view::npos) throw ValueError(cfg.where(line_no) + "expected 'key = value'");
                const std::string key(trim(line.substr(0, eq)));
                if (key.empty()) throw ValueError(cfg.where(line_no) + "empty key");
                cfg.entries_.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
            }
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw FormatError("cannot open config '" + path + "'");
        std::stringstream ss;
        ss << is.rdbuf();
        return parse(ss.str(), path);
    }

    const std::string& source() const { return source_; }
    const std::vector<Entry>& entries() const { return entries_; }

    bool has(std::string_view key) const { return find(key) != nullptr; }

    std::string get(std::string_view key) const {
        const Entry* e = find(key);
        if (!e) throw ValueError(source_ + ": missing key '" + std::string(key) + "'");
        return e->value;
    }
    std::string get(std::string_view key, std::string_view fallback) const {
        const Entry* e = find(key);
        return e ? e->value : std::string(fallback);
    }
    double number(std::string_view key) const { return parse_double(get(key), context(key)); }
    double number(std::string_view key, double fallback) const { return has(key) ? number(key) : fallback; }
    std::size_t size(std::string_view key) const { return parse_size(get(key), context(key)); }
    std::size_t size(std::string_view key, std::size_t fallback) const { return has(key) ? size(key) : fallback; }
    std::vector<std::size_t> sizes(std::string_view key) const { return parse_size_list(get(key), context(key)); }
    std::vector<double> numbers(std::string_view key) const { return parse_double_list(get(key), context(key)); }

    std::vector<Entry> all(std::string_view key) const {
        std::vector<Entry> out;
        for (const auto& e : entries_) {
            if (e.key == key) out.push_back(e);
        }
        return out;
    }

    // Throws on the first key outside `known`; catches typos in hand-written files.
    void require_known(std::span<const std::string> known) const {
        const std::set<std::string_view> allowed(known.begin(), known.end());
        for (const auto& e : entries_) {
            if (!allowed.contains(e.key)) throw ValueError(where(e.line) + "unknown key '" + e.key + "'");
        }
    }

    std::string where(std::size_t line) const { return source_ + ":" + std::to_string(line) + ": "; }

private:
    const Entry* find(std::string_view key) const {
        // the last occurrence wins for scalar lookups
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
            if (it->key == key) return &*it;
        }
        return nullptr;
    }
    std::string context(std::string_view key) const {
        const Entry* e = find(key);
        return e ? where(e->line) + std::string(key) : source_ + ": " + std::string(key);
    }

    std::string source_;
    std::vector<Entry> entries_;
};

} // namespace ttnet
