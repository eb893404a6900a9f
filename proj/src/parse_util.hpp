#pragma once

#include "lifshitz/errors.hpp"

#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace lifshitz::detail {

// Shared parser for the canonical text forms name(key=value,key=[v,v,...]).
struct ParsedCall {
    std::string name;
    std::map<std::string, std::string> args;

    bool has(const std::string& key) const { return args.count(key) > 0; }

    double num(const std::string& key) const {
        auto it = args.find(key);
        if (it == args.end()) throw UsageError(name + ": missing argument '" + key + "'");
        try {
            std::size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw UsageError(name + ": bad number for '" + key + "': " + it->second);
        }
    }

    double num_or(const std::string& key, double fallback) const {
        return has(key) ? num(key) : fallback;
    }

    std::vector<double> list(const std::string& key) const {
        auto it = args.find(key);
        if (it == args.end()) throw UsageError(name + ": missing argument '" + key + "'");
        const std::string& s = it->second;
        if (s.size() < 2 || s.front() != '[' || s.back() != ']')
            throw UsageError(name + ": '" + key + "' must be a [..] list");
        std::vector<double> out;
        std::string item;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == ',') {
                out.push_back(std::stod(item));
                item.clear();
            } else {
                item += s[i];
            }
        }
        if (!item.empty()) out.push_back(std::stod(item));
        if (out.empty()) throw UsageError(name + ": empty list for '" + key + "'");
        return out;
    }
};

inline ParsedCall parse_call(const std::string& text) {
    ParsedCall out;
    std::size_t open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw UsageError("expected name(...) form: " + text);
    out.name = text.substr(0, open);
    std::string body = text.substr(open + 1, text.size() - open - 2);
    // split on commas outside brackets
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char ch : body) {
        if (ch == '[' || ch == '(') ++depth;
        if (ch == ']' || ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    for (const std::string& p : parts) {
        std::size_t eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value in: " + p);
        out.args[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace lifshitz::detail
