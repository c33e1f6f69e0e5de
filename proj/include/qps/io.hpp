#pragma once

// Readers for marginal sets (JSON, CSV) and per-context observation files.
//
// JSON:  {"n": 3, "pbar": {"1": "1/2", ...}, "pjoint": {"1,2": 0.45, ...}}
// CSV:   lines "unary,i,p" and "pair,i,j,p"; the literal header lines
//        "unary,i,p" and "pair,i,j,p" and '#' comments are skipped.
// Context CSV: header row of variable indices ("1" or "1,2"), then one
//        binary observation per row.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qps/error.hpp"
#include "qps/marginals.hpp"

namespace qps::io {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(qps::detail::trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline int parse_index(const std::string& s, const std::string& where) {
    try {
        const auto v = qps::detail::parse_integer(s, s);
        if (v < 1 || v > 64)
            throw ValidationError(where + ": variable index " + s + " out of range");
        return static_cast<int>(v);
    } catch (const InputError&) {
        throw ValidationError(where + ": bad variable index '" + s + "'");
    }
}

inline Probability json_probability(const nlohmann::json& v, const std::string& key) {
    if (v.is_number())
        return {v.get<double>(), v.dump()};
    if (v.is_string())
        return parse_probability(v.get<std::string>());
    throw ValidationError(key + " must be a number or a string");
}

inline std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        out.push_back(line);
    }
    return out;
}

} // namespace detail

inline MarginalSet parse_marginals_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_object())
        throw ValidationError("top-level JSON value must be an object");
    if (!doc.contains("n") || !doc["n"].is_number_integer())
        throw ValidationError("missing integer key 'n'");
    for (const char* key : {"pbar", "pjoint"})
        if (!doc.contains(key) || !doc[key].is_object())
            throw ValidationError(std::string("missing object key '") + key + "'");

    MarginalSet set;
    set.n = doc["n"].get<int>();
    for (const auto& [k, v] : doc["pbar"].items()) {
        const int i = detail::parse_index(k, "pbar");
        if (set.pbar.contains(i))
            throw ValidationError("duplicate " + unary_key(i));
        set.pbar[i] = detail::json_probability(v, unary_key(i));
    }
    for (const auto& [k, v] : doc["pjoint"].items()) {
        const auto parts = detail::split(k, ',');
        if (parts.size() != 2)
            throw ValidationError("pjoint key '" + k + "' must look like \"i,j\"");
        int i = detail::parse_index(parts[0], "pjoint");
        int j = detail::parse_index(parts[1], "pjoint");
        if (i > j)
            std::swap(i, j);
        if (set.pjoint.contains({i, j}))
            throw ValidationError("duplicate " + pair_key(i, j));
        set.pjoint[{i, j}] = detail::json_probability(v, pair_key(i, j));
    }
    return set;
}

inline MarginalSet parse_marginals_csv(std::string_view text) {
    MarginalSet set;
    int line_no = 0;
    for (const auto& raw : detail::lines_of(text)) {
        ++line_no;
        const auto line = qps::detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto f = detail::split(line, ',');
        const std::string where = "line " + std::to_string(line_no);
        if (f[0] == "unary") {
            if (f.size() != 3)
                throw InputError(where + ": expected unary,i,p");
            if (f[1] == "i")
                continue;
            const int i = detail::parse_index(f[1], where);
            if (set.pbar.contains(i))
                throw ValidationError(where + ": duplicate " + unary_key(i));
            set.pbar[i] = parse_probability(f[2]);
            set.n = std::max(set.n, i);
        } else if (f[0] == "pair") {
            if (f.size() != 4)
                throw InputError(where + ": expected pair,i,j,p");
            if (f[1] == "i")
                continue;
            int i = detail::parse_index(f[1], where);
            int j = detail::parse_index(f[2], where);
            if (i > j)
                std::swap(i, j);
            if (set.pjoint.contains({i, j}))
                throw ValidationError(where + ": duplicate " + pair_key(i, j));
            set.pjoint[{i, j}] = parse_probability(f[3]);
            set.n = std::max(set.n, j);
        } else {
            throw InputError(where + ": record type must be 'unary' or 'pair'");
        }
    }
    return set;
}

inline ContextSample parse_context_csv(std::string_view text, const std::string& name = "context") {
    ContextSample s;
    bool header = true;
    int line_no = 0;
    for (const auto& raw : detail::lines_of(text)) {
        ++line_no;
        const auto line = qps::detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto f = detail::split(line, ',');
        const std::string where = name + " line " + std::to_string(line_no);
        if (header) {
            if (f.empty() || f.size() > 2)
                throw ValidationError(where + ": a context covers one or two variables");
            for (const auto& v : f)
                s.variables.push_back(detail::parse_index(v, where));
            header = false;
            continue;
        }
        if (f.size() != s.variables.size())
            throw ValidationError(where + ": observation arity does not match the header");
        std::vector<std::uint8_t> obs;
        for (const auto& v : f) {
            if (v != "0" && v != "1")
                throw ValidationError(where + ": observations must be 0 or 1");
            obs.push_back(static_cast<std::uint8_t>(v[0] - '0'));
        }
        s.observations.push_back(std::move(obs));
    }
    if (header)
        throw ValidationError(name + ": missing header row");
    return s;
}

/// Each path is a context CSV or a directory whose *.csv files are read in
/// name order.
inline std::vector<ContextSample> load_contexts(const std::vector<std::string>& paths) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    found.push_back(e.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.emplace_back(p);
        }
    }
    std::vector<ContextSample> out;
    for (const auto& f : files)
        out.push_back(parse_context_csv(read_file(f), f.filename().string()));
    return out;
}

} // namespace qps::io
