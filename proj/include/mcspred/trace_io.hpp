#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcspred/types.hpp"

namespace mcspred {

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view text, const std::string& what, std::size_t line_no) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" +
                         std::string(text) + "'");
    return value;
}

inline std::string chomp(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

}  // namespace detail

// Trace CSV: header "user_id,t,mcs", one row per feedback instant.
inline std::vector<Trace> load_traces(const std::string& path, const Alphabet& alphabet) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trace file: " + path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(path + ": empty trace file");
    ++line_no;
    if (detail::chomp(line) != "user_id,t,mcs")
        throw ParseError("line 1: expected header 'user_id,t,mcs', got '" + detail::chomp(line) + "'");

    std::map<std::string, std::vector<TraceSample>> by_user;
    while (std::getline(in, line)) {
        ++line_no;
        std::string row = detail::chomp(line);
        if (row.empty()) continue;
        auto fields = detail::split_csv(row);
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        const long long t = detail::parse_number<long long>(fields[1], "feedback index", line_no);
        const int mcs = detail::parse_number<int>(fields[2], "mcs", line_no);
        if (!alphabet.contains(mcs))
            throw DomainError("line " + std::to_string(line_no) + ": symbol " + std::to_string(mcs) +
                              " outside alphabet of size " + std::to_string(alphabet.size));
        by_user[std::string(fields[0])].push_back({t, mcs});
    }

    std::vector<Trace> traces;
    traces.reserve(by_user.size());
    for (auto& [user, samples] : by_user) {
        std::stable_sort(samples.begin(), samples.end(),
                         [](const TraceSample& a, const TraceSample& b) { return a.t < b.t; });
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (samples[i].t == samples[i - 1].t)
                throw DomainError("user " + user + ": duplicate feedback index " +
                                  std::to_string(samples[i].t));
        traces.push_back(Trace{user, std::move(samples), 5});
    }
    return traces;
}

inline void save_traces(const std::string& path, std::span<const Trace> traces) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "user_id,t,mcs\n";
    for (const Trace& tr : traces)
        for (const TraceSample& s : tr.samples)
            out << tr.user_id << ',' << s.t << ',' << s.x << '\n';
    if (!out) throw ParseError("write failed: " + path);
}

// Rate override CSV: header "mcs,rate"; must cover every index 0..p-1 exactly once.
inline RateTable load_rate_table(const std::string& path, int alphabet_size) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open rate table: " + path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(path + ": empty rate table");
    ++line_no;
    if (detail::chomp(line) != "mcs,rate")
        throw ParseError("line 1: expected header 'mcs,rate', got '" + detail::chomp(line) + "'");

    std::vector<double> rates(static_cast<std::size_t>(alphabet_size), -1.0);
    while (std::getline(in, line)) {
        ++line_no;
        std::string row = detail::chomp(line);
        if (row.empty()) continue;
        auto fields = detail::split_csv(row);
        if (fields.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields");
        const int mcs = detail::parse_number<int>(fields[0], "mcs", line_no);
        const double rate = detail::parse_number<double>(fields[1], "rate", line_no);
        if (mcs < 0 || mcs >= alphabet_size)
            throw DomainError("line " + std::to_string(line_no) + ": mcs " + std::to_string(mcs) +
                              " outside alphabet of size " + std::to_string(alphabet_size));
        if (rates[static_cast<std::size_t>(mcs)] >= 0.0)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate mcs " + std::to_string(mcs));
        rates[static_cast<std::size_t>(mcs)] = rate;
    }
    for (int i = 0; i < alphabet_size; ++i)
        if (rates[static_cast<std::size_t>(i)] < 0.0)
            throw ParseError(path + ": missing rate for mcs " + std::to_string(i));
    return RateTable(std::move(rates));
}

}  // namespace mcspred
