#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mflab/core/format.hpp"
#include "mflab/ensemble.hpp"

namespace mflab::io {

inline const char* const kSamplesHeader = "sample_index,seed,N,x_manybody,x_hartree,y";
inline const char* const kSummaryHeader = "N,mean_x_manybody,mean_x_hartree,mean_y,ci95_y,samples";

using mflab::format_double;

/// Rows ordered by sample_index, then N ascending.
inline std::string samples_csv(std::vector<SampleResult> results) {
    std::sort(results.begin(), results.end(),
              [](const SampleResult& a, const SampleResult& b) { return a.sample_index < b.sample_index; });
    std::ostringstream os;
    os << kSamplesHeader << '\n';
    for (const auto& r : results) {
        for (const auto& [n, x] : r.x_manybody) {
            os << r.sample_index << ',' << r.seed << ',' << n << ',' << format_double(x) << ','
               << format_double(r.x_hartree) << ',' << format_double(r.y.at(n)) << '\n';
        }
    }
    return os.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.mean_x_manybody) << ',' << format_double(r.mean_x_hartree) << ','
           << format_double(r.mean_y) << ',' << format_double(r.ci95_y) << ',' << r.samples << '\n';
    }
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

inline double parse_double_field(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("malformed number '" + s + "' in CSV");
    return v;
}

}  // namespace detail

/// Inverse of samples_csv.
inline std::vector<SampleResult> parse_samples_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kSamplesHeader) throw ConfigError("samples.csv: unexpected header");
    std::vector<SampleResult> results;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 6) throw ConfigError("samples.csv: expected 6 columns in '" + line + "'");
        const auto index = static_cast<std::size_t>(std::stoull(f[0]));
        if (results.empty() || results.back().sample_index != index) {
            SampleResult r;
            r.sample_index = index;
            r.seed = std::stoull(f[1]);
            r.x_hartree = detail::parse_double_field(f[4]);
            results.push_back(r);
        }
        const int n = std::stoi(f[2]);
        results.back().x_manybody[n] = detail::parse_double_field(f[3]);
        results.back().y[n] = detail::parse_double_field(f[5]);
    }
    return results;
}

/// Writes `contents` to `path` through a sibling temporary and a rename, so
/// a failed write never leaves a truncated file under the final name.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move " + tmp.string() + " to " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mflab::io
