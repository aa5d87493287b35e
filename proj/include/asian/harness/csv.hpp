#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "asian/errors.hpp"

namespace asian::harness {

enum class ErrorKind { max_rel_interval, rel_std_dev, abs_diff };

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::max_rel_interval: return "max-rel-interval";
    case ErrorKind::rel_std_dev: return "rel-std-dev";
    case ErrorKind::abs_diff: return "abs-diff";
    }
    return "?";
}

inline ErrorKind parse_error_kind(const std::string& s) {
    if (s == "max-rel-interval") return ErrorKind::max_rel_interval;
    if (s == "rel-std-dev") return ErrorKind::rel_std_dev;
    if (s == "abs-diff") return ErrorKind::abs_diff;
    throw ConfigError("unknown error kind '" + s + "'");
}

/// One (resolution, error, wall time) record.
struct StudyRow {
    std::string scenario;
    std::string solver;
    std::optional<std::size_t> ns, na, nt, paths, replicates;
    std::optional<std::uint64_t> seed;
    double value = 0.0;
    double error = 0.0;
    ErrorKind error_kind = ErrorKind::max_rel_interval;
    double wall_seconds = 0.0;

    bool operator==(const StudyRow&) const = default;
};

inline constexpr const char* csv_header =
    "scenario,solver,ns,na,nt,paths,replicates,seed,value,error,error_kind,wall_seconds";

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
std::string format_optional(const std::optional<T>& v) {
    return v ? std::to_string(*v) : std::string();
}

inline std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::optional<std::uint64_t> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw ConfigError("bad integer field '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("bad numeric field '" + s + "'");
    return v;
}

}  // namespace detail

inline std::string to_csv(const StudyRow& r) {
    using namespace detail;
    std::string out = quote(r.scenario) + "," + quote(r.solver);
    for (const auto& f : {format_optional(r.ns), format_optional(r.na), format_optional(r.nt), format_optional(r.paths),
                          format_optional(r.replicates), format_optional(r.seed)})
        out += "," + f;
    out += "," + format_double(r.value) + "," + format_double(r.error) + "," + to_string(r.error_kind) + "," +
           format_double(r.wall_seconds);
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
    os << csv_header << '\n';
    for (const auto& r : rows) os << to_csv(r) << '\n';
}

inline std::vector<StudyRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != csv_header) throw ConfigError("missing or unexpected CSV header");
    std::vector<StudyRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_record(line);
        if (f.size() != 12) throw ConfigError("CSV record has " + std::to_string(f.size()) + " fields");
        try {
            StudyRow r;
            r.scenario = f[0];
            r.solver = f[1];
            const auto opt = [](const std::string& s) -> std::optional<std::size_t> {
                const auto v = detail::parse_optional(s);
                return v ? std::optional<std::size_t>(static_cast<std::size_t>(*v)) : std::nullopt;
            };
            r.ns = opt(f[2]);
            r.na = opt(f[3]);
            r.nt = opt(f[4]);
            r.paths = opt(f[5]);
            r.replicates = opt(f[6]);
            r.seed = detail::parse_optional(f[7]);
            r.value = detail::parse_double(f[8]);
            r.error = detail::parse_double(f[9]);
            r.error_kind = parse_error_kind(f[10]);
            r.wall_seconds = detail::parse_double(f[11]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error& e) {
            throw ConfigError(std::string("bad CSV record: ") + e.what());
        }
    }
    return rows;
}

/// Appends rows to one file; the header is written when the file is new or empty.
class CsvAppender {
public:
    explicit CsvAppender(const std::filesystem::path& path) : path_(path) {
        const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
        out_.open(path, std::ios::app);
        if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
        if (fresh) out_ << csv_header << '\n';
    }

    void append(const StudyRow& row) {
        std::lock_guard lock(mu_);
        out_ << to_csv(row) << '\n';
        out_.flush();
    }

    void append(const std::vector<StudyRow>& rows) {
        for (const auto& r : rows) append(r);
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::mutex mu_;
};

}  // namespace asian::harness
