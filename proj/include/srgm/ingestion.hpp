#pragma once

// Bug-tracker CSV exports -> validated, fixed bugs -> cumulative counts per
// interval.
//
// Expected header (any order, any case):
//   ID, Summary, Status, Opened, Assignee, Submitter, Resolution, Priority

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srgm/csv.hpp"
#include "srgm/dataset.hpp"
#include "srgm/error.hpp"

namespace srgm {

using Date = std::chrono::year_month_day;

struct BugRecord {
    std::string id;
    std::string summary;
    std::string status;
    Date opened;
    std::string assignee;
    std::string submitter;
    std::string resolution;
    int priority = 0;

    friend bool operator==(const BugRecord&, const BugRecord&) = default;
};

struct RejectedRow {
    long line = 0;
    std::string id;
    std::string reason;
};

struct ParseResult {
    std::vector<BugRecord> records;
    std::vector<RejectedRow> rejects;
};

enum class Interval { Day, Week, Month };

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    if (s.empty()) return std::nullopt;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline constexpr std::array<std::string_view, 8> kColumns = {
    "id", "summary", "status", "opened", "assignee", "submitter", "resolution", "priority"};

}  // namespace detail

/// Parses M/D/YYYY or YYYY-MM-DD. Returns nullopt for anything that is not a
/// real calendar date.
inline std::optional<Date> parse_date(std::string_view text) {
    using namespace std::chrono;
    const std::string s = detail::trim(text);
    std::optional<int> y, m, d;
    if (auto parts = detail::split(s, '/'); parts.size() == 3) {
        m = detail::parse_int(parts[0]);
        d = detail::parse_int(parts[1]);
        if (parts[2].size() == 4) y = detail::parse_int(parts[2]);
    } else if (auto iso = detail::split(s, '-'); iso.size() == 3 && iso[0].size() == 4) {
        y = detail::parse_int(iso[0]);
        m = detail::parse_int(iso[1]);
        d = detail::parse_int(iso[2]);
    }
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
    const Date date{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

inline std::string format_date(const Date& d) {
    return std::to_string(static_cast<unsigned>(d.month())) + "/" +
           std::to_string(static_cast<unsigned>(d.day())) + "/" +
           std::to_string(static_cast<int>(d.year()));
}

/// Reads a bug-tracker export. Rows that cannot be turned into a BugRecord are
/// listed in `rejects` with their line number and reason.
inline ParseResult parse_csv(std::istream& in, const std::string& source = "<input>") {
    const auto rows = csv::read(in, source);
    if (rows.empty()) throw DataError("empty file", source);

    const auto& header = rows.front();
    std::array<int, 8> col{};
    col.fill(-1);
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        const auto name = detail::lower(detail::trim(header.fields[i]));
        for (std::size_t c = 0; c < detail::kColumns.size(); ++c)
            if (name == detail::kColumns[c] && col[c] < 0) col[c] = static_cast<int>(i);
    }
    for (std::size_t c = 0; c < col.size(); ++c)
        if (col[c] < 0)
            throw DataError("missing header column '" + std::string(detail::kColumns[c]) + "'",
                            source + ":" + std::to_string(header.line));

    ParseResult out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto field = [&](int c) -> std::string {
            const auto idx = static_cast<std::size_t>(col[c]);
            return idx < row.fields.size() ? detail::trim(row.fields[idx]) : std::string{};
        };
        const std::string id = field(0);
        auto reject = [&](std::string reason) { out.rejects.push_back({row.line, id, std::move(reason)}); };
        if (row.fields.size() != header.fields.size()) {
            reject("field count " + std::to_string(row.fields.size()) + ", expected " +
                   std::to_string(header.fields.size()));
            continue;
        }
        if (id.empty()) {
            reject("empty id");
            continue;
        }
        const auto opened = parse_date(field(3));
        if (!opened) {
            reject("bad date");
            continue;
        }
        const auto priority = detail::parse_int(field(7));
        if (!priority) {
            reject("bad priority");
            continue;
        }
        out.records.push_back(
            {id, field(1), field(2), *opened, field(4), field(5), field(6), *priority});
    }
    return out;
}

/// Writes records in the same schema parse_csv reads.
inline std::string to_csv(const std::vector<BugRecord>& records) {
    std::string out = "ID,Summary,Status,Opened,Assignee,Submitter,Resolution,Priority\n";
    for (const auto& r : records)
        out += csv::join({r.id, r.summary, r.status, format_date(r.opened), r.assignee,
                          r.submitter, r.resolution, std::to_string(r.priority)}) +
               "\n";
    return out;
}

inline std::string to_csv(const std::vector<RejectedRow>& rejects) {
    std::string out = "line,id,reason\n";
    for (const auto& r : rejects)
        out += csv::join({std::to_string(r.line), r.id, r.reason}) + "\n";
    return out;
}

/// Keeps closed bugs resolved as fixed (case-insensitive, trimmed), in order.
inline std::vector<BugRecord> filter_valid(const std::vector<BugRecord>& records) {
    std::vector<BugRecord> out;
    for (const auto& r : records)
        if (detail::lower(detail::trim(r.status)) == "closed" &&
            detail::lower(detail::trim(r.resolution)) == "fixed")
            out.push_back(r);
    return out;
}

inline std::string to_string(Interval i) {
    switch (i) {
        case Interval::Day: return "day";
        case Interval::Week: return "week";
        case Interval::Month: return "month";
    }
    return "?";
}

inline Interval parse_interval(std::string_view s) {
    if (s == "day") return Interval::Day;
    if (s == "week") return Interval::Week;
    if (s == "month") return Interval::Month;
    throw std::invalid_argument("unknown interval '" + std::string(s) + "'");
}

/// Cumulative bug counts per interval, counted from the earliest opened date.
/// Interval k (reported at time k) covers days [(k-1)L, kL) for days and weeks
/// and the k-th calendar month for months.
inline FailureDataset bucket(const std::vector<BugRecord>& records, Interval interval) {
    using namespace std::chrono;
    if (records.empty()) throw DataError("no records to bucket");
    Date origin = records.front().opened;
    for (const auto& r : records) origin = std::min(origin, r.opened);

    auto index_of = [&](const Date& d) -> long {
        switch (interval) {
            case Interval::Day: return (sys_days{d} - sys_days{origin}).count();
            case Interval::Week: return (sys_days{d} - sys_days{origin}).count() / 7;
            case Interval::Month:
                return (static_cast<int>(d.year()) - static_cast<int>(origin.year())) * 12L +
                       static_cast<long>(static_cast<unsigned>(d.month())) -
                       static_cast<long>(static_cast<unsigned>(origin.month()));
        }
        return 0;
    };

    long last = 0;
    std::vector<long> idx;
    idx.reserve(records.size());
    for (const auto& r : records) last = std::max(last, idx.emplace_back(index_of(r.opened)));
    std::vector<long> counts(static_cast<std::size_t>(last + 1), 0);
    for (long i : idx) ++counts[static_cast<std::size_t>(i)];

    FailureDataset ds;
    ds.interval = to_string(interval);
    long running = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        running += counts[k];
        ds.times.push_back(static_cast<double>(k + 1));
        ds.cumulative.push_back(running);
    }
    return ds;
}

}  // namespace srgm
