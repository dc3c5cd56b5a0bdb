#ifndef BIM2BRICK_OCCUPANTS_HPP
#define BIM2BRICK_OCCUPANTS_HPP

// Occupant survey ingest: RFC-4180 CSV with positioned samples per subject,
// RFC 3339 timestamps, completeness filtering and as-of sample selection.

#include <bim2brick/diagnostics.hpp>
#include <bim2brick/geo_transform.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bim2brick::occ {

class CsvError : public Error {
public:
    using Error::Error;
};

// ---- RFC 3339 timestamps ----------------------------------------------------

// days since 1970-01-01 for a proleptic-Gregorian civil date
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

inline bool is_leap_year(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned k[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return m >= 1 && m <= 12 ? k[m - 1] : 0;
}

// Parses an RFC 3339 date-time into milliseconds since the Unix epoch (UTC).
// Accepts 'T'/'t'/' ' separators, fractional seconds, 'Z' or +-HH:MM offsets.
inline std::optional<std::int64_t> parse_rfc3339_ms(std::string_view s) {
    auto digits = [&](std::size_t pos, std::size_t count, long& out) {
        if (pos + count > s.size()) return false;
        out = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const char c = s[pos + i];
            if (c < '0' || c > '9') return false;
            out = out * 10 + (c - '0');
        }
        return true;
    };
    long year, month, day, hour, minute, second;
    if (!digits(0, 4, year) || s.size() < 19) return std::nullopt;
    if (s[4] != '-' || !digits(5, 2, month) || s[7] != '-' || !digits(8, 2, day)) return std::nullopt;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    if (!digits(11, 2, hour) || s[13] != ':' || !digits(14, 2, minute) || s[16] != ':' ||
        !digits(17, 2, second))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 ||
        day > static_cast<long>(days_in_month(year, static_cast<unsigned>(month))))
        return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;  // 60 = leap second

    std::size_t pos = 19;
    std::int64_t frac_ms = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        std::int64_t scale = 100;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (scale > 0) {
                frac_ms += (s[pos] - '0') * scale;
                scale /= 10;
            }
            ++pos;
        }
        if (pos == start) return std::nullopt;  // dot without digits
    }
    std::int64_t offset_s = 0;
    if (pos >= s.size()) return std::nullopt;  // offset is mandatory
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        long oh, om;
        if (!digits(pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !digits(pos + 4, 2, om))
            return std::nullopt;
        if (oh > 23 || om > 59) return std::nullopt;
        offset_s = sign * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    const std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_s;
    return secs * 1000 + frac_ms;
}

inline std::string format_rfc3339_utc(std::int64_t ms) {
    std::int64_t secs = ms / 1000;
    std::int64_t frac = ms % 1000;
    if (frac < 0) {
        frac += 1000;
        secs -= 1;
    }
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[40];
    if (frac)
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                      static_cast<long long>(y), mo, d, static_cast<long long>(rem / 3600),
                      static_cast<long long>(rem / 60 % 60), static_cast<long long>(rem % 60),
                      static_cast<long long>(frac));
    else
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                      static_cast<long long>(y), mo, d, static_cast<long long>(rem / 3600),
                      static_cast<long long>(rem / 60 % 60), static_cast<long long>(rem % 60));
    return buf;
}

// ---- CSV --------------------------------------------------------------------

// RFC 4180 parse: quoted fields, doubled-quote escapes, CRLF or LF rows,
// newlines allowed inside quoted fields. Returns rows of raw fields.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    // strip a UTF-8 BOM
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        text.remove_prefix(3);

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        // an entirely empty line is not a record
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started && field.empty()) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_row();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (field_started || !field.empty() || !row.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_row();
    }
    return rows;
}

// ---- Occupant records -------------------------------------------------------

struct OccupantSample {
    std::int64_t timestamp_ms = 0;
    std::string timestamp_text;
    geo::GeoSample position;
    std::optional<geo::LocalPoint> local;  // filled by localize_all
};

struct OccupantRecord {
    std::string subject_id;
    std::optional<int> age;
    std::optional<std::string> gender;
    std::vector<OccupantSample> samples;  // sorted by timestamp, stable
};

struct OccupantSet {
    std::vector<OccupantRecord> occupants;  // ordered by first appearance

    const OccupantRecord* by_subject(const std::string& id) const {
        for (const auto& o : occupants)
            if (o.subject_id == id) return &o;
        return nullptr;
    }
};

struct IngestResult {
    OccupantSet set;
    Diagnostics diagnostics;
    std::size_t rows_read = 0;
    std::size_t rows_rejected = 0;
};

namespace detail {

inline std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

inline std::optional<double> parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (!end || *end != '\0' || end == s.c_str()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (!end || *end != '\0' || end == s.c_str()) return std::nullopt;
    if (v < 0 || v > 150) return std::nullopt;  // plausibility bound for an age
    return static_cast<int>(v);
}

}  // namespace detail

// Ingests the occupant CSV. The header row is mandatory and must name the
// columns subject_id, age, gender, timestamp, latitude, longitude, altitude
// (any order; extra columns ignored). Malformed rows are skipped with a
// diagnostic; a missing required column raises CsvError.
inline IngestResult ingest_occupants(std::string_view csv_text) {
    IngestResult result;
    const auto rows = parse_csv(csv_text);
    if (rows.empty()) throw CsvError("occupant CSV is empty (header row required)");

    static constexpr const char* kRequired[] = {"subject_id", "age",       "gender",  "timestamp",
                                                "latitude",   "longitude", "altitude"};
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
        std::string name = detail::trim(rows[0][i]);
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        col.emplace(name, i);  // first occurrence wins
    }
    for (const char* need : kRequired)
        if (!col.count(need)) throw CsvError(std::string("occupant CSV is missing column '") + need + "'");

    auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::string {
        const std::size_t i = col.at(name);
        return i < row.size() ? row[i] : std::string();
    };

    std::map<std::string, std::size_t> index;  // subject_id -> position
    for (std::size_t r = 1; r < rows.size(); ++r) {
        ++result.rows_read;
        const auto& row = rows[r];
        const std::string line_tag = "row " + std::to_string(r + 1);

        const std::string subject = detail::trim(cell(row, "subject_id"));
        if (subject.empty()) {
            add_diag(result.diagnostics, "missing-subject", Severity::Warning, "",
                     line_tag + ": empty subject_id; row skipped");
            ++result.rows_rejected;
            continue;
        }

        auto [it, inserted] = index.emplace(subject, result.set.occupants.size());
        if (inserted) {
            OccupantRecord rec;
            rec.subject_id = subject;
            result.set.occupants.push_back(std::move(rec));
        }
        OccupantRecord& rec = result.set.occupants[it->second];

        // demographics: first non-empty value wins, conflicts are reported
        const std::string age_raw = detail::trim(cell(row, "age"));
        if (!age_raw.empty()) {
            if (auto age = detail::parse_int(age_raw)) {
                if (!rec.age) rec.age = *age;
                else if (*rec.age != *age)
                    add_diag(result.diagnostics, "conflicting-age", Severity::Notice, subject,
                             line_tag + ": age " + age_raw + " conflicts with earlier value; first wins");
            } else {
                add_diag(result.diagnostics, "bad-age", Severity::Warning, subject,
                         line_tag + ": unparseable age '" + age_raw + "'");
            }
        }
        const std::string gender_raw = detail::trim(cell(row, "gender"));
        if (!gender_raw.empty()) {
            if (!rec.gender) rec.gender = gender_raw;
            else if (*rec.gender != gender_raw)
                add_diag(result.diagnostics, "conflicting-gender", Severity::Notice, subject,
                         line_tag + ": gender '" + gender_raw + "' conflicts with earlier value; first wins");
        }

        // positioned sample: needs a valid timestamp and coordinates
        const std::string ts_raw = detail::trim(cell(row, "timestamp"));
        auto ts = parse_rfc3339_ms(ts_raw);
        auto lat = detail::parse_double(cell(row, "latitude"));
        auto lon = detail::parse_double(cell(row, "longitude"));
        const std::string alt_raw = detail::trim(cell(row, "altitude"));
        auto alt = alt_raw.empty() ? std::optional<double>(0.0) : detail::parse_double(alt_raw);

        if (ts_raw.empty() && !lat && !lon) continue;  // demographics-only row

        if (!ts) {
            add_diag(result.diagnostics, "bad-timestamp", Severity::Warning, subject,
                     line_tag + ": timestamp '" + ts_raw + "' is not RFC 3339; sample skipped");
            ++result.rows_rejected;
            continue;
        }
        if (!lat || !lon || !alt || *lat < -90 || *lat > 90 || *lon < -180 || *lon > 180) {
            add_diag(result.diagnostics, "bad-coordinates", Severity::Warning, subject,
                     line_tag + ": latitude/longitude/altitude malformed or out of range; sample skipped");
            ++result.rows_rejected;
            continue;
        }
        OccupantSample sample;
        sample.timestamp_ms = *ts;
        sample.timestamp_text = ts_raw;
        sample.position = {*lat, *lon, *alt};
        rec.samples.push_back(std::move(sample));
    }

    for (auto& rec : result.set.occupants)
        std::stable_sort(rec.samples.begin(), rec.samples.end(),
                         [](const OccupantSample& a, const OccupantSample& b) {
                             return a.timestamp_ms < b.timestamp_ms;
                         });
    return result;
}

// Keeps only occupants with complete demographics and at least one sample.
inline OccupantSet filter_defined(const OccupantSet& in, Diagnostics* diags = nullptr) {
    OccupantSet out;
    for (const auto& rec : in.occupants) {
        std::string missing;
        if (!rec.age) missing = "age";
        if (!rec.gender) missing += missing.empty() ? "gender" : ", gender";
        if (rec.samples.empty()) missing += missing.empty() ? "position samples" : ", position samples";
        if (missing.empty()) {
            out.occupants.push_back(rec);
        } else if (diags) {
            add_diag(*diags, "undefined-occupant", Severity::Notice, rec.subject_id,
                     "occupant excluded: missing " + missing);
        }
    }
    return out;
}

// Nearest-previous sample at `as_of_ms` (latest sample not after it); the
// latest sample overall when `as_of_ms` is unset. Null when none qualifies.
inline const OccupantSample* sample_at(const OccupantRecord& rec,
                                       std::optional<std::int64_t> as_of_ms) {
    const OccupantSample* best = nullptr;
    for (const auto& s : rec.samples) {
        if (as_of_ms && s.timestamp_ms > *as_of_ms) continue;
        if (!best || s.timestamp_ms >= best->timestamp_ms) best = &s;  // later rows win ties
    }
    return best;
}

// Projects an occupant sample into building-local coordinates.
inline geo::LocalPoint localize(const OccupantSample& sample, const geo::SiteTransform& site) {
    return geo::to_local(sample.position, site);
}

// Fills sample.local across the whole set. Samples whose coordinates fall in
// a different UTM zone than the site origin are left unlocalized and reported.
inline void localize_all(OccupantSet& set, const geo::SiteTransform& site,
                         Diagnostics* diags = nullptr) {
    for (auto& rec : set.occupants) {
        for (auto& s : rec.samples) {
            try {
                s.local = localize(s, site);
            } catch (const Error& e) {
                s.local.reset();
                if (diags)
                    add_diag(*diags, "unlocalizable-sample", Severity::Warning, rec.subject_id,
                             std::string("sample at ") + s.timestamp_text +
                                 " cannot be projected: " + e.what());
            }
        }
    }
}

}  // namespace bim2brick::occ

#endif
