#include "dbf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dbf/errors.hpp"

namespace dbf {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::MissingFile: return "MissingFile";
        case Errc::MalformedRow: return "MalformedRow";
        case Errc::GapInYears: return "GapInYears";
        case Errc::UnmappedCause: return "UnmappedCause";
        case Errc::NegativeValue: return "NegativeValue";
        case Errc::ConstantColumn: return "ConstantColumn";
        case Errc::TooFewRows: return "TooFewRows";
        case Errc::TooFewColumns: return "TooFewColumns";
        case Errc::NonPositiveIndex: return "NonPositiveIndex";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::TooFewPoints: return "TooFewPoints";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::ParseError: return "ParseError";
        case Errc::ExponentNotInteger: return "ExponentNotInteger";
        case Errc::UnknownIndex: return "UnknownIndex";
        case Errc::TooFewForecastRows: return "TooFewForecastRows";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::EmptyFront: return "EmptyFront";
        case Errc::DomainError: return "DomainError";
        case Errc::IoError: return "IoError";
    }
    return "Error";
}

int exit_class(Errc code) {
    switch (code) {
        case Errc::MissingFile:
        case Errc::IoError:
            return 3;
        case Errc::NoConvergence:
        case Errc::EmptyFront:
        case Errc::DomainError:
            return 2;
        default:
            return 1;
    }
}

const char* group_name(GroupId g) {
    switch (g) {
        case GroupId::Communicable: return "communicable";
        case GroupId::Noncommunicable: return "noncommunicable";
        case GroupId::Injury: return "injury";
    }
    return "unknown";
}

GroupId group_from_name(const std::string& name) {
    if (name == "communicable") return GroupId::Communicable;
    if (name == "noncommunicable") return GroupId::Noncommunicable;
    if (name == "injury") return GroupId::Injury;
    throw Error(Errc::InvalidConfig, "unknown group '" + name +
                                         "' (expected communicable|noncommunicable|injury)");
}

std::vector<int> DalyTable::columns_in_group(GroupId g) const {
    std::vector<int> cols;
    for (std::size_t j = 0; j < causes.size(); ++j)
        if (groups[j] == g) cols.push_back(static_cast<int>(j));
    return cols;
}

int to_time_index(int year, const TimeIndexMap& map) {
    if (year <= map.offsetYear)
        throw Error(Errc::NonPositiveIndex,
                    "year " + std::to_string(year) + " maps to t <= 0 with offset " +
                        std::to_string(map.offsetYear));
    return year - map.offsetYear;
}

GroupConfig load_group_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MissingFile, "cannot open group config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, "group config '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw Error(Errc::InvalidConfig, "group config must be a JSON object of cause -> group");
    GroupConfig cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw Error(Errc::InvalidConfig, "group for cause '" + it.key() + "' must be a string");
        cfg[it.key()] = group_from_name(it.value().get<std::string>());
    }
    return cfg;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, int lineNo, const std::string& header) {
    const std::string s = trim(raw);
    if (s.empty())
        throw Error(Errc::MalformedRow, "line " + std::to_string(lineNo) + ": blank cell under '" +
                                            header + "'");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::MalformedRow, "line " + std::to_string(lineNo) + ": non-numeric cell '" +
                                            s + "' under '" + header + "'");
    if (!std::isfinite(v))
        throw Error(Errc::MalformedRow,
                    "line " + std::to_string(lineNo) + ": non-finite value under '" + header + "'");
    return v;
}

} // namespace

DalyTable load_daly_csv(const std::string& path, const GroupConfig& groupConfig) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MissingFile, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::MalformedRow, "empty file '" + path + "'");

    auto headers = split_csv_line(line);
    for (auto& h : headers) h = trim(h);
    if (headers.empty() || headers[0] != "year")
        throw Error(Errc::MalformedRow, "first column header must be 'year'");
    if (headers.size() < 2) throw Error(Errc::MalformedRow, "no cause columns");

    DalyTable table;
    table.causes.assign(headers.begin() + 1, headers.end());
    for (const auto& cause : table.causes) {
        auto it = groupConfig.find(cause);
        if (it == groupConfig.end())
            throw Error(Errc::UnmappedCause, "cause '" + cause + "' missing from group config");
        table.groups.push_back(it->second);
    }

    struct Row {
        int year;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    int lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != headers.size())
            throw Error(Errc::MalformedRow, "line " + std::to_string(lineNo) + ": expected " +
                                                std::to_string(headers.size()) + " fields, got " +
                                                std::to_string(fields.size()));
        Row row;
        const double yearValue = parse_cell(fields[0], lineNo, "year");
        row.year = static_cast<int>(yearValue);
        if (static_cast<double>(row.year) != yearValue)
            throw Error(Errc::MalformedRow,
                        "line " + std::to_string(lineNo) + ": year must be an integer");
        for (std::size_t j = 1; j < fields.size(); ++j) {
            const double v = parse_cell(fields[j], lineNo, headers[j]);
            if (v < 0.0)
                throw Error(Errc::NegativeValue, "line " + std::to_string(lineNo) +
                                                     ": negative value under '" + headers[j] + "'");
            row.values.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(Errc::TooFewRows, "no data rows in '" + path + "'");

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.year < b.year; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].year == rows[i - 1].year)
            throw Error(Errc::MalformedRow, "duplicate year " + std::to_string(rows[i].year));
        if (rows[i].year != rows[i - 1].year + 1)
            throw Error(Errc::GapInYears, "years jump from " + std::to_string(rows[i - 1].year) +
                                              " to " + std::to_string(rows[i].year));
    }

    for (auto& row : rows) {
        table.years.push_back(row.year);
        table.values.push_back(std::move(row.values));
    }
    return table;
}

StandardizedMatrix standardize_columns(const std::vector<std::vector<double>>& values,
                                       const std::vector<std::string>& columnNames) {
    const std::size_t n = values.size();
    if (n < 3) throw Error(Errc::TooFewRows, "need at least 3 rows to standardize");
    const std::size_t p = columnNames.size();

    StandardizedMatrix out;
    out.columnNames = columnNames;
    out.z.assign(n, std::vector<double>(p, 0.0));
    for (std::size_t c = 0; c < p; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += values[i][c];
        mean /= static_cast<double>(n);

        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = values[i][c] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd == 0.0)
            throw Error(Errc::ConstantColumn, "column '" + columnNames[c] + "' is constant");

        out.means.push_back(mean);
        out.stdDevs.push_back(sd);
        for (std::size_t i = 0; i < n; ++i) out.z[i][c] = (values[i][c] - mean) / sd;
    }
    return out;
}

StandardizedMatrix standardize(const DalyTable& table, GroupId group) {
    const auto cols = table.columns_in_group(group);
    if (cols.size() < 2)
        throw Error(Errc::TooFewColumns, std::string("group '") + group_name(group) +
                                             "' has fewer than 2 causes");
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (int j : cols) names.push_back(table.causes[j]);

    std::vector<std::vector<double>> sub(table.years.size(), std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < table.years.size(); ++i)
        for (std::size_t c = 0; c < cols.size(); ++c) sub[i][c] = table.values[i][cols[c]];

    return standardize_columns(sub, names);
}

} // namespace dbf
