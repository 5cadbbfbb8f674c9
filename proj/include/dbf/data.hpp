#pragma once

#include <map>
#include <string>
#include <vector>

namespace dbf {

enum class GroupId { Communicable, Noncommunicable, Injury };

const char* group_name(GroupId g);
GroupId group_from_name(const std::string& name); // throws InvalidConfig

using GroupConfig = std::map<std::string, GroupId>;

// Annual DALY counts per named cause. Rows are years (strictly increasing,
// consecutive), columns are causes; every cause belongs to exactly one group.
struct DalyTable {
    std::vector<int> years;
    std::vector<std::string> causes;
    std::vector<GroupId> groups;               // aligned with causes
    std::vector<std::vector<double>> values;   // years x causes

    std::vector<int> columns_in_group(GroupId g) const;
};

// Per-column z-scores (sample standard deviation, divisor n-1).
struct StandardizedMatrix {
    std::vector<std::string> columnNames;
    std::vector<std::vector<double>> z;        // rows x columns
    std::vector<double> means;
    std::vector<double> stdDevs;

    std::size_t rows() const { return z.size(); }
    std::size_t cols() const { return columnNames.size(); }
};

// Calendar year -> model time index, t = year - offsetYear. The default
// offset puts 1990 at t=1 so models with 1/t terms are defined on the
// whole fitting range.
struct TimeIndexMap {
    int offsetYear = 1989;
};

int to_time_index(int year, const TimeIndexMap& map); // throws NonPositiveIndex

// Parse a "cause = group" JSON object file ({"hiv": "communicable", ...}).
GroupConfig load_group_config(const std::string& path);

// Load and validate the input CSV (header: year,<cause1>,<cause2>,...).
// Rows are sorted by year; gaps, blank or non-numeric cells, negative values
// and causes missing from the config are all rejected.
DalyTable load_daly_csv(const std::string& path, const GroupConfig& groupConfig);

// Z-score the columns of one disease group.
StandardizedMatrix standardize(const DalyTable& table, GroupId group);

// Z-score an arbitrary rectangular matrix (rows x columns).
StandardizedMatrix standardize_columns(const std::vector<std::vector<double>>& values,
                                       const std::vector<std::string>& columnNames);

} // namespace dbf
