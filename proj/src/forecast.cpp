#include "dbf/forecast.hpp"

#include <string>

#include "dbf/errors.hpp"

namespace dbf {

const char* trend_name(TrendDirection d) {
    switch (d) {
        case TrendDirection::Increasing: return "increasing";
        case TrendDirection::Decreasing: return "decreasing";
        case TrendDirection::Mixed: return "mixed";
    }
    return "mixed";
}

const char* row_kind_name(RowKind k) {
    return k == RowKind::Actual ? "actual" : "forecast";
}

ForecastTable forecast(const Expr& e, const std::string& indexId, int firstYear, int lastYear,
                       int lastActualYear, const TimeIndexMap& map) {
    if (lastYear < firstYear)
        throw Error(Errc::InvalidConfig, "empty year range " + std::to_string(firstYear) + ".." +
                                             std::to_string(lastYear));
    ForecastTable table;
    table.indexId = indexId;
    table.map = map;
    table.rows.reserve(lastYear - firstYear + 1);
    for (int year = firstYear; year <= lastYear; ++year) {
        const int t = to_time_index(year, map);
        const EvalResult r = evaluate(e, static_cast<double>(t));
        if (!r.ok())
            throw Error(Errc::DomainError, std::string(eval_error_name(r.error)) + " at year " +
                                               std::to_string(year) + " (t=" + std::to_string(t) +
                                               ")");
        ForecastRow row;
        row.year = year;
        row.t = t;
        row.value = r.value;
        row.kind = year <= lastActualYear ? RowKind::Actual : RowKind::Forecast;
        table.rows.push_back(row);
    }
    return table;
}

TrendVerdict trend(const ForecastTable& table) {
    std::vector<const ForecastRow*> rows;
    for (const auto& row : table.rows)
        if (row.kind == RowKind::Forecast) rows.push_back(&row);
    if (rows.size() < 2)
        throw Error(Errc::TooFewForecastRows,
                    "need at least 2 forecast rows, have " + std::to_string(rows.size()));

    bool allUp = true;
    bool allDown = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double delta = rows[i]->value - rows[i - 1]->value;
        if (!(delta > 0.0)) allUp = false;
        if (!(delta < 0.0)) allDown = false;
    }

    TrendVerdict verdict;
    verdict.indexId = table.indexId;
    verdict.firstYear = rows.front()->year;
    verdict.lastYear = rows.back()->year;
    verdict.direction = allUp   ? TrendDirection::Increasing
                        : allDown ? TrendDirection::Decreasing
                                  : TrendDirection::Mixed;
    return verdict;
}

} // namespace dbf
