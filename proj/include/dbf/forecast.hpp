#pragma once

#include <string>
#include <vector>

#include "dbf/data.hpp"
#include "dbf/expr.hpp"
#include "dbf/sr.hpp"

namespace dbf {

enum class RowKind { Actual, Forecast };

struct ForecastRow {
    int year = 0;
    int t = 0;
    double value = 0.0;
    RowKind kind = RowKind::Actual;
};

// Model curve over a year range; rows inside the fitting range are marked
// actual-era, rows beyond it forecast.
struct ForecastTable {
    std::string indexId;
    TimeIndexMap map;
    std::vector<ForecastRow> rows;
};

enum class TrendDirection { Increasing, Decreasing, Mixed };

struct TrendVerdict {
    std::string indexId;
    TrendDirection direction = TrendDirection::Mixed;
    int firstYear = 0;
    int lastYear = 0;
};

const char* trend_name(TrendDirection d);
const char* row_kind_name(RowKind k);

// Evaluate the model at every year in [firstYear, lastYear]; years up to
// lastActualYear are actual-era. Throws DomainError (with the offending
// year) or NonPositiveIndex.
ForecastTable forecast(const Expr& e, const std::string& indexId, int firstYear, int lastYear,
                       int lastActualYear, const TimeIndexMap& map);

// Direction of the forecast-era rows: increasing iff every consecutive delta
// is > 0, decreasing iff every delta is < 0, otherwise mixed.
TrendVerdict trend(const ForecastTable& table); // throws TooFewForecastRows

} // namespace dbf
