#pragma once

#include <string>
#include <vector>

#include "dbf/data.hpp"
#include "dbf/forecast.hpp"
#include "dbf/pca.hpp"
#include "dbf/sr.hpp"

namespace dbf {

struct IndexReport {
    std::string indexId;
    GroupId group = GroupId::Communicable;
    ScoreSeries actual;       // observed component scores
    FitReport fit;            // selected model + metrics
    ParetoFront front;
    ForecastTable table;      // model curve, actual era + forecast era
    TrendVerdict verdict;
    std::uint64_t seed = 0;   // per-index seed derived from the master seed
};

struct GroupReport {
    GroupId group = GroupId::Communicable;
    std::vector<std::string> causes;
    PcaModel model;
    std::vector<ScoreSeries> scores;
};

struct PipelineResult {
    TimeIndexMap map;
    int horizonYear = 2020;
    SrConfig config;
    std::vector<GroupReport> groups;
    std::vector<IndexReport> indices;
};

struct PipelineOptions {
    SrConfig sr;
    TimeIndexMap map;                 // offsetYear default 1989
    int horizonYear = 2020;
    RetentionRule retention = RetentionRule::kaiser();
};

// ingest -> per-group PCA -> symbolic regression per retained component ->
// forecast to the horizon. Per-index searches use seeds derived from the
// master seed by index label, so results do not depend on run order.
PipelineResult run_pipeline(const DalyTable& table, const PipelineOptions& options);

PipelineResult run_pipeline(const std::string& csvPath, const std::string& groupConfigPath,
                            const PipelineOptions& options);

// --- artifact serialization (deterministic byte-for-byte given equal inputs) ---

std::string report_json(const PipelineResult& result);           // combined report
std::string fit_report_json(const IndexReport& index, const SrConfig& cfg);
std::string front_json(const ParetoFront& front, const TrainingSet& data);
std::string pca_json(const GroupReport& group);
std::string scree_csv(const PcaModel& model);
std::string scores_csv(const std::vector<ScoreSeries>& scores);
std::string overlay_csv(const IndexReport& index);               // year,t,actual,model
std::string forecast_csv(const ForecastTable& table);
std::string daly_table_json(const DalyTable& table);

// Write every pipeline artifact under outDir (report.json, pca_<group>.json,
// scree_<group>.csv, scores_<group>.csv, fit_<index>.json, front_<index>.json,
// overlay_<index>.csv, forecast_<index>.csv).
void write_pipeline_artifacts(const PipelineResult& result, const std::string& outDir);

// Recombine per-index fit_*.json artifacts in a directory into report.json.
std::string combine_reports(const std::string& dir);

std::string format_double(double v); // shortest round-trip decimal form

} // namespace dbf
