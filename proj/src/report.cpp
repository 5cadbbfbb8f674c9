#include "dbf/report.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dbf/errors.hpp"

namespace dbf {

using ojson = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

const char* binary_name(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "add";
        case BinaryOp::Sub: return "sub";
        case BinaryOp::Mul: return "mul";
        case BinaryOp::Div: return "div";
    }
    return "?";
}

const char* unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Cos: return "cos";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Log: return "log";
        case UnaryOp::Exp: return "exp";
    }
    return "?";
}

ojson config_echo(const SrConfig& cfg) {
    ojson j;
    j["seed"] = cfg.seed;
    j["populationSize"] = cfg.populationSize;
    j["generations"] = cfg.generations;
    j["tournamentSize"] = cfg.tournamentSize;
    j["crossoverProb"] = cfg.crossoverProb;
    j["mutationProb"] = cfg.mutationProb;
    j["mutationSplit"] = {{"subtree", cfg.subtreeMutWeight},
                          {"point", cfg.pointMutWeight},
                          {"jitter", cfg.jitterMutWeight}};
    j["initDepthRange"] = {cfg.initDepthMin, cfg.initDepthMax};
    j["maxDepth"] = cfg.maxDepth;
    j["constantRange"] = {cfg.constantMin, cfg.constantMax};
    ojson ops;
    ops["binary"] = ojson::array();
    for (BinaryOp op : cfg.operators.binary) ops["binary"].push_back(binary_name(op));
    ops["unary"] = ojson::array();
    for (UnaryOp op : cfg.operators.unary) ops["unary"].push_back(unary_name(op));
    ops["powInt"] = cfg.operators.powInt;
    j["operators"] = ops;
    j["constantTuneEvery"] = cfg.constantTuneEvery;
    j["constantTuneBudget"] = cfg.constantTuneBudget;
    return j;
}

ojson optional_json(const std::optional<double>& v) {
    return v ? ojson(*v) : ojson(nullptr);
}

ojson rows_json(const ForecastTable& table) {
    ojson rows = ojson::array();
    for (const auto& row : table.rows) {
        ojson r;
        r["year"] = row.year;
        r["t"] = row.t;
        r["value"] = row.value;
        r["kind"] = row_kind_name(row.kind);
        rows.push_back(std::move(r));
    }
    return rows;
}

ojson index_record(const IndexReport& index) {
    ojson j;
    j["index"] = index.indexId;
    j["expression"] = print_expr(index.fit.expr);
    j["r2"] = optional_json(index.fit.metrics.r2);
    j["r"] = optional_json(index.fit.metrics.r);
    j["mse"] = index.fit.metrics.mse;
    j["mae"] = index.fit.metrics.mae;
    j["complexity"] = index.fit.complexity;
    j["rows"] = rows_json(index.table);
    ojson trendJ;
    trendJ["direction"] = trend_name(index.verdict.direction);
    trendJ["firstYear"] = index.verdict.firstYear;
    trendJ["lastYear"] = index.verdict.lastYear;
    j["trend"] = trendJ;
    j["seed"] = index.seed;
    return j;
}

ojson group_record(const GroupReport& group) {
    ojson j;
    j["group"] = group_name(group.group);
    j["causes"] = group.causes;
    j["eigenvalues"] = group.model.eigenvalues;
    j["loadings"] = group.model.loadings;
    j["retained"] = group.model.retained;
    j["explainedFraction"] = group.model.explainedFraction;
    j["cumulativeFraction"] = group.model.cumulativeFraction;
    ojson scores = ojson::array();
    for (const auto& s : group.scores) {
        ojson sj;
        sj["index"] = s.indexId;
        sj["years"] = s.years;
        sj["values"] = s.scores;
        scores.push_back(std::move(sj));
    }
    j["scores"] = scores;
    return j;
}

std::uint64_t seed_for_index(std::uint64_t master, const std::string& label) {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a over the label
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return Rng(master).split(h).seed();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(Errc::IoError, "write failed for '" + path.string() + "'");
}

[[noreturn]] void rethrow_with_stage(const Error& e, const std::string& stage) {
    throw Error(e.code(), "[" + stage + "] " + e.what());
}

} // namespace

PipelineResult run_pipeline(const DalyTable& table, const PipelineOptions& options) {
    options.sr.validate();
    if (table.years.empty()) throw Error(Errc::TooFewRows, "empty table");
    const int lastDataYear = table.years.back();
    if (options.horizonYear < lastDataYear + 2)
        throw Error(Errc::InvalidConfig,
                    "horizon must be at least two years past the data (last data year " +
                        std::to_string(lastDataYear) + ")");
    for (int year : table.years) to_time_index(year, options.map); // validates t >= 1

    PipelineResult result;
    result.map = options.map;
    result.horizonYear = options.horizonYear;
    result.config = options.sr;

    for (GroupId g : {GroupId::Communicable, GroupId::Noncommunicable, GroupId::Injury}) {
        if (table.columns_in_group(g).empty()) continue;

        GroupReport gr;
        gr.group = g;
        StandardizedMatrix z;
        try {
            z = standardize(table, g);
            gr.causes = z.columnNames;
            gr.model = fit_pca(z, g, options.retention);
            gr.scores = component_scores(z, gr.model, table.years);
        } catch (const Error& e) {
            rethrow_with_stage(e, std::string("pca ") + group_name(g));
        }

        for (const auto& series : gr.scores) {
            IndexReport ir;
            ir.indexId = series.indexId;
            ir.group = g;
            ir.actual = series;
            ir.seed = seed_for_index(options.sr.seed, series.indexId);

            std::vector<double> tvals;
            tvals.reserve(series.years.size());
            for (int year : series.years)
                tvals.push_back(static_cast<double>(to_time_index(year, options.map)));

            try {
                const TrainingSet data = TrainingSet::create(tvals, series.scores);
                SrConfig cfg = options.sr;
                cfg.seed = ir.seed;
                const ParetoFront front = run_search(data, cfg);
                ir.front = front;
                ir.fit = select_model(front, data);
                ir.table = forecast(ir.fit.expr, ir.indexId, table.years.front(),
                                    options.horizonYear, lastDataYear, options.map);
                ir.verdict = trend(ir.table);
            } catch (const Error& e) {
                rethrow_with_stage(e, "fit " + series.indexId);
            }
            result.indices.push_back(std::move(ir));
        }
        result.groups.push_back(std::move(gr));
    }

    if (result.groups.empty())
        throw Error(Errc::TooFewColumns, "no populated disease groups in the table");
    return result;
}

PipelineResult run_pipeline(const std::string& csvPath, const std::string& groupConfigPath,
                            const PipelineOptions& options) {
    const GroupConfig groups = load_group_config(groupConfigPath);
    const DalyTable table = load_daly_csv(csvPath, groups);
    return run_pipeline(table, options);
}

std::string report_json(const PipelineResult& result) {
    ojson j;
    j["offsetYear"] = result.map.offsetYear;
    j["horizon"] = result.horizonYear;
    j["seed"] = result.config.seed;
    j["config"] = config_echo(result.config);
    j["groups"] = ojson::array();
    for (const auto& g : result.groups) j["groups"].push_back(group_record(g));
    j["indices"] = ojson::array();
    for (const auto& ir : result.indices) j["indices"].push_back(index_record(ir));
    return j.dump(2) + "\n";
}

std::string fit_report_json(const IndexReport& index, const SrConfig& cfg) {
    ojson j = index_record(index);
    SrConfig echo = cfg;
    echo.seed = index.seed;
    j["config"] = config_echo(echo);
    return j.dump(2) + "\n";
}

std::string front_json(const ParetoFront& front, const TrainingSet& data) {
    double mean = 0.0;
    for (double v : data.y) mean += v;
    mean /= static_cast<double>(data.size());
    double varP = 0.0;
    for (double v : data.y) varP += (v - mean) * (v - mean);
    varP /= static_cast<double>(data.size());

    ojson j;
    j["count"] = front.size();
    j["entries"] = ojson::array();
    for (const auto& e : front.entries()) {
        ojson ej;
        ej["expression"] = print_expr(e.expr);
        ej["complexity"] = e.complexity;
        ej["mse"] = e.mse;
        ej["r2"] = varP > 0.0 ? ojson(1.0 - e.mse / varP) : ojson(nullptr);
        j["entries"].push_back(std::move(ej));
    }
    return j.dump(2) + "\n";
}

std::string pca_json(const GroupReport& group) {
    ojson j = group_record(group);
    ojson scree = ojson::array();
    for (const auto& [component, eigenvalue] : scree_data(group.model))
        scree.push_back({{"component", component}, {"eigenvalue", eigenvalue}});
    j["scree"] = scree;
    return j.dump(2) + "\n";
}

std::string scree_csv(const PcaModel& model) {
    std::string out = "component,eigenvalue\n";
    for (const auto& [component, eigenvalue] : scree_data(model)) {
        out += std::to_string(component);
        out += ',';
        out += format_double(eigenvalue);
        out += '\n';
    }
    return out;
}

std::string scores_csv(const std::vector<ScoreSeries>& scores) {
    if (scores.empty()) return "year\n";
    std::string out = "year";
    for (const auto& s : scores) {
        out += ',';
        out += s.indexId;
    }
    out += '\n';
    for (std::size_t i = 0; i < scores.front().years.size(); ++i) {
        out += std::to_string(scores.front().years[i]);
        for (const auto& s : scores) {
            out += ',';
            out += format_double(s.scores[i]);
        }
        out += '\n';
    }
    return out;
}

std::string overlay_csv(const IndexReport& index) {
    std::string out = "year,t,actual,model\n";
    for (std::size_t i = 0; i < index.actual.years.size(); ++i) {
        const auto& row = index.table.rows[i];
        out += std::to_string(row.year);
        out += ',';
        out += std::to_string(row.t);
        out += ',';
        out += format_double(index.actual.scores[i]);
        out += ',';
        out += format_double(row.value);
        out += '\n';
    }
    return out;
}

std::string forecast_csv(const ForecastTable& table) {
    std::string out = "year,t,value,kind\n";
    for (const auto& row : table.rows) {
        out += std::to_string(row.year);
        out += ',';
        out += std::to_string(row.t);
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += row_kind_name(row.kind);
        out += '\n';
    }
    return out;
}

std::string daly_table_json(const DalyTable& table) {
    ojson j;
    j["years"] = table.years;
    j["causes"] = table.causes;
    ojson groups;
    for (std::size_t i = 0; i < table.causes.size(); ++i)
        groups[table.causes[i]] = group_name(table.groups[i]);
    j["groups"] = groups;
    j["values"] = table.values;
    return j.dump(2) + "\n";
}

void write_pipeline_artifacts(const PipelineResult& result, const std::string& outDir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outDir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create '" + outDir + "': " + ec.message());
    const fs::path dir(outDir);

    write_file(dir / "report.json", report_json(result));
    for (const auto& g : result.groups) {
        const std::string name = group_name(g.group);
        write_file(dir / ("pca_" + name + ".json"), pca_json(g));
        write_file(dir / ("scree_" + name + ".csv"), scree_csv(g.model));
        write_file(dir / ("scores_" + name + ".csv"), scores_csv(g.scores));
    }
    for (const auto& ir : result.indices) {
        std::vector<double> tvals;
        for (int year : ir.actual.years)
            tvals.push_back(static_cast<double>(to_time_index(year, result.map)));
        const TrainingSet data = TrainingSet::create(tvals, ir.actual.scores);
        write_file(dir / ("fit_" + ir.indexId + ".json"), fit_report_json(ir, result.config));
        write_file(dir / ("front_" + ir.indexId + ".json"), front_json(ir.front, data));
        write_file(dir / ("overlay_" + ir.indexId + ".csv"), overlay_csv(ir));
        write_file(dir / ("forecast_" + ir.indexId + ".csv"), forecast_csv(ir.table));
    }
}

std::string combine_reports(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(Errc::MissingFile, "'" + dir + "' is not a directory");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("fit_", 0) == 0 && name.size() > 9 &&
            name.compare(name.size() - 5, 5, ".json") == 0)
            files.push_back(entry.path());
    }
    if (files.empty())
        throw Error(Errc::MissingFile, "no fit_*.json artifacts in '" + dir + "'");
    std::sort(files.begin(), files.end());

    ojson combined;
    combined["indices"] = ojson::array();
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw Error(Errc::IoError, "cannot read '" + path.string() + "'");
        ojson j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::IoError, "malformed JSON in '" + path.string() + "': " + e.what());
        }
        combined["indices"].push_back(std::move(j));
    }
    return combined.dump(2) + "\n";
}

} // namespace dbf
