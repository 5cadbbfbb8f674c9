#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dbf/data.hpp"
#include "dbf/errors.hpp"
#include "dbf/expr.hpp"
#include "dbf/forecast.hpp"
#include "dbf/pca.hpp"
#include "dbf/report.hpp"
#include "dbf/sr.hpp"

namespace {

dbf::RetentionRule parse_retention(const std::string& text) {
    if (text == "kaiser") return dbf::RetentionRule::kaiser();
    if (text.rfind("cumvar=", 0) == 0) {
        const double f = std::stod(text.substr(7));
        if (f <= 0.0 || f > 1.0)
            throw dbf::Error(dbf::Errc::InvalidConfig, "cumvar fraction must be in (0, 1]");
        return dbf::RetentionRule::cumvar(f);
    }
    if (text.rfind("fixed=", 0) == 0) return dbf::RetentionRule::fixed(std::stoi(text.substr(6)));
    throw dbf::Error(dbf::Errc::InvalidConfig,
                     "retention must be kaiser, cumvar=<f> or fixed=<k>, got '" + text + "'");
}

// Reads one column of a scores CSV (header: year,<label>,<label>,...).
dbf::ScoreSeries load_score_series(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw dbf::Error(dbf::Errc::MissingFile, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw dbf::Error(dbf::Errc::MalformedRow, "empty file '" + path + "'");

    std::vector<std::string> headers;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) headers.push_back(cell);
    if (headers.empty() || headers[0] != "year")
        throw dbf::Error(dbf::Errc::MalformedRow, "first column header must be 'year'");

    int column = -1;
    for (std::size_t i = 1; i < headers.size(); ++i)
        if (headers[i] == label) column = static_cast<int>(i);
    if (column < 0)
        throw dbf::Error(dbf::Errc::UnknownIndex, "no column '" + label + "' in '" + path + "'");

    dbf::ScoreSeries series;
    series.indexId = label;
    int lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != headers.size())
            throw dbf::Error(dbf::Errc::MalformedRow, "line " + std::to_string(lineNo) +
                                                          ": wrong field count");
        auto numeric = [&](const std::string& s) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw dbf::Error(dbf::Errc::MalformedRow,
                                 "line " + std::to_string(lineNo) + ": bad number '" + s + "'");
            return v;
        };
        series.years.push_back(static_cast<int>(numeric(cells[0])));
        series.scores.push_back(numeric(cells[column]));
    }
    if (series.years.size() < 3)
        throw dbf::Error(dbf::Errc::TooFewRows, "need at least 3 rows in '" + path + "'");
    return series;
}

void emit(const std::string& text, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(outPath, std::ios::binary);
    if (!out) throw dbf::Error(dbf::Errc::IoError, "cannot write '" + outPath + "'");
    out << text;
}

struct CommonIo {
    std::string input;
    std::string groups;
    std::string out;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disease-burden index construction and symbolic-regression forecasting"};
    app.require_subcommand(1);

    // ingest
    CommonIo ingestIo;
    auto* ingest = app.add_subcommand("ingest", "Validate a DALY CSV and echo the normalized table");
    ingest->add_option("--input", ingestIo.input, "input CSV")->required();
    ingest->add_option("--groups", ingestIo.groups, "group config JSON")->required();
    ingest->add_option("--out", ingestIo.out, "output file (default stdout)");

    // pca
    CommonIo pcaIo;
    std::string pcaRetention = "kaiser";
    auto* pca = app.add_subcommand("pca", "Per-group eigen report, component scores and scree data");
    pca->add_option("--input", pcaIo.input, "input CSV")->required();
    pca->add_option("--groups", pcaIo.groups, "group config JSON")->required();
    pca->add_option("--retention", pcaRetention, "kaiser | cumvar=<f> | fixed=<k>");
    pca->add_option("--out", pcaIo.out, "output directory (default stdout)");

    // fit
    std::string fitInput, fitIndex, fitOut;
    dbf::SrConfig fitCfg;
    int fitOffset = 1989;
    auto* fit = app.add_subcommand("fit", "Symbolic regression on one index series");
    fit->add_option("--input", fitInput, "scores CSV (year,<label>,...)")->required();
    fit->add_option("--index", fitIndex, "column label to fit")->required();
    fit->add_option("--seed", fitCfg.seed, "random seed");
    fit->add_option("--generations", fitCfg.generations, "generations");
    fit->add_option("--population", fitCfg.populationSize, "population size");
    fit->add_option("--offset-year", fitOffset, "t = year - offset");
    fit->add_option("--out", fitOut, "output directory (default stdout)");

    // forecast
    std::string fcModel, fcIndex = "model", fcOut;
    int fcFrom = 2017, fcTo = 2020, fcLastActual = 0, fcOffset = 1989;
    auto* fc = app.add_subcommand("forecast", "Extrapolate a model over a year range");
    fc->add_option("--model", fcModel, "expression text, or a built-in id (CPC1, NPC, ...)")
        ->required();
    fc->add_option("--index", fcIndex, "label for the output");
    fc->add_option("--from", fcFrom, "first year");
    fc->add_option("--to", fcTo, "last year");
    fc->add_option("--last-actual", fcLastActual,
                   "last actual-era year (default: from - 1, everything is forecast)");
    fc->add_option("--offset-year", fcOffset, "t = year - offset");
    fc->add_option("--out", fcOut, "output file (default stdout)");

    // paper-models
    std::optional<double> pmEval;
    auto* pm = app.add_subcommand("paper-models", "List the built-in index models");
    pm->add_option("--eval", pmEval, "also evaluate each model at this t");

    // pipeline
    CommonIo plIo;
    std::string plRetention = "kaiser";
    dbf::PipelineOptions plOpts;
    auto* pl = app.add_subcommand("pipeline", "ingest -> pca -> fit -> forecast, all artifacts");
    pl->add_option("--input", plIo.input, "input CSV")->required();
    pl->add_option("--groups", plIo.groups, "group config JSON")->required();
    pl->add_option("--seed", plOpts.sr.seed, "master seed");
    pl->add_option("--generations", plOpts.sr.generations, "generations");
    pl->add_option("--population", plOpts.sr.populationSize, "population size");
    pl->add_option("--offset-year", plOpts.map.offsetYear, "t = year - offset");
    pl->add_option("--horizon", plOpts.horizonYear, "last forecast year");
    pl->add_option("--retention", plRetention, "kaiser | cumvar=<f> | fixed=<k>");
    pl->add_option("--out", plIo.out, "output directory")->required();

    // report
    std::string repDir, repOut;
    auto* rep = app.add_subcommand("report", "Combine fit_*.json artifacts into one report");
    rep->add_option("--dir", repDir, "artifact directory")->required();
    rep->add_option("--out", repOut, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*ingest) {
            const auto cfg = dbf::load_group_config(ingestIo.groups);
            const auto table = dbf::load_daly_csv(ingestIo.input, cfg);
            emit(dbf::daly_table_json(table), ingestIo.out);
        } else if (*pca) {
            const auto rule = parse_retention(pcaRetention);
            const auto cfg = dbf::load_group_config(pcaIo.groups);
            const auto table = dbf::load_daly_csv(pcaIo.input, cfg);
            for (dbf::GroupId g :
                 {dbf::GroupId::Communicable, dbf::GroupId::Noncommunicable, dbf::GroupId::Injury}) {
                if (table.columns_in_group(g).empty()) continue;
                dbf::GroupReport gr;
                gr.group = g;
                const auto z = dbf::standardize(table, g);
                gr.causes = z.columnNames;
                gr.model = dbf::fit_pca(z, g, rule);
                gr.scores = dbf::component_scores(z, gr.model, table.years);
                if (pcaIo.out.empty()) {
                    std::cout << dbf::pca_json(gr);
                } else {
                    std::filesystem::create_directories(pcaIo.out);
                    const std::string name = dbf::group_name(g);
                    emit(dbf::pca_json(gr), pcaIo.out + "/pca_" + name + ".json");
                    emit(dbf::scree_csv(gr.model), pcaIo.out + "/scree_" + name + ".csv");
                    emit(dbf::scores_csv(gr.scores), pcaIo.out + "/scores_" + name + ".csv");
                }
            }
        } else if (*fit) {
            const auto series = load_score_series(fitInput, fitIndex);
            const dbf::TimeIndexMap map{fitOffset};
            std::vector<double> tvals;
            for (int year : series.years)
                tvals.push_back(static_cast<double>(dbf::to_time_index(year, map)));
            const auto data = dbf::TrainingSet::create(tvals, series.scores);
            const auto front = dbf::run_search(data, fitCfg);
            const auto report = dbf::select_model(front, data);

            dbf::IndexReport ir;
            ir.indexId = fitIndex;
            ir.actual = series;
            ir.fit = report;
            ir.front = front;
            ir.seed = fitCfg.seed;
            ir.table = dbf::forecast(report.expr, fitIndex, series.years.front(),
                                     series.years.back(), series.years.back(), map);
            ir.verdict.indexId = fitIndex; // no forecast era here
            if (fitOut.empty()) {
                std::cout << dbf::fit_report_json(ir, fitCfg);
                std::cout << dbf::front_json(front, data);
            } else {
                std::filesystem::create_directories(fitOut);
                emit(dbf::fit_report_json(ir, fitCfg), fitOut + "/fit_" + fitIndex + ".json");
                emit(dbf::front_json(front, data), fitOut + "/front_" + fitIndex + ".json");
            }
        } else if (*fc) {
            dbf::Expr model;
            bool builtin = false;
            for (const auto& id : dbf::paper_model_ids())
                if (id == fcModel) builtin = true;
            model = builtin ? dbf::paper_model(fcModel) : dbf::parse_expr(fcModel);
            if (builtin && fcIndex == "model") fcIndex = fcModel;
            const int lastActual = fc->count("--last-actual") ? fcLastActual : fcFrom - 1;
            const auto table = dbf::forecast(model, fcIndex, fcFrom, fcTo, lastActual,
                                             dbf::TimeIndexMap{fcOffset});
            emit(dbf::forecast_csv(table), fcOut);
        } else if (*pm) {
            for (const auto& id : dbf::paper_model_ids()) {
                const auto model = dbf::paper_model(id);
                std::cout << id << ": " << dbf::print_expr(model)
                          << "  [complexity " << dbf::complexity(model) << "]";
                if (pmEval) {
                    const auto r = dbf::evaluate(model, *pmEval);
                    if (r.ok())
                        std::cout << "  value(t=" << dbf::format_double(*pmEval)
                                  << ") = " << dbf::format_double(r.value);
                    else
                        std::cout << "  value(t=" << dbf::format_double(*pmEval) << ") = "
                                  << dbf::eval_error_name(r.error);
                }
                std::cout << "\n";
            }
        } else if (*pl) {
            plOpts.retention = parse_retention(plRetention);
            const auto result = dbf::run_pipeline(plIo.input, plIo.groups, plOpts);
            dbf::write_pipeline_artifacts(result, plIo.out);
            std::cout << "wrote " << plIo.out << "/report.json ("
                      << result.indices.size() << " indices, "
                      << result.groups.size() << " groups)\n";
        } else if (*rep) {
            emit(dbf::combine_reports(repDir), repOut);
        }
    } catch (const dbf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dbf::exit_class(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
