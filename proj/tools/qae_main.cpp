#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qae/harness.hpp"

namespace {

using qae::harness::ExperimentConfig;
using qae::harness::Report;

qae::FeatureVector parse_feature_list(const std::string& text) {
    qae::FeatureVector out;
    std::string cell;
    std::istringstream in(text);
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw qae::ConfigError("--input cell '" + cell + "' is not numeric");
        }
    }
    return out;
}

void emit(const Report& report, const std::string& out_path, const std::string& format) {
    const std::string text = format == "csv" ? report.to_csv() : report.to_json();
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw qae::IngestError("cannot write " + out_path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum amplitude-estimation engine and ensemble prediction harness"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string estimator = "binary-search";
    double growth_c = 1.2;
    double epsilon = 0.0001;
    std::uint64_t est_amp_m = 64;
    int max_rounds = 26;
    int trials_per_check = 1;
    std::string strategy = "table-sqrt";
    int qubits = 1;
    std::vector<double> grid;
    int reps = 1;
    double true_p = 0.5;
    std::vector<double> p_vector;
    std::string model_path;
    std::string dataset_path;
    int n_stumps = 0;
    int row = -1;
    int limit = 0;
    std::string input_csv;
    std::string out_path;
    std::string format = "json";
    std::string in_path;
    std::string save_model_path;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "root seed; every run stream derives from it");
        cmd->add_option("--estimator", estimator,
                        "qsearch | est-amp | doubling | binary-search");
        cmd->add_option("--c", growth_c, "qsearch growth factor, in (1, 2)");
        cmd->add_option("--epsilon", epsilon, "probability floor");
        cmd->add_option("--M", est_amp_m, "est-amp control size (power of two)");
        cmd->add_option("--max-rounds", max_rounds, "qsearch round cap");
        cmd->add_option("--trials-per-check", trials_per_check,
                        "majority-voted probe repetitions");
        cmd->add_option("--iteration-strategy", strategy, "table-sqrt | quarter-period");
    };
    const auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write the report here instead of stdout");
        cmd->add_option("--format", format, "json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    const auto add_model_source = [&](CLI::App* cmd) {
        cmd->add_option("--p-vector", p_vector, "explicit per-classifier probabilities")
            ->delimiter(',');
        cmd->add_option("--model", model_path, "model file (p-vector or stumps)");
        cmd->add_option("--dataset", dataset_path, "CSV dataset (features..., label in {1,2})");
        cmd->add_option("--n-stumps", n_stumps, "stumps to train from --dataset");
        cmd->add_option("--save-model", save_model_path, "persist the resolved model");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "one estimator run on a synthetic oracle");
    add_common(estimate);
    add_output(estimate);
    estimate->add_option("--p", true_p, "true good probability")->required();
    estimate->add_option("--qubits", qubits, "synthetic oracle width");

    CLI::App* sweep = app.add_subcommand("sweep", "estimator runs over a true-p grid");
    add_common(sweep);
    add_output(sweep);
    sweep->add_option("--grid", grid, "comma-separated true-p values in (0, 1]")
        ->delimiter(',')
        ->required();
    sweep->add_option("--reps", reps, "repetitions per grid point");
    sweep->add_option("--qubits", qubits, "synthetic oracle width");

    CLI::App* predict = app.add_subcommand("predict", "single input through all three methods");
    add_common(predict);
    add_output(predict);
    add_model_source(predict);
    predict->add_option("--input", input_csv, "comma-separated feature values");
    predict->add_option("--row", row, "use this dataset row as the input");

    CLI::App* compare = app.add_subcommand("compare", "dataset-wide classical vs quantum comparison");
    add_common(compare);
    add_output(compare);
    add_model_source(compare);
    compare->add_option("--limit", limit, "cap on dataset rows (0 = all)");

    CLI::App* report_cmd = app.add_subcommand("report", "re-aggregate and verify a stored report");
    report_cmd->add_option("--in", in_path, "report JSON to load")->required();
    add_output(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig config;
        config.seed = seed;
        const auto kind = qae::estimator_from_name(estimator);
        if (!kind) throw qae::ConfigError("unknown estimator: " + estimator);
        config.estimator = *kind;
        config.estimator_config.qsearch_growth_c = growth_c;
        config.estimator_config.epsilon = epsilon;
        config.estimator_config.est_amp_M = est_amp_m;
        config.estimator_config.max_rounds = max_rounds;
        config.estimator_config.trials_per_check = trials_per_check;
        if (strategy == "table-sqrt") {
            config.estimator_config.strategy = qae::IterationStrategy::table_sqrt;
        } else if (strategy == "quarter-period") {
            config.estimator_config.strategy = qae::IterationStrategy::quarter_period;
        } else {
            throw qae::ConfigError("unknown iteration strategy: " + strategy);
        }
        config.qubits = qubits;
        config.grid = grid;
        config.repetitions = reps;
        config.p_vector = p_vector;
        config.model_path = model_path;
        config.dataset_path = dataset_path;
        config.n_stumps = n_stumps;
        config.row_limit = limit;

        if (!save_model_path.empty() && (predict->parsed() || compare->parsed())) {
            qae::harness::save_model(qae::harness::resolve_model(config), save_model_path);
        }

        if (estimate->parsed()) {
            emit(qae::harness::run_single_estimate(config, true_p), out_path, format);
        } else if (sweep->parsed()) {
            emit(qae::harness::run_estimator_sweep(config), out_path, format);
        } else if (predict->parsed()) {
            qae::FeatureVector input;
            if (row >= 0) {
                if (dataset_path.empty()) {
                    throw qae::ConfigError("--row needs --dataset");
                }
                const qae::Dataset data = qae::harness::ingest_dataset(dataset_path);
                if (static_cast<std::size_t>(row) >= data.n_rows()) {
                    throw qae::ConfigError("--row " + std::to_string(row) + " out of range (" +
                                           std::to_string(data.n_rows()) + " rows)");
                }
                input.assign(data.row(row).begin(), data.row(row).end());
            } else if (!input_csv.empty()) {
                input = parse_feature_list(input_csv);
            }
            emit(qae::harness::run_single_prediction(config, input), out_path, format);
        } else if (compare->parsed()) {
            emit(qae::harness::run_prediction_comparison(config), out_path, format);
        } else if (report_cmd->parsed()) {
            emit(qae::harness::load_report(in_path), out_path, format);
        }
    } catch (const qae::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qae::IngestError& e) {
        std::cerr << "ingestion error: " << e.what() << "\n";
        return 3;
    } catch (const qae::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
