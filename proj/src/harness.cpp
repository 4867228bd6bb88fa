#include "qae/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace qae::harness {

using nlohmann::json;

namespace {

constexpr const char* kArtifactName = "qae";
constexpr const char* kArtifactVersion = "0.1.0";
constexpr int kReportSchemaVersion = 1;

// Stream tag for model training, distinct from every run stream.
constexpr std::uint64_t kModelStreamIndex = 0x6d6f64656cULL;

inline void rotate_pair(Complex& a0, Complex& a1, double c, double s) {
    const Complex t0 = c * a0 - s * a1;
    const Complex t1 = s * a0 + c * a1;
    a0 = t0;
    a1 = t1;
}

json trial_to_json(const TrialRecord& t) {
    json j;
    j["round"] = t.round;
    j["parameter"] = t.parameter;
    j["iterations"] = t.iterations;
    j["outcome"] = t.outcome;
    if (t.good.has_value()) {
        j["good"] = *t.good;
    } else {
        j["good"] = nullptr;
    }
    return j;
}

json run_record_for_estimation(std::uint64_t run_index, double true_p, int rep,
                               const EstimationResult& est, bool with_transcript) {
    json r;
    r["run_index"] = run_index;
    r["true_p"] = true_p;
    r["rep"] = rep;
    r["point_estimate"] = est.point_estimate;
    r["amplitude_estimate"] = est.amplitude_estimate;
    r["interval_lo"] = est.interval.lo;
    r["interval_hi"] = est.interval.hi;
    r["interval_closed_hi"] = est.interval.closed_hi;
    r["covered"] = est.interval.contains(true_p);
    r["floor_hit"] = est.floor_hit;
    r["rounds"] = est.transcript.size();
    r["a_applications"] = est.queries.a_applications;
    r["a_inverse_applications"] = est.queries.a_inverse_applications;
    r["grover_applications"] = est.queries.a_inverse_applications;
    r["oracle_evaluations"] = est.queries.oracle_evaluations;
    r["measurements"] = est.queries.measurements;
    if (with_transcript) {
        json t = json::array();
        for (const auto& rec : est.transcript) t.push_back(trial_to_json(rec));
        r["transcript"] = t;
    }
    return r;
}

Report build_report(const std::string& kind, const ExperimentConfig& config, json runs) {
    Report report;
    report.doc["artifact"] = kArtifactName;
    report.doc["artifact_version"] = kArtifactVersion;
    report.doc["version"] = kReportSchemaVersion;
    report.doc["kind"] = kind;
    report.doc["config"] = config.echo();
    report.doc["runs"] = std::move(runs);
    report.doc["aggregates"] = compute_aggregates(report.doc);
    return report;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double percentile_of(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    return v[std::min(n - 1, rank - 1)];
}

struct SegmentKey {
    double lo;
    double hi;
    bool closed;
    bool operator<(const SegmentKey& o) const {
        if (lo != o.lo) return lo < o.lo;
        if (hi != o.hi) return hi < o.hi;
        return closed < o.closed;
    }
};

json sweep_group_aggregate(double true_p, const std::vector<const json*>& runs,
                           EstimatorKind estimator) {
    std::vector<double> a_apps;
    std::vector<double> grover;
    double covered = 0.0;
    double floors = 0.0;
    std::map<SegmentKey, std::uint64_t> segments;
    for (const json* r : runs) {
        a_apps.push_back((*r)["a_applications"].get<double>());
        grover.push_back((*r)["grover_applications"].get<double>());
        if ((*r)["covered"].get<bool>()) covered += 1.0;
        if ((*r)["floor_hit"].get<bool>()) floors += 1.0;
        segments[SegmentKey{(*r)["interval_lo"].get<double>(), (*r)["interval_hi"].get<double>(),
                            (*r)["interval_closed_hi"].get<bool>()}] += 1;
    }
    const auto n = static_cast<double>(runs.size());

    SegmentKey modal{0.0, 0.0, false};
    std::uint64_t modal_count = 0;
    json segment_table = json::array();
    for (const auto& [key, count] : segments) {
        json row;
        row["lo"] = key.lo;
        row["hi"] = key.hi;
        row["closed_hi"] = key.closed;
        row["count"] = count;
        segment_table.push_back(row);
        if (count > modal_count) {
            modal = key;
            modal_count = count;
        }
    }

    json g;
    g["true_p"] = true_p;
    g["runs"] = runs.size();
    g["mean_a_applications"] = mean_of(a_apps);
    g["p50_a_applications"] = percentile_of(a_apps, 0.50);
    g["p90_a_applications"] = percentile_of(a_apps, 0.90);
    g["mean_grover_applications"] = mean_of(grover);
    g["coverage_rate"] = covered / n;
    g["floor_rate"] = floors / n;
    g["modal_segment_lo"] = modal.lo;
    g["modal_segment_hi"] = modal.hi;
    g["modal_segment_closed_hi"] = modal.closed;
    g["modal_segment_count"] = modal_count;
    g["segments"] = segment_table;

    if (estimator == EstimatorKind::doubling || estimator == EstimatorKind::binary_search) {
        const ProbabilitySegment row = estimator == EstimatorKind::doubling
                                           ? doubling_ladder_row(true_p)
                                           : binary_search_ladder_row(true_p);
        double matches = 0.0;
        for (const json* r : runs) {
            if ((*r)["interval_lo"].get<double>() == row.lo &&
                (*r)["interval_hi"].get<double>() == row.hi &&
                (*r)["interval_closed_hi"].get<bool>() == row.closed_hi) {
                matches += 1.0;
            }
        }
        g["ladder_row_lo"] = row.lo;
        g["ladder_row_hi"] = row.hi;
        g["ladder_row_closed_hi"] = row.closed_hi;
        g["ladder_row_match_rate"] = matches / n;
    }
    return g;
}

json aggregate_estimation_runs(const json& doc) {
    const auto estimator = estimator_from_name(doc["config"]["estimator"].get<std::string>());
    if (!estimator) {
        throw IngestError("unknown estimator in report config: " +
                          doc["config"]["estimator"].get<std::string>());
    }
    const json& runs = doc["runs"];

    std::vector<double> order;
    std::map<double, std::vector<const json*>> groups;
    for (const auto& r : runs) {
        const double p = r["true_p"].get<double>();
        if (groups.find(p) == groups.end()) order.push_back(p);
        groups[p].push_back(&r);
    }

    json per_p = json::array();
    for (double p : order) {
        per_p.push_back(sweep_group_aggregate(p, groups[p], *estimator));
    }

    json agg;
    agg["n_runs"] = runs.size();
    agg["per_p"] = per_p;
    return agg;
}

json aggregate_prediction_runs(const json& doc) {
    const json& runs = doc["runs"];
    std::vector<double> quantum_a;
    double agree_cq = 0.0;
    double agree_cp = 0.0;
    double classical_c1 = 0.0;
    double quantum_c1 = 0.0;
    for (const auto& r : runs) {
        quantum_a.push_back(r["quantum_a_applications"].get<double>());
        if (r["agree_classical_quantum"].get<bool>()) agree_cq += 1.0;
        if (r["agree_classical_probabilistic"].get<bool>()) agree_cp += 1.0;
        if (r["classical_answer"].get<int>() == 1) classical_c1 += 1.0;
        if (r["quantum_answer"].get<int>() == 1) quantum_c1 += 1.0;
    }
    const auto n = static_cast<double>(runs.size());
    const double n_classifiers = runs.empty() ? 0.0 : runs[0]["n_classifiers"].get<double>();
    const double classical_cost = runs.empty() ? 0.0 : runs[0]["classical_cost"].get<double>();
    const double mean_qa = mean_of(quantum_a);

    json agg;
    agg["n_runs"] = runs.size();
    agg["n_classifiers"] = n_classifiers;
    agg["classical_cost"] = classical_cost;
    agg["mean_quantum_a_applications"] = mean_qa;
    agg["max_quantum_a_applications"] = quantum_a.empty() ? 0.0 : *std::max_element(quantum_a.begin(), quantum_a.end());
    agg["headline_ratio"] = n_classifiers > 0.0 ? mean_qa / n_classifiers : 0.0;
    agg["agreement_rate_classical_quantum"] = n > 0 ? agree_cq / n : 0.0;
    agg["agreement_rate_classical_probabilistic"] = n > 0 ? agree_cp / n : 0.0;
    agg["classical_class1_rate"] = n > 0 ? classical_c1 / n : 0.0;
    agg["quantum_class1_rate"] = n > 0 ? quantum_c1 / n : 0.0;
    return agg;
}

}  // namespace

json ExperimentConfig::echo() const {
    json j;
    j["seed"] = seed;
    j["estimator"] = estimator_name(estimator);
    j["c"] = estimator_config.qsearch_growth_c;
    j["epsilon"] = estimator_config.epsilon;
    j["M"] = estimator_config.est_amp_M;
    j["max_rounds"] = estimator_config.max_rounds;
    j["trials_per_check"] = estimator_config.trials_per_check;
    j["iteration_strategy"] =
        estimator_config.strategy == IterationStrategy::table_sqrt ? "table-sqrt" : "quarter-period";
    j["qubits"] = qubits;
    j["grid"] = grid;
    j["repetitions"] = repetitions;
    j["p_vector"] = p_vector;
    j["model_path"] = model_path;
    j["dataset_path"] = dataset_path;
    j["n_stumps"] = n_stumps;
    j["row_limit"] = row_limit;
    return j;
}

OraclePair make_synthetic_oracle(double true_p, int total_qubits) {
    if (true_p < 0.0 || true_p > 1.0) throw ConfigError("true p must lie in [0, 1]");
    if (total_qubits < 1 || total_qubits > StateVector::kDefaultMaxQubits) {
        throw CapacityError("oracle width " + std::to_string(total_qubits) + " outside [1, " +
                            std::to_string(StateVector::kDefaultMaxQubits) + "]");
    }
    const double theta = std::asin(std::sqrt(true_p));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double h = 1.0 / std::sqrt(2.0);
    const int n = total_qubits;

    auto forward = [c, s, h, n](std::span<Complex> block) {
        for (std::uint64_t v = 0; v < block.size(); v += 2) {
            rotate_pair(block[v], block[v | 1], c, s);
        }
        for (int q = 1; q < n; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            for (std::uint64_t v = 0; v < block.size(); ++v) {
                if (v & bit) continue;
                rotate_pair(block[v], block[v | bit], h, h);
            }
        }
    };
    auto inverse = [c, s, h, n](std::span<Complex> block) {
        for (int q = n - 1; q >= 1; --q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            for (std::uint64_t v = 0; v < block.size(); ++v) {
                if (v & bit) continue;
                rotate_pair(block[v], block[v | bit], h, -h);
            }
        }
        for (std::uint64_t v = 0; v < block.size(); v += 2) {
            rotate_pair(block[v], block[v | 1], c, -s);
        }
    };

    OraclePair pair;
    pair.preparation = Unitary(n, std::move(forward), std::move(inverse), "synthetic-A");
    pair.good = [](std::uint64_t v) { return (v & 1) == 1; };
    pair.span_qubits = n;
    return pair;
}

EstimationResult run_estimator(EstimatorKind kind, const GroverIterate& iterate,
                               const EstimatorConfig& config, Rng& rng) {
    switch (kind) {
        case EstimatorKind::qsearch: return qsearch(iterate, config, rng);
        case EstimatorKind::est_amp: return est_amp(iterate, config.est_amp_M, rng);
        case EstimatorKind::doubling: return doubling_estimate(iterate, config, rng);
        case EstimatorKind::binary_search: return binary_search_estimate(iterate, rng, config);
    }
    throw ConfigError("unknown estimator");
}

std::string Report::to_json() const { return doc.dump(2) + "\n"; }

std::string Report::to_csv() const {
    const json& runs = doc["runs"];
    std::ostringstream out;
    if (runs.empty()) return out.str();

    std::vector<std::string> columns;
    for (auto it = runs[0].begin(); it != runs[0].end(); ++it) {
        if (it.value().is_structured()) continue;  // transcripts stay JSON-only
        columns.push_back(it.key());
    }
    std::sort(columns.begin(), columns.end());

    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << columns[i];
    }
    out << '\n';
    for (const auto& r : runs) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out << ',';
            const json& v = r.at(columns[i]);
            if (v.is_string()) {
                out << v.get<std::string>();
            } else {
                out << v.dump();
            }
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::json compute_aggregates(const nlohmann::json& doc) {
    const std::string kind = doc["kind"].get<std::string>();
    if (kind == "sweep" || kind == "estimate") return aggregate_estimation_runs(doc);
    if (kind == "comparison" || kind == "prediction") return aggregate_prediction_runs(doc);
    throw IngestError("unknown report kind: " + kind);
}

Report run_estimator_sweep(const ExperimentConfig& config) {
    config.estimator_config.validate();
    if (config.grid.empty()) throw ConfigError("sweep needs a non-empty --grid");
    for (double p : config.grid) {
        if (!(p > 0.0) || p > 1.0) {
            throw ConfigError("grid value " + std::to_string(p) + " outside (0, 1]");
        }
    }
    if (config.repetitions < 1) throw ConfigError("repetitions must be >= 1");

    json runs = json::array();
    std::uint64_t run_index = 0;
    for (double p : config.grid) {
        const OraclePair oracle = make_synthetic_oracle(p, config.qubits);
        for (int rep = 0; rep < config.repetitions; ++rep) {
            Rng rng(derive_run_seed(config.seed, run_index));
            QueryLedger ledger;
            const GroverIterate iterate(oracle.preparation, oracle.good, ledger);
            const EstimationResult est =
                run_estimator(config.estimator, iterate, config.estimator_config, rng);
            runs.push_back(run_record_for_estimation(run_index, p, rep, est, false));
            ++run_index;
        }
    }
    return build_report("sweep", config, std::move(runs));
}

Report run_single_estimate(const ExperimentConfig& config, double true_p) {
    config.estimator_config.validate();
    if (!(true_p > 0.0) || true_p > 1.0) throw ConfigError("--p must lie in (0, 1]");

    const OraclePair oracle = make_synthetic_oracle(true_p, config.qubits);
    Rng rng(derive_run_seed(config.seed, 0));
    QueryLedger ledger;
    const GroverIterate iterate(oracle.preparation, oracle.good, ledger);
    const EstimationResult est =
        run_estimator(config.estimator, iterate, config.estimator_config, rng);

    json runs = json::array();
    runs.push_back(run_record_for_estimation(0, true_p, 0, est, true));
    return build_report("estimate", config, std::move(runs));
}

namespace {

json prediction_record(std::uint64_t run_index, std::uint64_t row_index,
                       const EnsembleModel& model, std::span<const double> x,
                       EstimatorKind estimator, const EstimatorConfig& cfg, Rng& rng) {
    const PredictionReport classical = classical_predict(model, x);
    const PredictionReport prob = probabilistic_predict(model, x, rng);
    const PredictionReport quantum = quantum_predict(model, x, estimator, cfg, rng);

    json r;
    r["run_index"] = run_index;
    r["row_index"] = row_index;
    r["n_classifiers"] = model.size();
    r["classical_answer"] = static_cast<int>(classical.answer);
    r["classical_p"] = classical.p_estimate;
    r["classical_cost"] = classical.cost_units;
    r["probabilistic_answer"] = static_cast<int>(prob.answer);
    r["probabilistic_p"] = prob.p_estimate;
    r["quantum_answer"] = static_cast<int>(quantum.answer);
    r["quantum_method"] = quantum.method;
    r["quantum_p"] = quantum.p_estimate;
    r["quantum_t_estimate"] =
        static_cast<std::int64_t>(std::llround(quantum.p_estimate * model.size()));
    r["quantum_interval_lo"] = quantum.p_segment.lo;
    r["quantum_interval_hi"] = quantum.p_segment.hi;
    r["quantum_interval_closed_hi"] = quantum.p_segment.closed_hi;
    r["quantum_a_applications"] = quantum.queries.a_applications;
    r["quantum_grover_applications"] = quantum.queries.a_inverse_applications;
    r["quantum_measurements"] = quantum.queries.measurements;
    r["quantum_low_confidence"] = quantum.low_confidence;
    r["agree_classical_quantum"] = (classical.answer == quantum.answer);
    r["agree_classical_probabilistic"] = (classical.answer == prob.answer);
    return r;
}

}  // namespace

Report run_prediction_comparison(const ExperimentConfig& config) {
    config.estimator_config.validate();
    const EnsembleModel model = resolve_model(config);

    std::vector<FeatureVector> inputs;
    if (!config.dataset_path.empty()) {
        const Dataset data = ingest_dataset(config.dataset_path);
        std::size_t limit = data.n_rows();
        if (config.row_limit > 0) limit = std::min<std::size_t>(limit, config.row_limit);
        for (std::size_t i = 0; i < limit; ++i) {
            inputs.emplace_back(data.row(i).begin(), data.row(i).end());
        }
    } else {
        inputs.emplace_back();  // constant-p models ignore features
    }

    json runs = json::array();
    std::uint64_t run_index = 0;
    for (std::size_t row = 0; row < inputs.size(); ++row) {
        Rng rng(derive_run_seed(config.seed, run_index));
        runs.push_back(prediction_record(run_index, row, model, inputs[row], config.estimator,
                                         config.estimator_config, rng));
        ++run_index;
    }
    return build_report("comparison", config, std::move(runs));
}

Report run_single_prediction(const ExperimentConfig& config, const FeatureVector& input) {
    config.estimator_config.validate();
    const EnsembleModel model = resolve_model(config);
    Rng rng(derive_run_seed(config.seed, 0));
    json runs = json::array();
    runs.push_back(
        prediction_record(0, 0, model, input, config.estimator, config.estimator_config, rng));
    return build_report("prediction", config, std::move(runs));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto begin = cell.find_first_not_of(" \t\r");
        const auto end = cell.find_last_not_of(" \t\r");
        cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t column) {
    if (cell.empty()) {
        throw IngestError("line " + std::to_string(line_no) + ", column " +
                          std::to_string(column) + ": missing value");
    }
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + cell.size()) {
        throw IngestError("line " + std::to_string(line_no) + ", column " +
                          std::to_string(column) + ": '" + cell + "' is not numeric");
    }
    return v;
}

}  // namespace

Dataset ingest_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty dataset: " + path);
    const std::size_t columns = split_csv_line(line).size();
    if (columns < 2) {
        throw IngestError(path + ": need at least one feature column plus the label column");
    }

    Dataset data;
    data.n_features = columns - 1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != columns) {
            throw IngestError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " columns, found " +
                              std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c + 1 < columns; ++c) {
            data.values.push_back(parse_cell(cells[c], line_no, c + 1));
        }
        const double label = parse_cell(cells[columns - 1], line_no, columns);
        if (label != 1.0 && label != 2.0) {
            throw IngestError("line " + std::to_string(line_no) + ": label " +
                              cells[columns - 1] + " not in {1, 2}");
        }
        data.labels.push_back(static_cast<int>(label));
    }
    if (data.labels.empty()) throw IngestError("no data rows in " + path);
    return data;
}

void save_model(const EnsembleModel& model, const std::string& path) {
    json doc;
    doc["version"] = 1;
    bool all_constant = true;
    bool all_stumps = true;
    for (const auto& c : model.classifiers()) {
        if (c.stump_params().has_value()) {
            all_constant = false;
        } else {
            all_stumps = false;
        }
    }
    if (all_constant) {
        doc["kind"] = "p-vector";
        json p = json::array();
        for (const auto& c : model.classifiers()) p.push_back(c.constant_p());
        doc["p"] = p;
    } else if (all_stumps) {
        doc["kind"] = "stumps";
        json stumps = json::array();
        for (const auto& c : model.classifiers()) {
            const Stump& s = *c.stump_params();
            json e;
            e["feature"] = s.feature;
            e["threshold"] = s.threshold;
            e["p_below"] = s.p_below;
            e["p_above"] = s.p_above;
            stumps.push_back(e);
        }
        doc["stumps"] = stumps;
    } else {
        throw ConfigError("mixed constant/stump models have no file form");
    }

    std::ofstream out(path);
    if (!out) throw IngestError("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
}

EnsembleModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IngestError(path + ": " + e.what());
    }
    if (!doc.contains("version") || doc["version"].get<int>() != 1) {
        throw IngestError(path + ": unsupported model version");
    }
    const std::string kind = doc.value("kind", "");
    if (kind == "p-vector") {
        std::vector<double> p = doc.at("p").get<std::vector<double>>();
        return EnsembleModel::from_probabilities(p);
    }
    if (kind == "stumps") {
        std::vector<Classifier> cs;
        for (const auto& e : doc.at("stumps")) {
            Stump s;
            s.feature = e.at("feature").get<int>();
            s.threshold = e.at("threshold").get<double>();
            s.p_below = e.at("p_below").get<double>();
            s.p_above = e.at("p_above").get<double>();
            cs.push_back(Classifier::stump(s));
        }
        return EnsembleModel(std::move(cs));
    }
    throw IngestError(path + ": unknown model kind '" + kind + "'");
}

EnsembleModel resolve_model(const ExperimentConfig& config) {
    if (!config.p_vector.empty()) {
        return EnsembleModel::from_probabilities(config.p_vector);
    }
    if (!config.model_path.empty()) {
        return load_model(config.model_path);
    }
    if (!config.dataset_path.empty()) {
        if (config.n_stumps < 1) {
            throw ConfigError("training from a dataset needs --n-stumps >= 1");
        }
        const Dataset data = ingest_dataset(config.dataset_path);
        Rng rng(derive_run_seed(config.seed, kModelStreamIndex));
        return train_stumps(data, config.n_stumps, rng);
    }
    throw ConfigError("no ensemble source: give --p-vector, --model, or --dataset");
}

Report load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open report: " + path);
    Report report;
    try {
        in >> report.doc;
    } catch (const json::exception& e) {
        throw IngestError(path + ": " + e.what());
    }
    for (const char* key : {"artifact", "version", "kind", "config", "runs", "aggregates"}) {
        if (!report.doc.contains(key)) {
            throw IngestError(path + ": report is missing '" + std::string(key) + "'");
        }
    }
    json recomputed;
    try {
        recomputed = compute_aggregates(report.doc);
    } catch (const json::exception& e) {
        throw IngestError(path + ": malformed run records (" + e.what() + ")");
    }
    if (recomputed != report.doc["aggregates"]) {
        throw IngestError(path + ": stored aggregates do not match the run records");
    }
    return report;
}

}  // namespace qae::harness
