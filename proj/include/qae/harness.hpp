#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "qae/ensemble.hpp"

namespace qae::harness {

// Fully determines an experiment: same config + same build -> identical report.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    EstimatorKind estimator = EstimatorKind::binary_search;
    EstimatorConfig estimator_config;

    // Synthetic-oracle runs (estimate / sweep).
    int qubits = 1;
    std::vector<double> grid;
    int repetitions = 1;

    // Ensemble source (predict / compare): first match wins.
    std::vector<double> p_vector;
    std::string model_path;
    std::string dataset_path;
    int n_stumps = 0;
    int row_limit = 0;  // compare: 0 = all rows

    nlohmann::json echo() const;
};

struct OraclePair {
    Unitary preparation;
    GoodStatePredicate good;
    int span_qubits = 1;
};

// Single-good-state preparation for sweeps: a rotation putting amplitude
// sqrt(true_p) on the odd basis states of qubit 0, spread uniformly over any
// dummy qubits above it. chi marks odd indices.
OraclePair make_synthetic_oracle(double true_p, int total_qubits);

// Dispatch one estimator run (est_amp reads M from the config).
EstimationResult run_estimator(EstimatorKind kind, const GroverIterate& iterate,
                               const EstimatorConfig& config, Rng& rng);

// Machine-readable experiment report. The JSON document layout is frozen:
// { "artifact", "artifact_version", "version", "kind", "config",
//   "runs": [...], "aggregates": {...} } with aggregates always recomputable
// from the runs array.
struct Report {
    nlohmann::json doc;

    std::string to_json() const;
    std::string to_csv() const;  // flattens runs[]; scalar fields only
};

Report run_estimator_sweep(const ExperimentConfig& config);
Report run_single_estimate(const ExperimentConfig& config, double true_p);
Report run_prediction_comparison(const ExperimentConfig& config);
Report run_single_prediction(const ExperimentConfig& config, const FeatureVector& input);

// CSV ingestion: header row, numeric feature cells, final column is the
// class label in {1, 2}. Rejects missing values, malformed cells, ragged
// rows, and non-binary labels with row/column diagnostics.
Dataset ingest_dataset(const std::string& path);

// Model files: {"version":1,"kind":"p-vector","p":[...]} or
// {"version":1,"kind":"stumps","stumps":[{feature,threshold,p_below,p_above}]}.
void save_model(const EnsembleModel& model, const std::string& path);
EnsembleModel load_model(const std::string& path);

// Resolve the configured ensemble source; stump training draws from a stream
// derived from the root seed so it never perturbs the run streams.
EnsembleModel resolve_model(const ExperimentConfig& config);

// Load a stored report and verify that its aggregates match a recomputation
// from its runs; throws IngestError on schema or consistency failures.
Report load_report(const std::string& path);

nlohmann::json compute_aggregates(const nlohmann::json& doc);

}  // namespace qae::harness
