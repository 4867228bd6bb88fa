#pragma once
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qae/estimators.hpp"

namespace qae {

enum class ClassLabel : int { class1 = 1, class2 = 2 };

using FeatureVector = std::vector<double>;

// One-feature threshold classifier: predicts p_below when the feature value
// is < threshold and p_above otherwise (leaf values are P(Class1)).
struct Stump {
    int feature = 0;
    double threshold = 0.0;
    double p_below = 0.5;
    double p_above = 0.5;
};

// Binary classifier mapping a feature vector to P(Class1), plus an abstract
// per-prediction cost tag. Deterministic per input.
class Classifier {
public:
    static Classifier constant(double p, double cost = 1.0);
    static Classifier stump(Stump params, double cost = 1.0);

    double predict(std::span<const double> features) const;
    double cost() const { return cost_; }

    const std::optional<Stump>& stump_params() const { return stump_; }
    double constant_p() const { return p_; }

private:
    std::optional<Stump> stump_;
    double p_ = 0.5;
    double cost_ = 1.0;
};

class EnsembleModel {
public:
    explicit EnsembleModel(std::vector<Classifier> classifiers);

    std::size_t size() const { return classifiers_.size(); }
    const std::vector<Classifier>& classifiers() const { return classifiers_; }

    std::vector<double> evaluate_all(std::span<const double> x) const;
    double total_cost() const;

    static EnsembleModel from_probabilities(std::span<const double> p_values);

private:
    std::vector<Classifier> classifiers_;
};

struct PredictionReport {
    ClassLabel answer = ClassLabel::class2;
    double p_estimate = 0.0;        // scalar decision value
    ProbabilitySegment p_segment;   // segment form when the method yields one
    std::string method;             // "classical", "probabilistic", "quantum-<estimator>"
    QueryCounts queries;
    double cost_units = 0.0;              // this method's cost in T units / A-applications
    double classical_equivalent_cost = 0.0;  // N * T for the same model
    bool threshold_passed = false;  // the p >= 0.5 test that produced `answer`
    bool low_confidence = false;
};

// Hard majority vote over all N classifiers (vote Class1 iff p_i >= 0.5);
// ties go to Class1. Evaluates every classifier: cost N * T.
PredictionReport classical_predict(const EnsembleModel& model, std::span<const double> x);

// Pick one classifier uniformly at random and answer from it alone: cost T.
PredictionReport probabilistic_predict(const EnsembleModel& model, std::span<const double> x,
                                       Rng& rng);

struct EnsembleOracle {
    Unitary preparation;       // A over index qubits + class qubit (qubit 0)
    GoodStatePredicate good;   // class qubit |0> marks Class1
    int span_qubits = 1;
    int index_qubits = 0;
    double mean_p = 0.0;       // (1/N) sum p_i = P(Good) after A
    std::vector<double> probabilities;  // per-classifier p_i evaluated at x
};

// Amplitude encoding of the ensemble at input x: a uniform superposition over
// the first N index values, then a per-index class-qubit rotation that leaves
// amplitude sqrt(p_i) on |0> and sqrt(1 - p_i) on |1>. Classifiers are
// evaluated once here; the cost is charged to construction.
EnsembleOracle build_ensemble_oracle(const EnsembleModel& model, std::span<const double> x,
                                     bool pad_to_power_of_two = true);

// Estimate P(Good) with the chosen estimator and answer by the p >= 0.5 rule.
// With binary_search the answer only depends on the first probe, so the
// bisection exits early and the run costs three A-applications.
PredictionReport quantum_predict(const EnsembleModel& model, std::span<const double> x,
                                 EstimatorKind estimator, const EstimatorConfig& config, Rng& rng);

struct Dataset {
    std::size_t n_features = 0;
    std::vector<double> values;  // row-major, n_rows x n_features
    std::vector<int> labels;     // 1 or 2

    std::size_t n_rows() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * n_features, n_features);
    }
};

// Bootstrap-trained one-feature stumps with leaf-frequency p-values.
// Throws TrainingError when the dataset holds a single class.
EnsembleModel train_stumps(const Dataset& data, int n_stumps, Rng& rng);

}  // namespace qae
