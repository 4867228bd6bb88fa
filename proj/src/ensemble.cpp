#include "qae/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace qae {

Classifier Classifier::constant(double p, double cost) {
    Classifier c;
    c.p_ = p;
    c.cost_ = cost;
    return c;
}

Classifier Classifier::stump(Stump params, double cost) {
    Classifier c;
    c.stump_ = params;
    c.cost_ = cost;
    return c;
}

double Classifier::predict(std::span<const double> features) const {
    if (!stump_) return p_;
    const auto& s = *stump_;
    if (s.feature < 0 || static_cast<std::size_t>(s.feature) >= features.size()) {
        throw RangeError("stump feature index " + std::to_string(s.feature) +
                         " out of range for " + std::to_string(features.size()) + " features");
    }
    return features[s.feature] < s.threshold ? s.p_below : s.p_above;
}

EnsembleModel::EnsembleModel(std::vector<Classifier> classifiers)
    : classifiers_(std::move(classifiers)) {
    if (classifiers_.empty()) {
        throw ConfigError("an ensemble needs at least one classifier");
    }
}

std::vector<double> EnsembleModel::evaluate_all(std::span<const double> x) const {
    std::vector<double> p;
    p.reserve(classifiers_.size());
    for (const auto& c : classifiers_) p.push_back(c.predict(x));
    return p;
}

double EnsembleModel::total_cost() const {
    double t = 0.0;
    for (const auto& c : classifiers_) t += c.cost();
    return t;
}

EnsembleModel EnsembleModel::from_probabilities(std::span<const double> p_values) {
    std::vector<Classifier> cs;
    cs.reserve(p_values.size());
    for (double p : p_values) {
        if (p < 0.0 || p > 1.0) throw ConfigError("classifier probability outside [0, 1]");
        cs.push_back(Classifier::constant(p));
    }
    return EnsembleModel(std::move(cs));
}

PredictionReport classical_predict(const EnsembleModel& model, std::span<const double> x) {
    const auto p = model.evaluate_all(x);
    std::size_t k1 = 0;
    for (double pi : p) {
        if (pi >= 0.5) ++k1;
    }
    const std::size_t k2 = p.size() - k1;

    PredictionReport report;
    report.method = "classical";
    report.threshold_passed = (k1 >= k2);
    report.answer = report.threshold_passed ? ClassLabel::class1 : ClassLabel::class2;
    report.p_estimate = static_cast<double>(k1) / static_cast<double>(p.size());
    report.p_segment = ProbabilitySegment{report.p_estimate, report.p_estimate, true};
    report.cost_units = model.total_cost();
    report.classical_equivalent_cost = model.total_cost();
    return report;
}

PredictionReport probabilistic_predict(const EnsembleModel& model, std::span<const double> x,
                                       Rng& rng) {
    const std::size_t i = rng.uniform_below(model.size());
    const double pi = model.classifiers()[i].predict(x);

    PredictionReport report;
    report.method = "probabilistic";
    report.threshold_passed = (pi >= 0.5);
    report.answer = report.threshold_passed ? ClassLabel::class1 : ClassLabel::class2;
    report.p_estimate = pi;
    report.p_segment = ProbabilitySegment{pi, pi, true};
    report.cost_units = model.classifiers()[i].cost();
    report.classical_equivalent_cost = model.total_cost();
    return report;
}

namespace {

int ceil_log2(std::uint64_t n) {
    int m = 0;
    while ((std::uint64_t{1} << m) < n) ++m;
    return m;
}

// How many indices < N share the length-L top-bit prefix `v` (m index bits).
std::uint64_t prefix_population(std::uint64_t N, int m, int L, std::uint64_t v) {
    const std::uint64_t width = std::uint64_t{1} << (m - L);
    const std::uint64_t start = v * width;
    if (start >= N) return 0;
    return std::min(width, N - start);
}

struct PairRotation {
    double c = 1.0;  // cos
    double s = 0.0;  // sin
};

inline void rotate_pair(Complex& a0, Complex& a1, double c, double s) {
    const Complex t0 = c * a0 - s * a1;
    const Complex t1 = s * a0 + c * a1;
    a0 = t0;
    a1 = t1;
}

}  // namespace

EnsembleOracle build_ensemble_oracle(const EnsembleModel& model, std::span<const double> x,
                                     bool pad_to_power_of_two) {
    const std::uint64_t N = model.size();
    const int m = ceil_log2(N);
    if (!pad_to_power_of_two && (N & (N - 1)) != 0) {
        throw ConfigError("ensemble size " + std::to_string(N) +
                          " is not a power of two and padding is disabled");
    }

    const std::vector<double> p = model.evaluate_all(x);
    double mean = 0.0;
    for (double pi : p) {
        if (pi < 0.0 || pi > 1.0) throw ConfigError("classifier returned p outside [0, 1]");
        mean += pi;
    }
    mean /= static_cast<double>(N);

    // Uniform superposition over the first N index values: a binary tree of
    // rotations, one pass per index bit, angles set by how many live indices
    // fall on each side of the bit.
    std::vector<std::vector<PairRotation>> tree(m);
    for (int level = 0; level < m; ++level) {
        tree[level].resize(std::uint64_t{1} << level);
        for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << level); ++prefix) {
            const auto c0 = prefix_population(N, m, level + 1, prefix << 1);
            const auto c1 = prefix_population(N, m, level + 1, (prefix << 1) | 1);
            PairRotation rot;
            if (c0 + c1 > 0) {
                const double total = static_cast<double>(c0 + c1);
                rot.c = std::sqrt(static_cast<double>(c0) / total);
                rot.s = std::sqrt(static_cast<double>(c1) / total);
            }
            tree[level][prefix] = rot;
        }
    }

    // Class-qubit rotation per index: amplitude sqrt(p_i) stays on |0>.
    std::vector<PairRotation> leaf(N);
    for (std::uint64_t i = 0; i < N; ++i) {
        leaf[i].c = std::sqrt(p[i]);
        leaf[i].s = std::sqrt(1.0 - p[i]);
    }

    const int span = m + 1;  // class qubit is qubit 0, index bits above it
    auto forward = [tree, leaf, m](std::span<Complex> block) {
        for (int level = 0; level < m; ++level) {
            const int beta = m - level;  // span bit of the index bit being set
            const std::uint64_t bit = std::uint64_t{1} << beta;
            for (std::uint64_t v = 0; v < block.size(); ++v) {
                if (v & bit) continue;
                const auto& rot = tree[level][v >> (beta + 1)];
                rotate_pair(block[v], block[v | bit], rot.c, rot.s);
            }
        }
        for (std::uint64_t i = 0; i < leaf.size(); ++i) {
            rotate_pair(block[i << 1], block[(i << 1) | 1], leaf[i].c, leaf[i].s);
        }
    };
    auto inverse = [tree, leaf, m](std::span<Complex> block) {
        for (std::uint64_t i = 0; i < leaf.size(); ++i) {
            rotate_pair(block[i << 1], block[(i << 1) | 1], leaf[i].c, -leaf[i].s);
        }
        for (int level = m - 1; level >= 0; --level) {
            const int beta = m - level;
            const std::uint64_t bit = std::uint64_t{1} << beta;
            for (std::uint64_t v = 0; v < block.size(); ++v) {
                if (v & bit) continue;
                const auto& rot = tree[level][v >> (beta + 1)];
                rotate_pair(block[v], block[v | bit], rot.c, -rot.s);
            }
        }
    };

    EnsembleOracle oracle;
    oracle.preparation = Unitary(span, std::move(forward), std::move(inverse), "ensemble-A");
    oracle.good = [](std::uint64_t v) { return (v & 1) == 0; };
    oracle.span_qubits = span;
    oracle.index_qubits = m;
    oracle.mean_p = mean;
    oracle.probabilities = p;
    return oracle;
}

PredictionReport quantum_predict(const EnsembleModel& model, std::span<const double> x,
                                 EstimatorKind estimator, const EstimatorConfig& config,
                                 Rng& rng) {
    const EnsembleOracle oracle = build_ensemble_oracle(model, x);
    QueryLedger ledger;
    const GroverIterate iterate(oracle.preparation, oracle.good, ledger);

    EstimatorConfig cfg = config;
    EstimationResult est;
    switch (estimator) {
        case EstimatorKind::qsearch:
            est = qsearch(iterate, cfg, rng);
            break;
        case EstimatorKind::est_amp:
            est = est_amp(iterate, cfg.est_amp_M, rng);
            break;
        case EstimatorKind::doubling:
            est = doubling_estimate(iterate, cfg, rng);
            break;
        case EstimatorKind::binary_search:
            cfg.stop_at_first_probe = true;  // the answer is fixed by the p = 1/2 probe
            est = binary_search_estimate(iterate, rng, cfg);
            break;
    }

    PredictionReport report;
    report.method = std::string("quantum-") + estimator_name(estimator);
    report.p_estimate = est.point_estimate;
    report.p_segment = est.interval;
    report.threshold_passed = (est.point_estimate >= 0.5);
    report.answer = report.threshold_passed ? ClassLabel::class1 : ClassLabel::class2;
    report.queries = ledger.snapshot();
    report.cost_units = static_cast<double>(report.queries.a_applications);
    report.classical_equivalent_cost = model.total_cost();
    report.low_confidence = est.floor_hit && est.interval.lo < 0.5 &&
                            (est.interval.closed_hi ? est.interval.hi >= 0.5
                                                    : est.interval.hi > 0.5);
    return report;
}

EnsembleModel train_stumps(const Dataset& data, int n_stumps, Rng& rng) {
    if (n_stumps < 1) throw ConfigError("n_stumps must be >= 1");
    if (data.n_rows() == 0 || data.n_features == 0) {
        throw TrainingError("empty dataset");
    }
    bool has1 = false;
    bool has2 = false;
    for (int label : data.labels) {
        if (label == 1) has1 = true;
        if (label == 2) has2 = true;
    }
    if (!has1 || !has2) {
        throw TrainingError("dataset holds a single class; nothing to separate");
    }

    const std::size_t n = data.n_rows();
    std::vector<Classifier> stumps;
    stumps.reserve(n_stumps);

    std::vector<std::size_t> sample(n);
    std::vector<std::pair<double, int>> column(n);  // (feature value, label)

    for (int s = 0; s < n_stumps; ++s) {
        for (std::size_t i = 0; i < n; ++i) sample[i] = rng.uniform_below(n);

        std::size_t ones = 0;
        for (std::size_t i : sample) {
            if (data.labels[i] == 1) ++ones;
        }
        const double sample_p1 = static_cast<double>(ones) / static_cast<double>(n);

        double best_impurity = std::numeric_limits<double>::infinity();
        Stump best{0, std::numeric_limits<double>::infinity(), sample_p1, sample_p1};

        for (std::size_t f = 0; f < data.n_features; ++f) {
            for (std::size_t i = 0; i < n; ++i) {
                column[i] = {data.row(sample[i])[f], data.labels[sample[i]]};
            }
            std::sort(column.begin(), column.end());

            std::size_t left_n = 0;
            std::size_t left_ones = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_n;
                if (column[i].second == 1) ++left_ones;
                if (column[i].first == column[i + 1].first) continue;

                const std::size_t right_n = n - left_n;
                const std::size_t right_ones = ones - left_ones;
                const double ql = static_cast<double>(left_ones) / static_cast<double>(left_n);
                const double qr = static_cast<double>(right_ones) / static_cast<double>(right_n);
                const double impurity =
                    (static_cast<double>(left_n) * 2.0 * ql * (1.0 - ql) +
                     static_cast<double>(right_n) * 2.0 * qr * (1.0 - qr)) /
                    static_cast<double>(n);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                    best.p_below = ql;
                    best.p_above = qr;
                }
            }
        }
        stumps.push_back(Classifier::stump(best));
    }
    return EnsembleModel(std::move(stumps));
}

}  // namespace qae
