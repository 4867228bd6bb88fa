#include "qae/estimators.hpp"

#include <cmath>
#include <string>

namespace qae {

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::qsearch: return "qsearch";
        case EstimatorKind::est_amp: return "est-amp";
        case EstimatorKind::doubling: return "doubling";
        case EstimatorKind::binary_search: return "binary-search";
    }
    return "unknown";
}

std::optional<EstimatorKind> estimator_from_name(const std::string& name) {
    if (name == "qsearch") return EstimatorKind::qsearch;
    if (name == "est-amp" || name == "est_amp") return EstimatorKind::est_amp;
    if (name == "doubling") return EstimatorKind::doubling;
    if (name == "binary-search" || name == "binary_search") return EstimatorKind::binary_search;
    return std::nullopt;
}

void EstimatorConfig::validate() const {
    if (!(qsearch_growth_c > 1.0) || !(qsearch_growth_c < 2.0)) {
        throw ConfigError("growth factor c must lie in (1, 2)");
    }
    if (!(epsilon > 0.0)) {
        throw ConfigError("epsilon must be positive");
    }
    if (est_amp_M < 2 || (est_amp_M & (est_amp_M - 1)) != 0) {
        throw ConfigError("M must be a power of two >= 2");
    }
    if (max_rounds < 1) {
        throw ConfigError("max_rounds must be >= 1");
    }
    if (trials_per_check < 1) {
        throw ConfigError("trials_per_check must be >= 1");
    }
}

namespace {

std::uint64_t ceil_sqrt_inverse(double p) {
    return static_cast<std::uint64_t>(std::ceil(std::sqrt(1.0 / p) - 1e-12));
}

// One measured shot: prepare A|0>, check chi on the outcome.
bool classical_shot(const GroverIterate& iterate, Rng& rng, std::uint64_t& outcome) {
    StateVector state = prepare_zero(iterate.span_qubits());
    iterate.preparation().apply(state);
    iterate.ledger().count_a();
    const MeasurementOutcome out = measure(state, QubitRange{0, state.n_qubits()}, rng);
    iterate.ledger().count_measurement();
    outcome = out.basis_index;
    const bool good = iterate.predicate()(out.basis_index);
    iterate.ledger().count_oracle();
    return good;
}

// Probe at an assumed probability, majority-voted over trials_per_check.
bool majority_probe(const GroverIterate& iterate, double assumed_p, Rng& rng,
                    const EstimatorConfig& config, TrialRecord& record) {
    int successes = 0;
    AmplifyOutcome last;
    for (int t = 0; t < config.trials_per_check; ++t) {
        last = amplify_assuming(iterate, assumed_p, rng, {}, config.strategy);
        if (last.found) ++successes;
    }
    record.parameter = assumed_p;
    record.iterations = last.iterations;
    record.outcome = last.outcome.basis_index;
    const bool verdict = 2 * successes > config.trials_per_check;
    record.good = verdict;
    return verdict;
}

}  // namespace

EstimationResult qsearch(const GroverIterate& iterate, const EstimatorConfig& config, Rng& rng) {
    config.validate();
    EstimationResult result;
    result.kind = EstimatorKind::qsearch;

    // Step 1: classical first sample.
    std::uint64_t outcome = 0;
    bool good = classical_shot(iterate, rng, outcome);
    result.transcript.push_back(TrialRecord{0, 1.0, 0, outcome, good});
    if (good) {
        // Zero-iteration success: p = 1/j is undefined (no j was drawn); a
        // first-shot hit is the j = 1 class of evidence, reported as [1/2, 1].
        result.point_estimate = 1.0;
        result.amplitude_estimate = 1.0;
        result.interval = ProbabilitySegment{0.5, 1.0, true};
        result.queries = iterate.ledger().snapshot();
        return result;
    }

    for (int l = 1; l <= config.max_rounds; ++l) {
        const auto M = static_cast<std::uint64_t>(std::ceil(std::pow(config.qsearch_growth_c, l)));
        StateVector state = prepare_zero(iterate.span_qubits());
        iterate.preparation().apply(state);
        iterate.ledger().count_a();

        const std::uint64_t j = rng.uniform_range(1, M);
        for (std::uint64_t k = 0; k < j; ++k) apply_grover_iterate(state, iterate);

        const MeasurementOutcome out = measure(state, QubitRange{0, state.n_qubits()}, rng);
        iterate.ledger().count_measurement();
        good = iterate.predicate()(out.basis_index);
        iterate.ledger().count_oracle();
        result.transcript.push_back(
            TrialRecord{l, static_cast<double>(M), j, out.basis_index, good});

        if (good) {
            result.point_estimate = 1.0 / static_cast<double>(j);
            result.amplitude_estimate = std::sqrt(result.point_estimate);
            // Success after j iterations means the rotation reached O(1)
            // amplitude within (2j+1) steps, so p is usually >= 1/(2j+1)^2.
            const double lo = 1.0 / static_cast<double>((2 * j + 1) * (2 * j + 1));
            result.interval = ProbabilitySegment{lo, 1.0, true};
            result.queries = iterate.ledger().snapshot();
            return result;
        }
    }

    result.point_estimate = 0.0;
    result.amplitude_estimate = 0.0;
    result.interval = ProbabilitySegment{0.0, config.epsilon, false};
    result.floor_hit = true;
    result.queries = iterate.ledger().snapshot();
    return result;
}

EstimationResult est_amp(const GroverIterate& iterate, std::uint64_t M, Rng& rng) {
    if (M < 2 || (M & (M - 1)) != 0) {
        throw ConfigError("M must be a power of two >= 2");
    }
    int m = 0;
    while ((std::uint64_t{1} << m) < M) ++m;
    const int span = iterate.span_qubits();
    if (span + m > StateVector::kDefaultMaxQubits) {
        throw CapacityError("Est_Amp needs " + std::to_string(span + m) + " qubits, max is " +
                            std::to_string(StateVector::kDefaultMaxQubits));
    }

    EstimationResult result;
    result.kind = EstimatorKind::est_amp;

    StateVector state = prepare_zero(span + m);
    iterate.preparation().apply(state);  // only the zero block is populated
    iterate.ledger().count_a();

    const QubitRange control{span, m};
    apply_qft(state, control);
    apply_controlled_powers(state, control, iterate.as_unitary());
    // Worst-case accounting for lambda_M(Q): M-1 controlled applications of Q,
    // each carrying one A, one A^-1, and a full oracle sweep of the target.
    iterate.ledger().count_a(M - 1);
    iterate.ledger().count_a_inverse(M - 1);
    iterate.ledger().count_oracle((M - 1) << span);
    apply_inverse_qft(state, control);

    const MeasurementOutcome out = measure(state, control, rng);
    iterate.ledger().count_measurement();
    const auto y = out.basis_index;

    const double s = std::sin(PI * static_cast<double>(y) / static_cast<double>(M));
    const double a_tilde = s * s;
    const double err = 2.0 * PI * std::sqrt(a_tilde * (1.0 - a_tilde)) / static_cast<double>(M) +
                       PI * PI / (static_cast<double>(M) * static_cast<double>(M));

    result.point_estimate = a_tilde;
    result.amplitude_estimate = std::abs(s);
    result.interval =
        ProbabilitySegment{std::max(0.0, a_tilde - err), std::min(1.0, a_tilde + err), true};
    result.transcript.push_back(
        TrialRecord{0, static_cast<double>(M), M - 1, y, std::nullopt});
    result.queries = iterate.ledger().snapshot();
    return result;
}

EstimationResult doubling_estimate(const GroverIterate& iterate, const EstimatorConfig& config,
                                   Rng& rng) {
    config.validate();
    EstimationResult result;
    result.kind = EstimatorKind::doubling;

    for (int j = 0;; ++j) {
        const double assumed = std::ldexp(1.0, -j);
        if (assumed < config.epsilon) {
            // Epsilon floor: report the last assumed p as the point value
            // inside the [0, epsilon) segment.
            result.point_estimate = assumed;
            result.amplitude_estimate = std::sqrt(assumed);
            result.interval = ProbabilitySegment{0.0, config.epsilon, false};
            result.floor_hit = true;
            break;
        }

        TrialRecord record;
        record.round = j;
        const bool good = majority_probe(iterate, assumed, rng, config, record);
        result.transcript.push_back(record);

        if (good) {
            result.point_estimate = assumed;
            result.amplitude_estimate = std::sqrt(assumed);
            if (j <= 1) {
                // Rounds 0 and 1 both land in the top ladder row [1/2, 1].
                result.interval = ProbabilitySegment{0.5, 1.0, true};
            } else {
                result.interval = ProbabilitySegment{assumed, std::ldexp(1.0, -(j - 1)), false};
            }
            break;
        }
    }

    result.queries = iterate.ledger().snapshot();
    return result;
}

EstimationResult binary_search_estimate(const GroverIterate& iterate, Rng& rng,
                                        const EstimatorConfig& config) {
    config.validate();
    EstimationResult result;
    result.kind = EstimatorKind::binary_search;

    double left = 0.0;
    double right = 1.0;

    // Steps 1-3: the p = 1/2 probe decides the [1/2, 1] row outright.
    TrialRecord first;
    first.round = 0;
    const bool first_good = majority_probe(iterate, 0.5, rng, config, first);
    result.transcript.push_back(first);
    if (first_good) {
        result.interval = ProbabilitySegment{0.5, 1.0, true};
        result.point_estimate = result.interval.midpoint();
        result.amplitude_estimate = std::sqrt(result.point_estimate);
        result.queries = iterate.ledger().snapshot();
        return result;
    }
    right = 0.5;

    constexpr int kMaxProbes = 256;
    if (!config.stop_at_first_probe) {
        for (int round = 1; round <= kMaxProbes; ++round) {
            if (right < 0.01) break;  // segments below 1% are not useful
            if (left > 0.0 && ceil_sqrt_inverse(left) == ceil_sqrt_inverse(right)) break;
            const double mid = 0.5 * (left + right);
            if (mid <= left || mid >= right) break;  // no numeric progress left

            TrialRecord record;
            record.round = round;
            const bool good = majority_probe(iterate, mid, rng, config, record);
            result.transcript.push_back(record);
            if (good) {
                left = mid;
            } else {
                right = mid;
            }
        }
    }

    result.interval = ProbabilitySegment{left, right, false};
    result.point_estimate = result.interval.midpoint();
    result.amplitude_estimate = std::sqrt(result.point_estimate);
    result.floor_hit = (left == 0.0 && right < 0.01);
    result.queries = iterate.ledger().snapshot();
    return result;
}

ProbabilitySegment doubling_ladder_row(double p) {
    if (p >= 0.5) return ProbabilitySegment{0.5, 1.0, true};
    for (int k = 1; k < 64; ++k) {
        const double hi = std::ldexp(1.0, -k);
        const double lo = std::ldexp(1.0, -(k + 1));
        if (p >= lo && p < hi) return ProbabilitySegment{lo, hi, false};
    }
    return ProbabilitySegment{0.0, std::ldexp(1.0, -64), false};
}

ProbabilitySegment binary_search_ladder_row(double p) {
    static const ProbabilitySegment rows[] = {
        {0.5, 1.0, true},           {0.25, 0.5, false},       {0.125, 0.25, false},
        {0.0625, 0.125, false},     {0.046875, 0.0625, false}, {0.03125, 0.046875, false},
        {0.0234375, 0.03125, false}, {0.015625, 0.0234375, false},
    };
    for (const auto& row : rows) {
        if (row.contains(p)) return row;
    }
    return ProbabilitySegment{0.0, 0.015625, false};
}

}  // namespace qae
