#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "qae/grover.hpp"

namespace qae {

// Probability segment [lo, hi) or [lo, hi].
struct ProbabilitySegment {
    double lo = 0.0;
    double hi = 1.0;
    bool closed_hi = false;

    bool contains(double p) const {
        return p >= lo && (closed_hi ? p <= hi : p < hi);
    }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool operator==(const ProbabilitySegment& other) const {
        return lo == other.lo && hi == other.hi && closed_hi == other.closed_hi;
    }
};

enum class EstimatorKind { qsearch, est_amp, doubling, binary_search };

const char* estimator_name(EstimatorKind kind);
std::optional<EstimatorKind> estimator_from_name(const std::string& name);

struct TrialRecord {
    int round = 0;              // round counter (l, j, or probe ordinal)
    double parameter = 0.0;     // assumed p (doubling / binary search) or M (qsearch / est_amp)
    std::uint64_t iterations = 0;  // Grover iterations applied this round
    std::uint64_t outcome = 0;     // measured register value
    std::optional<bool> good;      // chi verdict; absent for est_amp
};

struct EstimationResult {
    EstimatorKind kind = EstimatorKind::qsearch;
    double point_estimate = 0.0;
    double amplitude_estimate = 0.0;
    ProbabilitySegment interval;
    QueryCounts queries;
    std::vector<TrialRecord> transcript;
    bool floor_hit = false;
};

struct EstimatorConfig {
    double qsearch_growth_c = 1.2;   // growth factor, open interval (1, 2)
    double epsilon = 0.0001;         // probability floor
    std::uint64_t est_amp_M = 64;    // power of two
    int max_rounds = 26;             // qsearch cap: smallest l with c^l >= 1/sqrt(epsilon) at defaults
    int trials_per_check = 1;        // majority-voted probe repetitions (doubling / binary search)
    IterationStrategy strategy = IterationStrategy::table_sqrt;
    bool stop_at_first_probe = false;  // binary search: return right after the p = 1/2 probe

    void validate() const;
};

// Exponential-schedule search with unknown p: a classical first shot, then
// rounds l = 1, 2, ... with M = ceil(c^l) and j drawn uniformly from [1, M].
// Success returns p = 1/j (p = 1 with interval [1/2, 1] for a first-shot hit);
// max_rounds exhaustion returns the [0, epsilon) floor.
EstimationResult qsearch(const GroverIterate& iterate, const EstimatorConfig& config, Rng& rng);

// QFT-based phase estimation of Q: F_M on the control register, lambda_M(Q),
// inverse F_M, measure y, output sin^2(pi y / M). The interval is the k = 1
// error band 2 pi sqrt(a(1-a))/M + pi^2/M^2 clamped to [0, 1]. The ledger is
// charged M-1 controlled applications of Q (worst-case control value).
EstimationResult est_amp(const GroverIterate& iterate, std::uint64_t M, Rng& rng);

// Halving schedule: rounds j = 0, 1, ... probe assumed p = 2^-j until a good
// measurement or the epsilon floor (2^-j < epsilon).
EstimationResult doubling_estimate(const GroverIterate& iterate, const EstimatorConfig& config,
                                   Rng& rng);

// Bisection of [0, 1] on probe success/failure. Terminates when
// ceil(sqrt(1/left)) == ceil(sqrt(1/right)) (left = 0 never equal), when
// right drops below 0.01, or when the midpoint stops making progress.
EstimationResult binary_search_estimate(const GroverIterate& iterate, Rng& rng,
                                        const EstimatorConfig& config = {});

// Segment ladders used when reporting estimator accuracy.
// Halving ladder: [1/2, 1], [1/4, 1/2), [1/8, 1/4), ...
ProbabilitySegment doubling_ladder_row(double p);
// Bisection ladder rows: [1/2, 1], [1/4, 1/2), [1/8, 1/4), [1/16, 1/8),
// [3/64, 1/16), [1/32, 3/64), [3/128, 1/32), [1/64, 3/128); probabilities
// below the last row map onto [0, 1/64).
ProbabilitySegment binary_search_ladder_row(double p);

}  // namespace qae
