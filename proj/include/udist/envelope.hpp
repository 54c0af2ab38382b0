#pragma once

// Block-constrained subsequence spaces S(I, m), the ratio measures pi_N built
// from q_j = m_j / b_j, the envelope F_pi and the domination test mu <= F_pi o lambda.

#include "udist/empirical.hpp"
#include "udist/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace udist {

/// A rule producing b_j or m_j for blocks j = 1, 2, ...
class Schedule {
public:
    struct List {
        std::vector<std::uint64_t> values;
    };
    struct Constant {
        std::uint64_t value;
    };
    /// slope * j + offset
    struct Linear {
        std::uint64_t slope;
        std::uint64_t offset;
    };
    /// offset + scale * floor(log2(j + 1))
    struct Log {
        std::uint64_t scale;
        std::uint64_t offset;
    };
    /// ceil or floor of b_j * num / den; only meaningful for multiplicities.
    struct Ratio {
        std::uint64_t num;
        std::uint64_t den;
        bool round_up;
    };
    using Rule = std::variant<List, Constant, Linear, Log, Ratio>;

    Schedule(Rule rule); // NOLINT: implicit on purpose, schedules are spelled as rules

    /// Value for block j (1-based); block_length is b_j, used by Ratio rules.
    std::uint64_t at(std::uint64_t j, std::uint64_t block_length) const;
    /// Number of blocks a List rule covers; nullopt for formulas.
    std::optional<std::uint64_t> horizon() const;
    const Rule& rule() const noexcept { return rule_; }

private:
    Rule rule_;
};

/// Materialized block data for j = 1..J, with a_0 = M_0 = 0.
class BlockTable {
public:
    BlockTable(std::vector<std::uint64_t> block_lengths, std::vector<std::uint64_t> multiplicities);

    std::uint64_t blocks() const noexcept { return b_.size(); }
    std::uint64_t b(std::uint64_t j) const { return b_.at(j - 1); }
    std::uint64_t m(std::uint64_t j) const { return m_.at(j - 1); }
    /// a_j = b_1 + ... + b_j; block j is the index range (a_{j-1}, a_j].
    std::uint64_t a(std::uint64_t j) const { return a_.at(j); }
    /// M_j = m_1 + ... + m_j.
    std::uint64_t M(std::uint64_t j) const { return M_.at(j); }
    Rational q(std::uint64_t j) const;
    /// Block containing index n >= 1, or 0 when n lies beyond a_J.
    std::uint64_t block_of(std::uint64_t n) const;

private:
    std::vector<std::uint64_t> b_;
    std::vector<std::uint64_t> m_;
    std::vector<std::uint64_t> a_;
    std::vector<std::uint64_t> M_;
};

class SubsequenceSpaceSpec {
public:
    SubsequenceSpaceSpec(Schedule block_lengths, Schedule multiplicities);
    static SubsequenceSpaceSpec from_lists(std::vector<std::uint64_t> block_lengths,
                                           std::vector<std::uint64_t> multiplicities);

    std::uint64_t block_length(std::uint64_t j) const;
    std::uint64_t multiplicity(std::uint64_t j) const;
    /// Materializes blocks 1..J; throws std::invalid_argument if some m_j > b_j
    /// or b_j == 0.
    BlockTable materialize(std::uint64_t blocks) const;
    std::optional<std::uint64_t> horizon() const;

    const Schedule& block_schedule() const noexcept { return blocks_; }
    const Schedule& multiplicity_schedule() const noexcept { return multiplicities_; }

private:
    Schedule blocks_;
    Schedule multiplicities_;
};

struct AdmissibilityReport {
    std::uint64_t horizon = 0;
    /// Tail starts t_0 = 1 < t_1 < ... (powers of two up to the horizon).
    std::vector<std::uint64_t> tail_starts;
    /// min_{t <= j <= J} b_j for each tail start.
    std::vector<std::uint64_t> tail_min_block;
    /// max_{t <= n <= J, M_n > 0} m_n / M_n for each tail start.
    std::vector<Rational> tail_max_ratio;
    bool blocks_grow = false;
    bool ratios_vanish = false;
    bool admissible_trend() const { return blocks_grow && ratios_vanish; }
    std::vector<std::string> flags;
};

/// Hard error (std::invalid_argument) if some m_j > b_j; otherwise reports the
/// tail behaviour of b_j and m_n / M_n so that divergence / vanishing is visible.
AdmissibilityReport check_admissible(const SubsequenceSpaceSpec& spec, std::uint64_t blocks);

/// Finite discrete probability measure on [0, 1]; atoms sorted by location,
/// distinct, with positive weights summing to 1.
class RatioMeasure {
public:
    struct Atom {
        Rational location;
        Rational weight;
    };

    /// Merges atoms at equal locations and drops zero weights.
    explicit RatioMeasure(std::vector<Atom> atoms);
    static RatioMeasure dirac(const Rational& location);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    /// pi({location})
    Rational mass_at(const Rational& location) const;

    friend bool operator==(const RatioMeasure& a, const RatioMeasure& b);

private:
    std::vector<Atom> atoms_;
};

/// pi_{I,m,N} = M_N^{-1} sum_{j <= N} m_j delta_{q_j}.
RatioMeasure pi_measure(const SubsequenceSpaceSpec& spec, std::uint64_t blocks);
RatioMeasure pi_measure(const BlockTable& table, std::uint64_t blocks);

/// F_pi(t) = pi([0, t]) + t * sum_{q > t} w_q / q, evaluated straight from the
/// definition.
Rational F_pi_eval(const RatioMeasure& pi, const Rational& t);

/// F_pi with prefix sums over the sorted atoms: O(log #atoms) per evaluation.
class EnvelopeFunction {
public:
    explicit EnvelopeFunction(RatioMeasure pi);

    Rational operator()(const Rational& t) const;
    const RatioMeasure& measure() const noexcept { return pi_; }

    struct Row {
        Rational t;
        Rational value;
    };
    /// Values on the grid t = i / (points - 1), i = 0..points-1.
    std::vector<Row> tabulate(std::size_t points) const;

private:
    RatioMeasure pi_;
    std::vector<Rational> locations_;
    std::vector<Rational> mass_below_;     // sum of weights of atoms [0, k)
    std::vector<Rational> scaled_above_;   // sum of w/q over atoms [k, n)
};

enum class DominationMode {
    Exhaustive,  // all 2^s - 1 nonempty unions, s <= 25
    Cellwise,    // single cells only: a necessary condition, used as a pre-filter
    Randomized,  // seeded random unions plus all single cells
    Auto,        // exhaustive up to 25 cells, randomized above
};

struct DominationOptions {
    DominationMode mode = DominationMode::Auto;
    /// Additive slack: a union A passes when mu(A) <= F(lambda(A)) + tolerance.
    Rational tolerance = 0;
    std::uint64_t random_unions = 1u << 20;
    std::uint64_t seed = 0;
};

struct DominationResult {
    bool dominated = true;
    /// Lexicographically first violating union (as a sorted list of cells).
    std::optional<CellSet> violating_union;
    /// max over checked unions of mu(A) - F(lambda(A)).
    Rational max_excess;
    std::uint64_t unions_checked = 0;
    DominationMode mode_used = DominationMode::Exhaustive;
};

inline constexpr std::size_t kMaxExhaustiveCells = 25;

DominationResult envelope_dominates(const MeasureVector& mu, const MeasureVector& lambda, const RatioMeasure& pi,
                                    const DominationOptions& options = {});

/// Inputs to the finite-scale counting estimate behind the subsequence
/// domination theorem.
struct CountingInput {
    /// Cell labels of x_1 .. x_L.
    std::span<const std::size_t> labels;
    /// Chosen subsequence indices n_1 < n_2 < ... (1-based, within the labels).
    std::span<const std::uint64_t> chosen;
    const BlockTable* table = nullptr;
    /// The cell union A and lambda(A).
    CellSet cells;
    Rational lambda_of_cells;
    /// Threshold t0 >= lambda(A), t0 > 0.
    Rational t0;
    Rational epsilon;
    /// Block counts N_k at which the bound is certified.
    std::vector<std::uint64_t> checkpoints;
};

struct CountingCheckpoint {
    std::uint64_t blocks = 0;     // N_k
    std::uint64_t terms = 0;      // M_{N_k}
    std::uint64_t count = 0;      // #{k <= M_{N_k} : x_{n_k} in A}
    std::uint64_t c1 = 0;         // hits in blocks j <= j(eps)
    std::uint64_t c2 = 0;         // hits in later blocks with q_j <= t0
    std::uint64_t c3 = 0;         // hits in later blocks with q_j > t0
    Rational c2_bound;            // M * pi'([0, t0]) restricted to those blocks
    Rational c3_bound;            // t0 * M * int dpi'/t + (eps / t0) * M over those blocks
    Rational envelope;            // F_{pi'_k}(t0)
    Rational bound;               // M * (F + eps/t0 + C1/M)
    bool holds = false;           // count <= bound and both partial bounds hold
};

struct CountingReport {
    /// First block index after which every block's A-frequency is within eps of lambda(A).
    std::uint64_t j_eps = 0;
    std::vector<CountingCheckpoint> checkpoints;
    bool all_hold() const;
};

CountingReport counting_oracle(const CountingInput& input);

/// Computed additive tolerance under which an empirical subsequence measure at
/// block count N must satisfy mu <= F_{pi_N} o lambda for every cell union:
/// (1 / M_N) * sum_{j <= N} min(b_j * TV_j, m_j), where TV_j is the total
/// variation distance between the cell frequencies of the whole block I_j and
/// lambda.
struct DominationTolerance {
    Rational total;
    Rational window_part;   // sum of b_j * TV_j over blocks where it is the smaller term, over M_N
    Rational prefix_part;   // sum of m_j over the remaining blocks, over M_N
};

DominationTolerance subsequence_tolerance(std::span<const std::size_t> labels, const MeasureVector& lambda,
                                          const BlockTable& table, std::uint64_t blocks);

} // namespace udist
