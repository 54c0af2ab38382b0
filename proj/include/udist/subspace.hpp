#pragma once

// The subsequence spaces S(I, m): membership of finite prefixes, seeded
// per-block sampling, and the block-by-block extension that steers the
// empirical measure of x_{n_k} toward a target measure.

#include "udist/empirical.hpp"
#include "udist/envelope.hpp"
#include "udist/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace udist {

/// The cylinder [n_1, ..., n_k]: a strictly increasing index prefix that never
/// takes more than m_j indices from block I_j.
class CylinderPrefix {
public:
    CylinderPrefix() = default;
    /// Throws std::invalid_argument unless the indices increase strictly, lie
    /// inside the table and respect every m_j.
    CylinderPrefix(std::vector<std::uint64_t> indices, const BlockTable& table);

    const std::vector<std::uint64_t>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    /// counts()[j - 1] = number of indices in block j.
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    /// Largest J such that blocks 1..J hold exactly m_j indices each.
    std::uint64_t complete_blocks(const BlockTable& table) const;

private:
    std::vector<std::uint64_t> indices_;
    std::vector<std::uint64_t> counts_;
};

enum class Membership { Member, NotMember, Indeterminate };

struct MembershipResult {
    Membership verdict = Membership::Indeterminate;
    /// First offending block (NotMember) or first unfinished block (Indeterminate); 0 for Member.
    std::uint64_t block = 0;
    std::string reason;
};

/// Does the prefix agree with some member of S(I, m) on blocks 1..J (J = table.blocks())?
/// Member: every block holds exactly m_j indices. NotMember: some block holds more
/// than m_j, an index is out of order, or a block was left short and the prefix
/// moved on. Indeterminate: the prefix simply stops before block J is complete.
MembershipResult validate_membership(const std::vector<std::uint64_t>& prefix, const BlockTable& table);

/// For every block j <= J an m_j-subset of I_j, uniform and independent across
/// blocks, drawn by selection sampling from a seeded splitmix64 stream.
std::vector<std::uint64_t> sample_uniform(const BlockTable& table, std::uint64_t blocks, std::uint64_t seed);

/// Cell of x_n for n >= 1.
using LabelSource = std::function<std::size_t(std::uint64_t)>;

LabelSource labels_of(PointSequence x, CellPartition partition);
LabelSource labels_of(std::vector<std::size_t> labels);

struct ExtensionTarget {
    MeasureVector mu;
    /// Reference measure of the cells (Lebesgue cell lengths for u.d. x).
    MeasureVector lambda;
    RatioMeasure pi;
    Rational epsilon;
};

/// Throws std::invalid_argument if epsilon <= 0, sizes disagree, or mu is not
/// dominated by F_pi o lambda on every cell union.
void validate_target(const ExtensionTarget& target);

/// High-deviation cell set: sort d descending and take the first r cells where
/// d_r - d_{r+1} > eps/s^2 and d_r > eps/s^2; without such a gap, the cells
/// with positive deviation.
CellSet high_deviation_set(const std::vector<Rational>& deviations, const Rational& epsilon);

struct ExtensionBlock {
    std::uint64_t block = 0;
    std::uint64_t terms = 0;            // M_j after the block
    std::vector<Rational> deviations;   // d_i = mu(i) - mu_{x_n, M_j}(i)
    Rational total_deviation;           // D = sum |d_i|
    CellSet y;                          // high-deviation set before the block
    bool y_covers = false;              // Y-cells available in the block >= m_j
};

struct ExtensionResult {
    std::vector<std::uint64_t> indices;
    std::uint64_t j0 = 0;
    std::uint64_t j1 = 0;
    std::uint64_t terms = 0;
    std::vector<Rational> deviations;
    Rational total_deviation;
    Rational max_deviation;
    bool converged = false;
    std::string diagnostic;
    std::vector<ExtensionBlock> trace;
};

struct GreedyOptions {
    /// Largest block index the search may reach.
    std::uint64_t max_block = 4096;
};

/// Extends a prefix valid through block j0. After each block the counts per
/// cell are chosen to minimise D at the new M (largest residual first, ties to
/// the smaller cell, smallest indices within a cell). Stops at the first of the
/// checkpoints j0 + 1, j0 + 2, j0 + 4, ... where max |d_i| < eps and
/// M_{j0} / M < eps / (3 s); otherwise returns the partial result with a diagnostic.
ExtensionResult greedy_extension(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target,
                                 const LabelSource& labels, const SubsequenceSpaceSpec& spec, std::uint64_t j0,
                                 const GreedyOptions& options = {});

/// Same per-block rule, run to exactly block j1 with no stopping test.
ExtensionResult greedy_extension_to(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target,
                                    const LabelSource& labels, const BlockTable& table, std::uint64_t j0,
                                    std::uint64_t j1);

class SearchSpaceOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMaxBruteForceChoices = 10'000'000;

/// Exact minimiser of D over all extensions of the prefix through block j1.
/// Ties: the lexicographically smaller descending-sorted deviation tuple, then
/// the lexicographically smaller index list. Throws SearchSpaceOverflow when
/// prod C(b_j, m_j) over blocks j0+1..j1 exceeds 10^7.
ExtensionResult brute_force_extension(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target,
                                      const LabelSource& labels, const BlockTable& table, std::uint64_t j0,
                                      std::uint64_t j1);

struct ExchangeFact {
    std::uint64_t block = 0;
    bool y_covers = false;   // sum over Y of available cells >= m_j
    bool holds = false;      // (i) all chosen in Y when y_covers, (ii) no unchosen in Y otherwise
};

/// Checks the two structural exchange facts on blocks j0+1..j1 of a finished
/// extension, with Y the high-deviation set of its final deviations.
std::vector<ExchangeFact> exchange_facts(const ExtensionResult& result, const LabelSource& labels,
                                         const BlockTable& table, const Rational& epsilon);

/// Number of ways to choose m_j of b_j indices in each block j0+1..j1, saturating at UINT64_MAX.
std::uint64_t choice_count(const BlockTable& table, std::uint64_t j0, std::uint64_t j1);

/// Compact form of an increasing index list: runs of consecutive integers.
struct IndexRun {
    std::uint64_t start;
    std::uint64_t length;
};
std::vector<IndexRun> run_length(const std::vector<std::uint64_t>& indices);

} // namespace udist
