#pragma once

// Empirical measures of point sequences on R/Z, read at the resolution of a
// finite partition into half-open cells [t_{i-1}, t_i).

#include "udist/rational.hpp"
#include "udist/torus.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace udist {

/// Indices of partition cells, sorted and without duplicates.
using CellSet = std::vector<std::size_t>;

class CellPartition {
public:
    /// Cut points 0 = t_0 < t_1 < ... < t_s = 1.
    explicit CellPartition(std::vector<Rational> cuts);
    static CellPartition uniform(std::size_t cells);
    /// Cut points k / 2^level.
    static CellPartition dyadic(unsigned level);

    std::size_t size() const noexcept { return cuts_.size() - 1; }
    const std::vector<Rational>& cuts() const noexcept { return cuts_; }
    Rational cell_length(std::size_t cell) const { return cuts_.at(cell + 1) - cuts_.at(cell); }

    std::size_t cell_of(const Rational& x) const;
    std::size_t cell_of(const TorusPoint& x) const { return cell_of(x.value()); }

    bool is_dyadic() const;

private:
    std::vector<Rational> cuts_;
};

/// A general measure at partition resolution: nonnegative masses summing to 1.
class MeasureVector {
public:
    MeasureVector() = default;
    explicit MeasureVector(std::vector<Rational> masses);
    /// Cell lengths of the partition, i.e. Lebesgue measure.
    static MeasureVector lebesgue(const CellPartition& partition);

    std::size_t size() const noexcept { return masses_.size(); }
    const Rational& operator[](std::size_t cell) const { return masses_.at(cell); }
    const std::vector<Rational>& masses() const noexcept { return masses_; }
    Rational mass(const CellSet& cells) const;

private:
    std::vector<Rational> masses_;
};

class EmpiricalMeasure {
public:
    EmpiricalMeasure(std::vector<std::uint64_t> counts, std::uint64_t sample_count);

    std::size_t size() const noexcept { return counts_.size(); }
    std::uint64_t sample_count() const noexcept { return sample_count_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    Rational frequency(std::size_t cell) const;
    std::vector<Rational> frequencies() const;
    Rational mass(const CellSet& cells) const;
    MeasureVector as_measure() const { return MeasureVector(frequencies()); }

    /// Empirical measure of the concatenated samples.
    static EmpiricalMeasure concatenate(const EmpiricalMeasure& first, const EmpiricalMeasure& second);

    friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t sample_count_;
};

/// A point known only up to a closed error ball [center - radius, center + radius].
struct ApproxPoint {
    Rational center;
    Rational radius;

    /// Exact value of the double plus a radius of 2^-precision_bits.
    static ApproxPoint from_double(double value, unsigned precision_bits);
};

class StraddleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cell containing every point of the error ball; throws StraddleError when
/// the ball meets more than one cell.
std::size_t cell_of(const CellPartition& partition, const ApproxPoint& point);

/// 1-based point sequence x_1, x_2, ...
using PointSequence = std::function<TorusPoint(std::uint64_t)>;

PointSequence rotation_sequence(const TorusPoint& alpha);
/// x_n = 1/(n+1): the harmonic sequence without the n = 1 term, which would
/// coincide with 0 on the circle.
PointSequence harmonic_sequence();
/// Cell labels of x_1 .. x_count.
std::vector<std::size_t> label_points(const PointSequence& x, const CellPartition& partition,
                                      std::uint64_t count);

EmpiricalMeasure empirical_measure(std::span<const TorusPoint> points, const CellPartition& partition);
EmpiricalMeasure empirical_measure(std::span<const ApproxPoint> points, const CellPartition& partition);
EmpiricalMeasure empirical_measure_from_labels(std::span<const std::size_t> labels, std::size_t cells);

/// max over shifts k in [0, shifts] and cells A of |#{k < n <= k + window : x_n in A}/window - lambda(A)|.
Rational window_defect(const PointSequence& x, const MeasureVector& lambda, const CellPartition& partition,
                       std::uint64_t window, std::uint64_t shifts);
/// Same, over precomputed labels of x_1 .. x_{window + shifts}.
Rational window_defect(std::span<const std::size_t> labels, const MeasureVector& lambda,
                       std::uint64_t window, std::uint64_t shifts);

/// Exact D*_N = sup_t |#{x_n in [0, t)}/N - t|.
Rational star_discrepancy(std::span<const TorusPoint> points);

struct CheckpointScan {
    std::vector<std::uint64_t> checkpoints;
    std::vector<EmpiricalMeasure> measures;
};

CheckpointScan checkpoint_scan(const PointSequence& x, const CellPartition& partition,
                               std::span<const std::uint64_t> checkpoints);

/// Largest mass of `cells` over the scanned checkpoints. This is a limsup
/// surrogate and only a lower bound for the supremum over limit measures:
/// mass that accumulates on a cell boundary from outside is invisible here.
Rational mu_bar_estimate(const CheckpointScan& scan, const CellSet& cells);

/// A finite union of pieces [lo, hi); lo == hi denotes the singleton {lo}.
class TargetSet {
public:
    struct Piece {
        Rational lo;
        Rational hi;
    };

    explicit TargetSet(std::vector<Piece> pieces);
    static TargetSet singleton(const Rational& x);
    static TargetSet from_cells(const CellPartition& partition, const CellSet& cells);

    bool contains(const TorusPoint& x) const;
    /// Membership in the open eta-neighbourhood of the closure.
    bool enlarged_contains(const TorusPoint& x, const Rational& eta) const;
    const std::vector<Piece>& pieces() const noexcept { return pieces_; }

private:
    std::vector<Piece> pieces_;
};

struct MuBarReport {
    Rational surrogate;
    Rational enlarged;
    Rational eta;
};

/// Both the limsup surrogate on the target and the same surrogate on its
/// open eta-enlargement, read at the given checkpoints.
MuBarReport mu_bar_report(const PointSequence& x, std::span<const std::uint64_t> checkpoints,
                          const TargetSet& target, const Rational& eta);

/// One row per checkpoint: N, decimal frequencies, then exact "p/q" frequencies.
std::string scan_to_csv(const CheckpointScan& scan, int precision);

} // namespace udist
