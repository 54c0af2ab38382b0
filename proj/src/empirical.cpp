#include "udist/empirical.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace udist {

CellPartition::CellPartition(std::vector<Rational> cuts) : cuts_(std::move(cuts)) {
    if (cuts_.size() < 2 || cuts_.front() != 0 || cuts_.back() != 1) {
        throw std::invalid_argument("partition cut points must run from 0 to 1");
    }
    for (std::size_t i = 1; i < cuts_.size(); ++i) {
        if (!(cuts_[i - 1] < cuts_[i])) {
            throw std::invalid_argument("partition cut points must be strictly increasing");
        }
    }
}

CellPartition CellPartition::uniform(std::size_t cells) {
    if (cells == 0) {
        throw std::invalid_argument("partition needs at least one cell");
    }
    std::vector<Rational> cuts;
    cuts.reserve(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        cuts.push_back(make_rational(static_cast<std::int64_t>(i), static_cast<std::int64_t>(cells)));
    }
    return CellPartition(std::move(cuts));
}

CellPartition CellPartition::dyadic(unsigned level) {
    if (level > 24) {
        throw std::invalid_argument("dyadic partition level too large");
    }
    return uniform(std::size_t{1} << level);
}

std::size_t CellPartition::cell_of(const Rational& x) const {
    if (x < 0 || x >= 1) {
        throw std::invalid_argument("cell_of: point outside [0, 1)");
    }
    auto it = std::upper_bound(cuts_.begin(), cuts_.end(), x);
    return static_cast<std::size_t>(it - cuts_.begin()) - 1;
}

bool CellPartition::is_dyadic() const {
    return std::all_of(cuts_.begin(), cuts_.end(), [](const Rational& t) { return udist::is_dyadic(t); });
}

MeasureVector::MeasureVector(std::vector<Rational> masses) : masses_(std::move(masses)) {
    if (masses_.empty()) {
        throw std::invalid_argument("measure vector must be nonempty");
    }
    Rational total = 0;
    for (const auto& m : masses_) {
        if (m < 0) {
            throw std::invalid_argument("measure vector has a negative mass");
        }
        total += m;
    }
    if (total != 1) {
        throw std::invalid_argument("measure vector masses sum to " + to_string(total) + ", not 1");
    }
}

MeasureVector MeasureVector::lebesgue(const CellPartition& partition) {
    std::vector<Rational> masses;
    masses.reserve(partition.size());
    for (std::size_t i = 0; i < partition.size(); ++i) {
        masses.push_back(partition.cell_length(i));
    }
    return MeasureVector(std::move(masses));
}

Rational MeasureVector::mass(const CellSet& cells) const {
    Rational total = 0;
    for (auto c : cells) {
        total += masses_.at(c);
    }
    return total;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<std::uint64_t> counts, std::uint64_t sample_count)
    : counts_(std::move(counts)), sample_count_(sample_count) {
    if (sample_count_ == 0) {
        throw std::invalid_argument("empirical measure of an empty sample");
    }
    const auto total = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
    if (total != sample_count_) {
        throw std::invalid_argument("empirical counts do not add up to the sample count");
    }
}

Rational EmpiricalMeasure::frequency(std::size_t cell) const {
    return make_rational(BigInt(static_cast<unsigned long>(counts_.at(cell))),
                         BigInt(static_cast<unsigned long>(sample_count_)));
}

std::vector<Rational> EmpiricalMeasure::frequencies() const {
    std::vector<Rational> out;
    out.reserve(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        out.push_back(frequency(i));
    }
    return out;
}

Rational EmpiricalMeasure::mass(const CellSet& cells) const {
    std::uint64_t hits = 0;
    for (auto c : cells) {
        hits += counts_.at(c);
    }
    return make_rational(BigInt(static_cast<unsigned long>(hits)), BigInt(static_cast<unsigned long>(sample_count_)));
}

EmpiricalMeasure EmpiricalMeasure::concatenate(const EmpiricalMeasure& first, const EmpiricalMeasure& second) {
    if (first.size() != second.size()) {
        throw std::invalid_argument("concatenate: partitions differ");
    }
    std::vector<std::uint64_t> counts(first.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        counts[i] = first.counts_[i] + second.counts_[i];
    }
    return EmpiricalMeasure(std::move(counts), first.sample_count_ + second.sample_count_);
}

ApproxPoint ApproxPoint::from_double(double value, unsigned precision_bits) {
    Rational center(value);
    Rational radius = make_rational(BigInt(1), pow(BigInt(2), precision_bits));
    return ApproxPoint{center, radius};
}

std::size_t cell_of(const CellPartition& partition, const ApproxPoint& point) {
    if (point.radius < 0) {
        throw std::invalid_argument("negative error radius");
    }
    const Rational lo = point.center - point.radius;
    const Rational hi = point.center + point.radius;
    if (partition.size() == 1) {
        return 0;
    }
    if (lo < 0 || hi >= 1) {
        // The ball reaches across 0 = 1 on the circle.
        throw StraddleError("error ball around " + to_string(point.center) + " straddles the cut point 0");
    }
    const std::size_t cell = partition.cell_of(lo);
    if (hi >= partition.cuts()[cell + 1]) {
        throw StraddleError("error ball around " + to_string(point.center) + " straddles the cut point " +
                            to_string(partition.cuts()[cell + 1]));
    }
    return cell;
}

PointSequence rotation_sequence(const TorusPoint& alpha) {
    return [alpha](std::uint64_t n) { return mul_mod1(BigInt(static_cast<unsigned long>(n)), alpha); };
}

PointSequence harmonic_sequence() {
    return [](std::uint64_t n) {
        return TorusPoint(make_rational(BigInt(1), BigInt(static_cast<unsigned long>(n)) + 1));
    };
}

std::vector<std::size_t> label_points(const PointSequence& x, const CellPartition& partition,
                                      std::uint64_t count) {
    std::vector<std::size_t> labels;
    labels.reserve(count);
    for (std::uint64_t n = 1; n <= count; ++n) {
        labels.push_back(partition.cell_of(x(n)));
    }
    return labels;
}

EmpiricalMeasure empirical_measure_from_labels(std::span<const std::size_t> labels, std::size_t cells) {
    if (labels.empty()) {
        throw std::invalid_argument("empirical_measure: no points");
    }
    std::vector<std::uint64_t> counts(cells, 0);
    for (auto label : labels) {
        ++counts.at(label);
    }
    return EmpiricalMeasure(std::move(counts), labels.size());
}

EmpiricalMeasure empirical_measure(std::span<const TorusPoint> points, const CellPartition& partition) {
    if (points.empty()) {
        throw std::invalid_argument("empirical_measure: no points");
    }
    std::vector<std::uint64_t> counts(partition.size(), 0);
    for (const auto& p : points) {
        ++counts[partition.cell_of(p)];
    }
    return EmpiricalMeasure(std::move(counts), points.size());
}

EmpiricalMeasure empirical_measure(std::span<const ApproxPoint> points, const CellPartition& partition) {
    if (points.empty()) {
        throw std::invalid_argument("empirical_measure: no points");
    }
    std::vector<std::uint64_t> counts(partition.size(), 0);
    for (const auto& p : points) {
        ++counts[cell_of(partition, p)];
    }
    return EmpiricalMeasure(std::move(counts), points.size());
}

Rational window_defect(std::span<const std::size_t> labels, const MeasureVector& lambda,
                       std::uint64_t window, std::uint64_t shifts) {
    if (window == 0) {
        throw std::invalid_argument("window_defect: window must be >= 1");
    }
    if (labels.size() < window + shifts) {
        throw std::invalid_argument("window_defect: not enough labelled points");
    }
    const std::size_t cells = lambda.size();
    std::vector<std::int64_t> counts(cells, 0);
    for (std::uint64_t n = 0; n < window; ++n) {
        ++counts.at(labels[n]);
    }
    // Work with window * lambda to compare integer counts exactly.
    std::vector<Rational> expected(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        expected[c] = lambda[c] * Rational(static_cast<long>(window));
    }
    Rational worst = 0;
    for (std::uint64_t k = 0;; ++k) {
        for (std::size_t c = 0; c < cells; ++c) {
            Rational dev = abs(Rational(static_cast<long>(counts[c])) - expected[c]);
            if (dev > worst) {
                worst = dev;
            }
        }
        if (k == shifts) {
            break;
        }
        --counts[labels[k]];
        ++counts[labels[k + window]];
    }
    return worst / Rational(static_cast<long>(window));
}

Rational window_defect(const PointSequence& x, const MeasureVector& lambda, const CellPartition& partition,
                       std::uint64_t window, std::uint64_t shifts) {
    if (lambda.size() != partition.size()) {
        throw std::invalid_argument("window_defect: measure and partition sizes differ");
    }
    auto labels = label_points(x, partition, window + shifts);
    return window_defect(labels, lambda, window, shifts);
}

Rational star_discrepancy(std::span<const TorusPoint> points) {
    if (points.empty()) {
        throw std::invalid_argument("star_discrepancy: no points");
    }
    std::vector<Rational> sorted;
    sorted.reserve(points.size());
    for (const auto& p : points) {
        sorted.push_back(p.value());
    }
    std::sort(sorted.begin(), sorted.end());
    const Rational n(static_cast<long>(sorted.size()));
    Rational worst = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        Rational above = Rational(static_cast<long>(i + 1)) / n - sorted[i];
        Rational below = sorted[i] - Rational(static_cast<long>(i)) / n;
        if (above > worst) {
            worst = above;
        }
        if (below > worst) {
            worst = below;
        }
    }
    return worst;
}

CheckpointScan checkpoint_scan(const PointSequence& x, const CellPartition& partition,
                               std::span<const std::uint64_t> checkpoints) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
            throw std::invalid_argument("checkpoints must be positive and strictly increasing");
        }
    }
    CheckpointScan scan;
    std::vector<std::uint64_t> counts(partition.size(), 0);
    std::uint64_t n = 0;
    for (auto target : checkpoints) {
        while (n < target) {
            ++n;
            ++counts[partition.cell_of(x(n))];
        }
        scan.checkpoints.push_back(target);
        scan.measures.emplace_back(counts, target);
    }
    return scan;
}

Rational mu_bar_estimate(const CheckpointScan& scan, const CellSet& cells) {
    if (scan.measures.empty()) {
        throw std::invalid_argument("mu_bar_estimate: empty scan");
    }
    Rational best = scan.measures.front().mass(cells);
    for (const auto& m : scan.measures) {
        Rational v = m.mass(cells);
        if (v > best) {
            best = v;
        }
    }
    return best;
}

TargetSet::TargetSet(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    for (const auto& p : pieces_) {
        if (!(0 <= p.lo && p.lo <= p.hi && p.hi <= 1) || p.lo == 1) {
            throw std::invalid_argument("target piece must satisfy 0 <= lo <= hi <= 1, lo < 1");
        }
    }
}

TargetSet TargetSet::singleton(const Rational& x) { return TargetSet({Piece{x, x}}); }

TargetSet TargetSet::from_cells(const CellPartition& partition, const CellSet& cells) {
    std::vector<Piece> pieces;
    for (auto c : cells) {
        pieces.push_back(Piece{partition.cuts().at(c), partition.cuts().at(c + 1)});
    }
    return TargetSet(std::move(pieces));
}

bool TargetSet::contains(const TorusPoint& x) const {
    const Rational& v = x.value();
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) {
        return p.lo == p.hi ? v == p.lo : (p.lo <= v && v < p.hi);
    });
}

bool TargetSet::enlarged_contains(const TorusPoint& x, const Rational& eta) const {
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) {
        // open arc (lo - eta, hi + eta) on the circle
        Rational span = p.hi - p.lo + 2 * eta;
        if (span >= 1) {
            return true;
        }
        Rational offset = frac(x.value() - (p.lo - eta));
        return 0 < offset && offset < span;
    });
}

MuBarReport mu_bar_report(const PointSequence& x, std::span<const std::uint64_t> checkpoints,
                          const TargetSet& target, const Rational& eta) {
    if (checkpoints.empty()) {
        throw std::invalid_argument("mu_bar_report: no checkpoints");
    }
    if (eta <= 0) {
        throw std::invalid_argument("mu_bar_report: eta must be positive");
    }
    std::uint64_t exact_hits = 0;
    std::uint64_t enlarged_hits = 0;
    std::uint64_t n = 0;
    MuBarReport report{Rational(-1), Rational(-1), eta};
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
            throw std::invalid_argument("checkpoints must be positive and strictly increasing");
        }
        while (n < checkpoints[i]) {
            ++n;
            TorusPoint p = x(n);
            exact_hits += target.contains(p) ? 1 : 0;
            enlarged_hits += target.enlarged_contains(p, eta) ? 1 : 0;
        }
        const BigInt denom(static_cast<unsigned long>(n));
        Rational a = make_rational(BigInt(static_cast<unsigned long>(exact_hits)), denom);
        Rational b = make_rational(BigInt(static_cast<unsigned long>(enlarged_hits)), denom);
        if (a > report.surrogate) {
            report.surrogate = a;
        }
        if (b > report.enlarged) {
            report.enlarged = b;
        }
    }
    return report;
}

std::string scan_to_csv(const CheckpointScan& scan, int precision) {
    std::ostringstream out;
    const std::size_t cells = scan.measures.empty() ? 0 : scan.measures.front().size();
    out << "N";
    for (std::size_t c = 0; c < cells; ++c) {
        out << ",cell" << c;
    }
    for (std::size_t c = 0; c < cells; ++c) {
        out << ",cell" << c << "_exact";
    }
    out << "\n";
    for (std::size_t i = 0; i < scan.measures.size(); ++i) {
        out << scan.checkpoints[i];
        auto freqs = scan.measures[i].frequencies();
        for (const auto& f : freqs) {
            out << "," << to_decimal(f, precision);
        }
        for (const auto& f : freqs) {
            out << "," << to_string(f);
        }
        out << "\n";
    }
    return out.str();
}

} // namespace udist
