#include "udist/envelope.hpp"

#include "udist/rng.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <stdexcept>

namespace udist {

namespace {

Rational ratio(std::uint64_t num, std::uint64_t den) {
    return make_rational(BigInt(static_cast<unsigned long>(num)), BigInt(static_cast<unsigned long>(den)));
}

Rational from_u64(std::uint64_t v) { return Rational(BigInt(static_cast<unsigned long>(v))); }

} // namespace

Schedule::Schedule(Rule rule) : rule_(std::move(rule)) {
    if (const auto* r = std::get_if<Ratio>(&rule_); r && (r->den == 0 || r->num > r->den)) {
        throw std::invalid_argument("ratio schedule needs 0 <= num <= den, den > 0");
    }
}

std::uint64_t Schedule::at(std::uint64_t j, std::uint64_t block_length) const {
    if (j == 0) {
        throw std::invalid_argument("blocks are numbered from 1");
    }
    struct Visitor {
        std::uint64_t j;
        std::uint64_t b;
        std::uint64_t operator()(const List& l) const {
            if (j > l.values.size()) {
                throw std::out_of_range("schedule list has no entry for block " + std::to_string(j));
            }
            return l.values[j - 1];
        }
        std::uint64_t operator()(const Constant& c) const { return c.value; }
        std::uint64_t operator()(const Linear& l) const { return l.slope * j + l.offset; }
        std::uint64_t operator()(const Log& l) const {
            return l.offset + l.scale * static_cast<std::uint64_t>(std::bit_width(j + 1) - 1);
        }
        std::uint64_t operator()(const Ratio& r) const {
            const std::uint64_t scaled = b * r.num;
            return r.round_up ? (scaled + r.den - 1) / r.den : scaled / r.den;
        }
    };
    return std::visit(Visitor{j, block_length}, rule_);
}

std::optional<std::uint64_t> Schedule::horizon() const {
    if (const auto* l = std::get_if<List>(&rule_)) {
        return l->values.size();
    }
    return std::nullopt;
}

BlockTable::BlockTable(std::vector<std::uint64_t> block_lengths, std::vector<std::uint64_t> multiplicities)
    : b_(std::move(block_lengths)), m_(std::move(multiplicities)) {
    if (b_.size() != m_.size()) {
        throw std::invalid_argument("block lengths and multiplicities differ in length");
    }
    a_.assign(1, 0);
    M_.assign(1, 0);
    for (std::size_t i = 0; i < b_.size(); ++i) {
        if (b_[i] == 0) {
            throw std::invalid_argument("block " + std::to_string(i + 1) + " has length 0");
        }
        if (m_[i] > b_[i]) {
            throw std::invalid_argument("block " + std::to_string(i + 1) + ": multiplicity " +
                                        std::to_string(m_[i]) + " exceeds block length " + std::to_string(b_[i]));
        }
        a_.push_back(a_.back() + b_[i]);
        M_.push_back(M_.back() + m_[i]);
    }
}

Rational BlockTable::q(std::uint64_t j) const { return ratio(m(j), b(j)); }

std::uint64_t BlockTable::block_of(std::uint64_t n) const {
    if (n == 0 || n > a_.back()) {
        return 0;
    }
    auto it = std::lower_bound(a_.begin(), a_.end(), n);
    return static_cast<std::uint64_t>(it - a_.begin());
}

SubsequenceSpaceSpec::SubsequenceSpaceSpec(Schedule block_lengths, Schedule multiplicities)
    : blocks_(std::move(block_lengths)), multiplicities_(std::move(multiplicities)) {}

SubsequenceSpaceSpec SubsequenceSpaceSpec::from_lists(std::vector<std::uint64_t> block_lengths,
                                                      std::vector<std::uint64_t> multiplicities) {
    return SubsequenceSpaceSpec(Schedule(Schedule::List{std::move(block_lengths)}),
                                Schedule(Schedule::List{std::move(multiplicities)}));
}

std::uint64_t SubsequenceSpaceSpec::block_length(std::uint64_t j) const { return blocks_.at(j, 0); }

std::uint64_t SubsequenceSpaceSpec::multiplicity(std::uint64_t j) const {
    return multiplicities_.at(j, block_length(j));
}

BlockTable SubsequenceSpaceSpec::materialize(std::uint64_t blocks) const {
    if (auto h = horizon(); h && blocks > *h) {
        throw std::invalid_argument("spec defines only " + std::to_string(*h) + " blocks, " +
                                    std::to_string(blocks) + " requested");
    }
    std::vector<std::uint64_t> b;
    std::vector<std::uint64_t> m;
    b.reserve(blocks);
    m.reserve(blocks);
    for (std::uint64_t j = 1; j <= blocks; ++j) {
        b.push_back(block_length(j));
        m.push_back(multiplicities_.at(j, b.back()));
    }
    return BlockTable(std::move(b), std::move(m));
}

std::optional<std::uint64_t> SubsequenceSpaceSpec::horizon() const {
    auto hb = blocks_.horizon();
    auto hm = multiplicities_.horizon();
    if (hb && hm) {
        return std::min(*hb, *hm);
    }
    return hb ? hb : hm;
}

AdmissibilityReport check_admissible(const SubsequenceSpaceSpec& spec, std::uint64_t blocks) {
    if (blocks == 0) {
        throw std::invalid_argument("check_admissible: need at least one block");
    }
    const BlockTable table = spec.materialize(blocks);
    AdmissibilityReport report;
    report.horizon = blocks;
    for (std::uint64_t t = 1; t <= blocks; t *= 2) {
        report.tail_starts.push_back(t);
    }
    // Suffix extrema, then sample at the tail starts.
    std::vector<std::uint64_t> suffix_min(blocks + 2, UINT64_MAX);
    std::vector<Rational> suffix_max(blocks + 2, Rational(0));
    for (std::uint64_t j = blocks; j >= 1; --j) {
        suffix_min[j] = std::min(suffix_min[j + 1], table.b(j));
        suffix_max[j] = suffix_max[j + 1];
        if (table.M(j) > 0) {
            Rational r = ratio(table.m(j), table.M(j));
            if (r > suffix_max[j]) {
                suffix_max[j] = r;
            }
        }
    }
    for (auto t : report.tail_starts) {
        report.tail_min_block.push_back(suffix_min[t]);
        report.tail_max_ratio.push_back(suffix_max[t]);
    }
    report.blocks_grow = report.tail_min_block.back() > report.tail_min_block.front();
    report.ratios_vanish = report.tail_max_ratio.back() < report.tail_max_ratio.front();
    if (!report.blocks_grow) {
        report.flags.push_back("block lengths bounded on the tested horizon (min tail b_j = " +
                               std::to_string(report.tail_min_block.back()) + ")");
    }
    if (!report.ratios_vanish) {
        report.flags.push_back("m_n / M_n not decreasing on the tested horizon (max tail ratio = " +
                               to_string(report.tail_max_ratio.back()) + ")");
    }
    return report;
}

RatioMeasure::RatioMeasure(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.location < y.location; });
    Rational total = 0;
    for (auto& atom : atoms) {
        if (atom.location < 0 || atom.location > 1) {
            throw std::invalid_argument("ratio measure atom outside [0, 1]: " + to_string(atom.location));
        }
        if (atom.weight < 0) {
            throw std::invalid_argument("ratio measure atom with negative weight");
        }
        if (atom.weight == 0) {
            continue;
        }
        total += atom.weight;
        if (!atoms_.empty() && atoms_.back().location == atom.location) {
            atoms_.back().weight += atom.weight;
        } else {
            atoms_.push_back(std::move(atom));
        }
    }
    if (atoms_.empty() || total != 1) {
        throw std::invalid_argument("ratio measure weights must sum to 1");
    }
}

RatioMeasure RatioMeasure::dirac(const Rational& location) { return RatioMeasure({Atom{location, Rational(1)}}); }

Rational RatioMeasure::mass_at(const Rational& location) const {
    for (const auto& atom : atoms_) {
        if (atom.location == location) {
            return atom.weight;
        }
    }
    return 0;
}

bool operator==(const RatioMeasure& a, const RatioMeasure& b) {
    if (a.atoms_.size() != b.atoms_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
        if (a.atoms_[i].location != b.atoms_[i].location || a.atoms_[i].weight != b.atoms_[i].weight) {
            return false;
        }
    }
    return true;
}

RatioMeasure pi_measure(const BlockTable& table, std::uint64_t blocks) {
    if (blocks == 0 || blocks > table.blocks()) {
        throw std::invalid_argument("pi_measure: block count outside the materialized table");
    }
    const std::uint64_t total = table.M(blocks);
    if (total == 0) {
        throw std::invalid_argument("pi_measure: all multiplicities vanish up to N = " + std::to_string(blocks));
    }
    std::vector<RatioMeasure::Atom> atoms;
    atoms.reserve(blocks);
    for (std::uint64_t j = 1; j <= blocks; ++j) {
        if (table.m(j) > 0) {
            atoms.push_back({table.q(j), ratio(table.m(j), total)});
        }
    }
    return RatioMeasure(std::move(atoms));
}

RatioMeasure pi_measure(const SubsequenceSpaceSpec& spec, std::uint64_t blocks) {
    return pi_measure(spec.materialize(blocks), blocks);
}

Rational F_pi_eval(const RatioMeasure& pi, const Rational& t) {
    if (t < 0 || t > 1) {
        throw std::invalid_argument("F_pi_eval: t outside [0, 1]");
    }
    Rational below = 0;
    Rational above = 0;
    for (const auto& atom : pi.atoms()) {
        if (atom.location <= t) {
            below += atom.weight;
        } else {
            above += atom.weight / atom.location;
        }
    }
    return below + t * above;
}

EnvelopeFunction::EnvelopeFunction(RatioMeasure pi) : pi_(std::move(pi)) {
    const auto& atoms = pi_.atoms();
    const std::size_t n = atoms.size();
    locations_.reserve(n);
    mass_below_.assign(n + 1, Rational(0));
    scaled_above_.assign(n + 1, Rational(0));
    for (std::size_t k = 0; k < n; ++k) {
        locations_.push_back(atoms[k].location);
        mass_below_[k + 1] = mass_below_[k] + atoms[k].weight;
    }
    for (std::size_t k = n; k-- > 0;) {
        // An atom at 0 is never strictly above any t >= 0, so its term is unused.
        scaled_above_[k] = scaled_above_[k + 1] + (atoms[k].location > 0 ? Rational(atoms[k].weight / atoms[k].location)
                                                                          : Rational(0));
    }
}

Rational EnvelopeFunction::operator()(const Rational& t) const {
    if (t < 0 || t > 1) {
        throw std::invalid_argument("envelope evaluated outside [0, 1]");
    }
    const auto k = static_cast<std::size_t>(std::upper_bound(locations_.begin(), locations_.end(), t) -
                                            locations_.begin());
    return mass_below_[k] + t * scaled_above_[k];
}

std::vector<EnvelopeFunction::Row> EnvelopeFunction::tabulate(std::size_t points) const {
    if (points < 2) {
        throw std::invalid_argument("tabulate needs at least two grid points");
    }
    std::vector<Row> rows;
    rows.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        Rational t = ratio(i, points - 1);
        rows.push_back({t, (*this)(t)});
    }
    return rows;
}

namespace {

struct UnionChecker {
    const MeasureVector& mu;
    const MeasureVector& lambda;
    const EnvelopeFunction& envelope;
    const Rational& tolerance;
    DominationResult& result;

    void check(const CellSet& cells, const Rational& mu_mass, const Rational& lambda_mass) {
        ++result.unions_checked;
        // lambda(A) can only exceed 1 through a caller bug; clamp defensively is not
        // wanted here, the envelope throws instead.
        Rational excess = mu_mass - envelope(lambda_mass);
        if (result.unions_checked == 1 || excess > result.max_excess) {
            result.max_excess = excess;
        }
        if (excess > tolerance) {
            if (!result.violating_union || std::lexicographical_compare(cells.begin(), cells.end(),
                                                                        result.violating_union->begin(),
                                                                        result.violating_union->end())) {
                result.violating_union = cells;
            }
            result.dominated = false;
        }
    }

    void exhaustive(std::size_t start, CellSet& current, const Rational& mu_mass, const Rational& lambda_mass) {
        for (std::size_t c = start; c < mu.size(); ++c) {
            current.push_back(c);
            Rational m = mu_mass + mu[c];
            Rational l = lambda_mass + lambda[c];
            check(current, m, l);
            exhaustive(c + 1, current, m, l);
            current.pop_back();
        }
    }
};

} // namespace

DominationResult envelope_dominates(const MeasureVector& mu, const MeasureVector& lambda, const RatioMeasure& pi,
                                    const DominationOptions& options) {
    if (mu.size() != lambda.size()) {
        throw std::invalid_argument("envelope_dominates: mu has " + std::to_string(mu.size()) +
                                    " cells, lambda has " + std::to_string(lambda.size()));
    }
    const std::size_t s = mu.size();
    DominationMode mode = options.mode;
    if (mode == DominationMode::Auto) {
        mode = s <= kMaxExhaustiveCells ? DominationMode::Exhaustive : DominationMode::Randomized;
    }
    if (mode == DominationMode::Exhaustive && s > kMaxExhaustiveCells) {
        throw std::invalid_argument("exhaustive domination check is capped at 25 cells");
    }
    EnvelopeFunction envelope(pi);
    DominationResult result;
    result.mode_used = mode;
    UnionChecker checker{mu, lambda, envelope, options.tolerance, result};

    if (mode == DominationMode::Exhaustive) {
        CellSet current;
        checker.exhaustive(0, current, Rational(0), Rational(0));
        return result;
    }
    for (std::size_t c = 0; c < s; ++c) {
        checker.check(CellSet{c}, mu[c], lambda[c]);
    }
    if (mode == DominationMode::Randomized) {
        SplitMix64 rng(options.seed);
        for (std::uint64_t draw = 0; draw < options.random_unions; ++draw) {
            CellSet cells;
            Rational m = 0;
            Rational l = 0;
            for (std::size_t c = 0; c < s; ++c) {
                if (rng.next() >> 63) {
                    cells.push_back(c);
                    m += mu[c];
                    l += lambda[c];
                }
            }
            if (!cells.empty()) {
                checker.check(cells, m, l);
            }
        }
    }
    return result;
}

bool CountingReport::all_hold() const {
    return std::all_of(checkpoints.begin(), checkpoints.end(), [](const CountingCheckpoint& c) { return c.holds; });
}

CountingReport counting_oracle(const CountingInput& input) {
    if (input.table == nullptr) {
        throw std::invalid_argument("counting_oracle: missing block table");
    }
    const BlockTable& table = *input.table;
    if (input.checkpoints.empty()) {
        throw std::invalid_argument("counting_oracle: no checkpoints");
    }
    if (input.t0 <= 0 || input.t0 > 1 || input.lambda_of_cells > input.t0) {
        throw std::invalid_argument("counting_oracle: need 0 < lambda(A) <= t0 <= 1 (t0 > 0)");
    }
    if (input.epsilon <= 0) {
        throw std::invalid_argument("counting_oracle: epsilon must be positive");
    }
    for (std::size_t i = 1; i < input.checkpoints.size(); ++i) {
        if (input.checkpoints[i] <= input.checkpoints[i - 1]) {
            throw std::invalid_argument("counting_oracle: checkpoints must increase");
        }
    }
    const std::uint64_t horizon = input.checkpoints.back();
    if (input.checkpoints.front() == 0 || horizon > table.blocks() || input.labels.size() < table.a(horizon)) {
        throw std::invalid_argument("counting_oracle: horizon shorter than the last checkpoint");
    }
    std::vector<bool> in_cells;
    for (auto c : input.cells) {
        if (c >= in_cells.size()) {
            in_cells.resize(c + 1, false);
        }
        in_cells[c] = true;
    }
    auto hit = [&](std::uint64_t n) {
        const std::size_t label = input.labels[n - 1];
        return label < in_cells.size() && in_cells[label];
    };

    // Per-block counts: chosen hits c_j, block hits H_j, and membership check.
    std::vector<std::uint64_t> chosen_hits(horizon + 1, 0);
    std::vector<std::uint64_t> chosen_count(horizon + 1, 0);
    std::uint64_t previous = 0;
    for (auto n : input.chosen) {
        if (n <= previous) {
            throw std::invalid_argument("counting_oracle: chosen indices must increase");
        }
        previous = n;
        const std::uint64_t j = table.block_of(n);
        if (j == 0 || j > horizon) {
            continue;
        }
        ++chosen_count[j];
        chosen_hits[j] += hit(n) ? 1 : 0;
    }
    for (std::uint64_t j = 1; j <= horizon; ++j) {
        if (chosen_count[j] != table.m(j)) {
            throw std::invalid_argument("counting_oracle: chosen indices are not in S(I, m) at block " +
                                        std::to_string(j));
        }
    }

    CountingReport report;
    for (std::uint64_t j = 1; j <= horizon; ++j) {
        std::uint64_t block_hits = 0;
        for (std::uint64_t n = table.a(j - 1) + 1; n <= table.a(j); ++n) {
            block_hits += hit(n) ? 1 : 0;
        }
        Rational defect = abs(ratio(block_hits, table.b(j)) - input.lambda_of_cells);
        if (defect > input.epsilon) {
            report.j_eps = j;
        }
    }

    const std::uint64_t j_eps = report.j_eps;
    for (auto blocks : input.checkpoints) {
        CountingCheckpoint cp;
        cp.blocks = blocks;
        cp.terms = table.M(blocks);
        Rational low_mass = 0;      // sum of m_j with q_j <= t0 over all j <= N
        Rational scaled_high = 0;   // sum of b_j with q_j > t0 over all j <= N (= sum m_j / q_j)
        for (std::uint64_t j = 1; j <= blocks; ++j) {
            const bool low = table.q(j) <= input.t0;
            if (low) {
                low_mass += from_u64(table.m(j));
            } else {
                scaled_high += from_u64(table.b(j));
            }
            if (j <= j_eps) {
                cp.c1 += chosen_hits[j];
            } else if (low) {
                cp.c2 += chosen_hits[j];
            } else {
                cp.c3 += chosen_hits[j];
            }
        }
        cp.count = cp.c1 + cp.c2 + cp.c3;
        if (cp.terms == 0) {
            cp.holds = cp.count == 0;
            report.checkpoints.push_back(std::move(cp));
            continue;
        }
        const Rational M = from_u64(cp.terms);
        const Rational slack = input.epsilon / input.t0;
        cp.envelope = (low_mass + input.t0 * scaled_high) / M;
        cp.c2_bound = low_mass;
        cp.c3_bound = input.t0 * scaled_high + slack * M;
        cp.bound = M * (cp.envelope + slack) + from_u64(cp.c1);
        cp.holds = from_u64(cp.c2) <= cp.c2_bound && from_u64(cp.c3) <= cp.c3_bound &&
                   from_u64(cp.count) <= cp.bound;
        report.checkpoints.push_back(std::move(cp));
    }
    return report;
}

DominationTolerance subsequence_tolerance(std::span<const std::size_t> labels, const MeasureVector& lambda,
                                          const BlockTable& table, std::uint64_t blocks) {
    if (blocks == 0 || blocks > table.blocks() || labels.size() < table.a(blocks)) {
        throw std::invalid_argument("subsequence_tolerance: not enough blocks or labels");
    }
    if (table.M(blocks) == 0) {
        throw std::invalid_argument("subsequence_tolerance: M_N = 0");
    }
    const std::size_t cells = lambda.size();
    Rational window = 0;
    Rational prefix = 0;
    std::vector<std::uint64_t> counts(cells);
    for (std::uint64_t j = 1; j <= blocks; ++j) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::uint64_t n = table.a(j - 1) + 1; n <= table.a(j); ++n) {
            ++counts.at(labels[n - 1]);
        }
        // b_j * TV_j = sum of positive parts of (count_i - b_j * lambda_i)
        Rational excess = 0;
        const Rational b = from_u64(table.b(j));
        for (std::size_t c = 0; c < cells; ++c) {
            Rational d = from_u64(counts[c]) - b * lambda[c];
            if (d > 0) {
                excess += d;
            }
        }
        const Rational m = from_u64(table.m(j));
        if (excess <= m) {
            window += excess;
        } else {
            prefix += m;
        }
    }
    const Rational M = from_u64(table.M(blocks));
    return DominationTolerance{(window + prefix) / M, window / M, prefix / M};
}

} // namespace udist
