#include "udist/subspace.hpp"

#include "udist/rng.hpp"

#include <algorithm>
#include <numeric>

namespace udist {

namespace {

Rational from_u64(std::uint64_t v) { return Rational(BigInt(static_cast<unsigned long>(v))); }

std::vector<Rational> deviations_of(const MeasureVector& mu, const std::vector<std::uint64_t>& counts,
                                    std::uint64_t terms) {
    std::vector<Rational> d;
    d.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (terms == 0) {
            d.push_back(mu[i]);
        } else {
            Rational v = mu[i] - make_rational(BigInt(static_cast<unsigned long>(counts[i])),
                                               BigInt(static_cast<unsigned long>(terms)));
            d.push_back(std::move(v));
        }
    }
    return d;
}

Rational total_of(const std::vector<Rational>& d) {
    Rational total = 0;
    for (const auto& v : d) {
        total += abs(v);
    }
    return total;
}

Rational max_of(const std::vector<Rational>& d) {
    Rational best = 0;
    for (const auto& v : d) {
        if (abs(v) > best) {
            best = abs(v);
        }
    }
    return best;
}

/// Block indices grouped by cell, each group ascending.
std::vector<std::vector<std::uint64_t>> block_by_cell(const BlockTable& table, std::uint64_t j,
                                                      const LabelSource& labels, std::size_t cells) {
    std::vector<std::vector<std::uint64_t>> groups(cells);
    for (std::uint64_t n = table.a(j - 1) + 1; n <= table.a(j); ++n) {
        const std::size_t c = labels(n);
        if (c >= cells) {
            throw std::out_of_range("label " + std::to_string(c) + " outside the target's cells");
        }
        groups[c].push_back(n);
    }
    return groups;
}

/// Smallest-index-first selection of k[c] indices from each cell group, merged ascending.
std::vector<std::uint64_t> take(const std::vector<std::vector<std::uint64_t>>& groups,
                                const std::vector<std::uint64_t>& k) {
    std::vector<std::uint64_t> out;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        out.insert(out.end(), groups[c].begin(), groups[c].begin() + static_cast<std::ptrdiff_t>(k[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_prefix(const std::vector<std::uint64_t>& prefix, const BlockTable& table, std::uint64_t j0) {
    if (j0 > table.blocks()) {
        throw std::invalid_argument("prefix block j0 beyond the materialized spec");
    }
    CylinderPrefix cylinder(prefix, table);
    if (cylinder.complete_blocks(table) < j0 || (!prefix.empty() && prefix.back() > table.a(j0))) {
        throw std::invalid_argument("prefix is not a complete member prefix through block " + std::to_string(j0));
    }
}

/// Block-by-block greedy state shared by both greedy entry points.
class Extender {
public:
    Extender(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target, const LabelSource& labels,
             const BlockTable& table, std::uint64_t j0)
        : target_(target), labels_(labels), table_(table), counts_(target.mu.size(), 0) {
        validate_target(target);
        check_prefix(prefix, table, j0);
        result_.indices = prefix;
        result_.j0 = j0;
        result_.j1 = j0;
        for (auto n : prefix) {
            const std::size_t c = labels(n);
            if (c >= counts_.size()) {
                throw std::out_of_range("label outside the target's cells");
            }
            ++counts_[c];
        }
        result_.terms = table.M(j0);
        refresh();
    }

    void step() {
        const std::uint64_t j = result_.j1 + 1;
        const std::size_t s = counts_.size();
        ExtensionBlock row;
        row.block = j;
        row.y = high_deviation_set(result_.deviations, target_.epsilon);

        auto groups = block_by_cell(table_, j, labels_, s);
        std::uint64_t y_available = 0;
        for (auto c : row.y) {
            y_available += groups[c].size();
        }
        row.y_covers = y_available >= table_.m(j);

        const std::uint64_t terms = result_.terms + table_.m(j);
        std::vector<Rational> residual(s);
        for (std::size_t c = 0; c < s; ++c) {
            residual[c] = target_.mu[c] * from_u64(terms) - from_u64(counts_[c]);
        }
        std::vector<std::uint64_t> k(s, 0);
        for (std::uint64_t pick = 0; pick < table_.m(j); ++pick) {
            std::optional<std::size_t> best;
            for (std::size_t c = 0; c < s; ++c) {
                if (k[c] < groups[c].size() && (!best || residual[c] > residual[*best])) {
                    best = c;
                }
            }
            ++k[*best];
            residual[*best] -= 1;
        }
        auto chosen = take(groups, k);
        result_.indices.insert(result_.indices.end(), chosen.begin(), chosen.end());
        for (std::size_t c = 0; c < s; ++c) {
            counts_[c] += k[c];
        }
        result_.terms = terms;
        result_.j1 = j;
        refresh();
        row.terms = terms;
        row.deviations = result_.deviations;
        row.total_deviation = result_.total_deviation;
        result_.trace.push_back(std::move(row));
    }

    const ExtensionResult& result() const { return result_; }
    ExtensionResult take_result() { return std::move(result_); }

private:
    void refresh() {
        result_.deviations = deviations_of(target_.mu, counts_, result_.terms);
        result_.total_deviation = total_of(result_.deviations);
        result_.max_deviation = max_of(result_.deviations);
    }

    const ExtensionTarget& target_;
    const LabelSource& labels_;
    const BlockTable& table_;
    std::vector<std::uint64_t> counts_;
    ExtensionResult result_;
};

BigInt binomial(std::uint64_t n, std::uint64_t k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

} // namespace

CylinderPrefix::CylinderPrefix(std::vector<std::uint64_t> indices, const BlockTable& table)
    : indices_(std::move(indices)), counts_(table.blocks(), 0) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (i > 0 && indices_[i] <= indices_[i - 1]) {
            throw std::invalid_argument("prefix indices must increase strictly");
        }
        const std::uint64_t j = table.block_of(indices_[i]);
        if (j == 0) {
            throw std::invalid_argument("prefix index " + std::to_string(indices_[i]) + " outside the blocks");
        }
        if (++counts_[j - 1] > table.m(j)) {
            throw std::invalid_argument("prefix takes more than m_" + std::to_string(j) + " indices from block " +
                                        std::to_string(j));
        }
    }
}

std::uint64_t CylinderPrefix::complete_blocks(const BlockTable& table) const {
    std::uint64_t j = 0;
    while (j < table.blocks() && counts_[j] == table.m(j + 1)) {
        ++j;
    }
    return j;
}

MembershipResult validate_membership(const std::vector<std::uint64_t>& prefix, const BlockTable& table) {
    MembershipResult out;
    const std::uint64_t J = table.blocks();
    std::vector<std::uint64_t> counts(J + 1, 0);
    std::uint64_t last_block = 0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] == 0 || (i > 0 && prefix[i] <= prefix[i - 1])) {
            return {Membership::NotMember, table.block_of(prefix[i]), "indices are not strictly increasing from 1"};
        }
        const std::uint64_t j = table.block_of(prefix[i]);
        if (j == 0) {
            last_block = J + 1;  // the prefix has moved past every checked block
            break;
        }
        last_block = j;
        if (++counts[j] > table.m(j)) {
            return {Membership::NotMember, j,
                    "block " + std::to_string(j) + " holds more than m_j = " + std::to_string(table.m(j))};
        }
    }
    for (std::uint64_t j = 1; j <= J; ++j) {
        if (counts[j] == table.m(j)) {
            continue;
        }
        if (j < last_block) {
            return {Membership::NotMember, j,
                    "block " + std::to_string(j) + " holds " + std::to_string(counts[j]) + " of m_j = " +
                        std::to_string(table.m(j))};
        }
        return {Membership::Indeterminate, j, "prefix ends before block " + std::to_string(j) + " is complete"};
    }
    out.verdict = Membership::Member;
    return out;
}

std::vector<std::uint64_t> sample_uniform(const BlockTable& table, std::uint64_t blocks, std::uint64_t seed) {
    if (blocks == 0 || blocks > table.blocks()) {
        throw std::invalid_argument("sample_uniform: block count outside the table");
    }
    SplitMix64 rng(seed);
    std::vector<std::uint64_t> out;
    out.reserve(table.M(blocks));
    for (std::uint64_t j = 1; j <= blocks; ++j) {
        std::uint64_t needed = table.m(j);
        std::uint64_t remaining = table.b(j);
        for (std::uint64_t n = table.a(j - 1) + 1; n <= table.a(j) && needed > 0; ++n, --remaining) {
            if (needed == remaining || rng.below(remaining) < needed) {
                out.push_back(n);
                --needed;
            }
        }
    }
    return out;
}

LabelSource labels_of(PointSequence x, CellPartition partition) {
    return [x = std::move(x), partition = std::move(partition)](std::uint64_t n) { return partition.cell_of(x(n)); };
}

LabelSource labels_of(std::vector<std::size_t> labels) {
    return [labels = std::move(labels)](std::uint64_t n) {
        if (n == 0 || n > labels.size()) {
            throw std::out_of_range("no label for index " + std::to_string(n));
        }
        return labels[n - 1];
    };
}

void validate_target(const ExtensionTarget& target) {
    if (target.epsilon <= 0) {
        throw std::invalid_argument("extension target needs epsilon > 0");
    }
    if (target.mu.size() != target.lambda.size() || target.mu.size() == 0) {
        throw std::invalid_argument("extension target: mu and lambda must cover the same nonempty cells");
    }
    auto check = envelope_dominates(target.mu, target.lambda, target.pi);
    if (!check.dominated) {
        std::string cells;
        for (auto c : *check.violating_union) {
            cells += (cells.empty() ? "" : ",") + std::to_string(c);
        }
        throw std::invalid_argument("target mu is not dominated by F_pi o lambda on cells {" + cells + "}");
    }
}

CellSet high_deviation_set(const std::vector<Rational>& deviations, const Rational& epsilon) {
    const std::size_t s = deviations.size();
    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return deviations[x] > deviations[y]; });
    const Rational threshold = epsilon / from_u64(static_cast<std::uint64_t>(s) * s);
    CellSet y;
    for (std::size_t r = 0; r + 1 < s; ++r) {
        const Rational& top = deviations[order[r]];
        if (top > threshold && top - deviations[order[r + 1]] > threshold) {
            y.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r + 1));
            std::sort(y.begin(), y.end());
            return y;
        }
    }
    for (std::size_t c = 0; c < s; ++c) {
        if (deviations[c] > 0) {
            y.push_back(c);
        }
    }
    return y;
}

ExtensionResult greedy_extension_to(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target,
                                    const LabelSource& labels, const BlockTable& table, std::uint64_t j0,
                                    std::uint64_t j1) {
    if (j1 < j0 || j1 > table.blocks()) {
        throw std::invalid_argument("greedy_extension_to: need j0 <= j1 <= materialized blocks");
    }
    Extender extender(prefix, target, labels, table, j0);
    for (std::uint64_t j = j0; j < j1; ++j) {
        extender.step();
    }
    ExtensionResult result = extender.take_result();
    result.converged = result.max_deviation < target.epsilon;
    return result;
}

ExtensionResult greedy_extension(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target,
                                 const LabelSource& labels, const SubsequenceSpaceSpec& spec, std::uint64_t j0,
                                 const GreedyOptions& options) {
    std::uint64_t last = options.max_block;
    if (auto h = spec.horizon()) {
        last = std::min(last, *h);
    }
    if (last <= j0) {
        throw std::invalid_argument("greedy_extension: no blocks available beyond j0 within the budget");
    }
    const BlockTable table = spec.materialize(last);
    Extender extender(prefix, target, labels, table, j0);
    const std::uint64_t prefix_terms = table.M(j0);
    const Rational s = from_u64(target.mu.size());
    std::uint64_t next_checkpoint = j0 + 1;
    while (extender.result().j1 < last) {
        extender.step();
        const auto& r = extender.result();
        if (r.j1 != next_checkpoint && r.j1 != last) {
            continue;
        }
        next_checkpoint = j0 + 2 * (next_checkpoint - j0);
        const bool prefix_small =
            r.terms > 0 && make_rational(BigInt(static_cast<unsigned long>(prefix_terms)),
                                         BigInt(static_cast<unsigned long>(r.terms))) < target.epsilon / (3 * s);
        if (r.max_deviation < target.epsilon && prefix_small) {
            ExtensionResult out = extender.take_result();
            out.converged = true;
            return out;
        }
    }
    ExtensionResult out = extender.take_result();
    out.converged = false;
    out.diagnostic = "budget exhausted at block " + std::to_string(out.j1) + ": max |d_i| = " +
                     to_decimal(out.max_deviation, 6) + ", epsilon = " + to_decimal(target.epsilon, 6);
    return out;
}

std::uint64_t choice_count(const BlockTable& table, std::uint64_t j0, std::uint64_t j1) {
    BigInt product = 1;
    const BigInt cap(static_cast<unsigned long>(UINT64_MAX));
    for (std::uint64_t j = j0 + 1; j <= j1; ++j) {
        product *= binomial(table.b(j), table.m(j));
        if (product > cap) {
            return UINT64_MAX;
        }
    }
    return product.get_ui();
}

ExtensionResult brute_force_extension(const std::vector<std::uint64_t>& prefix, const ExtensionTarget& target,
                                      const LabelSource& labels, const BlockTable& table, std::uint64_t j0,
                                      std::uint64_t j1) {
    if (j1 < j0 || j1 > table.blocks()) {
        throw std::invalid_argument("brute_force_extension: need j0 <= j1 <= materialized blocks");
    }
    const std::uint64_t choices = choice_count(table, j0, j1);
    if (choices > kMaxBruteForceChoices) {
        throw SearchSpaceOverflow("search space of " +
                                  (choices == UINT64_MAX ? std::string("more than 2^64") : std::to_string(choices)) +
                                  " choices exceeds 10^7");
    }
    validate_target(target);
    check_prefix(prefix, table, j0);
    const std::size_t s = target.mu.size();
    std::vector<std::uint64_t> base(s, 0);
    for (auto n : prefix) {
        const std::size_t c = labels(n);
        if (c >= s) {
            throw std::out_of_range("label outside the target's cells");
        }
        ++base[c];
    }
    const std::uint64_t terms = table.M(j1);

    // Two subsets of one block with equal per-cell counts give the same
    // deviations, and the smallest indices per cell give the lexicographically
    // first of them, so it suffices to enumerate per-block count vectors.
    std::vector<std::vector<std::vector<std::uint64_t>>> groups;
    for (std::uint64_t j = j0 + 1; j <= j1; ++j) {
        groups.push_back(block_by_cell(table, j, labels, s));
    }

    struct Best {
        bool set = false;
        Rational total;
        std::vector<Rational> sorted;
        std::vector<std::uint64_t> indices;
        std::vector<Rational> deviations;
    } best;

    std::vector<std::vector<std::uint64_t>> picks(groups.size(), std::vector<std::uint64_t>(s, 0));
    std::vector<std::uint64_t> counts = base;

    auto indices_of = [&]() {
        std::vector<std::uint64_t> out = prefix;
        for (std::size_t b = 0; b < groups.size(); ++b) {
            auto chosen = take(groups[b], picks[b]);
            out.insert(out.end(), chosen.begin(), chosen.end());
        }
        return out;
    };

    auto leaf = [&]() {
        auto d = deviations_of(target.mu, counts, terms);
        Rational total = total_of(d);
        if (best.set && total > best.total) {
            return;
        }
        std::vector<Rational> sorted = d;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        if (best.set && total == best.total) {
            if (std::lexicographical_compare(best.sorted.begin(), best.sorted.end(), sorted.begin(), sorted.end())) {
                return;
            }
            if (sorted == best.sorted) {
                auto indices = indices_of();
                if (!(indices < best.indices)) {
                    return;
                }
                best.indices = std::move(indices);
                return;
            }
        }
        best.set = true;
        best.total = std::move(total);
        best.sorted = std::move(sorted);
        best.indices = indices_of();
        best.deviations = std::move(d);
    };

    // DFS over blocks, and within a block over cells, distributing m_j picks.
    std::function<void(std::size_t, std::size_t, std::uint64_t)> visit = [&](std::size_t b, std::size_t c,
                                                                             std::uint64_t left) {
        if (b == groups.size()) {
            leaf();
            return;
        }
        if (c == s) {
            if (left == 0) {
                const bool last = b + 1 == groups.size();
                visit(b + 1, 0, last ? 0 : table.m(j0 + b + 2));
            }
            return;
        }
        const std::uint64_t cap = std::min<std::uint64_t>(left, groups[b][c].size());
        for (std::uint64_t k = 0; k <= cap; ++k) {
            picks[b][c] = k;
            counts[c] += k;
            visit(b, c + 1, left - k);
            counts[c] -= k;
        }
        picks[b][c] = 0;
    };
    if (groups.empty()) {
        leaf();
    } else {
        visit(0, 0, table.m(j0 + 1));
    }

    ExtensionResult result;
    result.j0 = j0;
    result.j1 = j1;
    result.terms = terms;
    result.indices = std::move(best.indices);
    result.deviations = std::move(best.deviations);
    result.total_deviation = best.total;
    result.max_deviation = max_of(result.deviations);
    result.converged = result.max_deviation < target.epsilon;
    return result;
}

std::vector<ExchangeFact> exchange_facts(const ExtensionResult& result, const LabelSource& labels,
                                         const BlockTable& table, const Rational& epsilon) {
    const CellSet y = high_deviation_set(result.deviations, epsilon);
    auto in_y = [&](std::uint64_t n) { return std::binary_search(y.begin(), y.end(), labels(n)); };
    std::vector<ExchangeFact> facts;
    for (std::uint64_t j = result.j0 + 1; j <= result.j1; ++j) {
        std::vector<bool> chosen(table.b(j), false);
        for (auto n : result.indices) {
            if (n > table.a(j - 1) && n <= table.a(j)) {
                chosen[n - table.a(j - 1) - 1] = true;
            }
        }
        std::uint64_t y_available = 0;
        for (std::uint64_t n = table.a(j - 1) + 1; n <= table.a(j); ++n) {
            y_available += in_y(n) ? 1 : 0;
        }
        ExchangeFact fact;
        fact.block = j;
        fact.y_covers = y_available >= table.m(j);
        fact.holds = true;
        for (std::uint64_t n = table.a(j - 1) + 1; n <= table.a(j); ++n) {
            const bool picked = chosen[n - table.a(j - 1) - 1];
            if (fact.y_covers ? (picked && !in_y(n)) : (!picked && in_y(n))) {
                fact.holds = false;
            }
        }
        facts.push_back(fact);
    }
    return facts;
}

std::vector<IndexRun> run_length(const std::vector<std::uint64_t>& indices) {
    std::vector<IndexRun> runs;
    for (auto n : indices) {
        if (!runs.empty() && runs.back().start + runs.back().length == n) {
            ++runs.back().length;
        } else {
            runs.push_back({n, 1});
        }
    }
    return runs;
}

} // namespace udist
