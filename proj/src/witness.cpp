#include "udist/witness.hpp"

#include <algorithm>

namespace udist {

namespace {

Rational from_u64(std::uint64_t v) { return Rational(BigInt(static_cast<unsigned long>(v))); }

std::string k_message(const std::string& what, std::uint64_t k) { return what + " fails at k = " + std::to_string(k); }

/// x^a for rational x and positive BigInt exponent small enough to fit.
Rational rational_power(const Rational& x, const BigInt& exponent) {
    if (!exponent.fits_ulong_p()) {
        throw std::overflow_error("exponent too large for exact comparison");
    }
    return pow(x, exponent.get_ui());
}

RealInterval lift(const TorusInterval& arc) {
    const Rational& l = arc.left();
    return arc.wraps() ? RealInterval{l, arc.right() + 1} : RealInterval{l, arc.right()};
}

/// The sub-arc of J of length exactly eps, centred in J.
Rational centred_start(const TorusInterval& J, const Rational& epsilon) {
    return J.start() + (J.length() - epsilon) / 2;
}

} // namespace

void validate_mixing_config(const MixingConfig& config) {
    if (config.epsilon <= 0 || config.epsilon >= 1) {
        throw WitnessError("mixing chain needs 0 < epsilon < 1", 0);
    }
    if (config.delta <= 0 || config.delta > 1) {
        throw WitnessError("mixing chain needs 0 < delta <= 1", 0);
    }
    if (config.n.size() != config.targets.size()) {
        throw WitnessError("need one target interval per sequence term", 0);
    }
    if (config.working.length() < config.delta) {
        throw WitnessError("working interval shorter than delta", 0);
    }
    for (std::size_t k = 0; k < config.targets.size(); ++k) {
        if (config.targets[k].length() < config.epsilon) {
            throw WitnessError(k_message("target length >= epsilon", k + 1), k + 1);
        }
    }
    if (config.n.empty()) {
        return;
    }
    if (!(config.n[0] > 2 / config.delta)) {
        throw WitnessError(k_message("n_1 > 2/delta", 1), 1);
    }
    for (std::size_t k = 0; k + 1 < config.n.size(); ++k) {
        if (!(config.n[k + 1] > (2 / config.epsilon) * config.n[k])) {
            throw WitnessError(k_message("n_{k+1} > (2/eps) n_k", k + 1), k + 1);
        }
    }
}

MixingChain mixing_chain(const MixingConfig& config) {
    validate_mixing_config(config);
    MixingChain chain;
    chain.intervals.push_back(lift(config.working));
    for (std::size_t k = 0; k < config.n.size(); ++k) {
        const BigInt& n = config.n[k];
        const RealInterval& outer = chain.intervals.back();
        const Rational s = centred_start(config.targets[k], config.epsilon);
        // First preimage component ((s + j)/n, (s + eps + j)/n) starting at or after outer.lo.
        const BigInt j = ceil(Rational(n * outer.lo - s));
        RealInterval inner{(s + j) / n, (s + config.epsilon + j) / n};
        chain.intervals.push_back(inner);
    }
    const RealInterval& last = chain.intervals.back();
    chain.alpha = TorusPoint::wrap((last.lo + last.hi) / 2);

    // Independent re-check of every claim.
    for (std::size_t k = 1; k < chain.intervals.size(); ++k) {
        if (!chain.intervals[k - 1].contains(chain.intervals[k])) {
            throw std::logic_error(k_message("nesting I_k in I_{k-1}", k));
        }
        if (chain.intervals[k].length() != config.epsilon / config.n[k - 1]) {
            throw std::logic_error(k_message("length(I_k) = eps/n_k", k));
        }
        const TorusPoint image = mul_mod1(config.n[k - 1], chain.alpha);
        if (!config.targets[k - 1].contains(image)) {
            throw std::logic_error(k_message("n_k alpha in J_k", k));
        }
        chain.margins.push_back(config.targets[k - 1].boundary_distance(image));
    }
    if (!config.working.contains(chain.alpha)) {
        throw std::logic_error("alpha outside the working interval");
    }
    return chain;
}

bool plan_q_inequality(const Rational& Q, const Rational& q) {
    if (Q <= 0 || q <= 1) {
        return false;
    }
    const Rational r = 1 / (4 * Q) - 2;
    if (r <= 0) {
        return false;
    }
    // q^(a/b) > 2  <=>  q^a > 2^b
    return rational_power(q, r.get_num()) > rational_power(Rational(2), r.get_den());
}

bool plan_c_lower(std::uint64_t c, const Rational& q, const Rational& epsilon) {
    return pow(q, c) > 2 / epsilon;
}

bool plan_c_upper(std::uint64_t c, const Rational& Q, const Rational& q, const Rational& epsilon) {
    const Rational r = 4 * Q * from_u64(c);
    // q^(a/b) < (1/eps)  <=>  q^a < (1/eps)^b
    return rational_power(q, r.get_num()) < rational_power(1 / epsilon, r.get_den());
}

Salat2Witness salat2_witness(const IndexSequence& n, const Rational& q, const TorusInterval& target,
                             const std::optional<WitnessPlan>& plan, const TorusInterval& working) {
    if (q <= 1) {
        throw WitnessError("ratio bound q must exceed 1", 0);
    }
    const Rational epsilon = target.length();
    if (!(epsilon < 1 / q)) {
        throw WitnessError("target length must be below 1/q", 0);
    }
    Salat2Witness w;
    w.target = target;
    w.working = working;
    if (plan) {
        w.plan = *plan;
        w.plan.q = q;
        if (!plan_q_inequality(w.plan.Q, q)) {
            throw WitnessError("plan Q violates (1/(4Q) - 1) - log_q 2 > 1", 0);
        }
        if (!plan_c_lower(w.plan.c, q, epsilon) || !plan_c_upper(w.plan.c, w.plan.Q, q, epsilon)) {
            throw WitnessError("plan c outside (log_q 2 - log_q eps, -(1/(4Q)) log_q eps)", 0);
        }
    } else {
        w.plan.q = q;
        std::uint64_t u = 1;
        Rational q_power = 1 / q;  // q^(u-2)
        while (!(q_power > 2)) {
            ++u;
            q_power *= q;
            if (u > 100000) {
                throw WitnessError("no Q = 1/(4u) with u <= 100000 satisfies the Q-inequality", 0);
            }
        }
        w.plan.Q = make_rational(1, 4 * static_cast<std::int64_t>(u));
        std::uint64_t c = 1;
        Rational c_power = q;
        while (!(c_power > 2 / epsilon)) {
            ++c;
            c_power *= q;
        }
        if (!plan_c_upper(c, w.plan.Q, q, epsilon)) {
            throw WitnessError("no integer c in the interval for Q = " + to_string(w.plan.Q), 0);
        }
        w.plan.c = c;
    }
    const std::uint64_t c = w.plan.c;
    const Rational delta = working.length();
    if (w.plan.k_star == 0) {
        std::uint64_t k_star = 2;
        while (!(n.term((k_star - 1) * c) > 2 / delta)) {
            ++k_star;
            if (k_star > 100000) {
                throw WitnessError("sequence never exceeds 2/delta", 0);
            }
        }
        w.plan.k_star = k_star;
    } else if (w.plan.k_star < 2) {
        throw WitnessError("k* must be at least 2", 0);
    }
    const std::uint64_t k_star = w.plan.k_star;
    w.horizon = 2 * k_star * c;
    for (std::uint64_t k = 1; k < w.horizon; ++k) {
        if (!(n.term(k + 1) >= q * n.term(k))) {
            throw WitnessError(k_message("n_{k+1} >= q n_k", k), k);
        }
    }
    MixingConfig config;
    config.epsilon = epsilon;
    config.delta = delta;
    config.working = working;
    for (std::uint64_t j = k_star - 1; j <= 2 * k_star - 1; ++j) {
        w.forced.push_back(j * c);
        config.n.push_back(n.term(j * c));
        config.targets.push_back(target);
    }
    w.chain = mixing_chain(config);
    w.alpha = w.chain.alpha;
    for (std::uint64_t k = 1; k <= w.horizon; ++k) {
        w.hits += target.contains(mul_mod1(n.term(k), w.alpha)) ? 1 : 0;
    }
    w.frequency = make_rational(BigInt(static_cast<unsigned long>(w.hits)), BigInt(static_cast<unsigned long>(w.horizon)));
    if (!(w.frequency > make_rational(1, 2 * static_cast<std::int64_t>(c)))) {
        throw std::logic_error("salat2 witness frequency not above 1/(2c)");
    }
    return w;
}

std::uint64_t HistogramTarget::total() const {
    std::uint64_t sum = 0;
    for (auto v : e) {
        sum += v;
    }
    return sum;
}

bool in_histogram_set(const std::vector<Rational>& frequencies, const HistogramTarget& target) {
    if (frequencies.size() != target.e.size()) {
        return false;
    }
    const Rational total = from_u64(target.total());
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        if (!(abs(frequencies[i] - from_u64(target.e[i]) / total) < target.eta)) {
            return false;
        }
    }
    return true;
}

Salat3Witness salat3_witness(const IndexSequence& n, const HistogramTarget& target, std::uint64_t n0,
                             const TorusInterval& working) {
    const std::size_t cells = target.e.size();
    if (cells == 0) {
        throw WitnessError("histogram needs at least one cell", 0);
    }
    if (std::any_of(target.e.begin(), target.e.end(), [](std::uint64_t v) { return v == 0; })) {
        throw WitnessError("histogram weights must be positive", 0);
    }
    if (target.eta <= 0) {
        throw WitnessError("eta must be positive", 0);
    }
    const std::uint64_t e = target.total();
    if (n0 == 0 || n0 % e != 0) {
        throw WitnessError("divisibility: e = " + std::to_string(e) + " must divide N0 = " + std::to_string(n0), 0);
    }
    Salat3Witness w;
    w.n0 = n0;
    const std::uint64_t horizon = n0 * n0;
    w.slack_bound = 0;
    if (cells > 1) {
        for (auto ei : target.e) {
            Rational share = make_rational(BigInt(static_cast<unsigned long>(ei)), BigInt(static_cast<unsigned long>(e)));
            Rational worst = std::max(share, Rational(1 - share)) / from_u64(n0);
            if (worst > w.slack_bound) {
                w.slack_bound = worst;
            }
        }
    }
    if (!(w.slack_bound < target.eta)) {
        throw WitnessError("slack: the " + std::to_string(n0) + " free terms can move a frequency by " +
                               to_string(w.slack_bound) + ", not below eta",
                           0);
    }
    const Rational ell = from_u64(cells);
    if (cells == 1) {
        w.alpha = TorusPoint::wrap(working.midpoint());
    } else {
        const std::uint64_t forced = horizon - n0;
        MixingConfig config;
        config.epsilon = 1 / ell;
        config.delta = working.length();
        config.working = working;
        for (std::size_t i = 0; i < cells; ++i) {
            const std::uint64_t copies = target.e[i] * forced / e;
            for (std::uint64_t c = 0; c < copies; ++c) {
                w.forced_cell.push_back(i);
            }
        }
        for (std::uint64_t k = n0 + 1; k <= horizon; ++k) {
            const std::uint64_t cell = w.forced_cell[k - n0 - 1];
            config.n.push_back(n.term(k));
            config.targets.push_back(TorusInterval::open(from_u64(cell) / ell, from_u64(cell + 1) / ell));
        }
        try {
            w.chain = mixing_chain(config);
        } catch (const WitnessError& err) {
            // Re-index the failure to the original sequence.
            throw WitnessError(std::string("growth: ") + err.what() + " (sequence index " +
                                   std::to_string(err.k() + n0) + ")",
                               err.k() == 0 ? 0 : err.k() + n0);
        }
        w.alpha = w.chain->alpha;
    }
    const CellPartition partition = CellPartition::uniform(cells);
    w.counts.assign(cells, 0);
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        ++w.counts[partition.cell_of(mul_mod1(n.term(k), w.alpha))];
    }
    for (auto count : w.counts) {
        w.frequencies.push_back(make_rational(BigInt(static_cast<unsigned long>(count)),
                                              BigInt(static_cast<unsigned long>(horizon))));
    }
    if (!in_histogram_set(w.frequencies, target)) {
        throw std::logic_error("salat3 witness misses the histogram target");
    }
    return w;
}

AvoidanceResult avoidance_sequence(const TorusPoint& alpha, const Rational& epsilon,
                                   const std::vector<std::uint64_t>& prefix, std::uint64_t count) {
    if (epsilon <= 0 || epsilon >= 1) {
        throw WitnessError("avoidance needs 0 < eps < 1", 0);
    }
    const Rational& a = alpha.value();
    if (!(epsilon <= a && a + epsilon <= 1)) {
        throw WitnessError("(0, eps) and (alpha, alpha + eps) overlap mod 1", 0);
    }
    if (prefix.empty() || prefix.front() == 0) {
        throw WitnessError("avoidance needs a nonempty prefix of positive indices", 0);
    }
    AvoidanceResult out;
    out.indices = prefix;
    out.prefix_length = prefix.size();
    out.gaps_ok = true;
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i] <= prefix[i - 1] || prefix[i] - prefix[i - 1] > 2) {
            throw WitnessError("prefix gap outside {1, 2}", i + 1);
        }
    }
    auto hit = [&](std::uint64_t m) {
        const Rational x = mul_mod1(BigInt(static_cast<unsigned long>(m)), alpha).value();
        return x > 0 && x < epsilon;
    };
    out.indices.reserve(prefix.size() + count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t last = out.indices.back();
        const std::uint64_t next = hit(last + 1) ? last + 2 : last + 1;
        out.indices.push_back(next);
    }
    for (std::size_t i = prefix.size(); i < out.indices.size(); ++i) {
        out.hits_after_prefix += hit(out.indices[i]) ? 1 : 0;
        const std::uint64_t gap = out.indices[i] - out.indices[i - 1];
        out.gaps_ok = out.gaps_ok && (gap == 1 || gap == 2);
    }
    return out;
}

BinaryPoint zero_block_alpha(const Rational& base, const std::vector<std::uint64_t>& block_starts) {
    if (base <= make_rational(1, 2) || base >= make_rational(3, 4)) {
        throw WitnessError("base must lie in (1/2, 3/4)", 0);
    }
    if (block_starts.empty()) {
        throw WitnessError("need at least one zero block", 0);
    }
    for (std::size_t i = 0; i < block_starts.size(); ++i) {
        if (block_starts[i] <= 2) {
            throw WitnessError("zero block starting at digit " + std::to_string(block_starts[i]) +
                                   " would overwrite the leading digits",
                               i + 1);
        }
        if (i > 0 && block_starts[i] <= block_starts[i - 1]) {
            throw WitnessError("block starts must increase", i + 1);
        }
    }
    const std::uint64_t last = block_starts.back();
    std::vector<std::uint8_t> digits = BinaryPoint::from_rational(base, last * last).digits();
    for (auto j : block_starts) {
        for (std::uint64_t p = j; p <= j * j; ++p) {
            digits[p - 1] = 0;
        }
    }
    BinaryPoint alpha(std::move(digits));
    const Rational value = alpha.value();
    if (value <= make_rational(1, 2) || value >= make_rational(3, 4)) {
        throw WitnessError("forced zeros move the value to " + to_string(value) + ", outside (1/2, 3/4)", 0);
    }
    return alpha;
}

} // namespace udist
