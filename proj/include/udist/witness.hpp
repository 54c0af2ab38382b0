#pragma once

// Explicit rational alpha whose orbits n_k * alpha mod 1 behave badly in a
// prescribed, exactly checkable way: nested preimage chains, forced visits to
// a short interval, prescribed histograms, and avoidance of (0, eps).

#include "udist/doubling.hpp"
#include "udist/rational.hpp"
#include "udist/torus.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace udist {

/// A precondition failure tied to a position k in the sequence (0 if none).
class WitnessError : public std::invalid_argument {
public:
    WitnessError(const std::string& message, std::uint64_t k) : std::invalid_argument(message), k_(k) {}
    std::uint64_t k() const noexcept { return k_; }

private:
    std::uint64_t k_;
};

/// Targets J_1..J_K for n_1..n_K (n.size() == targets.size()).
struct MixingConfig {
    std::vector<BigInt> n;
    Rational epsilon;
    Rational delta;
    TorusInterval working = TorusInterval::open(0, 1);
    std::vector<TorusInterval> targets;
};

/// An interval of the real line; the chain lives in a lift of the working arc.
struct RealInterval {
    Rational lo;
    Rational hi;
    Rational length() const { return hi - lo; }
    bool contains(const RealInterval& inner) const { return lo <= inner.lo && inner.hi <= hi; }
};

struct MixingChain {
    /// I_0 (lift of J'), I_1, ..., I_K.
    std::vector<RealInterval> intervals;
    TorusPoint alpha;
    /// Circular distance from n_k alpha to the boundary of J_k, k = 1..K.
    std::vector<Rational> margins;
};

/// Checks n_1 > 2/delta and n_{k+1} > (2/eps) n_k, lengths of J' and J_k;
/// throws WitnessError naming the failing k.
void validate_mixing_config(const MixingConfig& config);

/// Builds I_k of length eps/n_k inside I_{k-1} and inside n_k^-1(J_k), then
/// alpha = midpoint of I_K; every claim is re-checked before returning.
MixingChain mixing_chain(const MixingConfig& config);

struct WitnessPlan {
    Rational Q;
    Rational q;
    std::uint64_t c = 0;
    std::uint64_t k_star = 0;
};

/// (1/(4Q) - 1) - log_q 2 > 1, i.e. q^(1/(4Q) - 2) > 2, compared exactly.
bool plan_q_inequality(const Rational& Q, const Rational& q);
/// log_q(2/eps) < c, i.e. q^c > 2/eps.
bool plan_c_lower(std::uint64_t c, const Rational& q, const Rational& epsilon);
/// c < -(1/(4Q)) log_q eps, i.e. q^(4Qc) < 1/eps. Equivalent to 1/(2c) > 2Q/(-log_q eps).
bool plan_c_upper(std::uint64_t c, const Rational& Q, const Rational& q, const Rational& epsilon);

struct Salat2Witness {
    WitnessPlan plan;
    TorusPoint alpha;
    TorusInterval target = TorusInterval::open(0, 1);
    TorusInterval working = TorusInterval::open(0, 1);
    std::uint64_t horizon = 0;                // N = 2 k* c
    std::vector<std::uint64_t> forced;        // indices j c, j = k*-1 .. 2k*-1
    std::uint64_t hits = 0;                   // #{k <= N : n_k alpha in I}
    Rational frequency;
    MixingChain chain;
};

/// Forces n_{jc} alpha into I for j = k*-1 .. 2k*-1 (k*+1 indices below N = 2k*c),
/// so the frequency at N is strictly above 1/(2c). Terms are n_k = n.term(k), k >= 1.
/// With no plan, Q = 1/(4u) for the least u with q^(u-2) > 2, c is the least
/// valid integer and k* >= 2 the least with n_{(k*-1)c} > 2/delta.
Salat2Witness salat2_witness(const IndexSequence& n, const Rational& q, const TorusInterval& target,
                             const std::optional<WitnessPlan>& plan = std::nullopt,
                             const TorusInterval& working = TorusInterval::open(0, 1));

struct HistogramTarget {
    std::vector<std::uint64_t> e;
    Rational eta;
    std::uint64_t total() const;
};

struct Salat3Witness {
    TorusPoint alpha;
    std::uint64_t n0 = 0;
    std::vector<std::uint64_t> forced_cell;   // cell forced at k = N0+1 .. N0^2
    std::vector<std::uint64_t> counts;        // cell counts of n_k alpha, k = 1..N0^2
    std::vector<Rational> frequencies;
    Rational slack_bound;                     // max_i max(e_i/e, 1 - e_i/e) / N0
    std::optional<MixingChain> chain;
};

/// Forces exactly (e_i/e)(N0^2 - N0) of the terms k = N0+1..N0^2 into the open
/// cell (i/l, (i+1)/l); the N0 free terms move each frequency by at most the
/// slack bound, which must be below eta.
Salat3Witness salat3_witness(const IndexSequence& n, const HistogramTarget& target, std::uint64_t n0,
                             const TorusInterval& working = TorusInterval::open(0, 1));

/// |mu([i/l, (i+1)/l)) - e_i/e| < eta for every cell.
bool in_histogram_set(const std::vector<Rational>& frequencies, const HistogramTarget& target);

struct AvoidanceResult {
    std::vector<std::uint64_t> indices;       // prefix, then the extension
    std::size_t prefix_length = 0;
    std::uint64_t hits_after_prefix = 0;      // extension terms with n alpha in (0, eps)
    bool gaps_ok = false;                     // all gaps in {1, 2}
};

/// Requires (0, eps) and (alpha, alpha + eps) disjoint mod 1, i.e. eps <= alpha
/// and alpha + eps <= 1. Appends `count` terms: gap 1 unless that lands in (0, eps),
/// else gap 2.
AvoidanceResult avoidance_sequence(const TorusPoint& alpha, const Rational& epsilon,
                                   const std::vector<std::uint64_t>& prefix, std::uint64_t count);

/// Digits of base (first j_B^2 of them) with positions j_i..j_i^2 set to 0.
/// Requires j_1 > 2 and increasing starts; the result must lie in (1/2, 3/4).
BinaryPoint zero_block_alpha(const Rational& base, const std::vector<std::uint64_t>& block_starts);

} // namespace udist
