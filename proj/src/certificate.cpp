#include "udist/certificate.hpp"

#include <algorithm>
#include <functional>

namespace udist {

namespace {

Rational from_u64(std::uint64_t v) { return Rational(BigInt(static_cast<unsigned long>(v))); }

Json claim(std::string id, std::string statement, Json values, bool verdict) {
    Json c;
    c["id"] = std::move(id);
    c["statement"] = std::move(statement);
    c["values"] = std::move(values);
    c["verdict"] = verdict;
    return c;
}

const Json& field(const Json& object, const char* key) {
    if (!object.is_object() || !object.contains(key)) {
        throw CertificateError(std::string("certificate is missing field '") + key + "'");
    }
    return object.at(key);
}

std::uint64_t u64_field(const Json& object, const char* key) {
    const Json& v = field(object, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw CertificateError(std::string("field '") + key + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

std::vector<std::uint64_t> u64_list(const Json& value) {
    if (!value.is_array()) {
        throw CertificateError("expected an integer list");
    }
    std::vector<std::uint64_t> out;
    for (const auto& v : value) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw CertificateError("expected nonnegative integers");
        }
        out.push_back(v.get<std::uint64_t>());
    }
    return out;
}

Json u64_json(const std::vector<std::uint64_t>& values) {
    Json out = Json::array();
    for (auto v : values) {
        out.push_back(v);
    }
    return out;
}

/// n_k for a certificate, turning "no such term" into a horizon rejection.
BigInt term(const IndexSequence& n, std::uint64_t k) {
    try {
        return n.term(k);
    } catch (const std::out_of_range&) {
        throw CertificateError("claim needs n_" + std::to_string(k) + ", beyond the echoed sequence " + n.name());
    }
}

struct Evaluation {
    Json claims = Json::array();
    Json margins = Json::object();
};

// ---- mixing -------------------------------------------------------------

Evaluation evaluate_mixing(const Json& inputs, const Rational& alpha_value, const Json& evidence) {
    Evaluation ev;
    std::vector<BigInt> n;
    for (const auto& v : field(inputs, "n")) {
        n.push_back(parse_bigint(v.get<std::string>()));
    }
    const Rational eps = rational_from_json(field(inputs, "epsilon"));
    const Rational delta = rational_from_json(field(inputs, "delta"));
    const TorusInterval working = interval_from_json(field(inputs, "working"));
    std::vector<TorusInterval> targets;
    for (const auto& t : field(inputs, "targets")) {
        targets.push_back(interval_from_json(t));
    }
    const Json& intervals = field(evidence, "intervals");
    if (targets.size() != n.size()) {
        throw CertificateError("mixing certificate needs one target per term");
    }
    if (!intervals.is_array() || intervals.size() != n.size() + 1) {
        throw CertificateError("mixing evidence lists " + std::to_string(intervals.size()) +
                               " intervals for " + std::to_string(n.size()) + " echoed terms");
    }
    const TorusPoint alpha(alpha_value);

    bool hyp = eps > 0 && eps < 1 && delta > 0 && delta <= 1 && working.length() >= delta;
    for (const auto& t : targets) {
        hyp = hyp && t.length() >= eps;
    }
    if (!n.empty()) {
        hyp = hyp && n[0] > 2 / delta;
    }
    for (std::size_t k = 0; k + 1 < n.size(); ++k) {
        hyp = hyp && n[k + 1] > (2 / eps) * n[k];
    }
    ev.claims.push_back(claim("hypotheses", "n_1 > 2/delta, n_{k+1} > (2/eps) n_k, |J'| >= delta, |J_k| >= eps",
                              Json{{"K", n.size()}}, hyp));
    ev.claims.push_back(claim("alpha_in_working", "alpha in J'", Json{{"alpha", to_string(alpha_value)}},
                              working.contains(alpha)));

    Rational prev_lo = rational_from_json(field(intervals[0], "lo"));
    Rational prev_hi = rational_from_json(field(intervals[0], "hi"));
    Rational min_margin = 1;
    for (std::size_t k = 1; k <= n.size(); ++k) {
        const Rational lo = rational_from_json(field(intervals[k], "lo"));
        const Rational hi = rational_from_json(field(intervals[k], "hi"));
        const Rational length = hi - lo;
        const BigInt& nk = n[k - 1];
        bool ok = length == eps / nk && prev_lo <= lo && hi <= prev_hi;
        // n_k maps (lo, hi) onto an arc of length eps; it must sit inside J_k.
        ok = ok && targets[k - 1].contains(TorusInterval::arc(frac(Rational(nk * lo)), eps));
        const Rational offset = frac(Rational(alpha_value - lo));
        ok = ok && offset > 0 && offset < length;
        ev.claims.push_back(claim("interval_" + std::to_string(k),
                                  "I_k in I_{k-1}, |I_k| = eps/n_k, n_k I_k in J_k, alpha in I_k",
                                  Json{{"k", k}, {"lo", to_string(lo)}, {"hi", to_string(hi)},
                                       {"length", to_string(length)}},
                                  ok));
        const TorusPoint image = mul_mod1(nk, alpha);
        const bool inside = targets[k - 1].contains(image);
        ev.claims.push_back(claim("containment_" + std::to_string(k), "n_k alpha mod 1 in J_k",
                                  Json{{"k", k}, {"n", nk.get_str()}, {"image", to_string(image.value())}}, inside));
        if (inside) {
            min_margin = std::min(min_margin, targets[k - 1].boundary_distance(image));
        }
        prev_lo = lo;
        prev_hi = hi;
    }
    ev.margins["min_boundary_distance"] = to_string(min_margin);
    ev.margins["min_boundary_distance_decimal"] = to_decimal(min_margin, 12);
    return ev;
}

// ---- salat2 -------------------------------------------------------------

Evaluation evaluate_salat2(const Json& inputs, const Rational& alpha_value, const Json& evidence) {
    Evaluation ev;
    const IndexSequence n = IndexSequence::parse(field(inputs, "sequence").get<std::string>());
    const Rational q = rational_from_json(field(inputs, "q"));
    const TorusInterval target = interval_from_json(field(inputs, "target"));
    const TorusInterval working = interval_from_json(field(inputs, "working"));
    const Json& plan = field(evidence, "plan");
    const Rational Q = rational_from_json(field(plan, "Q"));
    const std::uint64_t c = u64_field(plan, "c");
    const std::uint64_t k_star = u64_field(plan, "k_star");
    const Json& given = field(inputs, "plan");
    if (given.is_object()) {
        if (rational_from_json(field(given, "Q")) != Q || u64_field(given, "c") != c ||
            (given.contains("k_star") && u64_field(given, "k_star") != k_star)) {
            throw CertificateError("evidence plan differs from the plan given in the inputs");
        }
    }
    if (c == 0 || k_star < 2) {
        throw CertificateError("plan needs c >= 1 and k* >= 2");
    }
    const std::uint64_t horizon = 2 * k_star * c;
    if (u64_field(evidence, "horizon") != horizon) {
        throw CertificateError("evidence horizon is not 2 k* c");
    }
    if (auto size = n.size(); size && horizon >= *size) {
        throw CertificateError("horizon N = " + std::to_string(horizon) + " beyond the echoed sequence");
    }
    const Rational eps = target.length();
    const TorusPoint alpha(alpha_value);

    ev.claims.push_back(claim("q_inequality", "(1/(4Q) - 1) - log_q 2 > 1, i.e. q^(1/(4Q) - 2) > 2",
                              Json{{"Q", to_string(Q)}, {"q", to_string(q)}}, plan_q_inequality(Q, q)));
    ev.claims.push_back(claim("c_interval", "log_q 2 - log_q eps < c < -(1/(4Q)) log_q eps",
                              Json{{"c", c}, {"epsilon", to_string(eps)}},
                              plan_c_lower(c, q, eps) && plan_c_upper(c, Q, q, eps)));
    const Rational lhs = make_rational(1, 2 * static_cast<std::int64_t>(c));
    ev.claims.push_back(claim("displayed_inequality", "1/(2c) > 2Q/(-log_q eps), compared exactly as q^(4Qc) < 1/eps",
                              Json{{"lhs", to_string(lhs)}, {"exponent_4Qc", to_string(Rational(4 * Q * from_u64(c)))}},
                              plan_c_upper(c, Q, q, eps)));
    bool growth = q > 1 && eps < 1 / q;
    for (std::uint64_t k = 1; k < horizon && growth; ++k) {
        growth = term(n, k + 1) >= q * term(n, k);
    }
    ev.claims.push_back(claim("growth", "n_{k+1} >= q n_k for k < N and |I| < 1/q", Json{{"N", horizon}}, growth));
    const Rational delta = working.length();
    ev.claims.push_back(claim("start", "n_{(k*-1)c} > 2/delta",
                              Json{{"k", (k_star - 1) * c}, {"delta", to_string(delta)}},
                              term(n, (k_star - 1) * c) > 2 / delta));
    ev.claims.push_back(claim("alpha_in_working", "alpha in J'", Json{{"alpha", to_string(alpha_value)}},
                              working.contains(alpha)));
    Rational min_margin = 1;
    for (std::uint64_t j = k_star - 1; j <= 2 * k_star - 1; ++j) {
        const std::uint64_t k = j * c;
        const TorusPoint image = mul_mod1(term(n, k), alpha);
        const bool inside = target.contains(image);
        if (inside) {
            min_margin = std::min(min_margin, target.boundary_distance(image));
        }
        ev.claims.push_back(claim("forced_" + std::to_string(k), "n_k alpha mod 1 in I",
                                  Json{{"k", k}, {"image", to_string(image.value())}}, inside));
    }
    std::uint64_t hits = 0;
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        hits += target.contains(mul_mod1(term(n, k), alpha)) ? 1 : 0;
    }
    const Rational frequency = make_rational(BigInt(static_cast<unsigned long>(hits)),
                                             BigInt(static_cast<unsigned long>(horizon)));
    ev.claims.push_back(claim("frequency", "#{k <= 2k*c : n_k alpha in I} / (2k*c) > 1/(2c)",
                              Json{{"N", horizon}, {"hits", hits}, {"frequency", to_string(frequency)},
                                   {"threshold", to_string(lhs)}},
                              frequency > lhs));
    ev.margins["frequency_excess"] = to_string(frequency - lhs);
    ev.margins["min_boundary_distance"] = to_string(min_margin);
    return ev;
}

// ---- salat3 -------------------------------------------------------------

Evaluation evaluate_salat3(const Json& inputs, const Rational& alpha_value, const Json& evidence) {
    Evaluation ev;
    const IndexSequence n = IndexSequence::parse(field(inputs, "sequence").get<std::string>());
    HistogramTarget target{u64_list(field(inputs, "e")), rational_from_json(field(inputs, "eta"))};
    const std::uint64_t n0 = u64_field(inputs, "n0");
    const TorusInterval working = interval_from_json(field(inputs, "working"));
    const std::vector<std::uint64_t> forced = u64_list(field(evidence, "forced_cells"));
    const std::size_t cells = target.e.size();
    const std::uint64_t e = target.total();
    if (cells == 0 || e == 0 || n0 == 0) {
        throw CertificateError("salat3 certificate needs cells, positive weights and N0 >= 1");
    }
    const std::uint64_t horizon = n0 * n0;
    if (auto size = n.size(); size && horizon >= *size) {
        throw CertificateError("horizon N0^2 = " + std::to_string(horizon) + " beyond the echoed sequence");
    }
    if (!forced.empty() && forced.size() != horizon - n0) {
        throw CertificateError("forced cell list does not cover k = N0+1 .. N0^2");
    }
    const TorusPoint alpha(alpha_value);
    const Rational ell = from_u64(cells);

    ev.claims.push_back(claim("divisibility", "e divides N0", Json{{"e", e}, {"n0", n0}}, n0 % e == 0));
    Rational slack = 0;
    if (cells > 1) {
        for (auto ei : target.e) {
            Rational share = from_u64(ei) / from_u64(e);
            slack = std::max(slack, Rational(std::max(share, Rational(1 - share)) / from_u64(n0)));
        }
    }
    ev.claims.push_back(claim("slack", "max_i max(e_i/e, 1 - e_i/e) / N0 < eta",
                              Json{{"bound", to_string(slack)}, {"eta", to_string(target.eta)}}, slack < target.eta));
    ev.claims.push_back(claim("alpha_in_working", "alpha in J'", Json{{"alpha", to_string(alpha_value)}},
                              working.contains(alpha)));
    if (cells > 1) {
        std::vector<std::uint64_t> forced_counts(cells, 0);
        bool ok = forced.size() == horizon - n0;
        for (auto cell : forced) {
            if (cell >= cells) {
                throw CertificateError("forced cell out of range");
            }
            ++forced_counts[cell];
        }
        for (std::size_t i = 0; i < cells; ++i) {
            ok = ok && forced_counts[i] * e == target.e[i] * (horizon - n0);
        }
        ev.claims.push_back(claim("forced_counts", "cell i is forced exactly (e_i/e)(N0^2 - N0) times",
                                  Json{{"counts", u64_json(forced_counts)}}, ok));
        for (std::uint64_t k = n0 + 1; k <= horizon; ++k) {
            const std::uint64_t cell = forced[k - n0 - 1];
            const TorusInterval open_cell = TorusInterval::open(from_u64(cell) / ell, from_u64(cell + 1) / ell);
            const TorusPoint image = mul_mod1(term(n, k), alpha);
            ev.claims.push_back(claim("forced_" + std::to_string(k), "n_k alpha mod 1 in the open cell",
                                      Json{{"k", k}, {"cell", cell}, {"image", to_string(image.value())}},
                                      open_cell.contains(image)));
        }
    }
    const CellPartition partition = CellPartition::uniform(cells);
    std::vector<std::uint64_t> counts(cells, 0);
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        ++counts[partition.cell_of(mul_mod1(term(n, k), alpha))];
    }
    std::vector<Rational> freq;
    Json freq_json = Json::array();
    Rational worst = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        freq.push_back(from_u64(counts[i]) / from_u64(horizon));
        freq_json.push_back(to_string(freq.back()));
        worst = std::max(worst, abs(Rational(freq.back() - from_u64(target.e[i]) / from_u64(e))));
    }
    ev.claims.push_back(claim("histogram", "|mu([i/l, (i+1)/l)) - e_i/e| < eta at N = N0^2",
                              Json{{"N", horizon}, {"counts", u64_json(counts)}, {"frequencies", freq_json}},
                              in_histogram_set(freq, target)));
    ev.margins["max_cell_error"] = to_string(worst);
    ev.margins["eta_minus_error"] = to_string(target.eta - worst);
    return ev;
}

// ---- avoidance ----------------------------------------------------------

Evaluation evaluate_avoidance(const Json& inputs, const Rational& alpha_value, const Json& evidence) {
    Evaluation ev;
    const Rational eps = rational_from_json(field(inputs, "epsilon"));
    const std::vector<std::uint64_t> prefix = u64_list(field(inputs, "prefix"));
    const std::uint64_t count = u64_field(inputs, "count");
    std::vector<std::uint64_t> indices;
    for (const auto& run : field(evidence, "runs")) {
        if (!run.is_array() || run.size() != 2) {
            throw CertificateError("runs must be [start, length] pairs");
        }
        const auto start = run[0].get<std::uint64_t>();
        const auto length = run[1].get<std::uint64_t>();
        if (indices.size() + length > prefix.size() + count) {
            throw CertificateError("index runs extend beyond the echoed horizon");
        }
        for (std::uint64_t i = 0; i < length; ++i) {
            indices.push_back(start + i);
        }
    }
    const TorusPoint alpha(alpha_value);
    ev.claims.push_back(claim("disjoint", "(0, eps) and (alpha, alpha + eps) are disjoint mod 1",
                              Json{{"alpha", to_string(alpha_value)}, {"epsilon", to_string(eps)}},
                              eps > 0 && eps <= alpha_value && alpha_value + eps <= 1));
    const bool length_ok = indices.size() == prefix.size() + count &&
                           std::equal(prefix.begin(), prefix.end(), indices.begin());
    ev.claims.push_back(claim("length", "sequence = prefix followed by `count` terms",
                              Json{{"terms", indices.size()}}, length_ok));
    auto hit = [&](std::uint64_t m) {
        const Rational x = mul_mod1(BigInt(static_cast<unsigned long>(m)), alpha).value();
        return x > 0 && x < eps;
    };
    bool gaps = !indices.empty() && indices.front() > 0;
    bool rule = true;
    std::uint64_t hits = 0;
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const std::uint64_t gap = indices[i] > indices[i - 1] ? indices[i] - indices[i - 1] : 0;
        gaps = gaps && (gap == 1 || gap == 2);
        if (i >= prefix.size()) {
            hits += hit(indices[i]) ? 1 : 0;
            rule = rule && (gap == (hit(indices[i - 1] + 1) ? 2u : 1u));
        }
    }
    ev.claims.push_back(claim("gaps", "all gaps lie in {1, 2}", Json::object(), gaps));
    ev.claims.push_back(claim("rule", "gap 2 exactly when n_j + 1 would land in (0, eps)", Json::object(), rule));
    ev.claims.push_back(claim("avoidance", "no extension term has n alpha mod 1 in (0, eps)",
                              Json{{"hits_after_prefix", hits}}, hits == 0));
    const std::uint64_t last = indices.empty() ? 0 : indices.back();
    ev.margins["lower_density"] = last ? to_string(from_u64(indices.size()) / from_u64(last)) : "0/1";
    return ev;
}

// ---- zero blocks --------------------------------------------------------

Evaluation evaluate_zero_block(const Json& inputs, const Rational& alpha_value, const Json& evidence) {
    Evaluation ev;
    const Rational base = rational_from_json(field(inputs, "base"));
    const std::vector<std::uint64_t> starts = u64_list(field(inputs, "starts"));
    const BinaryPoint alpha = BinaryPoint::parse(field(evidence, "digits").get<std::string>());
    if (starts.empty()) {
        throw CertificateError("zero-block certificate needs block starts");
    }
    const std::uint64_t L = starts.back() * starts.back();
    if (alpha.length() != L) {
        throw CertificateError("digit string length differs from j_B^2");
    }
    const BinaryPoint base_digits = BinaryPoint::from_rational(base, L);
    bool digits_ok = alpha.value() == alpha_value;
    for (std::uint64_t p = 1; p <= L; ++p) {
        bool zeroed = false;
        for (auto j : starts) {
            zeroed = zeroed || (p >= j && p <= j * j);
        }
        digits_ok = digits_ok && alpha.digit(p) == (zeroed ? 0 : base_digits.digit(p));
    }
    ev.claims.push_back(claim("digits", "digits of base with positions j..j^2 zeroed", Json{{"length", L}}, digits_ok));
    ev.claims.push_back(claim("range", "alpha in (1/2, 3/4)", Json{{"alpha", to_string(alpha_value)}},
                              alpha_value > make_rational(1, 2) && alpha_value < make_rational(3, 4)));
    const Rational lo = make_rational(1, 2);
    const Rational hi = make_rational(3, 4);
    for (auto j : starts) {
        const std::uint64_t N = j * j;
        std::uint64_t hits = 0;
        for (std::uint64_t k = 0; k < N; ++k) {
            const Rational x = frac(Rational((k == 0 ? alpha_value : alpha.shift(k).value()) + alpha_value));
            hits += (x > lo && x < hi) ? 1 : 0;
        }
        const Rational density = from_u64(hits) / from_u64(N);
        const Rational floor_density = from_u64(N - j) / from_u64(N);
        ev.claims.push_back(claim("window_" + std::to_string(j),
                                  "#{k < j^2 : T^k alpha + alpha in (1/2, 3/4)} / j^2 >= 1 - 1/j",
                                  Json{{"N", N}, {"hits", hits}, {"density", to_string(density)}},
                                  density >= floor_density));
        ev.margins["window_" + std::to_string(j) + "_decimal"] = to_decimal(density, 6);
    }
    return ev;
}

Evaluation evaluate(const std::string& kind, const Json& inputs, const Rational& alpha, const Json& evidence) {
    if (kind == "mixing") {
        return evaluate_mixing(inputs, alpha, evidence);
    }
    if (kind == "salat2") {
        return evaluate_salat2(inputs, alpha, evidence);
    }
    if (kind == "salat3") {
        return evaluate_salat3(inputs, alpha, evidence);
    }
    if (kind == "avoid") {
        return evaluate_avoidance(inputs, alpha, evidence);
    }
    if (kind == "zeroblock") {
        return evaluate_zero_block(inputs, alpha, evidence);
    }
    throw CertificateError("unknown certificate kind '" + kind + "'");
}

Json assemble(const std::string& kind, Json inputs, const Rational& alpha, Json evidence) {
    Evaluation ev = evaluate(kind, inputs, alpha, evidence);
    Json cert;
    cert["kind"] = kind;
    cert["generator"] = "splitmix64";
    cert["inputs"] = std::move(inputs);
    cert["alpha"] = to_string(alpha);
    cert["alpha_decimal"] = to_decimal(alpha, 30);
    cert["evidence"] = std::move(evidence);
    cert["claims"] = std::move(ev.claims);
    cert["margins"] = std::move(ev.margins);
    cert["verdict"] = all_claims_pass(cert) ? "pass" : "fail";
    return cert;
}

Json plan_json(const WitnessPlan& plan) {
    return Json{{"Q", to_string(plan.Q)}, {"q", to_string(plan.q)}, {"c", plan.c}, {"k_star", plan.k_star}};
}

} // namespace

Json to_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& value) {
    if (!value.is_string()) {
        throw CertificateError("rationals are stored as \"p/q\" strings");
    }
    try {
        return parse_rational(value.get<std::string>());
    } catch (const RationalParseError& err) {
        throw CertificateError(std::string("malformed rational: ") + err.what());
    }
}

Json to_json(const TorusInterval& interval) {
    return Json{{"left", to_string(interval.left())}, {"right", to_string(interval.right())},
                {"wraps", interval.wraps()}};
}

TorusInterval interval_from_json(const Json& value) {
    Rational left = rational_from_json(field(value, "left"));
    Rational right = rational_from_json(field(value, "right"));
    const bool wraps = value.contains("wraps") && value.at("wraps").get<bool>();
    return wraps ? TorusInterval::wrapping(left, right) : TorusInterval::open(left, right);
}

Json certify_mixing(const MixingConfig& config, const MixingChain& chain) {
    Json inputs;
    Json n = Json::array();
    for (const auto& v : config.n) {
        n.push_back(v.get_str());
    }
    inputs["n"] = std::move(n);
    inputs["epsilon"] = to_string(config.epsilon);
    inputs["delta"] = to_string(config.delta);
    inputs["working"] = to_json(config.working);
    Json targets = Json::array();
    for (const auto& t : config.targets) {
        targets.push_back(to_json(t));
    }
    inputs["targets"] = std::move(targets);
    Json intervals = Json::array();
    for (const auto& i : chain.intervals) {
        intervals.push_back(Json{{"lo", to_string(i.lo)}, {"hi", to_string(i.hi)}});
    }
    return assemble("mixing", std::move(inputs), chain.alpha.value(), Json{{"intervals", std::move(intervals)}});
}

Json certify_salat2(const IndexSequence& n, const Rational& q, const TorusInterval& target,
                    const TorusInterval& working, const std::optional<WitnessPlan>& given,
                    const Salat2Witness& witness) {
    Json inputs;
    inputs["sequence"] = n.name();
    inputs["q"] = to_string(q);
    inputs["target"] = to_json(target);
    inputs["working"] = to_json(working);
    if (given) {
        Json plan{{"Q", to_string(given->Q)}, {"c", given->c}};
        if (given->k_star != 0) {
            plan["k_star"] = given->k_star;
        }
        inputs["plan"] = std::move(plan);
    } else {
        inputs["plan"] = "auto";
    }
    Json evidence{{"plan", plan_json(witness.plan)}, {"horizon", witness.horizon}};
    return assemble("salat2", std::move(inputs), witness.alpha.value(), std::move(evidence));
}

Json certify_salat3(const IndexSequence& n, const HistogramTarget& target, std::uint64_t n0,
                    const TorusInterval& working, const Salat3Witness& witness) {
    Json inputs;
    inputs["sequence"] = n.name();
    inputs["e"] = u64_json(target.e);
    inputs["eta"] = to_string(target.eta);
    inputs["n0"] = n0;
    inputs["working"] = to_json(working);
    Json evidence{{"forced_cells", u64_json(witness.forced_cell)}};
    return assemble("salat3", std::move(inputs), witness.alpha.value(), std::move(evidence));
}

Json certify_avoidance(const TorusPoint& alpha, const Rational& epsilon, const std::vector<std::uint64_t>& prefix,
                       std::uint64_t count, const AvoidanceResult& result) {
    Json inputs;
    inputs["alpha"] = to_string(alpha.value());
    inputs["epsilon"] = to_string(epsilon);
    inputs["prefix"] = u64_json(prefix);
    inputs["count"] = count;
    Json runs = Json::array();
    for (std::size_t i = 0; i < result.indices.size();) {
        std::size_t j = i + 1;
        while (j < result.indices.size() && result.indices[j] == result.indices[j - 1] + 1) {
            ++j;
        }
        runs.push_back(Json::array({result.indices[i], j - i}));
        i = j;
    }
    return assemble("avoid", std::move(inputs), alpha.value(), Json{{"runs", std::move(runs)}});
}

Json certify_zero_block(const Rational& base, const std::vector<std::uint64_t>& starts, const BinaryPoint& alpha) {
    Json inputs;
    inputs["base"] = to_string(base);
    inputs["starts"] = u64_json(starts);
    return assemble("zeroblock", std::move(inputs), alpha.value(), Json{{"digits", alpha.to_string()}});
}

bool all_claims_pass(const Json& certificate) {
    const Json& claims = field(certificate, "claims");
    return std::all_of(claims.begin(), claims.end(), [](const Json& c) {
        return c.contains("verdict") && c.at("verdict").is_boolean() && c.at("verdict").get<bool>();
    });
}

VerifyReport verify_certificate(const Json& certificate) {
    const Json& kind_field = field(certificate, "kind");
    if (!kind_field.is_string()) {
        throw CertificateError("kind must be a string");
    }
    const std::string kind = kind_field.get<std::string>();
    const Rational alpha = rational_from_json(field(certificate, "alpha"));
    if (alpha < 0 || alpha >= 1) {
        throw CertificateError("alpha must lie in [0, 1)");
    }
    Evaluation ev;
    try {
        ev = evaluate(kind, field(certificate, "inputs"), alpha, field(certificate, "evidence"));
    } catch (const CertificateError&) {
        throw;
    } catch (const nlohmann::json::exception& err) {
        throw CertificateError(std::string("malformed certificate: ") + err.what());
    } catch (const std::invalid_argument& err) {
        throw CertificateError(std::string("malformed certificate: ") + err.what());
    }
    VerifyReport report;
    const Json& recorded = field(certificate, "claims");
    if (!recorded.is_array()) {
        throw CertificateError("claims must be an array");
    }
    std::vector<bool> matched(recorded.size(), false);
    for (const auto& fresh : ev.claims) {
        const std::string id = fresh.at("id").get<std::string>();
        auto it = std::find_if(recorded.begin(), recorded.end(),
                               [&](const Json& c) { return c.contains("id") && c.at("id") == id; });
        if (it == recorded.end()) {
            report.failures.push_back(id + ": missing from the certificate");
            continue;
        }
        matched[static_cast<std::size_t>(it - recorded.begin())] = true;
        if (!it->contains("values") || it->at("values") != fresh.at("values")) {
            report.failures.push_back(id + ": recorded values differ from recomputation " + fresh.at("values").dump());
        } else if (!it->contains("verdict") || it->at("verdict") != fresh.at("verdict")) {
            report.failures.push_back(id + ": recorded verdict differs from recomputation");
        } else if (!fresh.at("verdict").get<bool>()) {
            report.failures.push_back(id + ": claim is false");
        }
    }
    for (std::size_t i = 0; i < recorded.size(); ++i) {
        if (!matched[i]) {
            const Json& c = recorded[i];
            report.failures.push_back((c.contains("id") ? c.at("id").dump() : std::string("<no id>")) +
                                      ": not derivable from the echoed inputs");
        }
    }
    report.ok = report.failures.empty();
    return report;
}

} // namespace udist
