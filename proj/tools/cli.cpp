#include "cli.hpp"

#include "udist/certificate.hpp"
#include "udist/doubling.hpp"
#include "udist/empirical.hpp"
#include "udist/envelope.hpp"
#include "udist/rng.hpp"
#include "udist/subspace.hpp"
#include "udist/witness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <functional>
#include <optional>
#include <sstream>

namespace udist::cli {

namespace {

/// Input the user got wrong: reported with exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    std::istringstream in(text);
    while (std::getline(in, current, sep)) {
        parts.push_back(current);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

Rational rational_arg(const std::string& text, const std::string& what) {
    try {
        return parse_rational(text);
    } catch (const RationalParseError& e) {
        throw UsageError("malformed rational for " + what + ": '" + text + "' (" + e.what() + ")");
    }
}

std::vector<Rational> rational_list(const std::string& text, const std::string& what) {
    std::vector<Rational> out;
    for (const auto& part : split(text, ',')) {
        out.push_back(rational_arg(part, what));
    }
    return out;
}

std::vector<std::uint64_t> u64_list(const std::string& text, const std::string& what) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split(text, ',')) {
        BigInt v;
        try {
            v = parse_bigint(part);
        } catch (const std::invalid_argument& e) {
            throw UsageError("malformed integer for " + what + ": '" + part + "' (" + e.what() + ")");
        }
        if (v < 0 || !v.fits_ulong_p()) {
            throw UsageError(what + ": '" + part + "' is not a 64-bit unsigned integer");
        }
        out.push_back(v.get_ui());
    }
    return out;
}

/// "l,r": open when l < r, the wrapping arc (l, 1) u [0, r) when l > r.
TorusInterval interval_arg(const std::string& text, const std::string& what) {
    auto parts = split(text, ',');
    if (parts.size() != 2) {
        throw UsageError(what + " must be 'left,right', got '" + text + "'");
    }
    Rational l = rational_arg(parts[0], what);
    Rational r = rational_arg(parts[1], what);
    return l < r ? TorusInterval::open(l, r) : TorusInterval::wrapping(l, r);
}

PointSequence sequence_arg(const std::string& text) {
    if (text == "harmonic") {
        return harmonic_sequence();
    }
    if (text.starts_with("rotation:")) {
        return rotation_sequence(TorusPoint::wrap(rational_arg(text.substr(9), "--x")));
    }
    throw UsageError("point sequence must be 'rotation:p/q' or 'harmonic', got '" + text + "'");
}

Json runs_json(const std::vector<std::uint64_t>& indices) {
    Json runs = Json::array();
    for (const auto& r : run_length(indices)) {
        runs.push_back(Json::array({r.start, r.length}));
    }
    return runs;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

Schedule schedule_json(const Json& value, const std::string& what) {
    if (value.is_array()) {
        return Schedule(Schedule::List{value.get<std::vector<std::uint64_t>>()});
    }
    if (!value.is_object() || !value.contains("rule")) {
        throw UsageError(what + " must be a list or an object with a 'rule'");
    }
    const std::string rule = value.at("rule").get<std::string>();
    auto get = [&](const char* key) {
        if (!value.contains(key)) {
            throw UsageError(what + " rule '" + rule + "' needs '" + key + "'");
        }
        return value.at(key).get<std::uint64_t>();
    };
    if (rule == "constant" || rule == "const") {
        return Schedule(Schedule::Constant{get("value")});
    }
    if (rule == "linear") {
        return Schedule(Schedule::Linear{get("slope"), get("offset")});
    }
    if (rule == "log") {
        return Schedule(Schedule::Log{get("scale"), get("offset")});
    }
    if (rule == "ratio") {
        return Schedule(Schedule::Ratio{get("num"), get("den"), value.value("round_up", true)});
    }
    throw UsageError(what + ": unknown rule '" + rule + "'");
}

SubsequenceSpaceSpec spec_json(const Json& value) {
    if (!value.is_object() || !value.contains("b") || !value.contains("m")) {
        throw UsageError("spec must be an object with 'b' and 'm'");
    }
    return SubsequenceSpaceSpec(schedule_json(value.at("b"), "b"), schedule_json(value.at("m"), "m"));
}

RatioMeasure pi_arg(const std::string& text) {
    std::vector<RatioMeasure::Atom> atoms;
    for (const auto& part : split(text, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw UsageError("--pi atoms must be 'location:weight', got '" + part + "'");
        }
        atoms.push_back({rational_arg(part.substr(0, colon), "--pi"), rational_arg(part.substr(colon + 1), "--pi")});
    }
    return RatioMeasure(std::move(atoms));
}

struct Sink {
    std::ostream& out;
    std::string path;

    void write(const std::string& text) const {
        if (path.empty()) {
            out << text;
            return;
        }
        std::ofstream file(path);
        if (!file) {
            throw UsageError("cannot write '" + path + "'");
        }
        file << text;
    }
    void json(const Json& value) const { write(value.dump(2) + "\n"); }
};

int claim_status(const Json& certificate) { return all_claims_pass(certificate) ? kExitOk : kExitClaimFailed; }

// ---- envelope -----------------------------------------------------------

struct EnvelopeArgs {
    std::string pi;
    std::string b;
    std::string m;
    std::uint64_t blocks = 0;
    std::size_t grid = 11;
    std::string mu;
    std::string lambda;
    std::string mode = "auto";
    std::uint64_t unions = 1u << 20;
    std::string tolerance = "0";
};

int run_envelope(const EnvelopeArgs& a, std::uint64_t seed, int precision, const Sink& sink) {
    std::optional<RatioMeasure> pi;
    if (!a.pi.empty()) {
        pi = pi_arg(a.pi);
    } else if (!a.b.empty() && !a.m.empty()) {
        auto b = u64_list(a.b, "--b");
        auto m = u64_list(a.m, "--m");
        const BlockTable table(b, m);
        pi = pi_measure(table, a.blocks == 0 ? table.blocks() : a.blocks);
    } else {
        throw UsageError("envelope needs --pi or both --b and --m");
    }
    if (a.mu.empty() != a.lambda.empty()) {
        throw UsageError("--mu and --lambda go together");
    }
    if (a.mu.empty()) {
        EnvelopeFunction F(*pi);
        std::ostringstream csv;
        csv << "t,F,t_exact,F_exact\n";
        for (const auto& row : F.tabulate(a.grid)) {
            csv << to_decimal(row.t, precision) << ',' << to_decimal(row.value, precision) << ',' << to_string(row.t)
                << ',' << to_string(row.value) << '\n';
        }
        sink.write(csv.str());
        return kExitOk;
    }
    DominationOptions options;
    options.seed = seed;
    options.random_unions = a.unions;
    options.tolerance = rational_arg(a.tolerance, "--tolerance");
    static const std::map<std::string, DominationMode> modes{{"auto", DominationMode::Auto},
                                                             {"exhaustive", DominationMode::Exhaustive},
                                                             {"cellwise", DominationMode::Cellwise},
                                                             {"randomized", DominationMode::Randomized}};
    options.mode = modes.at(a.mode);
    const MeasureVector mu(rational_list(a.mu, "--mu"));
    const MeasureVector lambda(rational_list(a.lambda, "--lambda"));
    const auto result = envelope_dominates(mu, lambda, *pi, options);
    Json out;
    out["kind"] = "envelope_domination";
    out["generator"] = std::string(SplitMix64::algorithm_name);
    out["seed"] = seed;
    Json atoms = Json::array();
    for (const auto& atom : pi->atoms()) {
        atoms.push_back(Json::array({to_string(atom.location), to_string(atom.weight)}));
    }
    out["pi"] = std::move(atoms);
    out["dominated"] = result.dominated;
    out["violating_union"] = result.violating_union ? Json(*result.violating_union) : Json(nullptr);
    out["max_excess"] = to_string(result.max_excess);
    out["max_excess_decimal"] = to_decimal(result.max_excess, precision);
    out["unions_checked"] = result.unions_checked;
    sink.json(out);
    return result.dominated ? kExitOk : kExitClaimFailed;
}

// ---- subspace -----------------------------------------------------------

struct SubspaceArgs {
    std::string spec;
    std::string mode = "greedy";
    std::uint64_t blocks = 0;
    std::string indices;
    std::string target;
    std::string x = "rotation:1/1";
    std::size_t cells = 2;
    std::uint64_t j0 = 0;
    std::string prefix;
    std::uint64_t max_block = 4096;
    std::string trace;
};

int run_subspace(const SubspaceArgs& a, std::uint64_t seed, int precision, const Sink& sink) {
    const SubsequenceSpaceSpec spec = spec_json(read_json_file(a.spec));
    Json out;
    out["kind"] = "subspace";
    out["generator"] = std::string(SplitMix64::algorithm_name);
    out["seed"] = seed;
    out["mode"] = a.mode;
    if (a.mode == "sample") {
        if (a.blocks == 0) {
            throw UsageError("sample mode needs --blocks J >= 1");
        }
        const BlockTable table = spec.materialize(a.blocks);
        auto indices = sample_uniform(table, a.blocks, seed);
        out["blocks"] = a.blocks;
        out["terms"] = indices.size();
        out["indices_rle"] = runs_json(indices);
        sink.json(out);
        return kExitOk;
    }
    if (a.mode == "validate") {
        if (a.blocks == 0) {
            throw UsageError("validate mode needs --blocks J >= 1");
        }
        const BlockTable table = spec.materialize(a.blocks);
        auto result = validate_membership(a.indices.empty() ? std::vector<std::uint64_t>{}
                                                            : u64_list(a.indices, "--indices"),
                                          table);
        static const char* names[] = {"member", "not_member", "indeterminate"};
        out["blocks"] = a.blocks;
        out["verdict"] = names[static_cast<int>(result.verdict)];
        out["block"] = result.block;
        out["reason"] = result.reason;
        sink.json(out);
        return result.verdict == Membership::NotMember ? kExitClaimFailed : kExitOk;
    }
    if (a.mode != "greedy") {
        throw UsageError("subspace --mode must be greedy, sample or validate");
    }
    if (a.target.empty()) {
        throw UsageError("greedy mode needs --target FILE");
    }
    const Json target_json = read_json_file(a.target);
    const CellPartition partition = CellPartition::uniform(a.cells);
    auto list_of = [&](const char* key) {
        std::vector<Rational> values;
        for (const auto& v : target_json.at(key)) {
            values.push_back(rational_arg(v.get<std::string>(), key));
        }
        return values;
    };
    if (!target_json.contains("mu") || !target_json.contains("epsilon") || !target_json.contains("pi")) {
        throw UsageError("target needs 'mu', 'pi' and 'epsilon'");
    }
    ExtensionTarget target{MeasureVector(list_of("mu")),
                           target_json.contains("lambda") ? MeasureVector(list_of("lambda"))
                                                          : MeasureVector::lebesgue(partition),
                           RatioMeasure::dirac(Rational(1)),
                           rational_arg(target_json.at("epsilon").get<std::string>(), "epsilon")};
    if (target_json.at("pi").is_string()) {
        target.pi = pi_arg(target_json.at("pi").get<std::string>());
    } else {
        const auto blocks = target_json.at("pi").at("spec_blocks").get<std::uint64_t>();
        target.pi = pi_measure(spec, blocks);
    }
    if (target.mu.size() != a.cells) {
        throw UsageError("target mu has " + std::to_string(target.mu.size()) + " cells, --cells is " +
                         std::to_string(a.cells));
    }
    const auto prefix = a.prefix.empty() ? std::vector<std::uint64_t>{} : u64_list(a.prefix, "--prefix");
    GreedyOptions options;
    options.max_block = a.max_block;
    const auto result = greedy_extension(prefix, target, labels_of(sequence_arg(a.x), partition), spec, a.j0,
                                         options);
    out["x"] = a.x;
    out["cells"] = a.cells;
    out["j0"] = result.j0;
    out["j1"] = result.j1;
    out["terms"] = result.terms;
    out["converged"] = result.converged;
    Json deviations = Json::array();
    for (const auto& d : result.deviations) {
        deviations.push_back(to_string(d));
    }
    out["deviations"] = std::move(deviations);
    out["total_deviation"] = to_string(result.total_deviation);
    out["max_deviation_decimal"] = to_decimal(result.max_deviation, precision);
    out["diagnostic"] = result.diagnostic;
    out["indices_rle"] = runs_json(result.indices);
    sink.json(out);
    if (!a.trace.empty()) {
        std::ostringstream csv;
        csv << "block,M";
        for (std::size_t i = 0; i < a.cells; ++i) {
            csv << ",d_" << (i + 1);
        }
        csv << '\n';
        for (const auto& row : result.trace) {
            csv << row.block << ',' << row.terms;
            for (const auto& d : row.deviations) {
                csv << ',' << to_decimal(d, precision);
            }
            csv << '\n';
        }
        Sink{sink.out, a.trace}.write(csv.str());
    }
    return result.converged ? kExitOk : kExitClaimFailed;
}

// ---- witness ------------------------------------------------------------

struct WitnessArgs {
    std::string mode;
    std::string n;
    std::string epsilon;
    std::string delta;
    std::string working = "0,1";
    std::vector<std::string> targets;
    std::string sequence;
    std::string q = "2";
    std::string Q;
    std::uint64_t c = 0;
    std::uint64_t k_star = 0;
    std::string e;
    std::string eta;
    std::uint64_t n0 = 0;
    std::string alpha;
    std::string prefix = "1";
    std::uint64_t count = 0;
    std::string base;
    std::string starts;
};

void require(const std::string& value, const char* flag, const std::string& mode) {
    if (value.empty()) {
        throw UsageError("witness " + mode + " needs " + flag);
    }
}

int run_witness(const WitnessArgs& a, const Sink& sink) {
    const TorusInterval working = interval_arg(a.working, "--working");
    Json cert;
    if (a.mode == "mixing") {
        require(a.n, "--n", a.mode);
        require(a.epsilon, "--epsilon", a.mode);
        require(a.delta, "--delta", a.mode);
        MixingConfig config;
        for (const auto& part : split(a.n, ',')) {
            try {
                config.n.push_back(parse_bigint(part));
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("malformed --n term: ") + e.what());
            }
        }
        config.epsilon = rational_arg(a.epsilon, "--epsilon");
        config.delta = rational_arg(a.delta, "--delta");
        config.working = working;
        if (a.targets.size() == 1) {
            config.targets.assign(config.n.size(), interval_arg(a.targets[0], "--target"));
        } else if (a.targets.size() == config.n.size()) {
            for (const auto& t : a.targets) {
                config.targets.push_back(interval_arg(t, "--target"));
            }
        } else {
            throw UsageError("give one --target for all terms or one per term");
        }
        cert = certify_mixing(config, mixing_chain(config));
    } else if (a.mode == "salat2") {
        require(a.sequence, "--sequence", a.mode);
        if (a.targets.size() != 1) {
            throw UsageError("witness salat2 needs exactly one --target");
        }
        const IndexSequence n = IndexSequence::parse(a.sequence);
        const Rational q = rational_arg(a.q, "--q");
        const TorusInterval target = interval_arg(a.targets[0], "--target");
        std::optional<WitnessPlan> plan;
        if (!a.Q.empty()) {
            plan = WitnessPlan{rational_arg(a.Q, "--Q"), q, a.c, a.k_star};
        }
        cert = certify_salat2(n, q, target, working, plan, salat2_witness(n, q, target, plan, working));
    } else if (a.mode == "salat3") {
        require(a.sequence, "--sequence", a.mode);
        require(a.e, "--e", a.mode);
        require(a.eta, "--eta", a.mode);
        const IndexSequence n = IndexSequence::parse(a.sequence);
        const HistogramTarget target{u64_list(a.e, "--e"), rational_arg(a.eta, "--eta")};
        cert = certify_salat3(n, target, a.n0, working, salat3_witness(n, target, a.n0, working));
    } else if (a.mode == "avoid") {
        require(a.alpha, "--alpha", a.mode);
        require(a.epsilon, "--epsilon", a.mode);
        const TorusPoint alpha = TorusPoint::wrap(rational_arg(a.alpha, "--alpha"));
        const Rational eps = rational_arg(a.epsilon, "--epsilon");
        const auto prefix = u64_list(a.prefix, "--prefix");
        cert = certify_avoidance(alpha, eps, prefix, a.count, avoidance_sequence(alpha, eps, prefix, a.count));
    } else if (a.mode == "zeroblock") {
        require(a.base, "--base", a.mode);
        require(a.starts, "--starts", a.mode);
        const Rational base = rational_arg(a.base, "--base");
        const auto starts = u64_list(a.starts, "--starts");
        cert = certify_zero_block(base, starts, zero_block_alpha(base, starts));
    } else {
        throw UsageError("witness --mode must be mixing, salat2, salat3, avoid or zeroblock");
    }
    sink.json(cert);
    return claim_status(cert);
}

// ---- doubling -----------------------------------------------------------

struct DoublingArgs {
    std::string mode = "orbit";
    std::string alpha;
    std::string digits;
    std::uint64_t count = 0;
    unsigned level = 1;
    std::string windows;
};

int run_doubling(const DoublingArgs& a, int precision, const Sink& sink) {
    if (a.alpha.empty() == a.digits.empty() && a.mode != "fivesixth") {
        throw UsageError("doubling needs exactly one of --alpha or --digits");
    }
    auto orbit = [&](std::uint64_t count) {
        return a.digits.empty() ? doubling_orbit(TorusPoint::wrap(rational_arg(a.alpha, "--alpha")), count)
                                : doubling_orbit(BinaryPoint::parse(a.digits), count);
    };
    if (a.mode == "orbit") {
        std::ostringstream csv;
        csv << "k,x_exact,x\n";
        std::uint64_t k = 0;
        for (const auto& x : orbit(a.count)) {
            csv << ++k << ',' << to_string(x.value()) << ',' << to_decimal(x.value(), precision) << '\n';
        }
        sink.write(csv.str());
        return kExitOk;
    }
    Json out;
    out["kind"] = "doubling_" + a.mode;
    if (a.mode == "invariance") {
        if (a.count == 0) {
            throw UsageError("invariance needs --count K >= 1");
        }
        const auto points = orbit(a.count);
        const Rational defect = invariance_defect(points, CellPartition::dyadic(a.level));
        out["count"] = a.count;
        out["level"] = a.level;
        out["defect"] = to_string(defect);
        if (!a.alpha.empty()) {
            const auto period = orbit_period(rational_arg(a.alpha, "--alpha"));
            out["preperiod"] = period.preperiod;
            out["period"] = period.period;
        }
        sink.json(out);
        return kExitOk;
    }
    if (a.mode == "fivesixth") {
        if (a.alpha.empty() || a.count == 0) {
            throw UsageError("fivesixth needs --alpha and --count K >= 1");
        }
        const auto r = five_sixth_check(rational_arg(a.alpha, "--alpha"), a.count);
        out["horizon"] = r.orbit.horizon;
        out["hits"] = r.orbit.hits;
        out["density"] = to_string(r.orbit.density);
        out["bound"] = to_string(r.bound);
        out["minus_hits"] = r.minus_hits;
        out["plus_hits"] = r.plus_hits;
        out["counts_agree"] = r.counts_agree;
        out["exclusions"] = Json{{"T(I-)", r.t_minus_disjoint}, {"T2(I-)", r.t2_minus_disjoint},
                                 {"T(I+)", r.t_plus_disjoint}};
        out["holds"] = r.holds;
        sink.json(out);
        return r.holds && r.counts_agree ? kExitOk : kExitClaimFailed;
    }
    if (a.mode == "zeroblock") {
        if (a.digits.empty() || a.windows.empty()) {
            throw UsageError("zeroblock needs --digits and --windows");
        }
        const auto windows = u64_list(a.windows, "--windows");
        const auto r = zero_block_density(BinaryPoint::parse(a.digits), windows);
        Json rows = Json::array();
        for (const auto& w : r.windows) {
            rows.push_back(Json{{"N", w.end}, {"hits", w.hits}, {"density", to_string(w.density)},
                                {"density_decimal", to_decimal(w.density, precision)}});
        }
        out["windows"] = std::move(rows);
        sink.json(out);
        return kExitOk;
    }
    throw UsageError("doubling --mode must be orbit, invariance, fivesixth or zeroblock");
}

// ---- scan ---------------------------------------------------------------

struct ScanArgs {
    std::string x;
    std::size_t cells = 10;
    std::string checkpoints;
    std::string singleton;
    std::string eta = "1/100";
};

int run_scan(const ScanArgs& a, int precision, const Sink& sink) {
    if (a.x.empty() || a.checkpoints.empty()) {
        throw UsageError("scan needs --x and --checkpoints");
    }
    const PointSequence x = sequence_arg(a.x);
    const auto checkpoints = u64_list(a.checkpoints, "--checkpoints");
    if (!a.singleton.empty()) {
        const auto report = mu_bar_report(x, checkpoints, TargetSet::singleton(rational_arg(a.singleton, "--singleton")),
                                          rational_arg(a.eta, "--eta"));
        Json out;
        out["kind"] = "mu_bar";
        out["x"] = a.x;
        out["surrogate"] = to_string(report.surrogate);
        out["enlarged"] = to_string(report.enlarged);
        out["eta"] = to_string(report.eta);
        out["note"] = "the surrogate is a limsup over checkpoints and can miss mass accumulating at the target";
        sink.json(out);
        return kExitOk;
    }
    sink.write(scan_to_csv(checkpoint_scan(x, CellPartition::uniform(a.cells), checkpoints), precision));
    return kExitOk;
}

// ---- verify -------------------------------------------------------------

int run_verify(const std::string& path, std::ostream& out) {
    const Json cert = read_json_file(path);
    VerifyReport report;
    try {
        report = verify_certificate(cert);
    } catch (const CertificateError& e) {
        out << "REJECTED " << e.what() << '\n';
        return kExitClaimFailed;
    }
    if (report.ok) {
        out << "OK " << cert.value("kind", "") << ": " << cert.at("claims").size() << " claims verified\n";
        return kExitOk;
    }
    for (const auto& f : report.failures) {
        out << "FAIL " << f << '\n';
    }
    return kExitClaimFailed;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("UDIST_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("UDIST_SEED is not an unsigned integer: '") + env + "'");
        }
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact experiments on distribution of n*alpha mod 1 and subsequence spaces", "udist"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI/TOML file with option values; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    std::optional<std::uint64_t> seed_flag;
    int precision = 6;
    std::string output;
    app.add_option("--seed", seed_flag, "64-bit seed (default: $UDIST_SEED, else 0)");
    app.add_option("--precision", precision, "Decimal places in presentational columns")->check(CLI::Range(0, 100));
    app.add_option("-o,--output", output, "Write the main artifact here instead of stdout");

    EnvelopeArgs env;
    auto* envelope = app.add_subcommand("envelope", "Tabulate F_pi or test mu <= F_pi o lambda");
    envelope->add_option("--pi", env.pi, "Atoms 'q:w,q:w,...'");
    envelope->add_option("--b", env.b, "Block lengths b_1,b_2,...");
    envelope->add_option("--m", env.m, "Multiplicities m_1,m_2,...");
    envelope->add_option("--blocks", env.blocks, "N for pi_{I,m,N} (default: all listed blocks)");
    envelope->add_option("--grid", env.grid, "Grid points on [0, 1]")->check(CLI::Range(2, 1000000));
    envelope->add_option("--mu", env.mu, "Cell masses of mu");
    envelope->add_option("--lambda", env.lambda, "Cell masses of lambda");
    envelope->add_option("--mode", env.mode, "Union enumeration")
        ->check(CLI::IsMember({"auto", "exhaustive", "cellwise", "randomized"}));
    envelope->add_option("--unions", env.unions, "Random unions in randomized mode");
    envelope->add_option("--tolerance", env.tolerance, "Additive slack");

    SubspaceArgs sub;
    auto* subspace = app.add_subcommand("subspace", "Sample, validate or extend members of S(I, m)");
    subspace->add_option("--spec", sub.spec, "JSON file with 'b' and 'm' schedules")->required();
    subspace->add_option("--mode", sub.mode, "greedy, sample or validate");
    subspace->add_option("--blocks", sub.blocks, "Blocks to sample or validate");
    subspace->add_option("--indices", sub.indices, "Index prefix to validate");
    subspace->add_option("--target", sub.target, "JSON file with mu, lambda, pi, epsilon");
    subspace->add_option("--x", sub.x, "Point sequence: rotation:p/q or harmonic");
    subspace->add_option("--cells", sub.cells, "Uniform partition size")->check(CLI::Range(1, 1000000));
    subspace->add_option("--j0", sub.j0, "Blocks already covered by --prefix");
    subspace->add_option("--prefix", sub.prefix, "Member prefix through block j0");
    subspace->add_option("--max-block", sub.max_block, "Search budget in blocks");
    subspace->add_option("--trace", sub.trace, "Write the deviation trace CSV here");

    WitnessArgs wit;
    auto* witness = app.add_subcommand("witness", "Build an exact alpha and its certificate");
    witness->add_option("--mode", wit.mode, "mixing, salat2, salat3, avoid or zeroblock")->required();
    witness->add_option("--n", wit.n, "mixing: n_1,...,n_K");
    witness->add_option("--epsilon", wit.epsilon, "Target length (mixing) or avoided length (avoid)");
    witness->add_option("--delta", wit.delta, "mixing: delta");
    witness->add_option("--working", wit.working, "Working interval J' as 'l,r'");
    witness->add_option("--target", wit.targets, "Target interval 'l,r' (repeatable)");
    witness->add_option("--sequence", wit.sequence, "pow:B, powsq:B, powp1:B or list:n_0,n_1,...");
    witness->add_option("--q", wit.q, "salat2: ratio lower bound q");
    witness->add_option("--Q", wit.Q, "salat2: explicit plan Q (default: auto)");
    witness->add_option("--c", wit.c, "salat2: explicit plan c");
    witness->add_option("--k-star", wit.k_star, "salat2: explicit k*");
    witness->add_option("--e", wit.e, "salat3: histogram weights e_0,...");
    witness->add_option("--eta", wit.eta, "salat3: tolerance eta");
    witness->add_option("--n0", wit.n0, "salat3: N0");
    witness->add_option("--alpha", wit.alpha, "avoid: alpha");
    witness->add_option("--prefix", wit.prefix, "avoid: prefix indices");
    witness->add_option("--count", wit.count, "avoid: terms to append");
    witness->add_option("--base", wit.base, "zeroblock: base point in (1/2, 3/4)");
    witness->add_option("--starts", wit.starts, "zeroblock: block starts j_1 < j_2 < ...");

    DoublingArgs dbl;
    auto* doubling = app.add_subcommand("doubling", "Orbits of x -> 2x mod 1");
    doubling->add_option("--mode", dbl.mode, "orbit, invariance, fivesixth or zeroblock");
    doubling->add_option("--alpha", dbl.alpha, "Rational starting point");
    doubling->add_option("--digits", dbl.digits, "Binary digits '0.1011...'");
    doubling->add_option("--count", dbl.count, "Orbit length K");
    doubling->add_option("--level", dbl.level, "Dyadic partition level")->check(CLI::Range(0u, 24u));
    doubling->add_option("--windows", dbl.windows, "zeroblock: window ends");

    ScanArgs sc;
    auto* scan = app.add_subcommand("scan", "Empirical measures at checkpoints");
    scan->add_option("--x", sc.x, "Point sequence: rotation:p/q or harmonic");
    scan->add_option("--cells", sc.cells, "Uniform partition size")->check(CLI::Range(1, 1000000));
    scan->add_option("--checkpoints", sc.checkpoints, "N_1,N_2,...");
    scan->add_option("--singleton", sc.singleton, "Report the mu-bar surrogate for {x} instead");
    scan->add_option("--eta", sc.eta, "Enlargement radius for the mu-bar report");

    std::string certificate_path;
    auto* verify = app.add_subcommand("verify", "Re-check a certificate from its echoed inputs");
    verify->add_option("certificate", certificate_path, "Certificate JSON file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
        const Sink sink{out, output};
        if (*envelope) {
            return run_envelope(env, seed, precision, sink);
        }
        if (*subspace) {
            return run_subspace(sub, seed, precision, sink);
        }
        if (*witness) {
            return run_witness(wit, sink);
        }
        if (*doubling) {
            return run_doubling(dbl, precision, sink);
        }
        if (*scan) {
            return run_scan(sc, precision, sink);
        }
        return run_verify(certificate_path, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const WitnessError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Json::exception& e) {
        err << "error: malformed JSON input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SearchSpaceOverflow& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace udist::cli
