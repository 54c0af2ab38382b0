#pragma once

// Self-contained JSON certificates for witness constructions. A certificate
// echoes its inputs, the constructed alpha and the evidence used (nested
// intervals, forced cells, index runs, digits); every claim is re-derived from
// those with the torus and doubling primitives, never from the builders.

#include "udist/doubling.hpp"
#include "udist/torus.hpp"
#include "udist/witness.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace udist {

using Json = nlohmann::ordered_json;

/// Malformed certificate, or one whose claims reach past its echoed inputs.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const Rational& value);
Rational rational_from_json(const Json& value);
Json to_json(const TorusInterval& interval);
TorusInterval interval_from_json(const Json& value);

Json certify_mixing(const MixingConfig& config, const MixingChain& chain);
Json certify_salat2(const IndexSequence& n, const Rational& q, const TorusInterval& target,
                    const TorusInterval& working, const std::optional<WitnessPlan>& given, const Salat2Witness& witness);
Json certify_salat3(const IndexSequence& n, const HistogramTarget& target, std::uint64_t n0,
                    const TorusInterval& working, const Salat3Witness& witness);
Json certify_avoidance(const TorusPoint& alpha, const Rational& epsilon, const std::vector<std::uint64_t>& prefix,
                       std::uint64_t count, const AvoidanceResult& result);
Json certify_zero_block(const Rational& base, const std::vector<std::uint64_t>& starts, const BinaryPoint& alpha);

struct VerifyReport {
    bool ok = false;
    std::vector<std::string> failures;  // one line per failing claim
};

/// Recomputes every claim; a claim fails when its recorded values or verdict
/// differ from the recomputation or the recomputed verdict is false.
/// Throws CertificateError for malformed certificates or out-of-range horizons.
VerifyReport verify_certificate(const Json& certificate);

/// True when every recorded claim verdict is true.
bool all_claims_pass(const Json& certificate);

} // namespace udist
