#include "udist/certificate.hpp"

#include <gtest/gtest.h>

using namespace udist;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return make_rational(p, d); }

Json mixing_certificate() {
    auto J = TorusInterval::open(q(45, 100), q(55, 100));
    MixingConfig cfg{{BigInt(100), BigInt(10000), BigInt(1000000)}, q(1, 10), q(1, 20),
                     TorusInterval::open(q(3, 10), q(36, 100)), {J, J, J}};
    return certify_mixing(cfg, mixing_chain(cfg));
}

Json salat2_certificate() {
    auto n = IndexSequence::powers(2);
    auto target = TorusInterval::open(0, q(1, 64));
    auto working = TorusInterval::open(0, 1);
    auto w = salat2_witness(n, 2, target, std::nullopt, working);
    return certify_salat2(n, 2, target, working, std::nullopt, w);
}

Json& claim(Json& cert, const std::string& id) {
    for (auto& c : cert["claims"]) {
        if (c["id"] == id) {
            return c;
        }
    }
    throw std::runtime_error("no claim " + id);
}

} // namespace

TEST(Certificate, JsonRoundTrips) {
    EXPECT_EQ(rational_from_json(to_json(q(-3, 7))), q(-3, 7));
    auto arc = TorusInterval::arc(q(9, 10), q(1, 5));
    EXPECT_EQ(interval_from_json(to_json(arc)), arc);
    EXPECT_THROW(rational_from_json(Json(1.5)), CertificateError);
}

TEST(Certificate, EveryKindVerifies) {
    std::vector<Json> certs{mixing_certificate(), salat2_certificate()};
    {
        auto n = IndexSequence::power_squares(5);
        HistogramTarget target{{3, 1}, q(1, 10)};
        auto w = salat3_witness(n, target, 8);
        certs.push_back(certify_salat3(n, target, 8, TorusInterval::open(0, 1), w));
    }
    {
        auto r = avoidance_sequence(TorusPoint(q(1, 3)), q(1, 4), {1}, 200);
        certs.push_back(certify_avoidance(TorusPoint(q(1, 3)), q(1, 4), {1}, 200, r));
    }
    certs.push_back(certify_zero_block(q(5, 8), {4, 20}, zero_block_alpha(q(5, 8), {4, 20})));
    for (const auto& cert : certs) {
        EXPECT_EQ(cert["generator"], "splitmix64");
        EXPECT_TRUE(all_claims_pass(cert)) << cert["kind"];
        auto report = verify_certificate(cert);
        EXPECT_TRUE(report.ok) << cert["kind"] << ": " << (report.failures.empty() ? "" : report.failures[0]);
        // Serialisation does not change the verdict.
        EXPECT_TRUE(verify_certificate(Json::parse(cert.dump())).ok);
    }
}

TEST(Certificate, MixingCertificateListsThreeContainments) {
    auto cert = mixing_certificate();
    int containments = 0;
    for (const auto& c : cert["claims"]) {
        containments += c["id"].get<std::string>().rfind("containment_", 0) == 0;
    }
    EXPECT_EQ(containments, 3);
}

TEST(Certificate, TamperedAlphaFailsContainment) {
    auto cert = mixing_certificate();
    cert["alpha"] = "1/3";
    auto report = verify_certificate(cert);
    EXPECT_FALSE(report.ok);
    ASSERT_FALSE(report.failures.empty());
}

TEST(Certificate, TamperedClaimValueIsNamed) {
    auto cert = mixing_certificate();
    claim(cert, "containment_2")["verdict"] = false;
    auto report = verify_certificate(cert);
    EXPECT_FALSE(report.ok);
    ASSERT_EQ(report.failures.size(), 1u);
    EXPECT_NE(report.failures[0].find("containment_2"), std::string::npos);
}

TEST(Certificate, EditedFrequencyIsCaught) {
    auto cert = salat2_certificate();
    auto& freq = claim(cert, "frequency");
    freq["values"]["hits"] = 1;
    freq["values"]["frequency"] = "1/32";
    EXPECT_FALSE(verify_certificate(cert).ok);
}

TEST(Certificate, MissingOrExtraClaimsFail) {
    auto cert = mixing_certificate();
    cert["claims"].erase(cert["claims"].begin() + 3);
    EXPECT_FALSE(verify_certificate(cert).ok);
    auto extra = mixing_certificate();
    extra["claims"].push_back(Json{{"id", "made_up"}, {"values", Json::object()}, {"verdict", true}});
    EXPECT_FALSE(verify_certificate(extra).ok);
}

TEST(Certificate, HorizonBeyondInputsIsRejected) {
    auto cert = salat2_certificate();
    cert["evidence"]["horizon"] = 10000;
    EXPECT_THROW(verify_certificate(cert), CertificateError);

    auto list = IndexSequence::parse("list:1,2,4,8,16,32,64,128");
    auto target = TorusInterval::open(0, q(1, 64));
    EXPECT_ANY_THROW({
        auto w = salat2_witness(list, 2, target);
        auto c = certify_salat2(list, 2, target, TorusInterval::open(0, 1), std::nullopt, w);
        verify_certificate(c);
    });
}

TEST(Certificate, MalformedInputIsRejected) {
    EXPECT_THROW(verify_certificate(Json::object()), CertificateError);
    EXPECT_THROW(verify_certificate(Json{{"kind", "nonsense"}}), CertificateError);
    auto cert = mixing_certificate();
    cert["alpha"] = "one third";
    EXPECT_THROW(verify_certificate(cert), CertificateError);
}
