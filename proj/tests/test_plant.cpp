#include <catch2/catch_amalgamated.hpp>

#include "statuscale/plant.hpp"

using namespace statuscale;

TEST_CASE("profile curve interpolates and clamps") {
    const ProfileCurve curve;  // (0,0) -> (100, 0.8)
    CHECK(curve.value(0.0) == 0.0);
    CHECK(curve.value(50.0) == Catch::Approx(0.4));
    CHECK(curve.value(100.0) == Catch::Approx(0.8));
    CHECK(curve.value(200.0) == 1.0);   // raw 1.6, clamped
    CHECK(curve.value(-10.0) == 0.0);
}

TEST_CASE("profile curve inverse extrapolates the last segment") {
    const ProfileCurve curve;
    CHECK(curve.inverse(0.4) == Catch::Approx(50.0));
    CHECK(curve.inverse(0.8) == Catch::Approx(100.0));
    CHECK(curve.inverse(1.0) == Catch::Approx(125.0));

    const ProfileCurve bent({{0.0, 0.0}, {50.0, 0.6}, {100.0, 0.8}});
    CHECK(bent.inverse(0.3) == Catch::Approx(25.0));
    CHECK(bent.inverse(0.7) == Catch::Approx(75.0));
    CHECK(bent.inverse(1.0) == Catch::Approx(150.0));
    for (double u : {0.1, 0.35, 0.62, 0.79}) {
        CHECK(bent.value(bent.inverse(u)) == Catch::Approx(u));
    }
}

TEST_CASE("profile curve rejects non-increasing knots") {
    CHECK_THROWS_AS(ProfileCurve({{0.0, 0.0}}), ConstraintViolated);
    CHECK_THROWS_AS(ProfileCurve({{0.0, 0.0}, {0.0, 0.5}}), ConstraintViolated);
    CHECK_THROWS_AS(ProfileCurve({{0.0, 0.0}, {10.0, 0.0}}), ConstraintViolated);
    CHECK_THROWS_AS(ProfileCurve({{0.0, 0.5}, {10.0, 0.4}}), ConstraintViolated);
}

TEST_CASE("utilization divides load across replicas and quota") {
    const ServiceModel svc;
    CHECK(svc.utilization(100.0, 1, 1.0) == Catch::Approx(0.8));
    CHECK(svc.utilization(100.0, 2, 1.0) == Catch::Approx(0.4));
    CHECK(svc.utilization(100.0, 2, 0.5) == Catch::Approx(0.8));
    CHECK(svc.utilization(0.0, 3, 2.0) == 0.0);
    CHECK_THROWS_AS(svc.utilization(10.0, 0, 1.0), ConstraintViolated);
    CHECK_THROWS_AS(svc.utilization(10.0, 1, 0.0), ConstraintViolated);
}

TEST_CASE("response time blows up toward saturation and caps") {
    const ServiceModel svc;
    CHECK(svc.response_time(0.0) == Catch::Approx(30.0));
    CHECK(svc.response_time(0.5) == Catch::Approx(60.0));
    CHECK(svc.response_time(0.8) == Catch::Approx(150.0));
    CHECK(svc.response_time(0.9) == Catch::Approx(300.0));
    CHECK(svc.response_time(0.99) == 500.0);  // 3000 uncapped
    CHECK(svc.response_time(1.0) == 500.0);
}

TEST_CASE("cpu demand and quota sizing agree with the curve") {
    const ServiceModel svc;
    // 125 requests/s per core saturates the default curve.
    CHECK(svc.cpu_demand(125.0) == Catch::Approx(1.0));
    CHECK(svc.cpu_demand(250.0) == Catch::Approx(2.0));
    // Sizing 125 requests/s at 0.8 target on one replica takes 1.25 cores.
    CHECK(svc.quota_for(125.0, 1, 0.8) == Catch::Approx(1.25));
    CHECK(svc.quota_for(125.0, 5, 0.8) == Catch::Approx(0.25));
    // The sized quota really does land on the target.
    const double q = svc.quota_for(240.0, 2, 0.8);
    CHECK(svc.utilization(240.0, 2, q) == Catch::Approx(0.8));
}
