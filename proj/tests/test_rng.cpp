#include <cmath>
#include <vector>

#include "doctest.h"
#include "t2qc/errors.hpp"
#include "t2qc/mvn.hpp"
#include "t2qc/rng.hpp"

using namespace t2qc;

TEST_CASE("philox streams are reproducible bit for bit") {
    Philox2x64 a = make_stream(42, stream::test, 1, 2);
    Philox2x64 b = make_stream(42, stream::test, 1, 2);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Philox2x64 c = make_stream(42, stream::test, 1, 2);
    Philox2x64 d = make_stream(42, stream::test, 1, 3);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += c.next_u64() == d.next_u64();
    CHECK(same == 0);
}

TEST_CASE("philox output is insensitive to interleaving") {
    Philox2x64 a = make_stream(7, stream::test, 0);
    Philox2x64 b = make_stream(7, stream::test, 1);
    std::vector<double> only_a;
    {
        Philox2x64 a2 = make_stream(7, stream::test, 0);
        for (int i = 0; i < 50; ++i) only_a.push_back(a2.uniform01());
    }
    for (int i = 0; i < 50; ++i) {
        (void)b.uniform01();
        CHECK(a.uniform01() == only_a[std::size_t(i)]);
    }
}

TEST_CASE("uniform and normal draws have the expected moments") {
    Philox2x64 rng = make_stream(9, stream::test);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        su += u;
        su2 += u * u;
        double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n - 0.25 == doctest::Approx(1.0 / 12).epsilon(0.03));
    CHECK(std::fabs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mvn sample mean converges (identity covariance)") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(3);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
    MvnSampler s(mu, sigma);
    Philox2x64 rng = make_stream(11, stream::test);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += s.draw(rng);
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(sum[j] / n) < 0.02);
}

TEST_CASE("mvn coordinates are uncorrelated under a diagonal covariance") {
    Eigen::VectorXd mu(2);
    mu << 1.0, -2.0;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 4.0, 0.0, 0.0, 9.0;
    MvnSampler s(mu, sigma);
    Philox2x64 rng = make_stream(13, stream::test);
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = s.draw(rng);
        sx += v[0];
        sy += v[1];
        sxx += v[0] * v[0];
        syy += v[1] * v[1];
        sxy += v[0] * v[1];
    }
    const double cx = sxx / n - (sx / n) * (sx / n);
    const double cy = syy / n - (sy / n) * (sy / n);
    const double cxy = sxy / n - (sx / n) * (sy / n);
    CHECK(std::fabs(cxy / std::sqrt(cx * cy)) < 0.02);
    CHECK(cx == doctest::Approx(4.0).epsilon(0.05));
    CHECK(cy == doctest::Approx(9.0).epsilon(0.05));
}

TEST_CASE("mvn sampling is deterministic under a fixed seed") {
    Eigen::VectorXd mu(2);
    mu << 0.0, 0.0;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 2.0, 0.5, 0.5, 1.0;
    Philox2x64 r1 = make_stream(99, stream::test);
    Philox2x64 r2 = make_stream(99, stream::test);
    Eigen::VectorXd a = mvn_sample(mu, sigma, r1);
    Eigen::VectorXd b = mvn_sample(mu, sigma, r2);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
}

TEST_CASE("mvn rejects a non-PD covariance") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
    CHECK_THROWS_AS(MvnSampler(mu, bad), NumericError);
}
