#include <cmath>

#include "doctest.h"
#include "t2qc/errors.hpp"
#include "t2qc/linalg.hpp"
#include "t2qc/rng.hpp"

using namespace t2qc;

namespace {

Eigen::MatrixXd random_spd(int p, std::uint64_t seed) {
    Philox2x64 rng = make_stream(seed, stream::test);
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
    return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

TEST_CASE("jacobi reconstructs the input matrix") {
    for (std::uint64_t s : {1u, 2u, 3u}) {
        Eigen::MatrixXd a = random_spd(5, s);
        EigenSym es = jacobi_eigensym(a);
        Eigen::MatrixXd back =
            es.vectors * es.values.asDiagonal() * es.vectors.transpose();
        CHECK((back - a).norm() <= 1e-10 * a.norm());
        CHECK((es.vectors.transpose() * es.vectors -
               Eigen::MatrixXd::Identity(5, 5))
                  .norm() <= 1e-12);
        for (int i = 1; i < 5; ++i) CHECK(es.values[i - 1] >= es.values[i]);
    }
}

TEST_CASE("jacobi on a diagonal matrix returns it unchanged") {
    Eigen::MatrixXd d = Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal();
    EigenSym es = jacobi_eigensym(d);
    CHECK(es.values[0] == doctest::Approx(3.0));
    CHECK(es.values[1] == doctest::Approx(2.0));
    CHECK(es.values[2] == doctest::Approx(1.0));
}

TEST_CASE("jacobi handles a known 2x2 exactly") {
    Eigen::MatrixXd a(2, 2);
    a << 2.0, 1.0, 1.0, 2.0;
    EigenSym es = jacobi_eigensym(a);
    CHECK(es.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spd solver quadratic form matches a dense inverse") {
    Eigen::MatrixXd a = random_spd(4, 77);
    SpdSolver solver(a);
    Philox2x64 rng = make_stream(5, stream::test);
    for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd d(4);
        for (int i = 0; i < 4; ++i) d[i] = rng.normal();
        const double direct = d.dot(a.inverse() * d);
        CHECK(solver.quad_form(d) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("spd solver rejects indefinite and ill-conditioned input") {
    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(SpdSolver{indef}, NumericError);

    Eigen::MatrixXd ill(2, 2);
    ill << 1.0, 0.0, 0.0, 1e-14;
    CHECK_THROWS_AS(SpdSolver{ill}, NumericError);
    try {
        SpdSolver s(ill);
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("condition") != std::string::npos);
    }
}

TEST_CASE("submatrix and subvector restrict consistently") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    Eigen::MatrixXd r = submatrix(m, 0b101);
    CHECK(r.rows() == 2);
    CHECK(r(0, 0) == 1);
    CHECK(r(0, 1) == 3);
    CHECK(r(1, 0) == 7);
    CHECK(r(1, 1) == 9);
    Eigen::VectorXd v(3);
    v << 10, 20, 30;
    Eigen::VectorXd sv = subvector(v, 0b110);
    CHECK(sv[0] == 20);
    CHECK(sv[1] == 30);
}

TEST_CASE("min eigen ratio flags PD and non-PD") {
    CHECK(min_eigen_ratio(random_spd(3, 4)) > 0.0);
    Eigen::MatrixXd sing(2, 2);
    sing << 1.0, 1.0, 1.0, 1.0;
    CHECK(min_eigen_ratio(sing) <= 1e-15);
}
