#include "dks/identities.hpp"

#include "brute_oracle.hpp"

#include <doctest.h>

#include <complex>

using dks::gain::identity_ids;
using dks::gain::supplemental_identity;

namespace {

double rel_gap(std::complex<double> closed, brute::CL ref) {
    std::complex<long double> c(closed.real(), closed.imag());
    long double num = std::abs(c - ref);
    long double den = std::max<long double>(std::abs(ref), 1e-300L);
    return double(num / den);
}

} // namespace

TEST_CASE("every table identity matches the dense-matrix computation") {
    for (double S : {2.0, 3.0, 5.0, 10.0}) {
        brute::SpinSystem sys(S);
        for (double tau : {0.05, 0.3, 1.0}) {
            for (const auto& id : identity_ids()) {
                auto closed = supplemental_identity(id, S, tau);
                auto ref = sys.identity_value(id, (long double)tau);
                INFO("id=", id, " S=", S, " tau=", tau);
                if (closed == std::complex<double>(0.0)) {
                    // identically-zero brackets: the matrix computation can
                    // only confirm zero down to its own cancellation noise
                    CHECK(std::abs(ref) < 1e-10L);
                } else {
                    CHECK(rel_gap(closed, ref) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("spot values pinned by the derivation") {
    // <S_+> = S at any tau
    CHECK(supplemental_identity("Sp", 5.0, 0.9).real() == doctest::Approx(5.0));
    CHECK(std::abs(supplemental_identity("Sp", 5.0, 0.9).imag()) < 1e-15);
    // <[S_y, U^dag S_y^2 U]> vanishes identically
    CHECK(std::abs(supplemental_identity("comm_Sy_UdSy2U", 3.0, 0.4)) == 0.0);
    // <S_+^2 W> at S=2, tau=0.3: (S/2)(2S-1) cos(tau)^(2S-2) e^(-i tau)
    auto v = supplemental_identity("Sp2_W", 2.0, 0.3);
    CHECK(std::abs(v) == doctest::Approx(3.0 * std::pow(std::cos(0.3), 2.0)).epsilon(1e-13));
    CHECK(std::arg(v) == doctest::Approx(-0.3).epsilon(1e-13));
}

TEST_CASE("conjugation symmetry under tau -> -tau") {
    for (const auto& id : identity_ids()) {
        auto plus = supplemental_identity(id, 4.0, 0.17);
        auto minus = supplemental_identity(id, 4.0, -0.17);
        INFO("id=", id);
        CHECK(std::abs(minus - std::conj(plus)) <
              1e-12 * std::max(1.0, std::abs(plus)));
    }
}

TEST_CASE("unknown identity id is rejected") {
    CHECK_THROWS_AS(supplemental_identity("Sp5_W", 2.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(supplemental_identity("", 2.0, 0.1), std::invalid_argument);
}
