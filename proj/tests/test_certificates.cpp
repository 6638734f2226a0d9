#include <cmath>
#include <vector>

#include <doctest.h>

#include "peakgate/certificates.hpp"
#include "peakgate/running_example.hpp"
#include "peakgate/seq_core.hpp"

using namespace peakgate;
namespace rex = peakgate::running_example;

namespace {

LyapunovCertificate builtin_lyap(double radius_sq) {
    LyapunovCertificate cert;
    cert.V = rex::lyapunov_V_span;
    cert.domain.radius_sq = radius_sq;
    cert.alpha_lower = ClassKFunction::power(2.0);
    cert.ratio = rex::ratio_closed_form(radius_sq);
    cert.sup_on_init = radius_sq;  // V = norm^2 at the worst initial point
    return cert;
}

std::function<State(std::span<const double>)> builtin_map() {
    auto sys = rex::builtin_system();
    return [map = sys.map](std::span<const double> x) { return map(x); };
}

}  // namespace

TEST_CASE("class-K closed forms validate and invert") {
    for (const auto& fn :
         {ClassKFunction::identity(), ClassKFunction::scale(1.5),
          ClassKFunction::power(2.0), ClassKFunction::sqrt_form()}) {
        CHECK_NOTHROW(fn.validate(4.0));
        CHECK(fn.forward(0.0) == 0.0);
        CHECK(fn.inverse(fn.forward(0.7)) == doctest::Approx(0.7));
    }
    CHECK_THROWS_AS(ClassKFunction::scale(-1.0), CertificateError);
    CHECK_THROWS_AS(ClassKFunction::power(0.0), CertificateError);

    const auto composed = ClassKFunction::compose(ClassKFunction::power(2.0),
                                                  ClassKFunction::sqrt_form());
    CHECK(composed.forward(3.0) == doctest::Approx(3.0));
    CHECK(composed.inverse(3.0) == doctest::Approx(3.0));

    const auto bisected = ClassKFunction::with_bisection_inverse(
        [](double s) { return s * s * s + s; }, 10.0);
    CHECK(bisected.inverse(2.0) == doctest::Approx(1.0));
}

TEST_CASE("KL construction composes h and its inverse") {
    // h_a(s) = sqrt(1.85 s), so h^{-1}(s) = s^2 / 1.85.
    SontagFormKL kl_a;
    kl_a.theta1 = ClassKFunction::identity();
    kl_a.theta2 = ClassKFunction::sqrt_form();
    kl_a.psi_sup = 1.85;
    const auto pair_a = build_pair_from_kl(kl_a);
    CHECK(pair_a.beta() == doctest::Approx(std::exp(-1.0)));
    CHECK(pair_a.h().value_at_zero == 0.0);
    CHECK(pair_a.h().value_at_one == doctest::Approx(std::sqrt(1.85)));
    CHECK(pair_a.h().inverse(0.03463) ==
          doctest::Approx(0.03463 * 0.03463 / 1.85));

    SontagFormKL trivial;
    trivial.theta1 = ClassKFunction::identity();
    trivial.theta2 = ClassKFunction::identity();
    trivial.psi_sup = 1.0;
    trivial.decay = 0.25;
    const auto pair_t = build_pair_from_kl(trivial);
    CHECK(pair_t.h().forward(0.6) == doctest::Approx(0.6));
    CHECK(pair_t.beta() == 0.25);

    // theta1(s) = s^2, theta2(s) = sqrt(s): h(y) = psi_sup * y.
    SontagFormKL symbolic;
    symbolic.theta1 = ClassKFunction::power(2.0);
    symbolic.theta2 = ClassKFunction::sqrt_form();
    symbolic.psi_sup = 4.0;
    symbolic.decay = 0.5;
    const auto pair_s = build_pair_from_kl(symbolic);
    CHECK(pair_s.h().forward(0.5) == doctest::Approx(2.0));
    CHECK(pair_s.h().inverse(2.0) == doctest::Approx(0.5));
}

TEST_CASE("direct Lyapunov construction is affine through the origin") {
    auto cert = builtin_lyap(8.84);
    cert.sup_on_init = 23.4535;
    cert.ratio = 0.9248;
    const auto pair = build_pair_direct_lyap(cert);
    CHECK(pair.h().value_at_zero == 0.0);
    CHECK(pair.h().value_at_one == doctest::Approx(23.4535));
    CHECK(pair.beta() == 0.9248);

    cert.sup_on_init = 1.0;
    cert.ratio = 0.5;
    const auto unit = build_pair_direct_lyap(cert);
    CHECK(unit.h().forward(0.37) == doctest::Approx(0.37));

    cert.sup_on_init = 0.0;
    CHECK_THROWS_AS(build_pair_direct_lyap(cert), CertificateError);
}

TEST_CASE("continuous construction with identity bounds reduces to direct") {
    auto cert = builtin_lyap(5.7341);
    cert.sup_on_init = 5.7341;
    cert.alpha_lower = ClassKFunction::identity();
    const auto direct = build_pair_direct_lyap(cert);
    const auto continuous =
        build_pair_continuous_lyap(cert, ClassKFunction::identity());
    for (double s : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        CHECK(continuous.h().forward(s) == doctest::Approx(direct.h().forward(s))
                                               .epsilon(1e-15));
    }
}

TEST_CASE("continuous construction gives h(s) = sqrt(s * supV)") {
    auto cert = builtin_lyap(8.9);  // ratio = closed form at r = 8.9
    cert.sup_on_init = 23.9697;
    const auto pair =
        build_pair_continuous_lyap(cert, ClassKFunction::identity());
    CHECK(pair.h().forward(0.25) == doctest::Approx(std::sqrt(0.25 * 23.9697)));
    CHECK(pair.h().inverse(0.5) == doctest::Approx(0.25 / 23.9697));

    // Published stopping-index value for scenario d, rank 4, objective pi_1.
    BoundedSequence u([](std::size_t k) {
        return k == 4 ? 0.08955377 : 0.0;
    });
    CHECK(stopping_index_formula(u, 4, pair) ==
          doctest::Approx(268.47).epsilon(1e-4));
}

TEST_CASE("continuous construction rejects out-of-range inverse requests") {
    auto cert = builtin_lyap(8.9);
    cert.sup_on_init = 23.9697;
    // alpha_lower saturating below sup_on_init: inverse undefined at s = 1.
    cert.alpha_lower = ClassKFunction::scale(0.001);
    cert.alpha_lower.domain_sup = 1.0;
    CHECK_THROWS_AS(
        build_pair_continuous_lyap(cert, ClassKFunction::identity()),
        CertificateError);
}

TEST_CASE("ball sampler is deterministic per seed and stays in the ball") {
    BallSampler sampler;
    sampler.dimension = 2;
    sampler.radius_sq = 8.84;
    sampler.seed = 42;
    sampler.count = 500;
    const auto first = sampler.draw();
    const auto second = sampler.draw();
    REQUIRE(first.size() == 500);
    CHECK(first == second);
    for (const auto& x : first) {
        CHECK(x[0] * x[0] + x[1] * x[1] <= 8.84 + 1e-12);
    }
    sampler.seed = 43;
    CHECK(sampler.draw() != first);
}

TEST_CASE("ratio of the identity map is exactly one") {
    BallSampler sampler;
    sampler.dimension = 2;
    sampler.radius_sq = 2.0;
    sampler.count = 2000;
    const auto est = ratio_operator_estimate(
        rex::lyapunov_V_span,
        [](std::span<const double> x) { return State(x.begin(), x.end()); },
        sampler);
    CHECK(est.value == 1.0);
    CHECK(est.is_estimate);
}

TEST_CASE("sampled ratio matches the closed form on the running example") {
    for (double r : {1.85, 5.7341, 8.84, 8.9}) {
        BallSampler sampler;
        sampler.dimension = 2;
        sampler.radius_sq = r;
        const auto est =
            ratio_operator_estimate(rex::lyapunov_V_span, builtin_map(), sampler);
        const double closed = rex::ratio_closed_form(r);
        CHECK(est.value <= closed + 1e-9);  // sampling under-estimates the sup
        CHECK(est.value == doctest::Approx(closed).epsilon(1e-3));
    }
}

TEST_CASE("ratio estimate of iterated maps is sub-multiplicative") {
    for (double r : {5.7341, 8.84}) {
        const double closed = rex::ratio_closed_form(r);
        auto map = builtin_map();
        for (int k = 2; k <= 4; ++k) {
            BallSampler sampler;
            sampler.dimension = 2;
            sampler.radius_sq = r;
            sampler.count = 20000;
            auto iterated = [map, k](std::span<const double> x) {
                State y(x.begin(), x.end());
                for (int i = 0; i < k; ++i) y = map(y);
                return y;
            };
            const auto est =
                ratio_operator_estimate(rex::lyapunov_V_span, iterated, sampler);
            CHECK(est.value <= std::pow(closed, k) + 1e-9);
        }
    }
}

TEST_CASE("ratio estimator rejects W vanishing at a nonzero point") {
    BallSampler sampler;
    sampler.dimension = 2;
    sampler.radius_sq = 1.0;
    sampler.count = 100;
    CHECK_THROWS_AS(
        ratio_operator_estimate([](std::span<const double>) { return 0.0; },
                                builtin_map(), sampler),
        CertificateError);
}

TEST_CASE("Lyapunov decrease propagates on sampled domain points") {
    BallSampler sampler;
    sampler.dimension = 2;
    sampler.radius_sq = 8.9;
    sampler.count = 5000;
    const double ratio = rex::ratio_closed_form(8.9);
    auto map = builtin_map();
    for (const auto& x : sampler.draw()) {
        const State next = map(x);
        CHECK(rex::lyapunov_V_span(next) <=
              ratio * rex::lyapunov_V_span(x) + 1e-12);
    }
}

TEST_CASE("verify_envelope finds witnesses below the unit ball") {
    BallSampler sampler;
    sampler.dimension = 2;
    sampler.radius_sq = 1.85;
    sampler.count = 5000;

    const auto pi1 = [](std::span<const double> x) { return x[0]; };
    const auto norm = [](std::span<const double> x) {
        return std::sqrt(x[0] * x[0] + x[1] * x[1]);
    };
    CHECK(verify_envelope(pi1, norm, sampler).holds);
    CHECK(verify_envelope(pi1, pi1, sampler).holds);

    // pi_1 <= V fails inside the unit ball where V(x) ~ ||x||^2 < |x_1|.
    const auto check = verify_envelope(pi1, rex::lyapunov_V_span, sampler);
    REQUIRE_FALSE(check.holds);
    REQUIRE(check.witness.has_value());
    const auto& w = *check.witness;
    CHECK(w[0] * w[0] + w[1] * w[1] < 1.0);
}

TEST_CASE("both Lyapunov constructions dominate the scenario sequences") {
    for (char name : {'c', 'd'}) {
        const auto& sc = rex::scenario(name);
        auto cert = builtin_lyap(sc.radius_sq);
        cert.sup_on_init = sc.sup_V;

        // nu_k for objective |pi_1| bounded by V along orbits.
        BoundedSequence v_seq([&sc](std::size_t k) {
            double best = -kInfinity;
            for (const auto& p : sc.points.points) {
                const auto x = iterate(rex::builtin_system(), p, k);
                best = std::max(best, rex::lyapunov_V_span(x));
            }
            return best;
        });
        const auto direct = build_pair_direct_lyap(cert);
        CHECK(verify_domination(v_seq, direct, 60).holds);

        BoundedSequence pi1_seq([&sc](std::size_t k) {
            double best = -kInfinity;
            for (const auto& p : sc.points.points) {
                best = std::max(best, iterate(rex::builtin_system(), p, k)[0]);
            }
            return best;
        });
        const auto continuous =
            build_pair_continuous_lyap(cert, ClassKFunction::identity());
        CHECK(verify_domination(pi1_seq, continuous, 350).holds);
    }
}
