#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "harqlink/chain.hpp"
#include "helpers.hpp"

using harqlink::HarqChain;
using harqlink::ScenarioProfile;
using harqlink::SeriesControl;
using harqlink::SystemParams;

namespace {

HarqChain reference_chain() {
    SystemParams sp = testutil::reference_params();
    return harqlink::build_chain(sp, harqlink::scenario_profile(sp), SeriesControl{});
}

}  // namespace

TEST_CASE("attempt failure probabilities at the reference point") {
    HarqChain chain = reference_chain();
    REQUIRE(chain.p.size() == 4);
    CHECK(chain.p[0] == doctest::Approx(0.5725136032489937).epsilon(1e-12));
    CHECK(chain.p[1] == doctest::Approx(0.4150504839804268).epsilon(1e-12));
    CHECK(chain.p[2] == doctest::Approx(0.3263785239463978).epsilon(1e-12));
    CHECK(chain.p[3] == doctest::Approx(0.2710111573690992).epsilon(1e-12));
    // combining makes each retry easier than the last
    for (size_t m = 1; m < chain.p.size(); ++m) {
        CHECK(chain.p[m] < chain.p[m - 1]);
    }
}

TEST_CASE("survivor-weighted retry probabilities at the reference point") {
    SystemParams sp = testutil::reference_params();
    ScenarioProfile pr = harqlink::scenario_profile(sp);
    SeriesControl ctl;
    CHECK(harqlink::attempt_fail_next_posterior(1, pr, ctl) ==
          doctest::Approx(0.4299604574331326).epsilon(1e-12));
    CHECK(harqlink::attempt_fail_next_posterior(2, pr, ctl) ==
          doctest::Approx(0.3519769996813906).epsilon(1e-12));
    CHECK(harqlink::attempt_fail_next_posterior(3, pr, ctl) ==
          doctest::Approx(0.3016127992780220).epsilon(1e-12));
    // survivors carry worse histories, so their retry odds are worse too
    for (int m = 1; m <= 3; ++m) {
        CHECK(harqlink::attempt_fail_next_posterior(m, pr, ctl) >
              harqlink::attempt_fail_next(m, pr, ctl));
    }
}

TEST_CASE("occupancy, loss, and throughput at the reference point") {
    SystemParams sp = testutil::reference_params();
    HarqChain chain = reference_chain();
    CHECK(chain.pi[0] == doctest::Approx(0.5297478909221240).epsilon(1e-12));
    CHECK(chain.p_lost == doctest::Approx(0.02101819803664752).epsilon(1e-12));
    CHECK(chain.service_rate_bcu == doctest::Approx(1.2713949382130976).epsilon(1e-12));
    CHECK(chain.goodput_bcu == doctest::Approx(1.2446725076189434).epsilon(1e-12));

    harqlink::ThroughputMetrics tm = harqlink::throughput_metrics(chain, sp);
    CHECK(tm.service_rate_bcu == chain.service_rate_bcu);
    CHECK(tm.goodput_bcu == chain.goodput_bcu);
    CHECK(tm.service_rate_bps ==
          doctest::Approx(chain.service_rate_bcu * sp.bandwidth_hz).epsilon(1e-14));
    CHECK(tm.goodput_bps == doctest::Approx(chain.goodput_bcu * sp.bandwidth_hz).epsilon(1e-14));

    // goodput discounts the accepted load by the deadline-miss share
    CHECK(chain.goodput_bcu ==
          doctest::Approx(chain.service_rate_bcu * (1.0 - chain.p_lost)).epsilon(1e-14));
}

TEST_CASE("stationary distribution structure") {
    HarqChain chain = reference_chain();
    int m = 4;

    double total = 0.0;
    for (double v : chain.pi) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

    // pi[k] = pi[0] * p_0 * ... * p_{k-1}
    double run = chain.pi[0];
    for (int k = 1; k < m; ++k) {
        run *= chain.p[k - 1];
        CHECK(chain.pi[k] == doctest::Approx(run).epsilon(1e-13));
    }

    // transition matrix columns are probability distributions
    for (int j = 0; j < m; ++j) {
        double col = 0.0;
        for (int i = 0; i < m; ++i) col += chain.phi[i * m + j];
        CHECK(col == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("closed-form occupancy matches power iteration for random chains") {
    testutil::TestRng rng(4242);
    for (int m = 1; m <= 8; ++m) {
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> p(m);
            for (double& v : p) v = rng.uniform(0.02, 0.98);
            SystemParams sp = testutil::reference_params();
            sp.max_attempts = m;
            HarqChain chain = harqlink::chain_from_failures(p, sp);
            std::vector<double> ref = harqlink::power_iteration_stationary(chain.phi, m);
            CAPTURE(m);
            CAPTURE(trial);
            for (int k = 0; k < m; ++k) {
                CHECK(chain.pi[k] == doctest::Approx(ref[k]).epsilon(1e-10));
            }
            double prod = 1.0;
            for (double v : p) prod *= v;
            CHECK(chain.p_lost == doctest::Approx(prod).epsilon(1e-14));
        }
    }
}

TEST_CASE("zero-length packets always decode on the first try") {
    SystemParams sp = testutil::reference_params();
    sp.packet_bits = 0;
    HarqChain chain =
        harqlink::build_chain(sp, harqlink::scenario_profile(sp), SeriesControl{});
    // first-attempt value may carry a rounding ulp from the probability sum
    for (double v : chain.p) CHECK(v <= 1e-15);
    CHECK(chain.pi[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(chain.p_lost <= 1e-15);
    CHECK(chain.service_rate_bcu == 0.0);
    CHECK(chain.goodput_bcu == 0.0);
}

TEST_CASE("retry probability rejects a zero attempt index") {
    SystemParams sp = testutil::reference_params();
    ScenarioProfile pr = harqlink::scenario_profile(sp);
    SeriesControl ctl;
    CHECK_THROWS_AS(harqlink::attempt_fail_next(0, pr, ctl), std::invalid_argument);
    CHECK_THROWS_AS(harqlink::attempt_fail_next_posterior(0, pr, ctl), std::invalid_argument);
}

TEST_CASE("failure vector validation") {
    SystemParams sp = testutil::reference_params();
    CHECK_THROWS_AS(harqlink::chain_from_failures({0.5, 0.4}, sp), std::invalid_argument);
    CHECK_THROWS_AS(harqlink::chain_from_failures({0.5, 0.4, 0.3, 1.5}, sp),
                    std::invalid_argument);
    CHECK_THROWS_AS(harqlink::chain_from_failures({0.5, 0.4, -0.1, 0.2}, sp),
                    std::invalid_argument);
    CHECK_NOTHROW(harqlink::chain_from_failures({0.5, 0.4, 0.3, 0.2}, sp));
}

TEST_CASE("chain handles a single-attempt deadline") {
    SystemParams sp = testutil::reference_params();
    sp.max_attempts = 1;
    HarqChain chain =
        harqlink::build_chain(sp, harqlink::scenario_profile(sp), SeriesControl{});
    REQUIRE(chain.p.size() == 1);
    CHECK(chain.p[0] == doctest::Approx(0.5725136032489937).epsilon(1e-12));
    CHECK(chain.pi[0] == doctest::Approx(1.0));
    CHECK(chain.p_lost == doctest::Approx(chain.p[0]).epsilon(1e-14));
}
