#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "harqlink/channel.hpp"
#include "helpers.hpp"

using harqlink::ScenarioProfile;
using harqlink::SystemParams;

TEST_CASE("sensing probabilities at the reference point") {
    SystemParams sp = testutil::reference_params();
    CHECK(harqlink::sensing_samples(sp) == 20);
    CHECK(harqlink::false_alarm_prob(sp) ==
          doctest::Approx(0.04780710917143420150961).epsilon(1e-12));
    CHECK(harqlink::detection_prob(sp) ==
          doctest::Approx(0.9234950597581429439689).epsilon(1e-12));
}

TEST_CASE("scenario profile at the reference point") {
    SystemParams sp = testutil::reference_params();
    ScenarioProfile pr = harqlink::scenario_profile(sp);
    CHECK(pr.prob[0] == doctest::Approx(0.09234950597581429439689).epsilon(1e-12));
    CHECK(pr.prob[1] == doctest::Approx(0.007650494024185705603111).epsilon(1e-12));
    CHECK(pr.prob[2] == doctest::Approx(0.04302639825429078135865).epsilon(1e-12));
    CHECK(pr.prob[3] == doctest::Approx(0.8569736017457092186414).epsilon(1e-12));
    CHECK(pr.snr[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pr.snr[1] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(pr.snr[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pr.snr[3] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(pr.kappa == doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("decode threshold scales with packet size") {
    SystemParams sp = testutil::reference_params();
    sp.packet_bits = 100;
    CHECK(harqlink::decode_threshold(sp) ==
          doctest::Approx(1.378414230005442133435).epsilon(1e-13));
    sp.packet_bits = 0;
    CHECK(harqlink::decode_threshold(sp) == 0.0);

    double prev = -1.0;
    for (long long n : {10, 80, 240, 400}) {
        sp.packet_bits = n;
        double kappa = harqlink::decode_threshold(sp);
        CHECK(kappa > prev);
        prev = kappa;
    }
}

TEST_CASE("scenario probabilities sum to one") {
    testutil::TestRng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams sp = testutil::reference_params();
        sp.activity_prob = rng.next();
        sp.threshold = rng.uniform(0.0, 4.0);
        sp.noise_var = rng.uniform(0.2, 3.0);
        sp.signal_var = rng.uniform(0.2, 3.0);
        ScenarioProfile pr = harqlink::scenario_profile(sp);
        double total = pr.prob[0] + pr.prob[1] + pr.prob[2] + pr.prob[3];
        CAPTURE(trial);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(pr.p_fa >= 0.0);
        CHECK(pr.p_fa <= 1.0);
        CHECK(pr.p_det >= pr.p_fa);  // detector sees more energy when busy
    }
}

TEST_CASE("dB conversion is relative to the noise floor") {
    CHECK(harqlink::power_from_db(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(harqlink::power_from_db(10.0, 1.0) == doctest::Approx(10.0));
    CHECK(harqlink::power_from_db(3.0, 2.0) == doctest::Approx(2.0 * std::pow(10.0, 0.3)));
}

TEST_CASE("parameter validation rejects bad fields") {
    auto expect_reject = [](auto&& mutate, const char* what) {
        SystemParams sp = testutil::reference_params();
        mutate(sp);
        CAPTURE(what);
        CHECK_THROWS_AS(harqlink::validate_params(sp), std::invalid_argument);
    };
    expect_reject([](SystemParams& sp) { sp.frame_s = 0.0; }, "zero frame");
    expect_reject([](SystemParams& sp) { sp.sensing_s = sp.frame_s; }, "sensing fills frame");
    expect_reject([](SystemParams& sp) { sp.sensing_s = -1e-6; }, "negative sensing");
    expect_reject([](SystemParams& sp) { sp.bandwidth_hz = -1e6; }, "negative bandwidth");
    expect_reject([](SystemParams& sp) { sp.activity_prob = 1.5; }, "activity above 1");
    expect_reject([](SystemParams& sp) { sp.noise_var = 0.0; }, "zero noise");
    expect_reject([](SystemParams& sp) { sp.signal_var = -1.0; }, "negative signal power");
    expect_reject([](SystemParams& sp) { sp.fading_mean = 0.0; }, "zero fading power");
    expect_reject([](SystemParams& sp) { sp.power_busy = 0.0; }, "zero busy power");
    expect_reject([](SystemParams& sp) { sp.power_idle = sp.power_busy / 2; },
                  "idle below busy");
    expect_reject([](SystemParams& sp) { sp.threshold = -0.1; }, "negative threshold");
    expect_reject([](SystemParams& sp) { sp.packet_bits = -1; }, "negative bits");
    expect_reject([](SystemParams& sp) { sp.max_attempts = 0; }, "zero attempts");
    expect_reject([](SystemParams& sp) { sp.qos_exponent = -1e-3; }, "negative exponent");
    // a non-integer sensing sample count N*B is rejected, not rounded
    expect_reject([](SystemParams& sp) { sp.sensing_s = 20.5e-6; }, "fractional samples");
}

TEST_CASE("validation accepts the reference point") {
    SystemParams sp = testutil::reference_params();
    CHECK_NOTHROW(harqlink::validate_params(sp));
    CHECK(harqlink::symbols_per_frame(sp) == doctest::Approx(80.0));
}
