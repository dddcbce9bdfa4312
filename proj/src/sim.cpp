#include "harqlink/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

#include "harqlink/kernels.hpp"
#include "harqlink/rng.hpp"

namespace harqlink {

namespace {

struct BatchResult {
    std::vector<uint64_t> visits;
    std::vector<uint64_t> fails;
    uint64_t delivered = 0;
    uint64_t lost = 0;
    uint64_t busy = 0;
    uint64_t idle = 0;
    uint64_t detections = 0;
    uint64_t false_alarms = 0;
    std::vector<uint64_t> completion_bits;  // one flag per frame, packed
};

struct Scratch {
    std::vector<uint32_t> activity;
    std::vector<uint32_t> decision;
    std::vector<uint32_t> fading;
    std::vector<uint32_t> samples;
    std::vector<double> energy_buf;
};

BatchResult run_batch(const SystemParams& sp, const ScenarioProfile& pr, const SimConfig& cfg,
                      uint64_t t_b, long long nb, uint32_t batch_id, Scratch& scr) {
    int m_max = sp.max_attempts;
    BatchResult br;
    br.visits.assign(m_max, 0);
    br.fails.assign(m_max, 0);
    br.completion_bits.assign((t_b + 63) / 64, 0);

    auto frames32 = static_cast<uint32_t>(t_b);
    fill_frame_blocks(cfg.seed, batch_id, RngStream::kActivity, 0, 0, frames32, scr.activity);
    fill_frame_blocks(cfg.seed, batch_id, RngStream::kFading, 0, 0, frames32, scr.fading);
    bool physical = cfg.mode == SensingMode::kPhysical;
    if (physical) {
        scr.samples.resize(4 * t_b * nb);
        kernels::philox_fill(make_ctr(0, RngStream::kSensingSamples, batch_id, 0),
                             key_from_seed(cfg.seed), t_b * nb, scr.samples.data());
        scr.energy_buf.resize(2 * nb);
    } else {
        fill_frame_blocks(cfg.seed, batch_id, RngStream::kSensingDecision, 0, 0, frames32,
                          scr.decision);
    }

    double scale_busy = std::sqrt((sp.noise_var + sp.signal_var) / 2.0);
    double scale_idle = std::sqrt(sp.noise_var / 2.0);
    int state = 0;
    double snr = 0.0;
    for (uint64_t f = 0; f < t_b; ++f) {
        bool active = to_unit_double(block_u64(&scr.activity[4 * f], 0)) < sp.activity_prob;

        bool sensed_busy;
        if (physical) {
            double scale = active ? scale_busy : scale_idle;
            const uint32_t* base = &scr.samples[4 * f * nb];
            for (long long j = 0; j < nb; ++j) {
                double u1 = to_unit_double(block_u64(base + 4 * j, 0));
                double u2 = to_unit_double(block_u64(base + 4 * j, 1));
                auto [g1, g2] = normal_pair_from_units(u1, u2);
                scr.energy_buf[2 * j] = scale * g1;
                scr.energy_buf[2 * j + 1] = scale * g2;
            }
            double y = kernels::sum_squares(scr.energy_buf.data(), 2 * nb) / nb;
            sensed_busy = y > sp.threshold;
        } else {
            double u = to_unit_double(block_u64(&scr.decision[4 * f], 0));
            sensed_busy = u < (active ? pr.p_det : pr.p_fa);
        }

        if (active) {
            ++br.busy;
            if (sensed_busy) {
                ++br.detections;
            }
        } else {
            ++br.idle;
            if (sensed_busy) {
                ++br.false_alarms;
            }
        }

        int scen = active ? (sensed_busy ? 0 : 1) : (sensed_busy ? 2 : 3);
        double z = exp_from_unit(to_unit_double(block_u64(&scr.fading[4 * f], 0)), sp.fading_mean);
        snr += pr.snr[scen] * z;

        ++br.visits[state];
        bool done;
        if (snr >= pr.kappa) {
            ++br.delivered;
            done = true;
        } else {
            ++br.fails[state];
            ++state;
            done = state == m_max;
            if (done) {
                ++br.lost;
            }
        }
        if (done) {
            br.completion_bits[f / 64] |= uint64_t{1} << (f % 64);
            state = 0;
            snr = 0.0;
        }
    }
    return br;
}

// Standard error of the mean of per-batch values.
double batch_se(const std::vector<double>& xs) {
    size_t b = xs.size();
    if (b < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / (static_cast<double>(b) * static_cast<double>(b - 1)));
}

EffCapEstimate estimate_effcap(const std::vector<BatchResult>& results, const SystemParams& sp,
                               uint64_t t_b, double theta) {
    EffCapEstimate est;
    est.theta = theta;
    double theta_n = theta * static_cast<double>(sp.packet_bits);
    uint64_t t_w = t_b;
    if (theta_n > 0.0 && theta_n * static_cast<double>(t_b) > 600.0) {
        t_w = std::max<uint64_t>(16, static_cast<uint64_t>(std::floor(600.0 / theta_n)));
        est.window_reduced = true;
    }
    est.window_frames = t_w;
    uint64_t wins_per_batch = t_b / t_w;

    // log of e^{-theta * n * completions} per window, batch-major order
    std::vector<double> ys;
    ys.reserve(results.size() * wins_per_batch);
    for (const BatchResult& br : results) {
        for (uint64_t w = 0; w < wins_per_batch; ++w) {
            uint64_t count = 0;
            for (uint64_t f = w * t_w; f < (w + 1) * t_w; ++f) {
                count += (br.completion_bits[f / 64] >> (f % 64)) & 1u;
            }
            ys.push_back(-theta_n * static_cast<double>(count));
        }
    }
    est.windows = static_cast<int>(ys.size());

    double shift = *std::max_element(ys.begin(), ys.end());
    std::vector<double> es(ys.size());
    double e_total = 0.0;
    for (size_t i = 0; i < ys.size(); ++i) {
        es[i] = std::exp(ys[i] - shift);
        e_total += es[i];
    }
    double n_win = static_cast<double>(ys.size());
    double denom = theta * static_cast<double>(t_w) * sp.frame_s * sp.bandwidth_hz;
    auto to_bcu = [&](double log_mean) { return -(shift + log_mean) / denom; };
    est.estimate_bcu = to_bcu(std::log(e_total / n_win));

    if (ys.size() >= 2) {
        std::vector<double> loo(ys.size());
        double loo_mean = 0.0;
        for (size_t i = 0; i < ys.size(); ++i) {
            loo[i] = to_bcu(std::log((e_total - es[i]) / (n_win - 1.0)));
            loo_mean += loo[i];
        }
        loo_mean /= n_win;
        double ss = 0.0;
        for (double v : loo) {
            ss += (v - loo_mean) * (v - loo_mean);
        }
        double se = std::sqrt((n_win - 1.0) / n_win * ss);
        est.ci_lo_bcu = est.estimate_bcu - 1.96 * se;
        est.ci_hi_bcu = est.estimate_bcu + 1.96 * se;
    } else {
        est.ci_lo_bcu = est.ci_hi_bcu = est.estimate_bcu;
    }
    return est;
}

}  // namespace

SimReport simulate(const SystemParams& sp, const SimConfig& cfg) {
    validate_params(sp);
    if (cfg.batches < 1) {
        throw std::invalid_argument("batches must be at least 1");
    }
    if (cfg.frames < static_cast<uint64_t>(cfg.batches)) {
        throw std::invalid_argument("frames must be at least the batch count");
    }
    for (double th : cfg.theta_grid) {
        if (!(th > 0.0) || !std::isfinite(th)) {
            throw std::invalid_argument("theta grid entries must be positive");
        }
    }
    uint64_t t_b = cfg.frames / static_cast<uint64_t>(cfg.batches);
    if (t_b > std::numeric_limits<uint32_t>::max()) {
        throw std::invalid_argument("batch length exceeds the counter range");
    }
    long long nb = sensing_samples(sp);
    if (cfg.mode == SensingMode::kPhysical &&
        t_b * static_cast<uint64_t>(nb) > std::numeric_limits<uint32_t>::max()) {
        throw std::invalid_argument("batch length times sensing samples exceeds the counter range");
    }

    ScenarioProfile pr = scenario_profile(sp);
    int m_max = sp.max_attempts;
    int batches = cfg.batches;

    std::vector<BatchResult> results(batches);
    int workers = cfg.workers > 0 ? cfg.workers
                                  : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, batches);
    auto work = [&](int w) {
        Scratch scr;
        for (int b = w; b < batches; b += workers) {
            results[b] = run_batch(sp, pr, cfg, t_b, nb, static_cast<uint32_t>(b), scr);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    SimReport rep;
    rep.frames = t_b * static_cast<uint64_t>(batches);
    rep.batch_frames = t_b;
    rep.batches = batches;
    rep.seed = cfg.seed;
    rep.mode = cfg.mode;
    rep.kernel_variant = kernels::active_variant();
    rep.attempt_visits.assign(m_max, 0);
    rep.attempt_fails.assign(m_max, 0);

    for (const BatchResult& br : results) {
        rep.packets_delivered += br.delivered;
        rep.packets_lost += br.lost;
        rep.busy_frames += br.busy;
        rep.idle_frames += br.idle;
        rep.detections += br.detections;
        rep.false_alarms += br.false_alarms;
        for (int m = 0; m < m_max; ++m) {
            rep.attempt_visits[m] += br.visits[m];
            rep.attempt_fails[m] += br.fails[m];
        }
    }

    auto ratio = [](uint64_t num, uint64_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    auto collect_se = [&](auto&& value_of) {
        std::vector<double> xs;
        xs.reserve(results.size());
        for (const BatchResult& br : results) {
            double v;
            if (value_of(br, v)) {
                xs.push_back(v);
            }
        }
        return batch_se(xs);
    };

    rep.p_hat.resize(m_max);
    rep.p_se.resize(m_max);
    rep.pi_hat.resize(m_max);
    rep.pi_se.resize(m_max);
    double t_bd = static_cast<double>(t_b);
    for (int m = 0; m < m_max; ++m) {
        rep.p_hat[m] = ratio(rep.attempt_fails[m], rep.attempt_visits[m]);
        rep.p_se[m] = collect_se([&](const BatchResult& br, double& v) {
            if (br.visits[m] == 0) {
                return false;
            }
            v = static_cast<double>(br.fails[m]) / static_cast<double>(br.visits[m]);
            return true;
        });
        rep.pi_hat[m] = ratio(rep.attempt_visits[m], rep.frames);
        rep.pi_se[m] = collect_se([&](const BatchResult& br, double& v) {
            v = static_cast<double>(br.visits[m]) / t_bd;
            return true;
        });
    }
    rep.p_lost_hat = ratio(rep.packets_lost, rep.packets_delivered + rep.packets_lost);
    rep.p_lost_se = collect_se([&](const BatchResult& br, double& v) {
        uint64_t done = br.delivered + br.lost;
        if (done == 0) {
            return false;
        }
        v = static_cast<double>(br.lost) / static_cast<double>(done);
        return true;
    });
    rep.p_fa_hat = ratio(rep.false_alarms, rep.idle_frames);
    rep.p_fa_se = collect_se([&](const BatchResult& br, double& v) {
        if (br.idle == 0) {
            return false;
        }
        v = static_cast<double>(br.false_alarms) / static_cast<double>(br.idle);
        return true;
    });
    rep.p_det_hat = ratio(rep.detections, rep.busy_frames);
    rep.p_det_se = collect_se([&](const BatchResult& br, double& v) {
        if (br.busy == 0) {
            return false;
        }
        v = static_cast<double>(br.detections) / static_cast<double>(br.busy);
        return true;
    });

    double bits_per_use = static_cast<double>(sp.packet_bits) / (sp.frame_s * sp.bandwidth_hz);
    rep.service_rate_bcu_hat = rep.pi_hat[0] * bits_per_use;
    rep.service_rate_bcu_se = rep.pi_se[0] * bits_per_use;
    rep.goodput_bcu_hat = ratio(rep.packets_delivered, rep.frames) * bits_per_use;
    rep.goodput_bcu_se = bits_per_use * collect_se([&](const BatchResult& br, double& v) {
        v = static_cast<double>(br.delivered) / t_bd;
        return true;
    });

    rep.effcap.reserve(cfg.theta_grid.size());
    for (double th : cfg.theta_grid) {
        rep.effcap.push_back(estimate_effcap(results, sp, t_b, th));
    }
    return rep;
}

}  // namespace harqlink
