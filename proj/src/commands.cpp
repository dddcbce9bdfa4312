#include "harqlink/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "harqlink/effcap.hpp"
#include "harqlink/report.hpp"
#include "harqlink/version.hpp"

namespace harqlink {

namespace {

EffCapVariant variant_from_string(const std::string& name) {
    if (name == "renewal") {
        return EffCapVariant::kRenewal;
    }
    if (name == "truncated") {
        return EffCapVariant::kTruncated;
    }
    throw ConfigError("variant: expected 'renewal' or 'truncated', got '" + name + "'");
}

SimConfig resolve_sim(const Config& cfg, const CliOptions& opt) {
    SimConfig sim = cfg.sim;
    if (opt.seed) {
        sim.seed = *opt.seed;
    }
    if (opt.frames) {
        sim.frames = *opt.frames;
    }
    if (opt.mode) {
        sim.mode = *opt.mode;
    }
    if (opt.workers) {
        sim.workers = *opt.workers;
    }
    return sim;
}

ordered_json resolved_with_sim(const Config& cfg, const SimConfig& sim) {
    ordered_json res = cfg.resolved;
    res["sim"]["frames"] = sim.frames;
    res["sim"]["seed"] = sim.seed;
    res["sim"]["sensing_mode"] = sim.mode == SensingMode::kPhysical ? "physical" : "statistical";
    return res;
}

const char* axis_system_key(SweepSpec::Axis axis) {
    switch (axis) {
        case SweepSpec::Axis::kPacketBits:
            return "packet_bits";
        case SweepSpec::Axis::kTheta:
            return "qos_exponent_per_bit";
        case SweepSpec::Axis::kLambda:
            return "detection_threshold";
        case SweepSpec::Axis::kDeadline:
            return "deadline_frames";
    }
    return "packet_bits";
}

struct EffCapCells {
    std::string renewal;
    std::string truncated;
};

EffCapCells effcap_cells(const HarqChain& ch, const SystemParams& sp) {
    EffCapCells cells;
    double n = static_cast<double>(sp.packet_bits);
    if (sp.qos_exponent > 0.0) {
        cells.renewal = csv_number(effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz,
                                                      sp.qos_exponent, EffCapVariant::kRenewal)
                                       .bcu);
        try {
            cells.truncated =
                csv_number(effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz,
                                              sp.qos_exponent, EffCapVariant::kTruncated)
                               .bcu);
        } catch (const std::exception&) {
            cells.truncated.clear();
        }
    } else {
        // zero QoS exponent: the limit is the average service rate; the
        // truncated recursion has no finite limit there
        cells.renewal = csv_number(throughput_metrics(ch, sp).service_rate_bcu);
        cells.truncated.clear();
    }
    return cells;
}

std::string run_one_sweep(const Config& cfg, const SweepSpec& spec) {
    std::map<std::string, double> base = cfg.system;
    for (const auto& [k, v] : spec.overrides) {
        base[k] = v;
    }
    int p_cols = static_cast<int>(base.at("deadline_frames"));
    if (spec.axis == SweepSpec::Axis::kDeadline) {
        p_cols = static_cast<int>(*std::max_element(spec.values.begin(), spec.values.end()));
    }

    SeriesControl ctl;
    std::ostringstream rows;
    double best_goodput = -1.0;
    double best_bits = 0.0;
    for (double value : spec.values) {
        std::map<std::string, double> sys = base;
        apply_system_value(sys, axis_system_key(spec.axis), value, "sweep value");
        SystemParams sp = params_from_system(sys);
        ScenarioProfile pr = scenario_profile(sp);
        HarqChain ch = build_chain(sp, pr, ctl);
        ThroughputMetrics tm = throughput_metrics(ch, sp);
        EffCapCells caps = effcap_cells(ch, sp);

        rows << axis_name(spec.axis) << ',' << csv_number(value) << ',' << csv_number(pr.p_fa)
             << ',' << csv_number(pr.p_det);
        for (int i = 0; i < 4; ++i) {
            rows << ',' << csv_number(pr.prob[i]);
        }
        rows << ',' << csv_number(pr.kappa);
        for (int m = 0; m < p_cols; ++m) {
            rows << ',';
            if (m < sp.max_attempts) {
                rows << csv_number(ch.p[m]);
            }
        }
        rows << ',' << csv_number(ch.pi[0]) << ',' << csv_number(ch.p_lost) << ','
             << csv_number(tm.service_rate_bcu) << ',' << csv_number(tm.goodput_bcu) << ','
             << caps.renewal << ',' << caps.truncated << '\n';

        if (spec.axis == SweepSpec::Axis::kPacketBits && tm.goodput_bcu > best_goodput) {
            best_goodput = tm.goodput_bcu;
            best_bits = value;
        }
    }

    std::ostringstream out;
    out << "# tool=" << kToolName << " version=" << kToolVersion << '\n';
    out << "# command=sweep axis=" << axis_name(spec.axis) << " tag=" << spec.tag << '\n';
    out << "# config=" << cfg.resolved.dump() << '\n';
    if (spec.axis == SweepSpec::Axis::kPacketBits) {
        out << "# goodput_argmax packet_bits=" << csv_number(best_bits)
            << " goodput_bcu=" << csv_number(best_goodput) << '\n';
    }
    out << "axis,value,p_f,p_d,q1,q2,q3,q4,kappa";
    for (int m = 0; m < p_cols; ++m) {
        out << ",p_" << m;
    }
    out << ",pi_0,p_lost,service_rate_bcu,goodput_bcu,effcap_bcu_renewal,effcap_bcu_truncated\n";
    out << rows.str();
    return out.str();
}

}  // namespace

int cmd_analyze(const Config& cfg, const CliOptions& opt) {
    variant_from_string(opt.variant);
    const SystemParams& sp = cfg.params;
    ScenarioProfile pr = scenario_profile(sp);
    SeriesControl ctl;
    HarqChain ch = build_chain(sp, pr, ctl);

    ordered_json doc;
    doc["tool"] = tool_json();
    doc["command"] = "analyze";
    doc["config"] = cfg.resolved;
    doc["derived"] = derived_json(sp, pr);
    doc["chain"] = chain_json(ch, sp);

    double n = static_cast<double>(sp.packet_bits);
    ordered_json ec;
    ec["theta_per_bit"] = sp.qos_exponent;
    if (sp.qos_exponent > 0.0) {
        ec["selected_variant"] = opt.variant;
        ec["renewal"] = effcap_json(effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz,
                                                       sp.qos_exponent, EffCapVariant::kRenewal));
        try {
            ec["truncated"] = effcap_json(effective_capacity(
                ch.p, n, sp.frame_s, sp.bandwidth_hz, sp.qos_exponent, EffCapVariant::kTruncated));
        } catch (const std::exception& e) {
            ec["truncated"] = ordered_json{{"error", e.what()}};
        }
    } else {
        ec["note"] =
            "zero QoS exponent: reporting the theta -> 0 limit, which is the average service rate";
        ThroughputMetrics tm = throughput_metrics(ch, sp);
        ec["bcu"] = tm.service_rate_bcu;
        ec["bps"] = tm.service_rate_bps;
    }
    doc["effective_capacity"] = std::move(ec);

    write_output(opt.out_path, dump_report(doc));
    return 0;
}

int cmd_sweep(const Config& cfg, const CliOptions& opt) {
    if (cfg.sweeps.empty()) {
        throw ConfigError("sweeps: the sweep command needs at least one sweep");
    }
    if (opt.out_path.empty()) {
        std::string all;
        for (const SweepSpec& spec : cfg.sweeps) {
            all += run_one_sweep(cfg, spec);
        }
        write_output("", all);
        return 0;
    }
    if (cfg.sweeps.size() == 1) {
        write_output(opt.out_path, run_one_sweep(cfg, cfg.sweeps[0]));
        return 0;
    }
    for (const SweepSpec& spec : cfg.sweeps) {
        write_output(tagged_path(opt.out_path, spec.tag), run_one_sweep(cfg, spec));
    }
    return 0;
}

int cmd_simulate(const Config& cfg, const CliOptions& opt) {
    SimConfig sim = resolve_sim(cfg, opt);
    SimReport rep = simulate(cfg.params, sim);

    ordered_json doc;
    doc["tool"] = tool_json();
    doc["command"] = "simulate";
    doc["config"] = resolved_with_sim(cfg, sim);
    doc["simulation"] = sim_report_json(rep);
    write_output(opt.out_path, dump_report(doc));
    return 0;
}

namespace {

struct CheckList {
    ordered_json checks = ordered_json::array();
    int passed = 0;
    int failed = 0;

    void add(const std::string& name, bool pass, ordered_json detail) {
        ordered_json c;
        c["name"] = name;
        c["status"] = pass ? "pass" : "fail";
        c["detail"] = std::move(detail);
        checks.push_back(std::move(c));
        (pass ? passed : failed) += 1;
    }
};

// z-score guarded against a zero standard error
double z_score(double est, double se, double target) {
    double diff = est - target;
    if (se > 0.0) {
        return diff / se;
    }
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double max_abs_z(const std::vector<double>& est, const std::vector<double>& se,
                 const std::vector<double>& target) {
    double worst = 0.0;
    for (size_t i = 0; i < est.size(); ++i) {
        worst = std::max(worst, std::abs(z_score(est[i], se[i], target[i])));
    }
    return worst;
}

ordered_json z_detail(const std::vector<double>& analytic, const std::vector<double>& est,
                      const std::vector<double>& se) {
    std::vector<double> zs(est.size());
    for (size_t i = 0; i < est.size(); ++i) {
        zs[i] = z_score(est[i], se[i], analytic[i]);
    }
    ordered_json d;
    d["analytic"] = analytic;
    d["estimate"] = est;
    d["se"] = se;
    d["z"] = zs;
    return d;
}

}  // namespace

int cmd_validate(const Config& cfg, const CliOptions& opt) {
    const SystemParams& sp = cfg.params;
    double n = static_cast<double>(sp.packet_bits);
    ScenarioProfile pr = scenario_profile(sp);
    SeriesControl ctl;
    HarqChain ch = build_chain(sp, pr, ctl);
    ThroughputMetrics tm = throughput_metrics(ch, sp);
    CheckList cl;

    {
        double worst = 0.0;
        for (double a : {0.5, 1.0, 3.7, 20.0, 88.0, 200.0}) {
            for (double r : {0.1, 0.5, 1.0, 2.0, 5.0}) {
                double x = a * r;
                worst = std::max(worst,
                                 std::abs(reg_lower_gamma(x, a) + reg_upper_gamma(x, a) - 1.0));
            }
        }
        cl.add("gamma_complement", worst <= 1e-12,
               ordered_json{{"max_abs_residual", worst}, {"tolerance", 1e-12}});
    }
    {
        double worst = 0.0;
        for (int r : {1, 2, 3, 5}) {
            for (double x : {0.1, 1.0, 5.0, 20.0}) {
                ExponentialMixture mix;
                mix.scales = {2.0};
                mix.multiplicities = {r};
                worst = std::max(worst, std::abs(exp_sum_cdf(mix, x, ctl) -
                                                 reg_lower_gamma(x / 2.0, r)));
            }
        }
        cl.add("erlang_consistency", worst <= 1e-10,
               ordered_json{{"max_abs_diff", worst}, {"tolerance", 1e-10}});
    }
    {
        double worst = 0.0;
        for (double x : {0.5, 2.0, 10.0}) {
            ExponentialMixture mix;
            mix.scales = {1.0, 3.0};
            mix.multiplicities = {1, 1};
            double closed = 1.0 + 0.5 * std::exp(-x) - 1.5 * std::exp(-x / 3.0);
            worst = std::max(worst, std::abs(exp_sum_cdf(mix, x, ctl) - closed));
        }
        cl.add("two_scale_closed_form", worst <= 1e-10,
               ordered_json{{"max_abs_diff", worst}, {"tolerance", 1e-10}});
    }
    {
        std::vector<double> ref = power_iteration_stationary(ch.phi, sp.max_attempts);
        double worst = 0.0;
        for (int m = 0; m < sp.max_attempts; ++m) {
            worst = std::max(worst, std::abs(ref[m] - ch.pi[m]));
        }
        cl.add("stationary_closed_vs_power", worst <= 1e-10,
               ordered_json{{"max_abs_diff", worst}, {"tolerance", 1e-10}});
    }
    {
        double prod = 1.0;
        for (double v : ch.p) {
            prod *= v;
        }
        double diff = std::abs(prod - ch.p_lost);
        cl.add("lost_probability_product", diff <= 1e-14,
               ordered_json{{"abs_diff", diff}, {"tolerance", 1e-14}});
    }
    {
        double th_eff = sp.qos_exponent > 0.0 ? sp.qos_exponent : 1e-3;
        std::vector<double> pb = ch.p;
        if (opt.corrupt_p) {
            double bumped = std::min(1.0, pb[0] + 0.05);
            pb[0] = bumped == pb[0] ? std::max(0.0, pb[0] - 0.05) : bumped;
        }
        double chi = effective_capacity(pb, n, sp.frame_s, sp.bandwidth_hz, th_eff,
                                        EffCapVariant::kRenewal)
                         .chi_star;
        double sr = spectral_radius_oracle(ch.p, n, th_eff);
        double diff = std::abs(chi - sr);
        cl.add("root_vs_spectral", diff <= 1e-9,
               ordered_json{{"theta_per_bit", th_eff},
                            {"root", chi},
                            {"spectral_radius", sr},
                            {"abs_diff", diff},
                            {"tolerance", 1e-9},
                            {"corrupted_input", opt.corrupt_p}});
    }
    if (n > 0.0 && tm.service_rate_bcu > 0.0) {
        double cap = effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz, 1e-6,
                                        EffCapVariant::kRenewal)
                         .bcu;
        double rel = std::abs(cap - tm.service_rate_bcu) / tm.service_rate_bcu;
        cl.add("effcap_small_theta_limit", rel <= 0.005,
               ordered_json{{"theta_per_bit", 1e-6},
                            {"bcu", cap},
                            {"service_rate_bcu", tm.service_rate_bcu},
                            {"rel_diff", rel},
                            {"tolerance", 0.005}});

        double th_big = 480.0 / n;
        double cap_big = effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz, th_big,
                                            EffCapVariant::kRenewal)
                             .bcu;
        double asym = n / (sp.frame_s * sp.max_attempts) / sp.bandwidth_hz;
        double rel_big = std::abs(cap_big - asym) / asym;
        cl.add("effcap_large_theta_tail", rel_big <= 0.01,
               ordered_json{{"theta_per_bit", th_big},
                            {"bcu", cap_big},
                            {"deadline_limited_bcu", asym},
                            {"rel_diff", rel_big},
                            {"tolerance", 0.01}});
    }

    // simulation cross-checks
    SimConfig sim = resolve_sim(cfg, opt);
    if (sim.theta_grid.empty()) {
        sim.theta_grid = {1e-5, 1e-4, 2e-4};
    }
    SimReport rep = simulate(sp, sim);

    std::vector<double> p_surv = ch.p;
    for (int m = 1; m < sp.max_attempts; ++m) {
        p_surv[m] = attempt_fail_next_posterior(m, pr, ctl);
    }
    HarqChain ch_surv = chain_from_failures(p_surv, sp);

    cl.add("mc_attempt_fail", max_abs_z(rep.p_hat, rep.p_se, ch.p) <= 4.0,
           z_detail(ch.p, rep.p_hat, rep.p_se));
    cl.add("mc_attempt_fail_survivor", max_abs_z(rep.p_hat, rep.p_se, p_surv) <= 4.0,
           z_detail(p_surv, rep.p_hat, rep.p_se));
    cl.add("mc_occupancy",
           std::abs(z_score(rep.pi_hat[0], rep.pi_se[0], ch.pi[0])) <= 4.0,
           z_detail({ch.pi[0]}, {rep.pi_hat[0]}, {rep.pi_se[0]}));
    cl.add("mc_occupancy_survivor",
           std::abs(z_score(rep.pi_hat[0], rep.pi_se[0], ch_surv.pi[0])) <= 4.0,
           z_detail({ch_surv.pi[0]}, {rep.pi_hat[0]}, {rep.pi_se[0]}));
    cl.add("mc_loss", std::abs(z_score(rep.p_lost_hat, rep.p_lost_se, ch.p_lost)) <= 4.0,
           z_detail({ch.p_lost}, {rep.p_lost_hat}, {rep.p_lost_se}));
    cl.add("mc_loss_survivor",
           std::abs(z_score(rep.p_lost_hat, rep.p_lost_se, ch_surv.p_lost)) <= 4.0,
           z_detail({ch_surv.p_lost}, {rep.p_lost_hat}, {rep.p_lost_se}));
    cl.add("mc_sensing",
           std::abs(z_score(rep.p_fa_hat, rep.p_fa_se, pr.p_fa)) <= 4.0 &&
               std::abs(z_score(rep.p_det_hat, rep.p_det_se, pr.p_det)) <= 4.0,
           z_detail({pr.p_fa, pr.p_det}, {rep.p_fa_hat, rep.p_det_hat},
                    {rep.p_fa_se, rep.p_det_se}));

    ordered_json truncated_record = ordered_json::array();
    if (n > 0.0) {
        bool all_in = true;
        bool all_in_surv = true;
        ordered_json detail = ordered_json::array();
        ordered_json detail_surv = ordered_json::array();
        for (const EffCapEstimate& e : rep.effcap) {
            double rc = effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz, e.theta,
                                           EffCapVariant::kRenewal)
                            .bcu;
            double rc_surv = effective_capacity(p_surv, n, sp.frame_s, sp.bandwidth_hz, e.theta,
                                                EffCapVariant::kRenewal)
                                 .bcu;
            bool in = rc >= e.ci_lo_bcu && rc <= e.ci_hi_bcu;
            bool in_surv = rc_surv >= e.ci_lo_bcu && rc_surv <= e.ci_hi_bcu;
            all_in = all_in && in;
            all_in_surv = all_in_surv && in_surv;
            detail.push_back(ordered_json{{"theta_per_bit", e.theta},
                                          {"analytic_bcu", rc},
                                          {"ci95_lo_bcu", e.ci_lo_bcu},
                                          {"ci95_hi_bcu", e.ci_hi_bcu},
                                          {"inside_ci", in}});
            detail_surv.push_back(ordered_json{{"theta_per_bit", e.theta},
                                               {"analytic_bcu", rc_surv},
                                               {"ci95_lo_bcu", e.ci_lo_bcu},
                                               {"ci95_hi_bcu", e.ci_hi_bcu},
                                               {"inside_ci", in_surv}});
            try {
                double tv = effective_capacity(ch.p, n, sp.frame_s, sp.bandwidth_hz, e.theta,
                                               EffCapVariant::kTruncated)
                                .bcu;
                truncated_record.push_back(ordered_json{
                    {"theta_per_bit", e.theta},
                    {"truncated_bcu", tv},
                    {"inside_ci", tv >= e.ci_lo_bcu && tv <= e.ci_hi_bcu}});
            } catch (const std::exception& e2) {
                truncated_record.push_back(
                    ordered_json{{"theta_per_bit", e.theta}, {"error", e2.what()}});
            }
        }
        cl.add("mc_effcap_bracket", all_in, std::move(detail));
        cl.add("mc_effcap_bracket_survivor", all_in_surv, std::move(detail_surv));
    }

    {
        SimConfig other = sim;
        other.mode = sim.mode == SensingMode::kPhysical ? SensingMode::kStatistical
                                                        : SensingMode::kPhysical;
        other.frames = std::min<uint64_t>(sim.frames, 400000);
        other.batches = std::min(sim.batches, 40);
        SimReport rep2 = simulate(sp, other);
        auto joint_z = [](double a, double sa, double b, double sb) {
            double se = std::sqrt(sa * sa + sb * sb);
            return se > 0.0 ? (a - b) / se
                            : (a == b ? 0.0 : std::numeric_limits<double>::infinity());
        };
        double z_fa = joint_z(rep.p_fa_hat, rep.p_fa_se, rep2.p_fa_hat, rep2.p_fa_se);
        double z_det = joint_z(rep.p_det_hat, rep.p_det_se, rep2.p_det_hat, rep2.p_det_se);
        double z_p0 = joint_z(rep.p_hat[0], rep.p_se[0], rep2.p_hat[0], rep2.p_se[0]);
        bool ok = std::abs(z_fa) <= 4.0 && std::abs(z_det) <= 4.0 && std::abs(z_p0) <= 4.0;
        cl.add("sensing_mode_agreement", ok,
               ordered_json{{"z_false_alarm", z_fa},
                            {"z_detection", z_det},
                            {"z_first_attempt_fail", z_p0},
                            {"frames_cross_mode", other.frames}});
    }

    ordered_json notes = ordered_json::array();
    notes.push_back(ordered_json{
        {"topic", "attempt_weighting"},
        {"text",
         "attempt_fail_next weights scenario histories by their prior occurrence probability; "
         "the survivor-weighted alternative conditions each history on having failed m times "
         "and matches the simulated link (see the *_survivor checks)"}});
    notes.push_back(ordered_json{
        {"topic", "service_recursion"},
        {"text",
         "the renewal variant weights every lifecycle, so the weights sum to one and the "
         "theta -> 0 limit equals the average service rate; the truncated variant leaves "
         "the deliver-on-the-last-attempt branch unweighted, its weights fall short of one, "
         "and its agreement with the simulated service process is recorded in "
         "truncated_variant_record"}});
    notes.push_back(ordered_json{
        {"topic", "frame_budget"},
        {"text", "each frame spends N*B samples on sensing and (T-N)*B symbol slots on data; "
                 "the decode threshold uses the data slot count"}});

    ordered_json doc;
    doc["tool"] = tool_json();
    doc["command"] = "validate";
    doc["config"] = resolved_with_sim(cfg, sim);
    doc["checks"] = std::move(cl.checks);
    doc["truncated_variant_record"] = std::move(truncated_record);
    doc["notes"] = std::move(notes);
    ordered_json summary;
    summary["passed"] = cl.passed;
    summary["failed"] = cl.failed;
    summary["ok"] = cl.failed == 0;
    doc["summary"] = std::move(summary);

    write_output(opt.out_path, dump_report(doc));
    return cl.failed == 0 ? 0 : 1;
}

}  // namespace harqlink
