#pragma once

#include <vector>

#include "harqlink/channel.hpp"
#include "harqlink/numerics.hpp"

namespace harqlink {

// Probability that the first attempt fails: accumulated SNR below kappa.
double attempt_fail_first(const ScenarioProfile& pr);

// Probability that attempt m+1 fails given the first m attempts failed,
// averaging the per-history conditional over the scenario-history prior.
double attempt_fail_next(int m, const ScenarioProfile& pr, const SeriesControl& ctl);

// Same quantity with each history weighted by its probability of having
// survived m failed attempts. Kept for diagnostics; the chain itself uses
// attempt_fail_next.
double attempt_fail_next_posterior(int m, const ScenarioProfile& pr, const SeriesControl& ctl);

// Absorbing-attempt Markov chain for one packet lifecycle. State m means
// "m failed attempts so far"; a decode or the deadline returns to state 0.
struct HarqChain {
    std::vector<double> p;    // p[m] = failure probability of attempt m+1
    std::vector<double> phi;  // column-stochastic transition matrix, row-major M x M
    std::vector<double> pi;   // stationary distribution over states 0..M-1
    double p_lost = 0.0;      // probability a packet exhausts all M attempts
    double service_rate_bcu = 0.0;  // accepted-load rate, bits per channel use
    double goodput_bcu = 0.0;       // delivered rate, bits per channel use
};

HarqChain build_chain(const SystemParams& sp, const ScenarioProfile& pr, const SeriesControl& ctl);

// Assembles the chain quantities for a given failure vector (p.size() must
// equal sp.max_attempts, entries in [0, 1]).
HarqChain chain_from_failures(const std::vector<double>& p, const SystemParams& sp);

struct ThroughputMetrics {
    double service_rate_bcu = 0.0;
    double goodput_bcu = 0.0;
    double service_rate_bps = 0.0;
    double goodput_bps = 0.0;
};

ThroughputMetrics throughput_metrics(const HarqChain& chain, const SystemParams& sp);

// Stationary distribution of a column-stochastic matrix by power iteration.
// Slow reference used to cross-check the closed form.
std::vector<double> power_iteration_stationary(const std::vector<double>& phi, int m,
                                               double rel_tol = 1e-14, int max_iter = 1000000);

}  // namespace harqlink
