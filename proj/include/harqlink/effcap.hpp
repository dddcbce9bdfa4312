#pragma once

#include <vector>

#include "harqlink/numerics.hpp"

namespace harqlink {

// Which packet outcomes carry service weight in the rate recursion.
// kRenewal weights every lifecycle (the final coefficient is the whole
// reach-the-last-attempt mass), so the weights sum to 1. kTruncated keeps
// only the all-fail mass in the final coefficient, leaving the
// deliver-on-the-last-attempt branch unweighted; its weights fall short of
// 1 and its small-exponent limit diverges.
enum class EffCapVariant {
    kTruncated,
    kRenewal,
};

struct EffCapResult {
    double theta = 0.0;       // per-bit QoS exponent
    double chi_star = 0.0;    // decisive root in (0, 1)
    double log_chi = 0.0;     // ln(chi_star), exact even when chi underflows
    double per_frame_bits = 0.0;  // effective capacity in bits per frame
    double bcu = 0.0;         // bits per channel use
    double bps = 0.0;         // bits per second
};

// Characteristic polynomial of the service recursion evaluated at chi,
// literal form (useful for verifying the root, not for finding it).
double char_poly(double chi, const std::vector<double>& p, double n_bits, double theta,
                 EffCapVariant variant);

// Branch weights w_1..w_M of the lifecycle-length distribution for the
// given variant. Sums to 1 for kRenewal.
std::vector<double> branch_weights(const std::vector<double>& p, EffCapVariant variant);

// Effective capacity for failure vector p, packet size n_bits, frame
// duration frame_s and theta > 0. The root is bisected in log space to an
// interval below 1e-13, which keeps the result exact even when chi_star
// underflows (theta * n_bits large).
EffCapResult effective_capacity(const std::vector<double>& p, double n_bits, double frame_s,
                                double bandwidth_hz, double theta, EffCapVariant variant);

// Spectral radius of the transition matrix with the service reward
// discounted into the return-to-start transitions; equals chi_star of the
// kRenewal variant. Power iteration, stopped once the two-sided ratio
// enclosure of the radius is narrower than 1e-13 relative.
double spectral_radius_oracle(const std::vector<double>& p, double n_bits, double theta,
                              int max_iter = 1000000);

// Evaluates effective capacity on an ascending theta grid and checks the
// curve is nonincreasing; throws std::logic_error otherwise.
std::vector<EffCapResult> effcap_vs_theta_curve(const std::vector<double>& p, double n_bits,
                                                double frame_s, double bandwidth_hz,
                                                const std::vector<double>& thetas,
                                                EffCapVariant variant);

}  // namespace harqlink
