#include "harqlink/effcap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harqlink {

namespace {

void check_inputs(const std::vector<double>& p, double n_bits, double theta) {
    if (p.empty()) {
        throw std::invalid_argument("failure vector must not be empty");
    }
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("failure probabilities must lie in [0, 1]");
        }
    }
    if (!(n_bits >= 0.0) || !std::isfinite(n_bits)) {
        throw std::invalid_argument("packet size must be nonnegative");
    }
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("theta must be positive");
    }
}

}  // namespace

std::vector<double> branch_weights(const std::vector<double>& p, EffCapVariant variant) {
    int m_max = static_cast<int>(p.size());
    std::vector<double> w(m_max);
    double run = 1.0;  // probability of reaching attempt m (first m-1 all failed)
    for (int m = 1; m < m_max; ++m) {
        w[m - 1] = (1.0 - p[m - 1]) * run;
        run *= p[m - 1];
    }
    if (m_max == 1) {
        // a single-attempt cycle always has length one, under either variant
        w[0] = 1.0;
    } else {
        w[m_max - 1] = (variant == EffCapVariant::kTruncated) ? run * p[m_max - 1] : run;
    }
    return w;
}

double char_poly(double chi, const std::vector<double>& p, double n_bits, double theta,
                 EffCapVariant variant) {
    check_inputs(p, n_bits, theta);
    std::vector<double> w = branch_weights(p, variant);
    int m_max = static_cast<int>(p.size());
    double discount = std::exp(-theta * n_bits);
    double acc = std::pow(chi, m_max);
    for (int m = 1; m <= m_max; ++m) {
        acc -= w[m - 1] * discount * std::pow(chi, m_max - m);
    }
    return acc;
}

EffCapResult effective_capacity(const std::vector<double>& p, double n_bits, double frame_s,
                                double bandwidth_hz, double theta, EffCapVariant variant) {
    check_inputs(p, n_bits, theta);
    if (!(frame_s > 0.0) || !(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("frame duration and bandwidth must be positive");
    }
    std::vector<double> w = branch_weights(p, variant);
    int order = static_cast<int>(w.size());
    while (order > 0 && w[order - 1] <= 0.0) {
        --order;
    }
    if (order == 0) {
        throw std::runtime_error(
            "service recursion has no mass: failure vector and variant admit no root in (0, 1]");
    }

    double theta_n = theta * n_bits;
    double u_star;
    if (theta_n == 0.0 && variant == EffCapVariant::kRenewal) {
        // Zero bits per packet: the recursion matrix is stochastic, the root
        // sits exactly at 1 and rounding could push the bracket past it.
        u_star = 0.0;
    } else if (order == 1) {
        u_star = std::log(w[0]) - theta_n;
    } else {
        // Solve for u = ln(chi). Working in log space keeps the root
        // well-conditioned when theta * n_bits is large enough that chi
        // itself underflows.
        auto g = [&](double u) {
            double s = 0.0;
            for (int m = 1; m <= order; ++m) {
                if (w[m - 1] > 0.0) {
                    s += w[m - 1] * std::exp(-theta_n - m * u);
                }
            }
            return 1.0 - s;
        };
        double u_lo = (std::log(w[order - 1]) - theta_n) / order - 1.0;
        u_star = bisect_root(g, u_lo, 0.0, 1e-13);
    }

    EffCapResult res;
    res.theta = theta;
    res.log_chi = u_star;
    res.chi_star = std::exp(u_star);
    res.per_frame_bits = -u_star / theta;
    res.bps = res.per_frame_bits / frame_s;
    res.bcu = res.bps / bandwidth_hz;
    return res;
}

double spectral_radius_oracle(const std::vector<double>& p, double n_bits, double theta,
                              int max_iter) {
    check_inputs(p, n_bits, theta);
    int m_max = static_cast<int>(p.size());
    double discount = std::exp(-theta * n_bits);
    std::vector<double> a(static_cast<size_t>(m_max) * m_max, 0.0);
    for (int j = 0; j < m_max; ++j) {
        if (j < m_max - 1) {
            a[static_cast<size_t>(0) * m_max + j] = (1.0 - p[j]) * discount;
            a[static_cast<size_t>(j + 1) * m_max + j] = p[j];
        } else {
            a[static_cast<size_t>(0) * m_max + j] = discount;
        }
    }
    std::vector<double> v(m_max, 1.0 / m_max);
    std::vector<double> bv(m_max);
    for (int it = 0; it < max_iter; ++it) {
        // Iterate B = A + I: the shift makes the dominant eigenvalue strictly
        // dominant even when the chain is periodic, and keeps every component
        // of the iterate positive.
        double total = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (int r = 0; r < m_max; ++r) {
            double s = v[r];
            for (int c = 0; c < m_max; ++c) {
                s += a[static_cast<size_t>(r) * m_max + c] * v[c];
            }
            bv[r] = s;
            total += s;
            double ratio = s / v[r];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        // For a nonnegative matrix and a positive vector, the component
        // ratios of one application enclose the spectral radius; stopping on
        // the enclosure width bounds the true error, which a small change
        // between successive estimates does not.
        if (hi - lo <= 1e-13 * hi) {
            return 0.5 * (lo + hi) - 1.0;
        }
        for (int r = 0; r < m_max; ++r) {
            bv[r] /= total;
        }
        v.swap(bv);
    }
    throw std::runtime_error("power iteration did not converge");
}

std::vector<EffCapResult> effcap_vs_theta_curve(const std::vector<double>& p, double n_bits,
                                                double frame_s, double bandwidth_hz,
                                                const std::vector<double>& thetas,
                                                EffCapVariant variant) {
    if (thetas.empty()) {
        throw std::invalid_argument("theta grid must not be empty");
    }
    for (size_t i = 1; i < thetas.size(); ++i) {
        if (!(thetas[i] > thetas[i - 1])) {
            throw std::invalid_argument("theta grid must be strictly ascending");
        }
    }
    std::vector<EffCapResult> out;
    out.reserve(thetas.size());
    for (double th : thetas) {
        out.push_back(effective_capacity(p, n_bits, frame_s, bandwidth_hz, th, variant));
        size_t k = out.size();
        if (k >= 2 && out[k - 1].bcu > out[k - 2].bcu * (1.0 + 1e-9) + 1e-15) {
            throw std::logic_error("effective capacity must be nonincreasing in theta");
        }
    }
    return out;
}

}  // namespace harqlink
