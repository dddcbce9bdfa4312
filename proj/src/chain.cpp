#include "harqlink/chain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace harqlink {

namespace {

constexpr int kMaxFactorial = 170;

double factorial(int n) {
    static const std::array<double, kMaxFactorial + 1> table = [] {
        std::array<double, kMaxFactorial + 1> t{};
        t[0] = 1.0;
        for (int i = 1; i <= kMaxFactorial; ++i) {
            t[i] = t[i - 1] * static_cast<double>(i);
        }
        return t;
    }();
    return table[n];
}

using Multiplicity = std::array<int, 4>;

// Hypoexponential CDF at kappa for the scenario-history mixture, cached per
// multiplicity vector for the duration of one attempt_fail_* call.
class CdfCache {
  public:
    CdfCache(const ScenarioProfile& pr, const SeriesControl& ctl) : pr_(pr), ctl_(ctl) {}

    double at(const Multiplicity& m) {
        auto it = memo_.find(m);
        if (it != memo_.end()) {
            return it->second;
        }
        ExponentialMixture mix;
        mix.scales.assign(pr_.gain_scale.begin(), pr_.gain_scale.end());
        mix.multiplicities.assign(m.begin(), m.end());
        double v = exp_sum_cdf(mix, pr_.kappa, ctl_);
        memo_.emplace(m, v);
        return v;
    }

  private:
    const ScenarioProfile& pr_;
    const SeriesControl& ctl_;
    std::map<Multiplicity, double> memo_;
};

// Small-kappa limit of F(h + e_j) / F(h): the history dependence cancels to
// leading order, leaving kappa/(m+1) * sum_j q_j / beta_j.
double degenerate_ratio(int m, const ScenarioProfile& pr) {
    double s = 0.0;
    for (int j = 0; j < 4; ++j) {
        if (pr.prob[j] > 0.0) {
            s += pr.prob[j] / pr.gain_scale[j];
        }
    }
    return std::clamp(pr.kappa / static_cast<double>(m + 1) * s, 0.0, 1.0);
}

// Visits every scenario history of length m (multiplicity vectors summing to
// m) in lexicographic order, passing its occurrence probability.
template <typename Fn>
void for_each_history(int m, const ScenarioProfile& pr, Fn&& fn) {
    for (int a = 0; a <= m; ++a) {
        for (int b = 0; b <= m - a; ++b) {
            for (int c = 0; c <= m - a - b; ++c) {
                int d = m - a - b - c;
                Multiplicity hist{a, b, c, d};
                double w = factorial(m);
                bool zero = false;
                for (int i = 0; i < 4; ++i) {
                    if (hist[i] == 0) {
                        continue;
                    }
                    if (pr.prob[i] == 0.0) {
                        zero = true;
                        break;
                    }
                    w = w / factorial(hist[i]) * std::pow(pr.prob[i], hist[i]);
                }
                if (zero || w == 0.0) {
                    continue;
                }
                fn(hist, w);
            }
        }
    }
}

void check_history_ratio(double num, double den) {
    if (num > den * (1.0 + 1e-9) + 1e-300) {
        throw std::logic_error("conditional failure probability exceeded 1 beyond tolerance");
    }
}

}  // namespace

double attempt_fail_first(const ScenarioProfile& pr) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        s += pr.prob[i] * std::exp(-pr.kappa / pr.gain_scale[i]);
    }
    return std::clamp(1.0 - s, 0.0, 1.0);
}

double attempt_fail_next(int m, const ScenarioProfile& pr, const SeriesControl& ctl) {
    if (m < 1) {
        throw std::invalid_argument("attempt index must be at least 1");
    }
    if (m > kMaxFactorial) {
        throw std::invalid_argument("attempt budget too large");
    }
    CdfCache cdf(pr, ctl);
    double acc = 0.0;
    for_each_history(m, pr, [&](const Multiplicity& hist, double w) {
        double den = cdf.at(hist);
        double ratio;
        if (den < ctl.abs_floor) {
            ratio = degenerate_ratio(m, pr);
        } else {
            double num = 0.0;
            for (int j = 0; j < 4; ++j) {
                if (pr.prob[j] == 0.0) {
                    continue;
                }
                Multiplicity next = hist;
                ++next[j];
                num += pr.prob[j] * cdf.at(next);
            }
            check_history_ratio(num, den);
            ratio = std::clamp(num / den, 0.0, 1.0);
        }
        acc += w * ratio;
    });
    return std::clamp(acc, 0.0, 1.0);
}

double attempt_fail_next_posterior(int m, const ScenarioProfile& pr, const SeriesControl& ctl) {
    if (m < 1) {
        throw std::invalid_argument("attempt index must be at least 1");
    }
    if (m > kMaxFactorial) {
        throw std::invalid_argument("attempt budget too large");
    }
    CdfCache cdf(pr, ctl);
    double num_total = 0.0;
    double den_total = 0.0;
    for_each_history(m, pr, [&](const Multiplicity& hist, double w) {
        double den = cdf.at(hist);
        double num = 0.0;
        for (int j = 0; j < 4; ++j) {
            if (pr.prob[j] == 0.0) {
                continue;
            }
            Multiplicity next = hist;
            ++next[j];
            num += pr.prob[j] * cdf.at(next);
        }
        check_history_ratio(num, den);
        num_total += w * num;
        den_total += w * den;
    });
    if (den_total < ctl.abs_floor) {
        return degenerate_ratio(m, pr);
    }
    return std::clamp(num_total / den_total, 0.0, 1.0);
}

HarqChain build_chain(const SystemParams& sp, const ScenarioProfile& pr, const SeriesControl& ctl) {
    int m_max = sp.max_attempts;
    std::vector<double> p(m_max);
    p[0] = attempt_fail_first(pr);
    for (int m = 1; m < m_max; ++m) {
        p[m] = attempt_fail_next(m, pr, ctl);
    }
    return chain_from_failures(p, sp);
}

HarqChain chain_from_failures(const std::vector<double>& p, const SystemParams& sp) {
    int m_max = sp.max_attempts;
    if (p.size() != static_cast<size_t>(m_max)) {
        throw std::invalid_argument("failure vector length must equal the attempt budget");
    }
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("failure probabilities must lie in [0, 1]");
        }
    }
    HarqChain ch;
    ch.p = p;

    ch.phi.assign(static_cast<size_t>(m_max) * m_max, 0.0);
    for (int j = 0; j < m_max; ++j) {
        if (j < m_max - 1) {
            ch.phi[static_cast<size_t>(0) * m_max + j] = 1.0 - ch.p[j];
            ch.phi[static_cast<size_t>(j + 1) * m_max + j] = ch.p[j];
        } else {
            ch.phi[static_cast<size_t>(0) * m_max + j] = 1.0;
        }
    }

    ch.pi.resize(m_max);
    double run = 1.0;
    double norm = 1.0;
    ch.pi[0] = 1.0;
    for (int m = 1; m < m_max; ++m) {
        run *= ch.p[m - 1];
        ch.pi[m] = run;
        norm += run;
    }
    for (int m = 0; m < m_max; ++m) {
        ch.pi[m] /= norm;
    }

    ch.p_lost = 1.0;
    for (int m = 0; m < m_max; ++m) {
        ch.p_lost *= ch.p[m];
    }

    double bits_per_use = static_cast<double>(sp.packet_bits) / (sp.frame_s * sp.bandwidth_hz);
    ch.service_rate_bcu = ch.pi[0] * bits_per_use;
    ch.goodput_bcu = ch.pi[0] * (1.0 - ch.p_lost) * bits_per_use;
    return ch;
}

ThroughputMetrics throughput_metrics(const HarqChain& chain, const SystemParams& sp) {
    ThroughputMetrics tm;
    double bits_per_use = static_cast<double>(sp.packet_bits) / (sp.frame_s * sp.bandwidth_hz);
    tm.service_rate_bcu = chain.pi[0] * bits_per_use;
    tm.goodput_bcu = chain.pi[0] * (1.0 - chain.p_lost) * bits_per_use;
    tm.service_rate_bps = tm.service_rate_bcu * sp.bandwidth_hz;
    tm.goodput_bps = tm.goodput_bcu * sp.bandwidth_hz;
    return tm;
}

std::vector<double> power_iteration_stationary(const std::vector<double>& phi, int m,
                                               double rel_tol, int max_iter) {
    if (m < 1 || phi.size() != static_cast<size_t>(m) * m) {
        throw std::invalid_argument("matrix size does not match dimension");
    }
    std::vector<double> v(m, 1.0 / m);
    std::vector<double> w(m);
    for (int it = 0; it < max_iter; ++it) {
        for (int r = 0; r < m; ++r) {
            double s = 0.0;
            for (int c = 0; c < m; ++c) {
                s += phi[static_cast<size_t>(r) * m + c] * v[c];
            }
            // Lazy-chain step keeps the iteration convergent for periodic chains.
            w[r] = 0.5 * (s + v[r]);
        }
        double total = 0.0;
        for (int r = 0; r < m; ++r) {
            total += w[r];
        }
        double diff = 0.0;
        for (int r = 0; r < m; ++r) {
            w[r] /= total;
            diff = std::max(diff, std::abs(w[r] - v[r]));
        }
        v.swap(w);
        if (diff <= rel_tol) {
            return v;
        }
    }
    throw std::runtime_error("stationary distribution iteration did not converge");
}

}  // namespace harqlink
