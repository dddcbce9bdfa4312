#include "harqlink/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace harqlink {

namespace {

constexpr int kGammaMaxIter = 500;
constexpr double kGammaEps = 1e-16;

// Lower series: P(a,x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k)).
double lower_gamma_series(double x, double a) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kGammaMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kGammaEps) {
            return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
        }
    }
    throw std::runtime_error("reg_lower_gamma: series did not converge");
}

// Upper continued fraction (modified Lentz): Q(a,x).
double upper_gamma_cf(double x, double a) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kGammaMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kGammaEps) {
            return h * std::exp(a * std::log(x) - x - std::lgamma(a));
        }
    }
    throw std::runtime_error("reg_lower_gamma: continued fraction did not converge");
}

void check_gamma_domain(double x, double a) {
    if (!std::isfinite(x) || !std::isfinite(a)) {
        throw std::domain_error("reg_lower_gamma: non-finite input");
    }
    if (x < 0.0) throw std::domain_error("reg_lower_gamma: x < 0");
    if (a <= 0.0) throw std::domain_error("reg_lower_gamma: a <= 0");
}

}  // namespace

int ExponentialMixture::total_multiplicity() const {
    int r = 0;
    for (int m : multiplicities) r += m;
    return r;
}

double reg_lower_gamma(double x, double a) {
    check_gamma_domain(x, a);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lower_gamma_series(x, a);
    double q = upper_gamma_cf(x, a);
    double p = 1.0 - q;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double reg_upper_gamma(double x, double a) {
    check_gamma_domain(x, a);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - lower_gamma_series(x, a);
    return upper_gamma_cf(x, a);
}

double exp_sum_cdf(const ExponentialMixture& mix, double x, const SeriesControl& ctl) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::domain_error("exp_sum_cdf: x must be finite and >= 0");
    }
    if (mix.scales.size() != mix.multiplicities.size()) {
        throw std::domain_error("exp_sum_cdf: scale/multiplicity length mismatch");
    }
    // Collapse to the active scales.
    std::vector<double> scales;
    std::vector<int> mult;
    for (size_t i = 0; i < mix.scales.size(); ++i) {
        int m = mix.multiplicities[i];
        if (m < 0) throw std::domain_error("exp_sum_cdf: negative multiplicity");
        if (m == 0) continue;
        double s = mix.scales[i];
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::domain_error("exp_sum_cdf: scales must be finite and > 0");
        }
        // Merge duplicates so the equal-scale short-circuit sees them.
        bool merged = false;
        for (size_t j = 0; j < scales.size(); ++j) {
            if (scales[j] == s) {
                mult[j] += m;
                merged = true;
                break;
            }
        }
        if (!merged) {
            scales.push_back(s);
            mult.push_back(m);
        }
    }
    if (scales.empty()) throw std::domain_error("exp_sum_cdf: empty mixture");
    if (x == 0.0) return 0.0;

    int r = 0;
    for (int m : mult) r += m;
    if (scales.size() == 1) {
        if (r == 1) return -std::expm1(-x / scales[0]);
        return reg_lower_gamma(x / scales[0], static_cast<double>(r));
    }

    double beta_min = scales[0];
    for (double s : scales) beta_min = std::min(beta_min, s);

    double c_factor = 1.0;
    for (size_t i = 0; i < scales.size(); ++i) {
        c_factor *= std::pow(beta_min / scales[i], mult[i]);
    }

    // gamma_k and the delta recursion grow with the term index; keep them as
    // running vectors sized by how far the truncation rule lets us go.
    std::vector<double> gamma_k;  // gamma_k[k-1] holds gamma_k
    std::vector<double> delta{1.0};
    const double xn = x / beta_min;

    double sum = delta[0] * reg_lower_gamma(xn, static_cast<double>(r));
    int below = 0;
    for (int k = 1; k < ctl.max_terms; ++k) {
        double g = 0.0;
        for (size_t i = 0; i < scales.size(); ++i) {
            g += (static_cast<double>(mult[i]) / k) * std::pow(1.0 - beta_min / scales[i], k);
        }
        gamma_k.push_back(g);
        double d = 0.0;
        for (int l = 1; l <= k; ++l) {
            d += l * gamma_k[l - 1] * delta[k - l];
        }
        d /= k;
        delta.push_back(d);

        double inc = d * reg_lower_gamma(xn, static_cast<double>(r + k));
        sum += inc;
        if (inc < ctl.rel_tol * sum && k >= r) {
            if (++below >= 3) {
                double f = c_factor * sum;
                return f < 0.0 ? 0.0 : (f > 1.0 ? 1.0 : f);
            }
        } else {
            below = 0;
        }
    }
    throw std::runtime_error("exp_sum_cdf: series truncation not reached within max_terms");
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("bisect_root: requires lo < hi");
    double flo = f(lo);
    double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) {
        throw std::runtime_error("bisect_root: non-finite endpoint value");
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw std::invalid_argument("bisect_root: no sign change on [lo, hi]");
    }
    for (int i = 0; i < 500 && (hi - lo) > tol; ++i) {
        double mid = lo + 0.5 * (hi - lo);
        double fm = f(mid);
        if (!std::isfinite(fm)) throw std::runtime_error("bisect_root: non-finite evaluation");
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

}  // namespace harqlink
