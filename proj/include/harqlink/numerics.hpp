#pragma once

#include <functional>
#include <vector>

namespace harqlink {

// Truncation control for the series expansions.
struct SeriesControl {
    double rel_tol = 1e-10;
    double abs_floor = 1e-300;
    int max_terms = 10000;
};

// Sum of independent exponentials: multiplicities[i] summands with mean
// scales[i]. Entries with multiplicity 0 are allowed and ignored.
struct ExponentialMixture {
    std::vector<double> scales;
    std::vector<int> multiplicities;

    int total_multiplicity() const;
};

// Regularized lower incomplete gamma p(x,a) = P(a,x) to relative ~1e-12.
// Series for x < a+1, continued fraction otherwise.
double reg_lower_gamma(double x, double a);

// Upper counterpart Q(a,x) = 1 - p(x,a), evaluated by the continued
// fraction directly (independent of the series path for x >= a+1 checks).
double reg_upper_gamma(double x, double a);

// CDF of the mixture sum at x, via the single-gamma-series expansion with
// the scale-normalized argument. Equal-scale and single-summand inputs
// short-circuit to the Erlang / exponential closed forms.
double exp_sum_cdf(const ExponentialMixture& mix, double x, const SeriesControl& ctl);

// Plain bisection. Requires a sign change between lo and hi; an exact zero
// at either endpoint is returned as the root. Shrinks the bracket until its
// width is <= tol and returns the midpoint.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace harqlink
