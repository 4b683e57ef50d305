#ifndef FFB_FIT_HPP
#define FFB_FIT_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "ffb/common.hpp"

namespace ffb {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rsq = 0.0;
    std::size_t count = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw param_error("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw coverage_error("fit_line: need at least 2 samples");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw coverage_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.count = n;
    if (syy == 0) {
        f.rsq = 1.0; // constant data, perfectly explained by slope 0
    } else {
        double ssr = 0;
        for (std::size_t i = 0; i < n; ++i)
            ssr += sqr(y[i] - (f.intercept + f.slope * x[i]));
        f.rsq = 1.0 - ssr / syy;
    }
    return f;
}

// Power-law fit value = c * r^p on log-log axes. Non-positive samples are
// skipped (they carry no log-log information); `used` reports how many
// survived.
struct PowerFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double rsq = 0.0;
    std::size_t used = 0;
};

inline PowerFit fit_power(const std::vector<double>& r, const std::vector<double>& v) {
    if (r.size() != v.size()) throw param_error("fit_power: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] > 0 && v[i] > 0) {
            lx.push_back(std::log(r[i]));
            ly.push_back(std::log(v[i]));
        }
    }
    if (lx.size() < 2) throw coverage_error("fit_power: fewer than 2 positive samples");
    LineFit lf = fit_line(lx, ly);
    PowerFit pf;
    pf.exponent = lf.slope;
    pf.prefactor = std::exp(lf.intercept);
    pf.rsq = lf.rsq;
    pf.used = lf.count;
    return pf;
}

} // namespace ffb

#endif
