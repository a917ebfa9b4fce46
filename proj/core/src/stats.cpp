#include "pseudo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pseudo/error.hpp"

namespace pseudo {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 500;
constexpr double kTiny = 1e-300;

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double x, double a, double b) {
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double dm = m;
        double aa = dm * (b - dm) * x / ((qam + 2.0 * dm) * (a + 2.0 * dm));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + 2.0 * dm) * (qap + 2.0 * dm));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps)
            break;
    }
    return h;
}

double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
        return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0)
        return 0.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0 || !std::isfinite(a))
        return std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(x))
        return 0.0;
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double regularized_beta(double x, double a, double b) {
    if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0)
        return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) -
                            std::lgamma(a) - std::lgamma(b) +
                            std::lgamma(a + b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(x, a, b) / a;
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double chi2_sf(double x, double df) {
    if (df <= 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0)
        return 1.0;
    return regularized_gamma_q(df / 2.0, x / 2.0);
}

double f_sf(double f, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0.0)
        return 1.0;
    if (std::isinf(f))
        return 0.0;
    return regularized_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0);
}

McNemarResult mcnemar(const ContingencyTable& t, McNemarMode mode) {
    std::uint64_t b = t.b();
    std::uint64_t c = t.c();
    std::uint64_t n = b + c;

    McNemarResult r;
    if (mode == McNemarMode::Auto)
        mode = n < 25 ? McNemarMode::Exact : McNemarMode::Corrected;
    r.mode_used = mode;

    if (n == 0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }

    if (mode == McNemarMode::Exact) {
        std::uint64_t k = std::min(b, c);
        r.statistic = static_cast<double>(k);
        double log_half_n =
            static_cast<double>(n) * std::log(0.5);
        double tail = 0.0;
        for (std::uint64_t i = 0; i <= k; ++i)
            tail += std::exp(log_choose(n, i) + log_half_n);
        r.p_value = std::min(1.0, 2.0 * tail);
        return r;
    }

    double diff = std::fabs(static_cast<double>(b) - static_cast<double>(c));
    double num = std::max(diff - 1.0, 0.0);
    r.statistic = num * num / static_cast<double>(n);
    r.p_value = chi2_sf(r.statistic, 1.0);
    return r;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2)
        fail("anova_oneway: need at least 2 groups, got ", groups.size());
    std::size_t total_n = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].size() < 2)
            fail("anova_oneway: group ", g, " has ", groups[g].size(),
                 " observations; need at least 2");
        total_n += groups[g].size();
    }

    double grand_sum = 0.0;
    std::vector<double> means(groups.size(), 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double s = 0.0;
        for (double v : groups[g])
            s += v;
        means[g] = s / static_cast<double>(groups[g].size());
        grand_sum += s;
    }
    double grand_mean = grand_sum / static_cast<double>(total_n);

    double ssb = 0.0;
    double ssw = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double d = means[g] - grand_mean;
        ssb += static_cast<double>(groups[g].size()) * d * d;
        for (double v : groups[g]) {
            double e = v - means[g];
            ssw += e * e;
        }
    }

    AnovaResult r;
    r.df_between = static_cast<double>(groups.size()) - 1.0;
    r.df_within = static_cast<double>(total_n - groups.size());

    if (ssb == 0.0) {
        r.f = 0.0;
        r.p_value = 1.0;
        return r;
    }
    if (ssw == 0.0) {
        r.f = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    r.f = (ssb / r.df_between) / (ssw / r.df_within);
    r.p_value = f_sf(r.f, r.df_between, r.df_within);
    return r;
}

}  // namespace pseudo
