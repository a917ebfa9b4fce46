#pragma once

#include <cstdint>
#include <vector>

namespace pseudo {

// Special functions.  Implemented with the textbook series / continued
// fraction expansions (modified Lentz) so no external stats library is
// needed; absolute accuracy is better than 1e-10 over the argument ranges
// used by the tests below.

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double regularized_beta(double x, double a, double b);

/// Upper tail of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, double df);
/// Upper tail of the F distribution with (df1, df2) degrees of freedom.
double f_sf(double f, double df1, double df2);

/// Paired per-token correctness counts for two systems A and B.
/// Cell n_ab counts tokens where A's correctness is a and B's is b
/// (1 = correct).  The discordant cells are b = n01 (only B correct)
/// and c = n10 (only A correct).
struct ContingencyTable {
    std::uint64_t n00 = 0;
    std::uint64_t n01 = 0;
    std::uint64_t n10 = 0;
    std::uint64_t n11 = 0;

    std::uint64_t total() const { return n00 + n01 + n10 + n11; }
    std::uint64_t b() const { return n01; }
    std::uint64_t c() const { return n10; }
};

enum class McNemarMode { Auto, Exact, Corrected };

struct McNemarResult {
    McNemarMode mode_used = McNemarMode::Corrected;
    /// Corrected mode: the continuity-corrected chi-square statistic.
    /// Exact mode: min(b, c), the binomial tail count.
    double statistic = 0.0;
    double p_value = 1.0;
};

/// McNemar's paired test on the discordant counts.
///   corrected: chi2 = (max(|b-c|-1, 0))^2 / (b+c), p from the chi2(1) tail
///   exact:     two-sided binomial(min(b,c); b+c, 1/2), clamped at 1
///   auto:      exact when b+c < 25, else corrected
/// b + c == 0 yields p = 1.0.
McNemarResult mcnemar(const ContingencyTable& t,
                      McNemarMode mode = McNemarMode::Auto);

struct AnovaResult {
    double f = 0.0;
    double p_value = 1.0;
    double df_between = 0.0;
    double df_within = 0.0;
};

/// One-way ANOVA over 2+ groups of observations (each group needs 2+
/// observations).  F is the between/within mean-square ratio; p is the
/// F(df_between, df_within) upper tail.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

}  // namespace pseudo
