#pragma once

// Asymmetric Student-t (AST) family: density, distribution function,
// quantiles, sampling, score and diagonal information.
//
// Parameterisation: location mu, scale sigma > 0, shape alpha in (0,1),
// left/right tails nu1, nu2 > 0 (or infinite). The left half of the density
// is a Student-t kernel with scale 2*alpha*sigma*K(nu1), the right half one
// with scale 2*(1-alpha)*sigma*K(nu2). The density at the location is always
// 1/sigma.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewnow {

/// Tail (degrees-of-freedom) parameter. Infinity is a first-class value and
/// selects the exact Gaussian kernel.
class Tail {
public:
    constexpr Tail() = default;
    constexpr explicit Tail(double nu) : nu_(nu) {}

    static constexpr Tail infinite() { return Tail(std::numeric_limits<double>::infinity()); }

    constexpr bool is_infinite() const { return nu_ == std::numeric_limits<double>::infinity(); }
    constexpr double value() const { return nu_; }

    friend constexpr bool operator==(Tail, Tail) = default;

private:
    double nu_ = std::numeric_limits<double>::infinity();
};

struct ASTParams {
    double location = 0.0;
    double scale = 1.0;
    double shape = 0.5;
    Tail tail_left = Tail::infinite();
    Tail tail_right = Tail::infinite();

    /// Throws std::domain_error if any invariant is violated.
    void validate() const;
};

enum class DistributionFamily { normal, student_t, skew_normal, skew_t, ast };

std::string to_string(DistributionFamily f);
DistributionFamily family_from_string(const std::string& s);

/// True when the family pins the shape at 0.5.
bool family_fixes_shape(DistributionFamily f);
/// True when the family pins both tails at infinity.
bool family_gaussian_tails(DistributionFamily f);

/// Projects `p` onto the constraints of `f` (shape 0.5 and/or Gaussian tails,
/// equal tails). For tied tails the left tail wins.
ASTParams constrain(DistributionFamily f, ASTParams p);

/// Checks that `p` satisfies the constraints of `f` exactly.
bool satisfies(DistributionFamily f, const ASTParams& p);

/// K(nu) = Gamma((nu+1)/2) / (sqrt(nu*pi) Gamma(nu/2)); 1/sqrt(2*pi) at infinity.
double k_const(Tail nu);

double ast_logpdf(double y, const ASTParams& p);
double ast_pdf(double y, const ASTParams& p);
double ast_cdf(double y, const ASTParams& p);
double ast_quantile(double u, const ASTParams& p);

/// Inverse-CDF draws, deterministic in `seed`.
std::vector<double> ast_sample(const ASTParams& p, std::size_t n, std::uint64_t seed);

struct ASTScore {
    double d_mu = 0.0;
    double d_sigma = 0.0;
    double d_alpha = 0.0;
};

/// Gradient of ast_logpdf with respect to (mu, sigma, alpha). At y == mu the
/// left branch is used.
ASTScore ast_score(double y, const ASTParams& p);

struct ASTInformation {
    double i_mu = 0.0;
    double i_sigma = 0.0;
    double i_alpha = 0.0;
};

/// Diagonal information used to scale the score. The location entry carries
/// the published normalisation, which is four times E[d_mu^2]; only the
/// relative level matters because the gains absorb it.
ASTInformation ast_fisher(const ASTParams& p);

/// Mean in closed form from the two half-t pieces.
/// Requires min(nu1, nu2) > 1.
double ast_mean(const ASTParams& p);

namespace special {
double normal_cdf(double x);
double normal_quantile(double u);
double student_cdf(double x, Tail nu);
double student_quantile(double u, Tail nu);
double student_logpdf(double x, Tail nu);
}  // namespace special

}  // namespace skewnow
