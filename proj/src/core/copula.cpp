#include "copula.hpp"

#include "ast.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skewnow {

std::string to_string(CopulaFamily f)
{
    switch (f) {
    case CopulaFamily::independence: return "independence";
    case CopulaFamily::gaussian: return "gaussian";
    case CopulaFamily::student_t: return "student_t";
    }
    return "unknown";
}

CopulaFamily copula_family_from_string(const std::string& s)
{
    if (s == "independence") return CopulaFamily::independence;
    if (s == "gaussian") return CopulaFamily::gaussian;
    if (s == "student_t" || s == "t") return CopulaFamily::student_t;
    throw std::invalid_argument("unknown copula family: " + s);
}

void CopulaSpec::validate() const
{
    if (!(std::abs(dependence) < 1.0)) throw std::domain_error("copula dependence must lie in (-1,1)");
    if (family == CopulaFamily::student_t && !(dof > 0.0)) {
        throw std::domain_error("Student-t copula requires dof > 0");
    }
}

double clamp_pit(double u) { return std::clamp(u, kPitClamp, 1.0 - kPitClamp); }

double copula_logdensity(double u1, double u2, const CopulaSpec& spec)
{
    if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
        throw std::domain_error("copula arguments must lie strictly inside (0,1)");
    }
    const double rho = spec.dependence;
    switch (spec.family) {
    case CopulaFamily::independence: return 0.0;
    case CopulaFamily::gaussian: {
        if (rho == 0.0) return 0.0;
        const double x1 = special::normal_quantile(u1);
        const double x2 = special::normal_quantile(u2);
        const double one_m = 1.0 - rho * rho;
        return -0.5 * std::log(one_m) - (rho * rho * (x1 * x1 + x2 * x2) - 2.0 * rho * x1 * x2) / (2.0 * one_m);
    }
    case CopulaFamily::student_t: {
        const double nu = spec.dof;
        const Tail tail(nu);
        const double x1 = special::student_quantile(u1, tail);
        const double x2 = special::student_quantile(u2, tail);
        const double one_m = 1.0 - rho * rho;
        // log[G((nu+2)/2) G(nu/2) / G((nu+1)/2)^2] through gamma ratios, which
        // stay accurate for very large nu.
        using boost::math::tgamma_delta_ratio;
        const double log_const = std::log(tgamma_delta_ratio(0.5 * nu, 0.5)) -
                                 std::log(tgamma_delta_ratio(0.5 * nu + 0.5, 0.5));
        const double q = (x1 * x1 - 2.0 * rho * x1 * x2 + x2 * x2) / (nu * one_m);
        return log_const - 0.5 * std::log(one_m) - 0.5 * (nu + 2.0) * std::log1p(q) +
               0.5 * (nu + 1.0) * (std::log1p(x1 * x1 / nu) + std::log1p(x2 * x2 / nu));
    }
    }
    return 0.0;
}

std::pair<double, double> copula_sample(const CopulaSpec& spec, Rng& rng)
{
    const double a = rng.uniform();
    const double b = rng.uniform();
    if (spec.family == CopulaFamily::independence) return {a, b};

    const double rho = spec.dependence;
    const double z1 = special::normal_quantile(a);
    const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * special::normal_quantile(b);
    if (spec.family == CopulaFamily::gaussian) {
        return {clamp_pit(special::normal_cdf(z1)), clamp_pit(special::normal_cdf(z2))};
    }
    const double nu = spec.dof;
    const double chi2 = 2.0 * boost::math::gamma_p_inv(0.5 * nu, rng.uniform());
    const double s = std::sqrt(nu / chi2);
    const Tail tail(nu);
    return {clamp_pit(special::student_cdf(z1 * s, tail)), clamp_pit(special::student_cdf(z2 * s, tail))};
}

}  // namespace skewnow
