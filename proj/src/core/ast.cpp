#include "ast.hpp"

#include "rng.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace skewnow {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

bool is_finite_positive(Tail t) { return t.is_infinite() || (std::isfinite(t.value()) && t.value() > 0.0); }

// Half-kernel scale for the side selected by x = y - mu.
struct Branch {
    double c;       // 2*alpha*sigma*K(nu) or 2*(1-alpha)*sigma*K(nu)
    Tail nu;
    double weight;  // alpha (left) or 1-alpha (right)
    bool left;
};

Branch branch_for(double x, const ASTParams& p)
{
    if (x <= 0.0) {
        return {2.0 * p.shape * p.scale * k_const(p.tail_left), p.tail_left, p.shape, true};
    }
    return {2.0 * (1.0 - p.shape) * p.scale * k_const(p.tail_right), p.tail_right, 1.0 - p.shape,
            false};
}

// (nu+1)/(nu+3), 1 at infinity.
double info_ratio(Tail nu) { return nu.is_infinite() ? 1.0 : (nu.value() + 1.0) / (nu.value() + 3.0); }
// nu/(nu+3), 1 at infinity.
double scale_ratio(Tail nu) { return nu.is_infinite() ? 1.0 : nu.value() / (nu.value() + 3.0); }

}  // namespace

std::string to_string(DistributionFamily f)
{
    switch (f) {
    case DistributionFamily::normal: return "normal";
    case DistributionFamily::student_t: return "student_t";
    case DistributionFamily::skew_normal: return "skew_normal";
    case DistributionFamily::skew_t: return "skew_t";
    case DistributionFamily::ast: return "ast";
    }
    return "unknown";
}

DistributionFamily family_from_string(const std::string& s)
{
    if (s == "normal") return DistributionFamily::normal;
    if (s == "student_t") return DistributionFamily::student_t;
    if (s == "skew_normal") return DistributionFamily::skew_normal;
    if (s == "skew_t") return DistributionFamily::skew_t;
    if (s == "ast") return DistributionFamily::ast;
    throw std::invalid_argument("unknown distribution family: " + s);
}

bool family_fixes_shape(DistributionFamily f)
{
    return f == DistributionFamily::normal || f == DistributionFamily::student_t;
}

bool family_gaussian_tails(DistributionFamily f)
{
    return f == DistributionFamily::normal || f == DistributionFamily::skew_normal;
}

ASTParams constrain(DistributionFamily f, ASTParams p)
{
    if (family_fixes_shape(f)) p.shape = 0.5;
    if (family_gaussian_tails(f)) {
        p.tail_left = Tail::infinite();
        p.tail_right = Tail::infinite();
    } else if (f != DistributionFamily::ast) {
        p.tail_right = p.tail_left;
    }
    return p;
}

bool satisfies(DistributionFamily f, const ASTParams& p)
{
    if (family_fixes_shape(f) && p.shape != 0.5) return false;
    if (family_gaussian_tails(f) && !(p.tail_left.is_infinite() && p.tail_right.is_infinite())) return false;
    if (f != DistributionFamily::ast && !(p.tail_left == p.tail_right)) return false;
    return true;
}

void ASTParams::validate() const
{
    if (!std::isfinite(location)) throw std::domain_error("AST location must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::domain_error("AST scale must be positive");
    if (!(shape > 0.0 && shape < 1.0)) throw std::domain_error("AST shape must lie in (0,1)");
    if (!is_finite_positive(tail_left) || !is_finite_positive(tail_right)) {
        throw std::domain_error("AST tail parameters must be positive");
    }
}

double k_const(Tail nu)
{
    if (nu.is_infinite()) return kInvSqrt2Pi;
    const double v = nu.value();
    if (!(v > 0.0) || std::isnan(v)) throw std::domain_error("K(nu) requires nu > 0");
    // Tails are constant along a filter pass, so a one-entry cache removes
    // nearly all log-gamma calls.
    thread_local double cached_nu = -1.0;
    thread_local double cached_k = 0.0;
    if (v == cached_nu) return cached_k;
    cached_nu = v;
    return cached_k = std::exp(std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                    0.5 * std::log(v * std::numbers::pi));
}

namespace special {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_quantile(double u)
{
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal quantile requires u in (0,1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double student_cdf(double x, Tail nu)
{
    if (nu.is_infinite()) return normal_cdf(x);
    if (std::isinf(x)) return x < 0 ? 0.0 : 1.0;
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu.value()), x);
}

double student_quantile(double u, Tail nu)
{
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("t quantile requires u in (0,1)");
    if (nu.is_infinite()) return normal_quantile(u);
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu.value()), u);
}

double student_logpdf(double x, Tail nu)
{
    if (nu.is_infinite()) return std::log(kInvSqrt2Pi) - 0.5 * x * x;
    const double v = nu.value();
    return std::log(k_const(nu)) - 0.5 * (v + 1.0) * std::log1p(x * x / v);
}

}  // namespace special

double ast_logpdf(double y, const ASTParams& p)
{
    const double x = y - p.location;
    const Branch b = branch_for(x, p);
    const double z = x / b.c;
    if (b.nu.is_infinite()) return -std::log(p.scale) - 0.5 * z * z;
    const double v = b.nu.value();
    return -std::log(p.scale) - 0.5 * (v + 1.0) * std::log1p(z * z / v);
}

double ast_pdf(double y, const ASTParams& p) { return std::exp(ast_logpdf(y, p)); }

double ast_cdf(double y, const ASTParams& p)
{
    if (std::isnan(y)) throw std::domain_error("AST cdf of NaN");
    const double x = y - p.location;
    const Branch b = branch_for(x, p);
    if (b.left) return 2.0 * p.shape * special::student_cdf(x / b.c, b.nu);
    return p.shape + 2.0 * (1.0 - p.shape) * (special::student_cdf(x / b.c, b.nu) - 0.5);
}

double ast_quantile(double u, const ASTParams& p)
{
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("AST quantile requires u in (0,1)");
    const double a = p.shape;
    if (u <= a) {
        const double c = 2.0 * a * p.scale * k_const(p.tail_left);
        return p.location + c * special::student_quantile(u / (2.0 * a), p.tail_left);
    }
    const double c = 2.0 * (1.0 - a) * p.scale * k_const(p.tail_right);
    // (u - a) / (2(1-a)) + 1/2 lies in (1/2, 1).
    return p.location + c * special::student_quantile((u - a) / (2.0 * (1.0 - a)) + 0.5, p.tail_right);
}

std::vector<double> ast_sample(const ASTParams& p, std::size_t n, std::uint64_t seed)
{
    p.validate();
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = ast_quantile(rng.uniform(), p);
    return out;
}

ASTScore ast_score(double y, const ASTParams& p)
{
    const double x = y - p.location;
    const Branch b = branch_for(x, p);
    const double z = x / b.c;
    ASTScore s;
    // dlog f / dc = (nu+1) w / ((1+w) c) on each branch, where w = z^2/nu;
    // c is linear in sigma and in alpha (or 1-alpha).
    double g;  // (nu+1) w / (1+w), or z^2 at infinity
    if (b.nu.is_infinite()) {
        s.d_mu = x / (b.c * b.c);
        g = z * z;
    } else {
        const double v = b.nu.value();
        const double w = z * z / v;
        s.d_mu = (v + 1.0) * x / (v * b.c * b.c * (1.0 + w));
        g = (v + 1.0) * w / (1.0 + w);
    }
    s.d_sigma = (g - 1.0) / p.scale;
    s.d_alpha = b.left ? g / p.shape : -g / (1.0 - p.shape);
    return s;
}

ASTInformation ast_fisher(const ASTParams& p)
{
    const double a = p.shape;
    const double k1 = k_const(p.tail_left);
    const double k2 = k_const(p.tail_right);
    const double r1 = info_ratio(p.tail_left);
    const double r2 = info_ratio(p.tail_right);
    const double s2 = p.scale * p.scale;
    ASTInformation info;
    info.i_mu = (r1 / (a * k1 * k1) + r2 / ((1.0 - a) * k2 * k2)) / s2;
    info.i_sigma = 2.0 / s2 * (a * scale_ratio(p.tail_left) + (1.0 - a) * scale_ratio(p.tail_right));
    info.i_alpha = 3.0 * (r1 / a + r2 / (1.0 - a));
    return info;
}

double ast_mean(const ASTParams& p)
{
    p.validate();
    const auto tail_ok = [](Tail t) { return t.is_infinite() || t.value() > 1.0; };
    if (!tail_ok(p.tail_left) || !tail_ok(p.tail_right)) {
        throw std::domain_error("AST mean requires tails above 1");
    }
    // Each half is a scaled half-t with E|T| = 2 K(nu) nu / (nu - 1).
    const auto half = [](Tail nu) {
        const double k = k_const(nu);
        return nu.is_infinite() ? k * k : k * k * nu.value() / (nu.value() - 1.0);
    };
    const double a = p.shape;
    return p.location + 4.0 * p.scale * ((1.0 - a) * (1.0 - a) * half(p.tail_right) - a * a * half(p.tail_left));
}

}  // namespace skewnow
