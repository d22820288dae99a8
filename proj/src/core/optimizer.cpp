#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skewnow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counted {
    const Objective& f;
    std::size_t calls = 0;
    double operator()(const std::vector<double>& x)
    {
        ++calls;
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    }
};

std::vector<double> gradient(Counted& f, std::vector<double> x, double fx, double step)
{
    const std::size_t n = x.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double h = step * (1.0 + std::abs(xi));
        x[i] = xi + h;
        const double up = f(x);
        x[i] = xi - h;
        const double down = f(x);
        x[i] = xi;
        if (std::isfinite(up) && std::isfinite(down)) {
            g[i] = (up - down) / (2.0 * h);
        } else if (std::isfinite(up)) {
            g[i] = (up - fx) / h;
        } else if (std::isfinite(down)) {
            g[i] = (fx - down) / h;
        } else {
            g[i] = 0.0;
        }
    }
    return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

OptimizerResult bfgs_minimize(const Objective& objective, std::vector<double> x0, const OptimizerOptions& options)
{
    Counted f{objective};
    const std::size_t n = x0.size();
    OptimizerResult out;
    out.x = std::move(x0);
    out.value = f(out.x);
    if (!std::isfinite(out.value)) {
        out.message = "objective not finite at the starting point";
        out.evaluations = f.calls;
        return out;
    }
    if (n == 0) {
        out.converged = true;
        out.message = "no free parameters";
        out.evaluations = f.calls;
        return out;
    }

    // Inverse Hessian approximation, row-major.
    std::vector<double> h(n * n, 0.0);
    const auto reset = [&] {
        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
    };
    reset();

    std::vector<double> g = gradient(f, out.x, out.value, options.gradient_step);
    int small_steps = 0;
    bool fresh_metric = true;
    std::vector<double> dir(n), x_new(n), s(n), yv(n), hy(n);

    for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v -= h[i * n + j] * g[j];
            dir[i] = v;
        }
        double slope = dot(dir, g);
        if (!(slope < 0.0)) {
            reset();
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = dot(dir, g);
            fresh_metric = true;
        }
        if (!(slope < 0.0)) {
            out.converged = true;
            out.message = "zero gradient";
            break;
        }
        double longest = 0.0;
        for (double d : dir) longest = std::max(longest, std::abs(d));
        double t = longest > options.max_step ? options.max_step / longest : 1.0;

        double f_new = kInf;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = out.x[i] + t * dir[i];
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= out.value + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!fresh_metric) {
                reset();
                fresh_metric = true;
                continue;
            }
            out.converged = true;
            out.message = "line search made no progress";
            break;
        }

        const double improvement = (out.value - f_new) / std::max(1.0, std::abs(out.value));
        const std::vector<double> g_new = gradient(f, x_new, f_new, options.gradient_step);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - out.x[i];
            yv[i] = g_new[i] - g[i];
        }
        out.x = x_new;
        out.value = f_new;
        g = g_new;
        fresh_metric = false;

        const double sy = dot(s, yv);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t j = 0; j < n; ++j) v += h[i * n + j] * yv[j];
                hy[i] = v;
            }
            const double yhy = dot(yv, hy);
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    h[i * n + j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }

        small_steps = improvement < options.relative_tolerance ? small_steps + 1 : 0;
        if (small_steps >= 2) {
            out.converged = true;
            out.message = "relative improvement below tolerance";
            ++out.iterations;
            break;
        }
    }
    if (!out.converged && out.message.empty()) out.message = "iteration limit reached";
    out.evaluations = f.calls;
    return out;
}

}  // namespace skewnow
