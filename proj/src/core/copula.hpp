#pragma once

#include "rng.hpp"

#include <string>
#include <utility>

namespace skewnow {

enum class CopulaFamily { independence, gaussian, student_t };

std::string to_string(CopulaFamily f);
CopulaFamily copula_family_from_string(const std::string& s);

/// Bivariate copula. `dependence` is the off-diagonal of the correlation
/// (dispersion) matrix; `dof` only matters for the Student-t family.
struct CopulaSpec {
    CopulaFamily family = CopulaFamily::independence;
    double dependence = 0.0;
    double dof = 8.0;

    void validate() const;
};

/// PIT inputs are clamped to [kPitClamp, 1 - kPitClamp] before quantile mapping.
inline constexpr double kPitClamp = 1e-12;
double clamp_pit(double u);

/// log c(u1, u2). Throws std::domain_error unless both inputs lie strictly
/// inside (0,1); callers clamp with clamp_pit first.
double copula_logdensity(double u1, double u2, const CopulaSpec& spec);

/// One draw (u1, u2) from the copula.
std::pair<double, double> copula_sample(const CopulaSpec& spec, Rng& rng);

}  // namespace skewnow
