#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftscert/certify.hpp"
#include "ftscert/problem.hpp"

namespace ftscert {

struct SimOptions {
    double rtol = 1e-6;
    double atol = 1e-9;
    double threshold = 1e-6;  // settled when the 2-norm drops to this
    double horizon = 100.0;
    double blowup = 1e12;
    long max_steps = 2000000;
};

struct TrajectoryPoint {
    double t;
    std::vector<double> z;
};

struct SimResult {
    std::string terminated_by;  // "settled", "horizon" or "blowup"
    bool settled = false;
    double t_settle = 0.0;  // crossing time, refined on the dense output
    double t_end = 0.0;
    long steps = 0;
    std::vector<TrajectoryPoint> samples;  // initial point plus accepted steps
};

// Integrates z' = f(z) with an embedded 3(2) pair adapted for the
// non-Lipschitz fields these systems have near the origin. Settling is
// detected on the step norm and refined to 1e-9 relative time by bisection
// on a cubic Hermite interpolant.
SimResult simulate(const std::vector<SignedPowerExpr>& f, const std::vector<double>& z0,
                   const SimOptions& opts = {});

// Settle time alone; unset when the trajectory never reached the threshold.
std::optional<double> estimate_settling(const std::vector<SignedPowerExpr>& f,
                                        const std::vector<double>& z0,
                                        double threshold = 1e-6);

struct BoundValidation {
    double vt0 = 0.0;        // V tilde at the initial point
    double bound = 0.0;      // certified settling bound
    bool in_region = false;  // sublevel proof covers V tilde(z0)
    std::optional<double> simulated;
    bool sound = true;  // simulated <= bound whenever both are defined
    std::string terminated_by;
};

// Compares the certificate's settling bound against direct simulation from
// z0, and reports whether z0 sits inside a validated sublevel set.
BoundValidation validate_bound(const Certificate& cert, const std::vector<double>& z0,
                               const SimOptions& opts = {});

// One row per recorded point: t, states, 2-norm, and V tilde when a
// certificate is supplied (0.0 otherwise).
void write_trajectory_csv(const SimResult& res, const std::vector<std::string>& states,
                          const Certificate* cert, const std::string& path);

}  // namespace ftscert
