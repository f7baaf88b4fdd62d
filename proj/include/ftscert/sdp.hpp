#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftscert/sosprog.hpp"

namespace ftscert {

// Feasibility (and optionally max-objective) solver for the block-diagonal
// problems produced by assemble_sdp. Homogeneous self-dual embedding with
// HKM search directions and a Mehrotra predictor-corrector step.

enum class SdpStatus { Feasible, Infeasible, Indeterminate };

struct SdpOptions {
    double feas_tol = 1e-8;     // relative equality residual for extraction
    int max_iters = 200;
    bool maximize_objective = false;  // maximize <obj, X> + obj_free . u
    double obj_gap_tol = 1e-9;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::Indeterminate;
    std::vector<double> free_vals;           // scalar variables
    std::vector<std::vector<double>> grams;  // per block, row-major dim x dim
    double objective = 0.0;
    int iterations = 0;
    double residual = 0.0;   // relative equality residual at extraction
    std::string detail;      // human-readable note on how the run ended
};

SdpSolution solve_sdp(const SdpProblem& sdp, const SdpOptions& opts = {});

// Bisection on mu over [lo, hi]. Probes lo first: if even mu = lo is
// infeasible the system is not certifiable at these degrees and `certified`
// comes back false. Keeps the solution of the last feasible probe.
struct MuSearchResult {
    bool certified = false;
    double mu = 0.0;
    SdpSolution solution;          // for the returned mu
    int probes = 0;
    std::vector<std::string> log;  // one line per probe
};

MuSearchResult bisect_mu(const SosProgram& prog, double lo, double hi,
                         const SdpOptions& opts = {}, double tol_scale = 1e-2);

}  // namespace ftscert
