#pragma once
// Named verification checks. Each runs a fixed, seeded workload and reports pass/fail with
// the measured quantities. Suites group them for `hsflow verify`; the acceptance runner
// calls them individually.

#include <string>
#include <vector>

namespace hsflow {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace checks {

// kernels
CheckResult B_identities(int samples = 50);
CheckResult ci_derivative_identities(int samples = 50);
CheckResult golovkin_consistency(int samples = 20);
CheckResult c1_limit();
CheckResult golovkin_oddness();

// flow
CheckResult divergence_free(int samples = 30);
CheckResult boundary_trace();
CheckResult flow_oddness();
CheckResult blowup_rate_power();
CheckResult blowup_rate_log();
CheckResult vanishing_component();
CheckResult energy_truncation();

// bounds
CheckResult K_sandwich();
CheckResult M_constants();
CheckResult mixed_difference_signs(int draws = 1000);
CheckResult rectangle_difference_bound(int draws = 1000);
CheckResult integral_bounds();
/// One result per kernel and flow envelope suite.
std::vector<CheckResult> envelope_suites(int samples = 200);

// dipole
std::vector<CheckResult> dipole_signs();

// picard: contraction at alpha_0/2 (ratios and the M bound), the first-iterate bound and the
// divergence signal at 4 alpha_0, on the canonical grid; optionally the per-axis doubling checks.
std::vector<CheckResult> picard(bool refinement);

}  // namespace checks

std::vector<std::string> verify_suite_names();
/// DomainError for an unknown suite.
std::vector<CheckResult> run_verify_suite(const std::string& suite);

}  // namespace hsflow
