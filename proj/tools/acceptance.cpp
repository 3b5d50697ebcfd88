// Runs every acceptance criterion and prints one PASS/FAIL line per criterion, followed by
// the individual checks it is made of. Exit status 1 if any criterion fails.
//
// usage: acceptance <path-to-hsflow-cli>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include "hsflow/verify.hpp"

using hsflow::CheckResult;
namespace checks = hsflow::checks;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

// Two identical sweep runs must produce identical bytes.
CheckResult deterministic_sweep(const std::string& cli) {
    if (cli.empty()) return {"sweep_determinism", false, "no CLI path given"};
    const fs::path dir = fs::temp_directory_path() / ("hsflow_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path cfg = dir / "config.json", a = dir / "a.csv", b = dir / "b.csv";
    std::ofstream(cfg) << R"({"a": 0.25, "shape": "single", "n": 3, "quad": {"rel_tol": 1e-9}})" << '\n';
    auto run = [&](const fs::path& out) {
        const std::string cmd = quoted(cli) + " sweep --config " + quoted(cfg.string()) +
                                " --point 5,0 --time 0.75 --quantity dv_1_3 --xn-min 1e-3 --xn-max 1e-1"
                                " --grid-n 6 --out " + quoted(out.string());
        return std::system(cmd.c_str());
    };
    const int ra = run(a), rb = run(b);
    const std::string sa = slurp(a), sb = slurp(b);
    fs::remove_all(dir);
    char buf[160];
    std::snprintf(buf, sizeof buf, "exit codes %d/%d, %zu/%zu bytes", ra, rb, sa.size(), sb.size());
    return {"sweep_determinism", ra == 0 && rb == 0 && !sa.empty() && sa == sb, buf};
}

struct Criterion {
    int id;
    const char* title;
    std::function<std::vector<CheckResult>()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<Criterion> criteria = {
        {1, "kernel identities",
         [] { return std::vector{checks::B_identities(), checks::ci_derivative_identities(), checks::golovkin_consistency()}; }},
        {2, "normal-derivative limit of A", [] { return std::vector{checks::c1_limit()}; }},
        {3, "K sandwich", [] { return std::vector{checks::K_sandwich()}; }},
        {4, "divergence free", [] { return std::vector{checks::divergence_free()}; }},
        {5, "boundary trace", [] { return std::vector{checks::boundary_trace()}; }},
        {6, "blow-up rates", [] { return std::vector{checks::blowup_rate_power(), checks::blowup_rate_log()}; }},
        {7, "oddness", [] { return std::vector{checks::flow_oddness(), checks::golovkin_oddness()}; }},
        {8, "dipole sign regions", [] { return checks::dipole_signs(); }},
        {9, "envelope suites", [] { return checks::envelope_suites(200); }},
        {10, "M constants", [] { return std::vector{checks::M_constants()}; }},
        {11, "inverse-distance difference inequalities", [] { return std::vector{checks::mixed_difference_signs(), checks::rectangle_difference_bound()}; }},
        {12, "integral bounds", [] { return std::vector{checks::integral_bounds()}; }},
        {13, "Picard contraction and divergence", [] { return checks::picard(false); }},
        {14, "energy truncation", [] { return std::vector{checks::energy_truncation()}; }},
        {15, "deterministic sweep", [&] { return std::vector{deterministic_sweep(cli)}; }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckResult> results;
        try {
            results = c.run();
        } catch (const std::exception& e) {
            results.push_back({"exception", false, e.what()});
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = !results.empty();
        for (const auto& r : results) ok = ok && r.passed;
        if (!ok) ++failed;
        std::printf("criterion %2d %s: %s (%.1f s)\n", c.id, c.title, ok ? "PASS" : "FAIL", secs);
        for (const auto& r : results)
            std::printf("    %s %s %s\n", r.passed ? "pass" : "FAIL", r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
