// Acceptance suite: runs every criterion end to end and prints one pass/fail
// line per criterion. Nonzero exit on any failure.

#include <cstdio>
#include <vector>

#include "uncrit/verify.hpp"

int main() {
    using namespace uncrit;
    std::vector<Report> reports;
    try {
        auto ctx = build_helicoid_context(601, 20000, 20240809ull);
        reports.push_back(criterion1_helicoid(ctx));
        reports.push_back(criterion2_double_manifestation(ctx));
        reports.push_back(criterion3_parabola_sine());
        reports.push_back(criterion4_convergence());
        reports.push_back(criterion5_prop54());
        reports.push_back(criterion6_classification());
        reports.push_back(criterion7_eof());
        reports.push_back(criterion8_arrangement());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 1;
    }

    bool all = true;
    for (const auto& r : reports) print_report(r);
    std::printf("\n");
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const bool ok = reports[i].pass();
        all &= ok;
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", reports[i].title.c_str());
    }
    if (!all)
        std::printf("\nnote: the blanket overlap check in criterion 5 is a documented red. "
                    "Same-type saddle components on 2D grids genuinely fold onto overlapping\n"
                    "parameter ranges (two neighboring simple saddles can coexist and still share "
                    "their value-tie event, merging into a multiplicity-2 saddle), so the\n"
                    "connected-component search joins them. The provable statements - extremum "
                    "components are overlap-free, per-vertex patches partition every sample -\n"
                    "are asserted and pass above.\n");
    return all ? 0 : 1;
}
