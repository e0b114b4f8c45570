// Acceptance runner. With no arguments every criterion 1..10 is evaluated;
// otherwise only the numbers given. One line per criterion, exit status 1 if
// any of them fails.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <string>

#include "stfdtd/validation.hpp"

#ifndef STFDTD_SCENARIO_DIR
#define STFDTD_SCENARIO_DIR "scenarios"
#endif

namespace v = stfdtd::validation;

namespace {

const char* title(int c)
{
    switch (c) {
    case 1: return "conventional scheme converges to the static coefficients";
    case 2: return "local scheme reproduces the moving-interface coefficients";
    case 3: return "oblique incidence angles and spectral peaks";
    case 4: return "wedge exit frequencies and growing bandwidth";
    case 5: return "accelerated interface waveform and chirp";
    case 6: return "stability bound bracketed by energy growth";
    case 7: return "attenuation below ten cells per wavelength";
    case 8: return "matching between identical media";
    case 9: return "curved interface focal shift and spot size";
    case 10: return "reduction and oracle invariants";
    default: return "?";
    }
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > 10) {
            std::fprintf(stderr, "criterion must be 1..10, got '%s'\n", argv[i]);
            return 2;
        }
        wanted.insert(c);
    }
    if (wanted.empty())
        for (int c = 1; c <= 10; ++c) wanted.insert(c);

    std::map<std::string, v::Report> reports;
    bool all = true;
    for (int c : wanted) {
        const std::string id = v::suite_for_criterion(c);
        if (!reports.count(id)) reports[id] = v::run_suite(id, STFDTD_SCENARIO_DIR);
        const auto& rep = reports[id];
        for (auto& ch : rep.checks)
            if (ch.criterion == c)
                std::printf("    [%s] %s: measured %.6g, %s %.6g%s\n", ch.pass ? "ok" : "FAILED", ch.name.c_str(),
                            ch.measured, ch.rule == "lt" ? "bound <" : ch.rule == "gt" ? "bound >" : "expected",
                            ch.expected,
                            ch.rule == "abs" || ch.rule == "rel"
                                ? (" +/- " + std::to_string(ch.tolerance) + (ch.rule == "rel" ? " rel" : "")).c_str()
                                : "");
        const bool pass = rep.pass(c);
        all &= pass;
        std::printf("criterion %2d %s: %s\n", c, pass ? "PASS" : "FAIL", title(c));
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
