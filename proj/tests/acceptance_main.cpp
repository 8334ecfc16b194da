// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "kds/acceptance.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    kds::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
    bool all = true;
    kds::run_acceptance(opt, [&](const kds::CriterionResult& r) {
        std::printf("%s\n", kds::format_result(r).c_str());
        std::fflush(stdout);
        all = all && r.pass;
    });
    std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILED");
    return all ? 0 : 1;
}
