// Acceptance suite runner: executes every validation criterion at full scale
// and prints one pass/fail line per criterion. Exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "mcpmev/validate.hpp"

int main(int argc, char** argv) {
    mcpmev::validate::Options opt;
    opt.threads = 4;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opt.trial_scale = 0.02;
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto results = mcpmev::validate::run_acceptance(opt);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& r : results)
        std::printf("%s  %2d  %-26s (%s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
    std::printf("%zu criteria in %.1f s\n", results.size(), secs);
    return mcpmev::validate::all_passed(results) ? EXIT_SUCCESS : EXIT_FAILURE;
}
