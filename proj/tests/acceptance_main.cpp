// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Usage: acceptance [n_paths] [criterion ...]

#include "regime_pairs/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    rpairs::acceptance::Options opt;
    if (argc > 1) opt.n_paths = std::stoul(argv[1]);
    for (int i = 2; i < argc; ++i) opt.only.push_back(std::stoi(argv[i]));
    if (const char* seed = std::getenv("RPAIRS_SEED"); seed && *seed) opt.seed = std::stoull(seed);

    int failed = 0, total = 0;
    rpairs::acceptance::run(opt, [&](const rpairs::acceptance::Result& r) {
        ++total;
        failed += !r.passed;
        std::cout << rpairs::acceptance::format(r) << std::endl;
    });
    std::cout << total - failed << "/" << total << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
