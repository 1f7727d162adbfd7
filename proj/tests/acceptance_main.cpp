// One PASS/FAIL line per acceptance criterion; exit status 1 on any failure.

#include <algorithm>
#include <iostream>

#include "acceptance.hpp"

int main() {
    using namespace idiobot::acceptance;
    Options o = default_options();
    o.progress = [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; };
    const auto results = run_all(o);
    const auto failed = std::count_if(results.begin(), results.end(),
                                      [](const CriterionResult& r) { return !r.passed && !r.skipped; });
    std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
