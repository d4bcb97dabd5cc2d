#pragma once

#include <string>

namespace llgblow {
namespace verify {

struct Report {
    std::string text;
    int failures = 0;
};

/// Deterministic invariant battery across all modules; same seed => byte-identical text.
Report run_all(unsigned seed);

} // namespace verify
} // namespace llgblow
