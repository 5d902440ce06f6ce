#include <cstdio>
#include <cstring>

#include "hardy_henon/acceptance.hpp"

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::strcmp(argv[1], "-v") == 0;
  int failed = 0;
  for (const auto& run : hh::acceptance_criteria()) {
    const auto r = run();
    const bool ok = r.pass();
    if (!ok) ++failed;
    std::printf("[%s] criterion %2d  %-45s %7.2fs (limit %.0fs)\n", ok ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.seconds, r.time_limit);
    if (!r.error.empty()) std::printf("      error: %s\n", r.error.c_str());
    for (const auto& m : r.metrics)
      if (verbose || !ok)
        std::printf("      %-4s %-62s %.4e %s %.3g\n", m.pass() ? "ok" : "FAIL", m.name.c_str(), m.value,
                    m.upper ? "<=" : ">=", m.limit);
    if (verbose || !ok)
      for (const auto& n : r.notes) std::printf("      note: %s\n", n.c_str());
  }
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
