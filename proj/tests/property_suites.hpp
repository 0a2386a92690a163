#pragma once

#include <string>
#include <vector>

// Property suites implementing the module-level invariants. Each suite runs
// its random cases and reports the worst observation; both the unit tests
// and the acceptance runner consume them.

namespace tfm::props {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::size_t cases = 0;
  std::string detail;
};

std::vector<PropertyResult> tensor_core_suite();
std::vector<PropertyResult> spectral_suite();
std::vector<PropertyResult> estimator_suite();
std::vector<PropertyResult> dgp_suite();
std::vector<PropertyResult> diagnostics_suite();
std::vector<PropertyResult> ratefit_suite();
std::vector<PropertyResult> postprocess_suite();
std::vector<PropertyResult> io_runner_suite();

std::vector<PropertyResult> all_property_suites();

}  // namespace tfm::props
