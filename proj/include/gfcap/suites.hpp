#pragma once

#include <string>
#include <vector>

#include "gfcap/capacity.hpp"

namespace gfcap {

struct SuiteReport {
    std::string name;
    bool pass = true;
    std::vector<std::string> lines;  // one finding per line, failures prefixed "FAIL"
};

const std::vector<std::string>& suite_names();

// Runs one property suite on the built-in corpus.  Unknown names throw a config error.
SuiteReport run_suite(const std::string& name);

// Built-in corpus shared by the suites, the CLI and the acceptance run.
std::shared_ptr<const GeneratingFamily> example_family(int sign = -1, int dim = 2);
std::vector<double> height_range(double from, double to, double step);

} // namespace gfcap
