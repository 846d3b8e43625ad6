#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rwlab {

struct check_result {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct verify_config {
    uint64_t seed = 7;
    int threads = 1;
};

// groups, measures, weights, spectra, estimators, boundary, dlvp
const std::vector<std::string>& verify_suite_names();

// "all" runs every suite; unknown names are config errors
std::vector<check_result> run_suite(const std::string& suite, const verify_config& cfg);

}  // namespace rwlab
