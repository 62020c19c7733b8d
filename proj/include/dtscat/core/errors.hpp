#pragma once

#include <stdexcept>
#include <string>

namespace dtscat {

// Error taxonomy. The CLI maps these onto process exit codes:
// usage_error -> 2, data_error -> 3, numeric_error -> 4.
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& m) : std::runtime_error(m) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& m) : std::runtime_error(m) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& m) : std::runtime_error(m) {}
};

struct dimension_error : numeric_error {
    explicit dimension_error(const std::string& m) : numeric_error(m) {}
};

}  // namespace dtscat
