#pragma once

#include <stdexcept>
#include <string>

namespace spatnn {

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments or malformed inputs (file parse errors, out-of-range k, ...).
class invalid_input : public error {
public:
    explicit invalid_input(const std::string& what) : error(what) {}
};

// A contingency table on which the requested test is undefined
// (zero row/column, zero variance, empty class under a buffer mask).
class degenerate_table : public error {
public:
    explicit degenerate_table(const std::string& what) : error(what) {}
};

// Analytic moments requested where they do not exist (n < 4, q > 2).
class moments_unavailable : public error {
public:
    explicit moments_unavailable(const std::string& what) : error(what) {}
};

} // namespace spatnn
