#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace aequity {

/// Bad or inconsistent configuration (file keys, ranges, network dims).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (tables, views, splits).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values or other numeric breakdown during computation.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Undefined statistic (e.g. AUROC on single-class labels).
class StatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles. Small and value-semantic; all the
/// numeric kernels in this library operate on it directly.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

/// Fixed-width float formatting shared by every writer so that artifact
/// files are byte-identical across runs.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// Full-precision variant used where round-trips must be lossless.
inline std::string format_double_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace aequity
