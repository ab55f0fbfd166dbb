#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pssf {

// Dense raster of image-like data. Storage is column-major (Eigen default);
// element (r, c) is row r = y (top to bottom), column c = x (left to right).
using Raster = Eigen::ArrayXXd;
using RasterU16 = Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic>;
using RasterI = Eigen::ArrayXXi;

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using VecXd = Eigen::VectorXd;
using MatXd = Eigen::MatrixXd;

// Error taxonomy used to pick the process exit code: config/validation
// problems exit 2, runtime failures exit 3.
enum class ErrorKind { Config, Runtime };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    static Error config(const std::string& msg) { return Error(ErrorKind::Config, msg); }
    static Error runtime(const std::string& msg) { return Error(ErrorKind::Runtime, msg); }

private:
    ErrorKind kind_;
};

}  // namespace pssf
