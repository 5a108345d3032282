#pragma once

#include <stdexcept>
#include <string>

namespace humanfov {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NonPositiveDepth : Error {
  explicit NonPositiveDepth(double depth_mm)
      : Error("depth must be positive, got " + std::to_string(depth_mm) + " mm") {}
};

struct OutOfBounds : Error {
  OutOfBounds(double u, double v)
      : Error("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
              ") is outside the image") {}
};

struct BehindCamera : Error {
  explicit BehindCamera(double z)
      : Error("point with z = " + std::to_string(z) + " m is behind the camera") {}
};

}  // namespace humanfov
