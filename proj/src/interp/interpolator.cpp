#include "stabkit/interp/interpolator.hpp"

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/interp/global_shift.hpp"

namespace stabkit::interp {

Image builtin_interp(const Image& prev, const Image& next) {
  if (!prev.same_shape(next)) throw ShapeError("interpolation needs equal shapes");
  const Shift s = estimate_global_shift(prev, next);
  if (s.dx == 0 && s.dy == 0) return average(prev, next);
  return average(translate(prev, 0.5 * s.dx, 0.5 * s.dy),
                 translate(next, -0.5 * s.dx, -0.5 * s.dy));
}

}  // namespace stabkit::interp
