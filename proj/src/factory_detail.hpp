#pragma once

#include <vector>

#include "bileg/factory.hpp"

namespace bileg::detail {

/// Cubic Hermite interpolant of samples q with derivatives dq on nodes t0 + k·h (not renormalized).
Quat hermite(const std::vector<Quat>& q, const std::vector<Quat>& dq, double t0, double h, double t);
/// Fourth-order stencil derivative of uniformly spaced samples.
std::vector<Quat> stencil_derivative(const std::vector<Quat>& q, double h);
/// Cubic Lagrange interpolation of uniformly spaced samples.
Quat sample_cubic(const std::vector<Quat>& v, double t0, double h, double t);

void require_fd_grid(const GridSpec& s);
std::vector<Quat> grid_partial(const GridSpec& s, const std::vector<Quat>& f, int dir);
std::vector<double> grid_partial(const GridSpec& s, const std::vector<double>& f, int dir);

}  // namespace bileg::detail
