#pragma once

#include "kvg/geometry.hpp"

#include <string>
#include <vector>

namespace kvg {

/// Jacobiator of a skew matrix pi over coordinates z:
/// J(i,j,k) = sum_l (pi_li d_l pi_jk + pi_lj d_l pi_ki + pi_lk d_l pi_ij). OpenMP kernel.
TrilinearForm jacobiator(const std::vector<std::string>& coords, const ExprMatrix& pi);
/// Straight-loop reference implementation of jacobiator.
TrilinearForm jacobiator_serial(const std::vector<std::string>& coords, const ExprMatrix& pi);

/// Number of OpenMP threads the kernels will use.
int kernel_threads();

}  // namespace kvg
