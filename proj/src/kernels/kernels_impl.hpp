#pragma once

#include "wibp/kernels/kernels.hpp"

namespace wibp::kernels::detail {

const KernelTable& avx2_table();

}  // namespace wibp::kernels::detail
