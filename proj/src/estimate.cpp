#include "wibp/estimate.hpp"

namespace wibp {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::monte_carlo:
      return "monte_carlo";
    case Method::gauss_hermite:
      return "gauss_hermite";
    case Method::polar_gauss:
      return "polar_gauss";
    case Method::closed_form:
      return "closed_form";
  }
  return "unknown";
}

SampleStats merge_all(const std::vector<SampleStats>& parts) {
  SampleStats total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace wibp
