#include <vector>

#include "dpprior/errors.hpp"
#include "dpprior/kn.hpp"
#include "dpprior/priors.hpp"

namespace dpprior {

std::vector<double> quasi_degenerate_probe(int n, std::span<const std::pair<double, double>> path,
                                           const StirlingTable& table) {
  std::vector<double> out;
  out.reserve(path.size());
  for (const auto& [a, b] : path) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("quasi_degenerate_probe: a, b must be > 0");
    out.push_back(kn_pmf_mixed(n, GammaPrior{a, b}, table).at(1));
  }
  return out;
}

}  // namespace dpprior
