// Poles and residues of a fit of 1/(z - 0.5) + 2/(z + 0.5i) on the unit circle.

#include <iostream>

#include "tcf/tcf.hpp"

int main() {
  using namespace tcf;
  const cplx i(0.0, 1.0);
  auto f = [i](cplx z) { return 1.0 / (z - 0.5) + 2.0 / (z + 0.5 * i); };
  const auto fit = fit_continuum(f, unit_circle());
  std::cout << "nodes: " << fit.interpolant.size() << "\n";

  const auto report = find_poles(fit.interpolant);
  for (const auto& p : report.poles)
    std::cout << "pole " << p.location << "  residue " << p.residue << "\n";
  for (const auto& z : find_zeros(fit.interpolant)) std::cout << "zero " << z << "\n";
}
