// Greedy fit of arctan(500 x) on 1001 equispaced points.  The fit meets the
// tolerance on the samples while the true error between them stays large,
// because the samples cannot resolve the steep front near 0.
//
// Writes the error curve to arctan_error.csv (x, |r - f|).

#include <fstream>
#include <iostream>

#include "tcf/tcf.hpp"

int main() {
  using namespace tcf;
  auto f = [](cplx z) { return std::atan(500.0 * z); };
  std::vector<cplx> x, y;
  for (int k = 0; k <= 1000; ++k) {
    x.emplace_back(-1.0 + 2.0 * k / 1000.0);
    y.push_back(f(x.back()));
  }
  const auto fit = fit_discrete(x, y);
  const auto& r = fit.interpolant;
  std::cout << "type (" << r.type().num_degree << ", " << r.type().den_degree
            << "), sample residual " << fit.history.records.back().error_estimate << "\n";

  const auto pts = validation_set(unit_interval());
  std::ofstream out("arctan_error.csv");
  out << "x,error\n";
  double worst = 0;
  for (auto z : pts) {
    const double e = std::abs(eval(r, z) - f(z));
    worst = std::max(worst, e);
    out << z.real() << ',' << e << '\n';
  }
  std::cout << "max error on the validation set " << worst << "\n";
}
