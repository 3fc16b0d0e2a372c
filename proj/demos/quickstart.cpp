// Fit sqrt(x) on [-1, 1], evaluate it, and look at its convergence history.

#include <iostream>

#include "tcf/tcf.hpp"

int main() {
  using namespace tcf;
  FitConfig cfg;
  cfg.relative_tol = true;
  cfg.max_degree = 120;

  const auto& fn = find_test_function("sqrt_x");
  const auto fit = fit_continuum(fn.f, unit_interval(), cfg);
  const auto& r = fit.interpolant;
  std::cout << "nodes: " << r.size() << ", type (" << r.type().num_degree << ", "
            << r.type().den_degree << "), stopped by " << to_string(fit.history.termination) << "\n";

  for (double x : {-0.5, 1e-8, 0.25, 0.9}) {
    const auto [v, dv] = eval_derivative(r, x);
    std::cout << "x = " << x << "  r = " << v << "  sqrt = " << std::sqrt(cplx(x))
              << "  r' = " << dv << "\n";
  }

  // the best prefix measured on the dense validation set
  const auto pts = validation_set(unit_interval());
  std::vector<cplx> fv;
  for (auto z : pts) fv.push_back(fn(z));
  std::cout << "validation error of the best prefix: "
            << max_error(r.prefix(fit.history.best_size()), pts, fv) << "\n";
}
