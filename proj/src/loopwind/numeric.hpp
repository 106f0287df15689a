#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace loopwind {

using complex = std::complex<double>;

/// Uniform return of all quadrature/series evaluation.
struct NumericResult {
    double value = 0.0;
    double abs_error = 0.0;
    long evaluations = 0;
};

struct ComplexResult {
    complex value{0.0, 0.0};
    double abs_error = 0.0;
    long evaluations = 0;
};

struct Tolerance {
    double rel = 1e-10;
    double abs = 1e-14;
    long max_evals = 2'000'000;
};

/// Thrown when an input is outside an operation's domain.
class domain_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Thrown when a quadrature/series fails to converge. Carries the best
/// estimate obtained so far.
class numeric_error : public std::runtime_error {
  public:
    numeric_error(const std::string& what, NumericResult best)
        : std::runtime_error(what), best_estimate(best) {}
    NumericResult best_estimate;
};

}  // namespace loopwind
