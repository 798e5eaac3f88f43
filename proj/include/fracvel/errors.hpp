#pragma once

#include <stdexcept>
#include <string>

namespace fracvel {

/// Argument outside the mathematical domain of an operation (poles, a >= x, eps <= 0, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A caller-supplied map returned a non-finite value.
class evaluation_error : public std::runtime_error {
public:
  evaluation_error(const std::string& what, double at)
      : std::runtime_error(what + " (at " + std::to_string(at) + ")"), at_(at) {}
  double at() const noexcept { return at_; }

private:
  double at_;
};

/// Required input missing, e.g. a Taylor order without the matching derivatives.
class contract_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A theorem hypothesis does not hold for the supplied data.
class hypothesis_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Statistical/regression estimate could not be formed.
class estimation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracvel
