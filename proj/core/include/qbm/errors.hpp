// Exception types for invariant and precondition violations.
#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

class invalid_dimension_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class index_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class dimension_mismatch_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability weight lost to basis truncation exceeded the tolerated bound.
class truncation_leakage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class unsupported_variant_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class integration_diverged_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class no_convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class degenerate_norm_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class insufficient_samples_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbm
