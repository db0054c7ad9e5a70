#pragma once

#include <stdexcept>

namespace leakaudit {

// Error taxonomy; the CLI maps these onto exit codes
// (config 2, data 3, backend 4, anything else 5).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct backend_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace leakaudit
