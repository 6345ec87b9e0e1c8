#pragma once

#include <string>

#include "model.hpp"

namespace dualdiv {

// Flat key/value model description, a subset of TOML:
//
//   drift_d = 2.0
//   sigma   = 1.0
//   lambda  = 3.0
//   q       = 0.05
//   alpha   = [0.0, 1.0]
//   T       = [[-1.0, 0.5],
//              [ 0.0, -2.0]]
//
// `#` starts a comment; arrays may span lines. Unknown, duplicate or missing
// keys raise Error(Parse).
ModelParams parse_model_text(const std::string& text);

// Error(Io) if the file cannot be read.
ModelParams load_model_file(const std::string& path);

}  // namespace dualdiv
