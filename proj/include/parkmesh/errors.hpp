#pragma once

#include <stdexcept>
#include <string>

namespace parkmesh {

// Malformed input document (graph file, plan file, LP text).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An instance that is provably infeasible before any search is run.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parkmesh
