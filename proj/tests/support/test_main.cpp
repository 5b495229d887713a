#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "nestasp/solver.hpp"

// Every answer set computed by any test is re-checked against the stable-model definition.
int main(int argc, char** argv) {
  nestasp::default_solver_options().self_check = true;
  doctest::Context context(argc, argv);
  return context.run();
}
