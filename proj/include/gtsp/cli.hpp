#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gtsp/cost_matrix.hpp"
#include "gtsp/descent.hpp"
#include "gtsp/patching.hpp"

namespace gtsp {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInstance = 2, kExitInvariant = 3 };

struct UpperBound {
  DescentTrace trace;  // the descent whose patch won
  PatchedTour patched;
};

// descend + patch_to_cycle. Symmetric instances also patch the unconstrained
// fixpoint and keep the cheaper tour.
UpperBound compute_upperbound(const CostMatrix& M, int workers = 1);

// Parses "1,2,3" (1-based) into a tour on n vertices.
Tour parse_tour(const std::string& text, int n);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gtsp
