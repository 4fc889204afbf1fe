#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cvoodg/state_bounds.hpp"

namespace cvoodg::cli {

enum ExitCode : int { ok = 0, violation = 1, invalid_config = 2, trivial = 3 };

// fock:m, classical:x, energy-only:x, spat:q, squeezed:lambda, known-fock:path.
// Throws std::invalid_argument.
InputStateSpec parse_state(const std::string& text);
// Mean photon number of a state spec (the squeezed and SPAT closed forms).
double state_nbar(const InputStateSpec& s);

// Comma-separated doubles; throws std::invalid_argument on malformed input.
std::vector<double> parse_list(const std::string& text);

// Entry point behind cv-oodg. Output files go where --output says, else `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvoodg::cli
