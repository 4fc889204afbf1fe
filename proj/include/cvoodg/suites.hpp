#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvoodg/oracle.hpp"

namespace cvoodg::oracle {

struct SuiteOptions {
    PairClass pair_class = PairClass::phase_rotation;
    InDistributionGuarantee guarantee{0.1, 1.0};
    std::uint64_t seed = 0;
    int random_pairs = 8;
    // replaces the matching curves in the dominance suite
    std::optional<BoundCurve> curve_override;
    int threads = 1;
};

// dominance, gamma-closed-form, mu-nu, delta-s, concavity, state-soundness, all
const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown suite name.
VerificationReport run_suite(const std::string& suite, const SuiteOptions& opts);

std::vector<Assertion> dominance_assertions(const SuiteOptions& opts);
std::vector<Assertion> gamma_assertions(const std::vector<double>& s_values = {0.05, 0.1, 0.3}, int max_index = 6);
std::vector<Assertion> mu_nu_assertions(const std::vector<double>& s_values = {0.05, 0.1, 0.3}, int max_index = 6);
std::vector<Assertion> delta_s_assertions(const std::vector<double>& s_values = {0.005, 0.01, 0.02, 0.05},
                                          int max_m = 5, int dim = 64);
std::vector<Assertion> concavity_assertions(const SuiteOptions& opts);
std::vector<Assertion> state_soundness_assertions(const SuiteOptions& opts);

}  // namespace cvoodg::oracle
