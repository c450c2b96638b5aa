#ifndef SECAGG_TESTS_COMMON_HPP
#define SECAGG_TESTS_COMMON_HPP

// Shared fixtures: a small parameter set valid in every mode, with committee
// and neighborhood sizes chosen so each threshold is a real constraint
// (t < ell, c_tilde < k - 1, 2t - ell = 2).

#include "secagg/simharness.hpp"

namespace testbed {

inline secagg::ProtocolParams desk_params(secagg::Mode mode) {
  secagg::ProtocolParams p;
  p.n = 20;
  p.m = 3;
  p.modulus = 1000003;
  p.gamma = 0.1;
  p.delta = 0.1;
  p.alpha = 0.5;
  p.eta = 20;
  p.lambda = 40;
  p.k = 5;
  p.ell = 6;
  p.t = 4;
  p.c_tilde = 2;
  p.gamma_tilde = 0.45;
  p.beta = 0.66;
  p.mode = mode;
  p.validate();
  return p;
}

inline secagg::Scenario desk_scenario(secagg::Mode mode,
                                      const std::string& seed_label) {
  secagg::Scenario s;
  s.params = desk_params(mode);
  s.master_seed = secagg::sha256(secagg::to_bytes(seed_label));
  s.beacon_round = 1;
  return s;
}

}  // namespace testbed

#endif  // SECAGG_TESTS_COMMON_HPP
