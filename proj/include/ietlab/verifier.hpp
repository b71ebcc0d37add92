#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ietlab/rigidity.hpp"

namespace ietlab {

struct VerificationReport {
  bool ok = true;
  std::vector<std::string> failures;
  long long pieces_checked = 0;
  long long samples_checked = 0;
};

// Re-checks a certificate using only the piece table of T: the pieces tile
// A, each piece is pushed k steps (cut at discontinuities along the way) and
// every fragment lands on the recorded displacement, |displacement| < eps, the k-range and the
// measure bound hold. `samples` random exact points of A are then iterated
// by T::apply and checked against |T^k x - x| < eps.
VerificationReport verify_certificate(const RigidityCertificate& cert, long long samples = 1000,
                                      std::uint64_t seed = 1);

}  // namespace ietlab
