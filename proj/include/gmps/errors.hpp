#pragma once

#include <stdexcept>
#include <string>

namespace gmps {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discarded block of a Schur complement is numerically singular.
struct SingularBlock : Error { using Error::Error; };

// The projected block in an infinite-squeezing limit has no inverse on range(Q).
struct DegenerateLimit : Error { using Error::Error; };

struct NotPositiveDefinite : Error { using Error::Error; };

// Parameters (or a constructed state) violate the physicality bounds.
struct Unphysical : Error { using Error::Error; };

struct IndexOutOfRange : Error { using Error::Error; };

// State is not of the q-block/p-block circulant form C^{-1} (+) C.
struct NotCirculantForm : Error { using Error::Error; };

// Separation-k pairs stay separable up to the search cap.
struct NoThreshold : Error { using Error::Error; };

struct WrongModeCount : Error { using Error::Error; };

struct NonPositiveEta : Error { using Error::Error; };

}  // namespace gmps
