// Linear compression encoding: the scalar sent over the one-bit channel is
// psi_k' theta. Schedules are deterministic and periodic; the default cycles
// through the standard basis so the windowed Gram of the psi sequence stays
// uniformly positive definite (persistent excitation).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eftqdi/linalg.hpp"

namespace eftqdi {

class LinearEncoder {
public:
    // psi_k = e_{((k-1) mod n) + 1}.
    static LinearEncoder cyclic_basis(int dimension);

    // Explicit periodic schedule; the period is the list length.
    static LinearEncoder explicit_schedule(std::vector<Vec> vectors);

    // Deterministic; k >= 1.
    const Vec& psi_at(std::int64_t k) const;

    double encode(std::int64_t k, std::span<const double> theta) const;

    int dimension() const { return dimension_; }
    int period() const { return static_cast<int>(vectors_.size()); }

    // Max norm over one period.
    double psi_bar() const { return psi_bar_; }

private:
    LinearEncoder() = default;

    int dimension_ = 0;
    double psi_bar_ = 0.0;
    std::vector<Vec> vectors_;
};

// Persistent-excitation certificate: minimum over window starts of
// lambda_min((1/h) sum_{l=k..k+h-1} psi_l psi_l^T). For periodic schedules
// scanning one full period of window phases is exhaustive, so the scan covers
// min(horizon - h + 1, period) starts. Returns 0 when excitation fails.
double verify_pe(const LinearEncoder& encoder, int window, std::int64_t horizon);

}  // namespace eftqdi
