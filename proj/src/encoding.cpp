#include "eftqdi/encoding.hpp"

#include <algorithm>
#include <utility>

#include "eftqdi/errors.hpp"

namespace eftqdi {

LinearEncoder LinearEncoder::cyclic_basis(int dimension) {
    if (dimension < 1) throw NonPositiveInput("LinearEncoder: dimension must be >= 1");
    std::vector<Vec> vectors;
    vectors.reserve(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i) {
        Vec e(static_cast<std::size_t>(dimension), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        vectors.push_back(std::move(e));
    }
    return explicit_schedule(std::move(vectors));
}

LinearEncoder LinearEncoder::explicit_schedule(std::vector<Vec> vectors) {
    if (vectors.empty()) throw EmptyInput("LinearEncoder: schedule is empty");
    const std::size_t n = vectors.front().size();
    if (n == 0) throw NonPositiveInput("LinearEncoder: vectors must be nonempty");
    for (const auto& v : vectors)
        if (v.size() != n)
            throw DimensionMismatch("LinearEncoder: schedule vectors must share dimension");
    LinearEncoder enc;
    enc.dimension_ = static_cast<int>(n);
    enc.vectors_ = std::move(vectors);
    for (const auto& v : enc.vectors_) enc.psi_bar_ = std::max(enc.psi_bar_, norm(v));
    return enc;
}

const Vec& LinearEncoder::psi_at(std::int64_t k) const {
    if (k < 1) throw NonPositiveInput("LinearEncoder::psi_at: k must be >= 1");
    const auto idx = static_cast<std::size_t>((k - 1) % static_cast<std::int64_t>(vectors_.size()));
    return vectors_[idx];
}

double LinearEncoder::encode(std::int64_t k, std::span<const double> theta) const {
    return dot(psi_at(k), theta);
}

double verify_pe(const LinearEncoder& encoder, int window, std::int64_t horizon) {
    if (window < 1) throw NonPositiveInput("verify_pe: window must be >= 1");
    if (horizon < window) throw DimensionMismatch("verify_pe: horizon < window");
    const auto n = static_cast<std::size_t>(encoder.dimension());
    const std::int64_t starts =
        std::min<std::int64_t>(horizon - window + 1, encoder.period());

    double min_eig = 0.0;
    for (std::int64_t k = 1; k <= starts; ++k) {
        Matrix gram(n, n);
        for (int l = 0; l < window; ++l) {
            const Vec& psi = encoder.psi_at(k + l);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c)
                    gram(r, c) += psi[r] * psi[c] / static_cast<double>(window);
        }
        const auto eig = symmetric_eigenvalues(gram);
        const double lambda_min = eig.front();
        min_eig = (k == 1) ? lambda_min : std::min(min_eig, lambda_min);
    }
    return std::max(0.0, min_eig);
}

}  // namespace eftqdi
