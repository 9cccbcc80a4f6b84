#ifndef DRTS_COMMON_HPP
#define DRTS_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace drts {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AnchorMissing : Error {
    AnchorMissing() : Error("asym-inf distance from the empty scenario requires an anchor element") {}
};
struct InfeasibleMarginals : Error {
    using Error::Error;
};
struct NumericalFailure : Error {
    using Error::Error;
};
struct TooLarge : Error {
    using Error::Error;
};
struct NotMonotone : Error {
    NotMonotone() : Error("operation requires a problem with monotone second-stage costs") {}
};
struct OracleContractViolation : Error {
    using Error::Error;
};
struct RoundingGuaranteeViolated : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

/// SplitMix64: the single seed-splitting function used everywhere.
/// All derived RNG streams are hash(seed, index) so replicates, samplers and
/// experiment rows never share state.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Vec make_vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace drts

#endif
