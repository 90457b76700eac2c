#pragma once

#include <stdexcept>
#include <string>

namespace cot {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- density construction and normalization --------------------------------
struct ZeroMass : Error {
    explicit ZeroMass(const std::string& m = "density has zero mass") : Error(m) {}
};
struct NegativeValue : Error {
    explicit NegativeValue(const std::string& m = "density value is negative") : Error(m) {}
};
struct DisconnectedSupport : Error {
    explicit DisconnectedSupport(const std::string& m = "density vanishes on an interior interval") : Error(m) {}
};
struct NotRadial : Error {
    explicit NotRadial(const std::string& m = "operation requires a radial density") : Error(m) {}
};
struct UnboundedDomainWithoutTruncation : Error {
    explicit UnboundedDomainWithoutTruncation(const std::string& m = "domain is unbounded and carries no truncation radius") : Error(m) {}
};

// -- maps -------------------------------------------------------------------
struct OriginSingularity : Error {
    explicit OriginSingularity(const std::string& m = "radial map diverges at the origin") : Error(m) {}
};
struct SingularCost : Error {
    explicit SingularCost(const std::string& m = "cost is singular on a set of positive weight") : Error(m) {}
};

// -- cost specifications ----------------------------------------------------
struct InvalidCost : Error {
    explicit InvalidCost(const std::string& m = "cost profile violates the required axioms") : Error(m) {}
};

// -- discrete solver --------------------------------------------------------
struct Infeasible : Error {
    explicit Infeasible(const std::string& m = "marginal masses differ") : Error(m) {}
};
struct NoFiniteCostPlan : Error {
    explicit NoFiniteCostPlan(const std::string& m = "every feasible plan uses a forbidden arc") : Error(m) {}
};
struct TooLarge : Error {
    explicit TooLarge(const std::string& m = "instance too large for exhaustive enumeration") : Error(m) {}
};
struct MarginalMismatch : Error {
    explicit MarginalMismatch(const std::string& m = "plan marginals do not match") : Error(m) {}
};

// -- plan surgery -----------------------------------------------------------
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& m = "densities live on different grids") : Error(m) {}
};
struct ZeroTransfer : Error {
    explicit ZeroTransfer(const std::string& m = "bridge plan has no mass to transfer") : Error(m) {}
};
struct BetaOutOfRange : Error {
    explicit BetaOutOfRange(const std::string& m = "positivization weight must lie in [0,1]") : Error(m) {}
};

// -- functionals ------------------------------------------------------------
struct UnsupportedKernel : Error {
    explicit UnsupportedKernel(const std::string& m = "kernel undefined for this dimension without regularization") : Error(m) {}
};

// -- potentials -------------------------------------------------------------
struct VanishingGradient : Error {
    explicit VanishingGradient(const std::string& m = "potential gradient vanishes at the requested point") : Error(m) {}
};
struct AllInfinite : Error {
    explicit AllInfinite(const std::string& m = "potential is identically -inf") : Error(m) {}
};
struct NonConvergent : Error {
    explicit NonConvergent(const std::string& m = "iteration failed to converge") : Error(m) {}
};

}  // namespace cot
