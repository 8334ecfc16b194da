#pragma once

#include <stdexcept>
#include <string>

namespace kds {

// Domain errors carry a stable name so the CLI can report them and tests can
// match on them without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define KDS_DEFINE_ERROR(Type)                                                 \
    class Type : public Error {                                                \
    public:                                                                    \
        explicit Type(const std::string& what) : Error(#Type, what) {}         \
    }

// metric
KDS_DEFINE_ERROR(InvalidParams);
KDS_DEFINE_ERROR(NoHorizonRegion);
KDS_DEFINE_ERROR(DegenerateHorizon);
KDS_DEFINE_ERROR(SlackViolated);

// coords
KDS_DEFINE_ERROR(SeriesDivergence);
KDS_DEFINE_ERROR(OutsideDomain);

// angular
KDS_DEFINE_ERROR(BasisTooSmall);
KDS_DEFINE_ERROR(BranchCollision);

// radial
KDS_DEFINE_ERROR(TailNotConverged);
KDS_DEFINE_ERROR(ToleranceNotMet);
KDS_DEFINE_ERROR(NearResonance);

// resonances
KDS_DEFINE_ERROR(NoConvergence);
KDS_DEFINE_ERROR(EscapedBox);
KDS_DEFINE_ERROR(BoundaryTooClose);
KDS_DEFINE_ERROR(AmbiguousCase);

// greens
KDS_DEFINE_ERROR(DegenerateBranch);
KDS_DEFINE_ERROR(ExtrapolationUnstable);
KDS_DEFINE_ERROR(ContourThroughSpectrum);

// tdwave
KDS_DEFINE_ERROR(CFLViolation);
KDS_DEFINE_ERROR(NonzeroSpinUnsupported);
KDS_DEFINE_ERROR(PoorFit);

// cli / config
KDS_DEFINE_ERROR(ConfigError);

#undef KDS_DEFINE_ERROR

}  // namespace kds
