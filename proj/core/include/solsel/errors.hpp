#pragma once

#include <stdexcept>
#include <string>

namespace solsel {

// Base of every failure raised by the library.  `kind()` is the short name
// that ends up in reports; `numerical()` separates "the input is not
// admissible" (validation) from "the algorithm failed on admissible input".
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what, bool numerical)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), numerical_(numerical) {}

    const std::string& kind() const noexcept { return kind_; }
    bool numerical() const noexcept { return numerical_; }

private:
    std::string kind_;
    bool numerical_;
};

#define SOLSEL_ERROR(Name, numerical)                                   \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& what) : Error(#Name, what, numerical) {} \
    }

SOLSEL_ERROR(InvalidArgument, false);
SOLSEL_ERROR(FrequencyResonant, false);
SOLSEL_ERROR(NotStabilized, false);
SOLSEL_ERROR(GridTooCoarse, false);
SOLSEL_ERROR(DegenerateSpectrum, false);
SOLSEL_ERROR(NoBoundStates, false);
SOLSEL_ERROR(NearSpectrum, false);
SOLSEL_ERROR(NotInContinuum, false);
SOLSEL_ERROR(AmplitudeTooLarge, false);
SOLSEL_ERROR(NoConvergence, true);
SOLSEL_ERROR(ExtrapolationUnstable, true);
SOLSEL_ERROR(MissingDependency, true);
SOLSEL_ERROR(NonFinite, true);
SOLSEL_ERROR(NewtonDiverged, true);
SOLSEL_ERROR(StepUnstable, true);

#undef SOLSEL_ERROR

} // namespace solsel
