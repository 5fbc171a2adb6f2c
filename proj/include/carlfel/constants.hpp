#ifndef CARLFEL_CONSTANTS_HPP
#define CARLFEL_CONSTANTS_HPP

#include "carlfel/common.hpp"

namespace carlfel {

/// SI constants entering the physical-to-scaled conversions.  Injected rather
/// than hard-coded so tests can pin exact round numbers; the factories below
/// carry CODATA-2018 values with the particle mass chosen per system.
struct PhysicalConstants {
    double hbar;      // J s
    double c;         // m/s
    double m;         // particle mass, kg
    double e;         // elementary charge, C
    double epsilon0;  // vacuum permittivity, F/m

    void validate() const {
        require(hbar > 0 && finite(hbar), "PhysicalConstants: hbar must be > 0");
        require(c > 0 && finite(c), "PhysicalConstants: c must be > 0");
        require(m > 0 && finite(m), "PhysicalConstants: m must be > 0");
        require(e > 0 && finite(e), "PhysicalConstants: e must be > 0");
        require(epsilon0 > 0 && finite(epsilon0), "PhysicalConstants: epsilon0 must be > 0");
    }

    /// Electron-mass set (FEL).
    static PhysicalConstants si_electron() {
        return {1.054571817e-34, 299792458.0, 9.1093837015e-31, 1.602176634e-19,
                8.8541878128e-12};
    }

    /// Rb-87-mass set (CARL on an alkali cloud).
    static PhysicalConstants si_rb87() {
        return {1.054571817e-34, 299792458.0, 1.44316060e-25, 1.602176634e-19,
                8.8541878128e-12};
    }
};

}  // namespace carlfel

#endif
