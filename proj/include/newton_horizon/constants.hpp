#pragma once

namespace newton_horizon {

/// Constants entering the gravitational model. Defaults are SI (CODATA);
/// tests and constructed scenarios often set G = c = 1 instead.
struct PhysicalConstants {
    double G = 6.67430e-11;   // m^3 kg^-1 s^-2
    double c = 299792458.0;   // m s^-1

    bool valid() const { return G > 0.0 && c > 0.0; }
};

}  // namespace newton_horizon
