#pragma once

namespace sqha {

/// Physical constants for one run.  The library defaults to internal units
/// hbar = mass = boltzmann = 1; runs in physical units override the fields.
/// light_speed participates only through compton_length().
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;
    double boltzmann = 1.0;
    double light_speed = 1.0;

    double compton_length() const { return hbar / (mass * light_speed); }
};

} // namespace sqha
