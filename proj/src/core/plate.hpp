/// @file plate.hpp
/// @brief Kirsch closed-form stresses around a circular hole under uniaxial tension.
///
/// Infinite plate, hole of radius a centred at the origin, far-field tension T
/// along +x. Only the quarter plate x, y >= 0 is sampled.

#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "grid.hpp"

namespace psim {

struct PlateConfig {
    double tension = 0.0;           ///< far-field load T [Pa]
    double hole_radius = 0.5;       ///< a [m]
    double plate_half_width = 2.0;  ///< W [m], extent of the sampled quarter plate

    void validate() const;
};

struct KirschStress {
    double sigma_rr = 0.0;
    double sigma_tt = 0.0;
    double sigma_rt = 0.0;
    double sigma_xx = 0.0;
};

/// Polar components and the rotated sigma_xx at (x, y). Throws out-of-domain inside the hole.
KirschStress kirsch_stress(const PlateConfig& cfg, double x, double y);

inline double sigma_xx_at(const PlateConfig& cfg, double x, double y) { return kirsch_stress(cfg, x, y).sigma_xx; }

inline constexpr std::array<std::string_view, 3> kPlateLineIds = {"x_axis", "y_axis", "diagonal"};

/// sigma_xx along the x axis (a,0)-(W,0), the y axis (0,a)-(0,W) and the 45 degree
/// diagonal, in that order. Values come from the closed form, not a grid.
std::array<SampleLine, 3> sample_plate_lines(const PlateConfig& cfg, int n_points = 100);

struct PlateRaster {
    ScalarField2D sigma_xx;
    std::vector<unsigned char> in_hole;  ///< 1 where the node lies inside the hole (value set to 0)
};

PlateRaster rasterize_plate(const PlateConfig& cfg, const GridSpec& spec);

}  // namespace psim
