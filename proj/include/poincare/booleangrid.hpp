#pragma once

#include <cstdint>
#include <vector>

#include "poincare/common.hpp"

namespace poincare {

struct Disk {
    double x = 0.0, y = 0.0, r = 0.0;
};

// (Euler characteristic, half boundary length, area) of a planar set.
struct IntrinsicVolumes {
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
};

// Intrinsic volumes of (union of disks) intersected with the window
// [0,window]^2, on a pixel grid of spacing `pixel` (a pixel is covered iff
// its center lies in some disk). v2 counts pixel areas; v1 is half the
// marching-squares midpoint-polygon perimeter; v0 comes from the exact
// vertex - edge + face count of the covered cell complex.
IntrinsicVolumes intrinsic_volumes_2d(const std::vector<Disk>& disks, double window,
                                      double pixel);

// Writes the coverage bitmap as a binary PGM image for visual debugging.
void write_boolean_pgm(const std::string& path, const std::vector<Disk>& disks, double window,
                       double pixel);

// kappa_2 V0 + kappa_1 V1 + kappa_0 V2 for a disk of radius r:
// pi + 2 pi r + pi r^2.
double wills_functional_2d(double r);

// Closed forms for the intersection of two disks at center distance d.
double lens_area(double r1, double r2, double d);
double lens_half_perimeter(double r1, double r2, double d);
// pi * chi + 2 * (half perimeter) + area of the lens.
double wills_lens(double r1, double r2, double d);

// MC check that the translative integral of the lens Wills functional is
// dominated by the product of the two disk Wills functionals.
struct TranslativeCheck {
    Estimate lhs;
    double rhs = 0.0;
    bool pass = false;
};
TranslativeCheck check_translative_inequality(double r1, double r2, long n, std::uint64_t seed);

}  // namespace poincare
