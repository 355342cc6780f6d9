#include "poincare/booleangrid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "poincare/rng.hpp"

namespace poincare {

namespace {

struct Bitmap {
    int n = 0;
    std::vector<std::uint8_t> cov;
    bool at(int i, int j) const {
        if (i < 0 || j < 0 || i >= n || j >= n) return false;
        return cov[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(i)] != 0;
    }
};

Bitmap render(const std::vector<Disk>& disks, double window, double pixel) {
    if (!(window > 0) || !(pixel > 0)) throw domain_error("window and pixel size must be positive");
    Bitmap bm;
    bm.n = static_cast<int>(std::lround(window / pixel));
    if (bm.n < 1) throw domain_error("pixel size exceeds the window");
    bm.cov.assign(static_cast<std::size_t>(bm.n) * static_cast<std::size_t>(bm.n), 0);
    for (const Disk& d : disks) {
        if (!(d.r > 0)) continue;
        const int i0 = std::max(0, static_cast<int>(std::floor((d.x - d.r) / pixel)));
        const int i1 = std::min(bm.n - 1, static_cast<int>(std::ceil((d.x + d.r) / pixel)));
        const int j0 = std::max(0, static_cast<int>(std::floor((d.y - d.r) / pixel)));
        const int j1 = std::min(bm.n - 1, static_cast<int>(std::ceil((d.y + d.r) / pixel)));
        const double r2 = d.r * d.r;
        for (int j = j0; j <= j1; ++j) {
            const double dy = (j + 0.5) * pixel - d.y;
            const double h2 = r2 - dy * dy;
            if (h2 < 0) continue;
            const double half = std::sqrt(h2);
            // Pixel centers (i + 0.5) * pixel within [x - half, x + half].
            int lo = static_cast<int>(std::ceil((d.x - half) / pixel - 0.5));
            int hi = static_cast<int>(std::floor((d.x + half) / pixel - 0.5));
            lo = std::max(lo, i0);
            hi = std::min(hi, i1);
            if (lo > hi) continue;
            std::uint8_t* row =
                bm.cov.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(bm.n);
            std::fill(row + lo, row + hi + 1, std::uint8_t{1});
        }
    }
    return bm;
}

}  // namespace

IntrinsicVolumes intrinsic_volumes_2d(const std::vector<Disk>& disks, double window,
                                      double pixel) {
    const Bitmap bm = render(disks, window, pixel);
    const int n = bm.n;
    long faces = 0, edges = 0, verts = 0;
    long corner_windows = 0, adjacent_windows = 0, diagonal_windows = 0;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const bool a = bm.at(i - 1, j - 1), b = bm.at(i, j - 1);
            const bool c = bm.at(i - 1, j), d = bm.at(i, j);
            if (a || b || c || d) ++verts;
            if (j < n && (c || d)) ++edges;  // vertical edge between columns
            if (i < n && (b || d)) ++edges;  // horizontal edge between rows
            if (i < n && j < n && d) ++faces;
            const int k = int(a) + int(b) + int(c) + int(d);
            if (k == 1 || k == 3) {
                ++corner_windows;
            } else if (k == 2) {
                if ((a && d) || (b && c))
                    ++diagonal_windows;
                else
                    ++adjacent_windows;
            }
        }
    }
    IntrinsicVolumes out;
    out.v0 = static_cast<double>(verts - edges + faces);
    // Midpoint-polygon segment lengths weighted by the isotropic correction
    // pi (1 + sqrt 2) / 8: the raw polygon overestimates smooth boundaries
    // by a fixed percentage independent of resolution, which would break
    // the O(pixel) accuracy the grid tolerance assumes.
    const double iso = 3.14159265358979323846 * (1.0 + std::sqrt(2.0)) / 8.0;
    const double perimeter =
        iso * pixel * (0.5 * std::sqrt(2.0) * static_cast<double>(corner_windows) +
                       static_cast<double>(adjacent_windows) +
                       std::sqrt(2.0) * static_cast<double>(diagonal_windows));
    out.v1 = 0.5 * perimeter;
    out.v2 = static_cast<double>(faces) * pixel * pixel;
    return out;
}

void write_boolean_pgm(const std::string& path, const std::vector<Disk>& disks, double window,
                       double pixel) {
    const Bitmap bm = render(disks, window, pixel);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw domain_error("cannot open " + path + " for writing");
    os << "P5\n" << bm.n << ' ' << bm.n << "\n255\n";
    // Image rows run top to bottom; grid rows run bottom to top.
    for (int j = bm.n - 1; j >= 0; --j)
        for (int i = 0; i < bm.n; ++i)
            os.put(bm.at(i, j) ? '\0' : static_cast<char>(255));
}

double wills_functional_2d(double r) {
    if (r < 0) throw domain_error("disk radius must be nonnegative");
    const double pi = 3.14159265358979323846;
    return pi + 2.0 * pi * r + pi * r * r;
}

double lens_area(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return 3.14159265358979323846 * r * r;
    }
    // Circular segment angles at each center.
    const double a1 = 2.0 * std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1),
                                                 -1.0, 1.0));
    const double a2 = 2.0 * std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2),
                                                 -1.0, 1.0));
    return 0.5 * r1 * r1 * (a1 - std::sin(a1)) + 0.5 * r2 * r2 * (a2 - std::sin(a2));
}

double lens_half_perimeter(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) return 3.14159265358979323846 * std::min(r1, r2);
    const double a1 = 2.0 * std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1),
                                                 -1.0, 1.0));
    const double a2 = 2.0 * std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2),
                                                 -1.0, 1.0));
    return 0.5 * (r1 * a1 + r2 * a2);
}

double wills_lens(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    const double pi = 3.14159265358979323846;
    return pi + 2.0 * lens_half_perimeter(r1, r2, d) + lens_area(r1, r2, d);
}

TranslativeCheck check_translative_inequality(double r1, double r2, long n, std::uint64_t seed) {
    if (!(r1 > 0) || !(r2 > 0)) throw domain_error("disk radii must be positive");
    if (n < 2) throw domain_error("need at least two MC samples");
    const double pi = 3.14159265358979323846;
    const double reach = r1 + r2;
    RngStream root(seed);
    RngStream g = root.sub(stream_tag::kChecks, 7);
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        // Uniform center distance in the support disk of radius r1 + r2.
        const double d = reach * std::sqrt(g.next_uniform());
        vals[static_cast<std::size_t>(k)] = pi * reach * reach * wills_lens(r1, r2, d);
    }
    TranslativeCheck out;
    out.lhs = make_estimate(vals, seed);
    out.rhs = wills_functional_2d(r1) * wills_functional_2d(r2);
    out.pass = out.lhs.value <= out.rhs + 3.0 * out.lhs.std_error;
    return out;
}

}  // namespace poincare
