#include "poincare/testfunction.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace poincare {

namespace {

void check_dimension(int m, const char* where) {
    if (m <= 0) throw domain_error(std::string(where) + ": dimension must be positive");
}

std::string join_g17(const std::vector<double>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out.push_back(sep);
        out += fmt_g17(v[i]);
    }
    return out;
}

std::vector<double> parse_numbers(const std::string& text, char sep, const char* where) {
    std::vector<double> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) {
        if (token.empty()) throw config_error(std::string(where) + ": empty number field");
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size())
            throw config_error(std::string(where) + ": bad number '" + token + "'");
        out.push_back(v);
    }
    if (out.empty()) throw config_error(std::string(where) + ": no numbers");
    return out;
}

}  // namespace

TestFunction TestFunction::halfspaces(std::vector<std::vector<double>> directions,
                                      std::vector<double> offsets) {
    if (directions.empty() || directions.size() != offsets.size())
        throw domain_error("halfspace witness needs matching directions and offsets");
    const int m = static_cast<int>(directions.front().size());
    check_dimension(m, "halfspace witness");
    for (const auto& u : directions) {
        if (static_cast<int>(u.size()) != m)
            throw domain_error("halfspace directions must share one dimension");
        double norm2 = 0.0;
        for (double c : u) norm2 += c * c;
        if (std::fabs(norm2 - 1.0) > 1e-12)
            throw domain_error("halfspace directions must be unit vectors");
    }
    TestFunction f;
    f.kind_ = Kind::halfspaces;
    f.m_ = m;
    f.directions_ = std::move(directions);
    f.offsets_ = std::move(offsets);
    return f;
}

TestFunction TestFunction::ball(std::vector<double> center, double radius) {
    check_dimension(static_cast<int>(center.size()), "ball witness");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw domain_error("ball witness needs a positive finite radius");
    TestFunction f;
    f.kind_ = Kind::ball;
    f.m_ = static_cast<int>(center.size());
    f.center_ = std::move(center);
    f.radius_ = radius;
    return f;
}

TestFunction TestFunction::axis_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw domain_error("axis box witness needs matching corner vectors");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw domain_error("axis box witness needs lo < hi per axis");
    TestFunction f;
    f.kind_ = Kind::axis_box;
    f.m_ = static_cast<int>(lo.size());
    f.lo_ = std::move(lo);
    f.hi_ = std::move(hi);
    return f;
}

bool TestFunction::evaluate(const double* x) const {
    switch (kind_) {
        case Kind::halfspaces: {
            for (std::size_t k = 0; k < offsets_.size(); ++k) {
                double dot = 0.0;
                const auto& u = directions_[k];
                for (int i = 0; i < m_; ++i) dot += u[i] * x[i];
                if (dot > offsets_[k]) return false;
            }
            return true;
        }
        case Kind::ball: {
            double d2 = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double d = x[i] - center_[i];
                d2 += d * d;
            }
            return d2 <= radius_ * radius_;
        }
        case Kind::axis_box: {
            for (int i = 0; i < m_; ++i)
                if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
            return true;
        }
    }
    return false;
}

bool TestFunction::evaluate(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != m_)
        throw domain_error("test function evaluated at wrong dimension");
    return evaluate(x.data());
}

TestFunction TestFunction::affine_preimage(double scale, const std::vector<double>& shift) const {
    if (!(scale > 0.0)) throw domain_error("affine preimage needs a positive scale");
    if (static_cast<int>(shift.size()) != m_)
        throw domain_error("affine preimage shift has wrong dimension");
    switch (kind_) {
        case Kind::halfspaces: {
            // <u, s x + b> <= z  <=>  <u, x> <= (z - <u, b>) / s.
            std::vector<double> offsets(offsets_.size());
            for (std::size_t k = 0; k < offsets_.size(); ++k) {
                double dot = 0.0;
                for (int i = 0; i < m_; ++i) dot += directions_[k][i] * shift[i];
                offsets[k] = (offsets_[k] - dot) / scale;
            }
            return halfspaces(directions_, std::move(offsets));
        }
        case Kind::ball: {
            std::vector<double> center(m_);
            for (int i = 0; i < m_; ++i) center[i] = (center_[i] - shift[i]) / scale;
            return ball(std::move(center), radius_ / scale);
        }
        case Kind::axis_box: {
            std::vector<double> lo(m_), hi(m_);
            for (int i = 0; i < m_; ++i) {
                lo[i] = (lo_[i] - shift[i]) / scale;
                hi[i] = (hi_[i] - shift[i]) / scale;
            }
            return axis_box(std::move(lo), std::move(hi));
        }
    }
    throw domain_error("affine preimage: unknown kind");
}

bool TestFunction::has_boundary_distance() const {
    return kind_ != Kind::halfspaces || offsets_.size() == 1;
}

double TestFunction::boundary_distance(const double* x) const {
    switch (kind_) {
        case Kind::halfspaces: {
            if (offsets_.size() != 1)
                throw domain_error(
                    "boundary distance has no closed form for half-space intersections");
            double dot = 0.0;
            for (int i = 0; i < m_; ++i) dot += directions_[0][i] * x[i];
            return std::fabs(offsets_[0] - dot);
        }
        case Kind::ball: {
            double d2 = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double d = x[i] - center_[i];
                d2 += d * d;
            }
            return std::fabs(std::sqrt(d2) - radius_);
        }
        case Kind::axis_box: {
            // Inside: nearest face. Outside: distance to the box.
            bool inside = true;
            double inside_min = std::numeric_limits<double>::infinity();
            double out2 = 0.0;
            for (int i = 0; i < m_; ++i) {
                if (x[i] < lo_[i]) {
                    inside = false;
                    out2 += (lo_[i] - x[i]) * (lo_[i] - x[i]);
                } else if (x[i] > hi_[i]) {
                    inside = false;
                    out2 += (x[i] - hi_[i]) * (x[i] - hi_[i]);
                } else {
                    inside_min = std::min(inside_min, std::min(x[i] - lo_[i], hi_[i] - x[i]));
                }
            }
            return inside ? inside_min : std::sqrt(out2);
        }
    }
    throw domain_error("boundary distance: unknown kind");
}

std::string TestFunction::serialize() const {
    switch (kind_) {
        case Kind::halfspaces: {
            std::string dirs;
            for (std::size_t k = 0; k < directions_.size(); ++k) {
                if (k > 0) dirs.push_back('|');
                dirs += join_g17(directions_[k], ',');
            }
            return "halfspaces;" + dirs + ";" + join_g17(offsets_, ',');
        }
        case Kind::ball:
            return "ball;" + join_g17(center_, ',') + ";" + fmt_g17(radius_);
        case Kind::axis_box:
            return "box;" + join_g17(lo_, ',') + ";" + join_g17(hi_, ',');
    }
    throw domain_error("serialize: unknown kind");
}

TestFunction TestFunction::deserialize(const std::string& text) {
    const auto p1 = text.find(';');
    const auto p2 = text.find(';', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw config_error("witness text needs kind;...;... : '" + text + "'");
    const std::string kind = text.substr(0, p1);
    const std::string a = text.substr(p1 + 1, p2 - p1 - 1);
    const std::string b = text.substr(p2 + 1);
    if (kind == "halfspaces") {
        std::vector<std::vector<double>> directions;
        std::string block;
        std::istringstream in(a);
        while (std::getline(in, block, '|'))
            directions.push_back(parse_numbers(block, ',', "witness directions"));
        return halfspaces(std::move(directions), parse_numbers(b, ',', "witness offsets"));
    }
    if (kind == "ball") {
        auto radius = parse_numbers(b, ',', "witness radius");
        if (radius.size() != 1) throw config_error("ball witness needs one radius");
        return ball(parse_numbers(a, ',', "witness center"), radius[0]);
    }
    if (kind == "box")
        return axis_box(parse_numbers(a, ',', "witness lo"), parse_numbers(b, ',', "witness hi"));
    throw config_error("unknown witness kind '" + kind + "'");
}

}  // namespace poincare
