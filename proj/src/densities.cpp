#include "lqem/densities.hpp"

#include <ostream>
#include <sstream>

namespace lqem {

std::string to_string(const Vec3& v) {
    std::ostringstream os;
    os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << to_string(v);
}

void ensure_finite(const Vec3& v, const char* what) {
    if (!v.finite())
        throw std::invalid_argument(std::string(what) + " has non-finite component " + to_string(v));
}

void ensure_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " is non-finite");
}

void throw_inadmissible(const char* where, const Vec3& g, const Vec3& B, double s) {
    std::ostringstream os;
    os << where << ": inadmissible state g=" << to_string(g) << ", B=" << to_string(B)
       << " (slack=" << s << " < 0 means |g|^2+(g.B)^2 > 1+|B|^2)";
    throw std::domain_error(os.str());
}

} // namespace lqem
