#include "dcu/growth.hpp"

#include <cmath>

#include "dcu/errors.hpp"

namespace dcu {

const char* to_string(CoreClass c) {
    switch (c) {
        case CoreClass::A1: return "A1";
        case CoreClass::A2: return "A2";
        case CoreClass::A3: return "A3";
        case CoreClass::A4: return "A4";
    }
    return "?";
}

const char* to_string(GenClass c) {
    switch (c) {
        case GenClass::H1: return "H1";
        case GenClass::H2: return "H2";
        case GenClass::H3: return "H3";
        case GenClass::H4: return "H4";
    }
    return "?";
}

GenClass conjugate_class(CoreClass c) {
    switch (c) {
        case CoreClass::A1: return GenClass::H1;
        case CoreClass::A2: return GenClass::H2;
        case CoreClass::A3: return GenClass::H3;
        case CoreClass::A4: return GenClass::H4;
    }
    return GenClass::H1;
}

double conjugate_exponent(double alpha) {
    if (!(alpha > 1.0))
        throw ParamError("conjugate_exponent: alpha must exceed 1, got " + std::to_string(alpha));
    return alpha / (alpha - 1.0);
}

void GrowthParams::validate(CoreClass cls) const {
    if (!(gamma > 0.0))
        throw ParamError("GrowthParams: gamma must be positive, got " + std::to_string(gamma));
    if (!(T > 0.0))
        throw ParamError("GrowthParams: T must be positive, got " + std::to_string(T));
    if (d < 1)
        throw ParamError("GrowthParams: d must be at least 1, got " + std::to_string(d));
    if (!(k >= 0.0))
        throw ParamError("GrowthParams: k must be nonnegative, got " + std::to_string(k));
    if (cls == CoreClass::A2) {
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw ParamError("GrowthParams: alpha must lie in (1,2], got " + std::to_string(alpha));
        const double want = conjugate_exponent(alpha);
        if (std::fabs(1.0 / alpha + 1.0 / alpha_star - 1.0) > 1e-12)
            throw ParamError("GrowthParams: alpha_star=" + std::to_string(alpha_star) +
                             " is not conjugate to alpha=" + std::to_string(alpha) +
                             " (expected " + std::to_string(want) + ")");
    }
    if (cls == CoreClass::A3) {
        if (!(lambda > 0.0))
            throw ParamError("GrowthParams: lambda must be positive, got " + std::to_string(lambda));
        if (!(c > 0.0))
            throw ParamError("GrowthParams: c must be positive, got " + std::to_string(c));
    }
    if (cls == CoreClass::A4 && k > gamma)
        throw ParamError("GrowthParams: bounded-domain class needs k <= gamma (anchor inside the domain), got k=" +
                         std::to_string(k) + " gamma=" + std::to_string(gamma));
}

} // namespace dcu
