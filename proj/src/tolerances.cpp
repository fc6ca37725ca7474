#include "bqk/tolerances.hpp"

#include <cstdlib>
#include <numbers>
#include <sstream>

#include "bqk/error.hpp"

namespace bqk {

namespace {

double parse_number(const std::string& text) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw InputError("tolerance: cannot parse '" + text + "'");
    }
    if (pos != text.size() || !(value >= 0.0))
        throw InputError("tolerance: invalid value '" + text + "'");
    return value;
}

}  // namespace

Tolerances parse_tolerances(const std::string& spec, Tolerances base) {
    if (spec.empty()) return base;
    if (spec.find('=') == std::string::npos) {
        base.flux = parse_number(spec);
        return base;
    }
    std::stringstream stream(spec);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("tolerance: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double value = parse_number(item.substr(eq + 1));
        if (key == "flux") base.flux = value;
        else if (key == "theta") base.theta = value;
        else if (key == "hermitian") base.hermitian = value;
        else if (key == "eigen_residual") base.eigen_residual = value;
        else if (key == "cluster_gap") base.cluster_gap = value;
        else if (key == "cluster_floor") base.cluster_floor = value;
        else throw InputError("tolerance: unknown key '" + key + "'");
    }
    return base;
}

Tolerances default_tolerances() {
    const char* env = std::getenv("BQK_TOL");
    if (env == nullptr) return {};
    return parse_tolerances(env);
}

double PhysicalConstants::theta_from_flux(double flux) const {
    return charge * flux / (2.0 * std::numbers::pi * hbar);
}

}  // namespace bqk
