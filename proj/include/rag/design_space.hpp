#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rag {

/// A point in the design space. Integer variables are stored as reals
/// holding integral values; kind metadata lives in DesignSpace.
using DesignVector = std::vector<double>;

enum class VarKind { Continuous, Integer };

struct VariableSpec {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;
};

/// Bounded mixed (continuous + integer) box of design variables.
struct DesignSpace {
    std::vector<VariableSpec> dims;

    std::size_t dim() const { return dims.size(); }

    void validate() const {
        if (dims.empty()) throw std::invalid_argument("DesignSpace: needs at least one variable");
        for (const auto& d : dims) {
            if (!(d.lower < d.upper))
                throw std::invalid_argument("DesignSpace: lower must be < upper for '" + d.name + "'");
            if (d.kind == VarKind::Integer &&
                (d.lower != std::floor(d.lower) || d.upper != std::floor(d.upper)))
                throw std::invalid_argument("DesignSpace: integer variable '" + d.name +
                                            "' needs integral bounds");
        }
    }

    /// Bounds plus integrality for integer dims.
    bool contains(const DesignVector& x) const {
        if (x.size() != dims.size()) return false;
        for (std::size_t j = 0; j < dims.size(); ++j) {
            const auto& d = dims[j];
            if (!(x[j] >= d.lower && x[j] <= d.upper)) return false;
            if (d.kind == VarKind::Integer && x[j] != std::floor(x[j])) return false;
        }
        return true;
    }

    void require_point(const DesignVector& x) const {
        if (x.size() != dims.size())
            throw std::invalid_argument("design vector has dimension " + std::to_string(x.size()) +
                                        ", space expects " + std::to_string(dims.size()));
    }
};

}  // namespace rag
