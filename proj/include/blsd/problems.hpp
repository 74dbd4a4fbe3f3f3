#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "blsd/problems/mixture.hpp"
#include "blsd/problems/mlp.hpp"
#include "blsd/problems/quadratic.hpp"
#include "blsd/problems/rosenbrock.hpp"
#include "blsd/rng.hpp"

namespace blsd {

enum class ProblemKind {
    indefinite_quadratic,
    rosenbrock_sum,
    layered_gaussian_mixture,
    mlp_least_squares,
};

inline const char* to_string(ProblemKind k) {
    switch (k) {
    case ProblemKind::indefinite_quadratic: return "indefinite_quadratic";
    case ProblemKind::rosenbrock_sum: return "rosenbrock_sum";
    case ProblemKind::layered_gaussian_mixture: return "layered_gaussian_mixture";
    case ProblemKind::mlp_least_squares: return "mlp_least_squares";
    }
    return "?";
}

inline ProblemKind problem_kind_from_string(const std::string& s) {
    if (s == "indefinite_quadratic") return ProblemKind::indefinite_quadratic;
    if (s == "rosenbrock_sum") return ProblemKind::rosenbrock_sum;
    if (s == "layered_gaussian_mixture") return ProblemKind::layered_gaussian_mixture;
    if (s == "mlp_least_squares") return ProblemKind::mlp_least_squares;
    throw std::invalid_argument("unknown problem kind: " + s);
}

/// Declarative description of a problem instance. The seed fully
/// determines the instance; constructing twice from one spec gives
/// identical oracles.
struct ProblemSpec {
    ProblemKind kind = ProblemKind::indefinite_quadratic;
    int dim = 0;        // 0 = kind default (derived from widths where applicable)
    int components = 1; // m
    std::uint64_t seed = 1;

    // indefinite_quadratic: explicit spectrum, or seeded uniform draws
    // from [eig_min, eig_max] when the list is empty
    std::vector<double> eigenvalues;
    double eig_min = -1.0;
    double eig_max = 2.0;

    // layered_gaussian_mixture / mlp_least_squares
    std::vector<int> widths;
    std::vector<int> mixture_components;
    int samples = 400;
};

inline std::unique_ptr<ComponentObjective>
make_layered_gaussian_mixture(const ProblemSpec& spec) {
    std::vector<int> widths = spec.widths.empty() ? std::vector<int>{6, 5, 4} : spec.widths;
    std::vector<int> comps = spec.mixture_components.empty()
                                 ? std::vector<int>(widths.size(), 8)
                                 : spec.mixture_components;
    return std::make_unique<LayeredGaussianMixture>(std::move(widths), std::move(comps),
                                                    spec.samples, spec.components, spec.seed);
}

inline std::unique_ptr<ComponentObjective> make_problem(const ProblemSpec& spec) {
    std::unique_ptr<ComponentObjective> obj;
    switch (spec.kind) {
    case ProblemKind::indefinite_quadratic: {
        std::vector<double> eig = spec.eigenvalues;
        int dim = spec.dim > 0 ? spec.dim : (eig.empty() ? 10 : static_cast<int>(eig.size()));
        if (eig.empty()) {
            if (!(spec.eig_min <= spec.eig_max))
                throw std::invalid_argument("indefinite_quadratic: eig_min must be <= eig_max");
            Rng rng(spec.seed);
            eig.resize(dim);
            for (double& e : eig) e = rng.uniform(spec.eig_min, spec.eig_max);
        }
        obj = make_indefinite_quadratic(dim, spec.components, std::move(eig));
        break;
    }
    case ProblemKind::rosenbrock_sum:
        obj = make_rosenbrock_sum(spec.dim > 0 ? spec.dim : 10, spec.components);
        break;
    case ProblemKind::layered_gaussian_mixture:
        obj = make_layered_gaussian_mixture(spec);
        break;
    case ProblemKind::mlp_least_squares: {
        std::vector<int> widths = spec.widths.empty() ? std::vector<int>{4, 8, 1} : spec.widths;
        obj = make_mlp_least_squares(std::move(widths), spec.samples, spec.components, spec.seed);
        break;
    }
    }
    if (spec.dim > 0 && obj->dim() != static_cast<std::size_t>(spec.dim))
        throw std::invalid_argument("problem dim " + std::to_string(spec.dim) +
                                    " does not match derived dimension " +
                                    std::to_string(obj->dim()));
    return obj;
}

} // namespace blsd
