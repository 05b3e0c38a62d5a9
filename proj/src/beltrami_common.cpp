#include <cmath>

#include "lqc/beltrami.hpp"

namespace lqc::beltrami {

void SolverConfig::validate() const {
    if (fft_size < 8 || (fft_size & (fft_size - 1)) != 0)
        throw PreconditionError("solver config: fft_size must be a power of two >= 8");
    if (!(neumann_tol > 0.0)) throw PreconditionError("solver config: neumann_tol must be > 0");
    if (!(picard_tol > 0.0)) throw PreconditionError("solver config: picard_tol must be > 0");
    if (neumann_max_iter < 1 || picard_max_iter < 1)
        throw PreconditionError("solver config: iteration limits must be >= 1");
    for (std::size_t k = 0; k < exhaustion_levels.size(); ++k) {
        if (exhaustion_levels[k] < 2)
            throw PreconditionError("solver config: exhaustion levels must be >= 2");
        if (k > 0 && exhaustion_levels[k] <= exhaustion_levels[k - 1])
            throw PreconditionError("solver config: exhaustion levels must be strictly increasing");
    }
}

void to_json(nlohmann::json& j, const SolverConfig& c) {
    j = {{"fft_size", c.fft_size},
         {"neumann_tol", c.neumann_tol},
         {"neumann_max_iter", c.neumann_max_iter},
         {"exhaustion_levels", c.exhaustion_levels},
         {"picard_tol", c.picard_tol},
         {"picard_max_iter", c.picard_max_iter}};
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw PreconditionError("solver config must be a JSON object");
    SolverConfig c;
    try {
        if (j.contains("fft_size")) c.fft_size = j.at("fft_size").get<int>();
        if (j.contains("neumann_tol")) c.neumann_tol = j.at("neumann_tol").get<double>();
        if (j.contains("neumann_max_iter")) c.neumann_max_iter = j.at("neumann_max_iter").get<int>();
        if (j.contains("exhaustion_levels"))
            c.exhaustion_levels = j.at("exhaustion_levels").get<std::vector<int>>();
        if (j.contains("picard_tol")) c.picard_tol = j.at("picard_tol").get<double>();
        if (j.contains("picard_max_iter")) c.picard_max_iter = j.at("picard_max_iter").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("solver config: ") + e.what());
    }
    c.validate();
    return c;
}

int SolveReport::total_iterations() const {
    int n = 0;
    for (const auto& s : stages) n += s.iterations;
    return n;
}

namespace {
nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
}  // namespace

void to_json(nlohmann::json& j, const SolveReport& r) {
    auto stages = nlohmann::json::array();
    for (const auto& s : r.stages)
        stages.push_back({{"label", s.label},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"residuals", s.residuals}});
    j = {{"stages", stages},
         {"pinned_images",
          {complex_json(r.pinned_images[0]), complex_json(r.pinned_images[1]),
           complex_json(r.pinned_images[2])}},
         {"image_of_origin", complex_json(r.image_of_origin)},
         {"circle_deviation", r.circle_deviation},
         {"converged", r.converged},
         {"message", r.message}};
    if (!r.stage_differences.empty()) {
        j["difference_radii"] = r.difference_radii;
        j["stage_differences"] = r.stage_differences;
    }
    if (!r.picard_differences.empty()) j["picard_differences"] = r.picard_differences;
    if (r.equation_residual) j["equation_residual"] = *r.equation_residual;
}

bool residuals_nonincreasing(const std::vector<double>& res, double floor) {
    if (res.size() < 3) return true;
    const double scale = res.front();
    for (std::size_t k = 2; k < res.size(); ++k)
        if (res[k] > res[k - 1] * (1.0 + 1e-9) + floor * scale) return false;
    return true;
}

}  // namespace lqc::beltrami
