#include "vnlab/tolerances.hpp"

namespace vnlab {

const Tolerances& default_tolerances() noexcept {
    static const Tolerances defaults{};
    return defaults;
}

#define VNLAB_TOLERANCE_FIELDS(X)                                                                \
    X(symmetry) X(jacobi_offdiag) X(jacobi_max_sweeps) X(spectrum_hit) X(nullspace) X(affiliation) \
        X(cluster_gap) X(weight_sum) X(lie_admission) X(clamp_slack) X(clamp_overshoot)          \
            X(reconstruct_zero) X(unit_norm)

void to_json(nlohmann::json& j, const Tolerances& t) {
    j = nlohmann::json::object();
#define VNLAB_WRITE(name) j[#name] = t.name;
    VNLAB_TOLERANCE_FIELDS(VNLAB_WRITE)
#undef VNLAB_WRITE
}

void from_json(const nlohmann::json& j, Tolerances& t) {
#define VNLAB_READ(name) \
    if (j.contains(#name)) j.at(#name).get_to(t.name);
    VNLAB_TOLERANCE_FIELDS(VNLAB_READ)
#undef VNLAB_READ
}

#undef VNLAB_TOLERANCE_FIELDS

}  // namespace vnlab
