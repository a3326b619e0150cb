#include "lacuna/indices.hpp"

namespace lacuna {

BinaryMask derive_necrosis(const BinaryMask& core, const BinaryMask& enhanced)
{
    require_subset(core, enhanced, "enhanced mask");
    BinaryMask out(core.width(), core.height());
    for (std::size_t r = 0; r < core.height(); ++r)
        for (std::size_t c = 0; c < core.width(); ++c)
            out.set(c, r, core.at(c, r) && !enhanced.at(c, r));
    return out;
}

ImageTriple ImageTriple::derive(BinaryMask core, BinaryMask enhanced)
{
    BinaryMask necrosis = derive_necrosis(core, enhanced);
    return {std::move(core), std::move(enhanced), std::move(necrosis)};
}

ImageTriple ImageTriple::with_necrosis(BinaryMask core, BinaryMask enhanced, BinaryMask necrosis)
{
    require_subset(core, enhanced, "enhanced mask");
    require_subset(core, necrosis, "necrosis mask");
    for (std::size_t i = 0; i < core.size(); ++i) {
        if (core[i] && !enhanced[i] && !necrosis[i])
            throw ValidationError("core pixel (col " + std::to_string(i % core.width()) +
                                  ", row " + std::to_string(i / core.width()) +
                                  ") is covered by neither the enhanced nor the necrosis mask");
    }
    return {std::move(core), std::move(enhanced), std::move(necrosis)};
}

double lacunarity_from_grids(const InteriorGrid& sub, const InteriorGrid& whole, Diagnostics* diag)
{
    if (sub.resolution != whole.resolution || !(sub.box == whole.box))
        throw ValidationError("lacunarity numerator and denominator use different grids");
    const double denominator = trapezoid_integral(whole);
    if (!(denominator > 0.0)) {
        if (diag)
            diag->warn("interior integral of the containing complex is zero; lacunarity set to 0");
        return 0.0;
    }
    return trapezoid_integral(sub) / denominator;
}

double subcomplex_lacunarity(const BinaryMask& whole, const BinaryMask& sub,
                             const AnalysisConfig& cfg, Diagnostics* diag)
{
    require_subset(whole, sub, "subcomplex");
    const auto whole_grid = interior_grid(whole, cfg.embedding, cfg.grid, cfg.policy, cfg.jobs);
    const auto sub_grid = interior_grid(sub, cfg.embedding, cfg.grid, cfg.policy, cfg.jobs);
    return lacunarity_from_grids(sub_grid, whole_grid, diag);
}

PrimaryIndices primary_indices(const ImageTriple& triple, const AnalysisConfig& cfg,
                               Diagnostics* diag)
{
    require_subset(triple.core, triple.enhanced, "enhanced mask");
    require_subset(triple.core, triple.necrosis, "necrosis mask");

    const auto core = interior_grid(triple.core, cfg.embedding, cfg.grid, cfg.policy, cfg.jobs);
    PrimaryIndices out;
    out.integral_core = trapezoid_integral(core);
    if (!(out.integral_core > 0.0)) {
        if (diag)
            diag->warn("interior integral of the core is zero; eta and tau set to 0");
        return out;
    }
    const auto necrosis =
        interior_grid(triple.necrosis, cfg.embedding, cfg.grid, cfg.policy, cfg.jobs);
    const auto enhanced =
        interior_grid(triple.enhanced, cfg.embedding, cfg.grid, cfg.policy, cfg.jobs);
    out.eta = lacunarity_from_grids(necrosis, core, diag);
    out.tau = lacunarity_from_grids(enhanced, core, diag);
    return out;
}

SecondaryIndices secondary_indices(double eta, double tau)
{
    return {tau - eta, (tau + eta) / 2};
}

IndexRecord compute_index_record(const std::string& patient_id, const std::string& image_id,
                                 const ImageTriple& triple, const AnalysisConfig& cfg,
                                 Diagnostics* diag)
{
    IndexRecord rec;
    rec.patient_id = patient_id;
    rec.image_id = image_id;
    rec.active_core = triple.core.activation_count();
    rec.active_enhanced = triple.enhanced.activation_count();
    rec.active_necrosis = triple.necrosis.activation_count();

    const auto primary = primary_indices(triple, cfg, diag);
    const auto secondary = secondary_indices(primary.eta, primary.tau);
    rec.integral_core = primary.integral_core;
    rec.eta = primary.eta;
    rec.tau = primary.tau;
    rec.sigma = secondary.sigma;
    rec.rho = secondary.rho;
    if (diag && (rec.eta > 1.0 || rec.tau > 1.0))
        diag->warn("index above 1 for " + patient_id + "/" + image_id);
    return rec;
}

} // namespace lacuna
