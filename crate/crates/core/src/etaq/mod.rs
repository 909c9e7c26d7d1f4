//! Generalized eta-functions, partition specs, levels, and the transformation
//! data of `F_S(τ) = ∏_{g∈S} η_{2δ,2g}(τ)/η_{δ,g}(τ)` at arbitrary cusps.

mod context;
mod cusp;
mod functions;
mod spec;

pub use context::{cusp_context, CuspContext};
pub use cusp::{
    c_branch, c_phase, expansion_at_cusp, expansion_product_form, expansion_step, gh_primed,
    leading_data, leading_root_sum, mu, ord_t_at_cusp, slots, twist_index, twist_order,
    twisted_series, twisted_series_sparse, z_leading, CuspExpansion, LeadingData, Slot,
};
pub use functions::{alpha, eta_delta_g_expansion, eta_generalized_expansion, f_s_expansion};
pub use spec::{
    f_level, ord_s, parse_list, robins_level_check, sieved_level, EtaQuotient, PartitionSpec,
};
