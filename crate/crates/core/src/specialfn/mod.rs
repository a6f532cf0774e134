//! Gamma function, Pochhammer symbols and the Tricomi function.

mod gamma;
mod tricomi;

pub use gamma::{
    gamma, gamma_ratio, is_nonpositive_integer, log_gamma, log_gamma_ratio, pochhammer, recip_gamma, sin_pi,
    GAMMA_MAX_ARG,
};
pub use tricomi::{
    in_precision_box, ln_tricomi_f, psi_derivative, psi_small_z, tricomi_f, tricomi_h, tricomi_psi, AsymptoticForm,
    PsiArgs,
};
