//! Special functions: gamma family, incomplete beta, normal and Student t
//! distributions, and the Gauss hypergeometric function on the negative axis.

mod beta;
mod gamma;
mod hypergeometric;
mod normal;
mod student_t;

pub use beta::{inv_reg_inc_beta, ln_beta, reg_inc_beta};
pub use gamma::{digamma, gamma_signed, ln_gamma, ln_gamma_ratio, trigamma};
pub(crate) use gamma::ln_gamma_pos;
pub use hypergeometric::hyp2f1;
pub use normal::{ln_normal_cdf, normal_cdf, normal_pdf, normal_quantile, normal_sf};
pub use student_t::{
    student_t_cdf, student_t_ln_cdf, student_t_ln_pdf, student_t_pdf, student_t_quantile,
};
