//! Self-contained special-function kernel: Gauss hypergeometric series,
//! log-gamma (real and complex modulus), normal CDF/quantile, Student
//! quantile/CDF, associated Legendre functions.

mod erf;
mod gamma;
mod hyp2f1;
mod legendre;
mod student;

pub use erf::{erfc, normal_cdf, normal_quantile, normal_tail_log};
pub use gamma::{gamma_abs_complex, gamma_real, gamma_real_any, log_gamma_real};
pub use hyp2f1::{hyp2f1, Hyp2F1Args};
pub use legendre::assoc_legendre;
pub use student::{student_cdf, student_quantile, student_tail};
