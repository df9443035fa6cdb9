//! Exact arithmetic in `Q[z_0, ..., z_n, u_1^±, ..., u_m^±]` modulo
//! `z_0 ... z_n = 1 + u_1 + ... + u_m`.

mod checks;
mod normal;
mod poly;

pub use checks::{
    check_vanishes, cone_relation_check, jacobian_report, jacobian_smoothness, verify_blowup_presentation,
    BlowupReport, ConeReport, JacobianReport,
};
pub use normal::{normal_form, normal_form_with, QuotientElement};
pub use poly::{LaurentPoly, Monomial};
