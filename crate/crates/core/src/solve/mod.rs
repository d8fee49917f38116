//! Descent methods and constrained-optimality audits.

pub mod descent;
pub mod kkt;

pub use descent::{
    multi_start_box, projected_descent_box, subgradient_descent, DescentConfig, StepRule,
    Termination, Trajectory, MAX_HALVINGS,
};
pub use kkt::{
    kkt_check, kkt_global_audit, AuditVerdict, HypothesisStatus, KktAudit, KktPoint,
    FEASIBLE_RATE_FLOOR,
};
