use crate::error::{InvexError, Result};
use crate::model::{FunctionObject, KernelFn};

/// `minimize f(x) subject to g_i(x) <= 0`.
#[derive(Debug, Clone)]
pub struct ConstrainedProblem {
    objective: FunctionObject,
    constraints: Vec<FunctionObject>,
    common_kernel: Option<KernelFn>,
}

impl ConstrainedProblem {
    /// The common kernel is recorded when the objective and every constraint
    /// carry descriptor-equal kernels.
    pub fn new(objective: FunctionObject, constraints: Vec<FunctionObject>) -> Result<Self> {
        for g in &constraints {
            if g.dim() != objective.dim() {
                return Err(InvexError::DimMismatch {
                    expected: objective.dim(),
                    got: g.dim(),
                });
            }
        }
        let common_kernel = objective.kernel().and_then(|k| {
            constraints
                .iter()
                .all(|g| g.kernel() == Some(k))
                .then(|| k.clone())
        });
        Ok(ConstrainedProblem {
            objective,
            constraints,
            common_kernel,
        })
    }

    pub fn unconstrained(objective: FunctionObject) -> Self {
        ConstrainedProblem {
            common_kernel: objective.kernel().cloned(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn objective(&self) -> &FunctionObject {
        &self.objective
    }

    pub fn constraints(&self) -> &[FunctionObject] {
        &self.constraints
    }

    pub fn common_kernel(&self) -> Option<&KernelFn> {
        self.common_kernel.as_ref()
    }

    /// Describes the first kernel that differs from the objective's, if any.
    pub fn kernel_mismatch(&self) -> Option<InvexError> {
        let describe = |f: &FunctionObject| {
            f.kernel()
                .map(KernelFn::describe)
                .unwrap_or_else(|| "<none>".to_string())
        };
        let left = describe(&self.objective);
        self.constraints.iter().find_map(|g| {
            let right = describe(g);
            (self.objective.kernel().is_none() || g.kernel() != self.objective.kernel()).then(
                || InvexError::KernelMismatch {
                    left: left.clone(),
                    right,
                },
            )
        })
    }
}
