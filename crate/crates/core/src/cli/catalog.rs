//! The example catalog: named constructions with their expected property classes.

use std::fmt;

use serde::Serialize;

use crate::algebra::{
    abs_atom, compose_transform, declare_invex_by_stationarity_audit, fractional,
    identity_positive, log_compose, make_convex_atom, power_compose, ratio_compose, separable_sum,
    weighted_sum, ConvexAtomSpec, Transform,
};
use crate::error::Result;
use crate::model::{BoxRegion, DomainSpec, FunctionObject, SubgradientSet, Vector, KINK_TOL};

/// Grid density for the audited entries.
pub const CATALOG_AUDIT_DENSITY: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Invex,
    Pseudoconvex,
    Quasiconvex,
    Convex,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::Invex,
        Property::Pseudoconvex,
        Property::Quasiconvex,
        Property::Convex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Invex => "invex",
            Property::Pseudoconvex => "pseudoconvex",
            Property::Quasiconvex => "quasiconvex",
            Property::Convex => "convex",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s.trim())
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub struct CatalogEntry {
    pub id: &'static str,
    pub recipe: &'static str,
    pub expected: &'static [Property],
    pub figure: Option<&'static str>,
    build: fn() -> Result<FunctionObject>,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<FunctionObject> {
        (self.build)()
    }

    pub fn expects(&self, p: Property) -> bool {
        self.expected.contains(&p)
    }
}

use Property::{Convex, Invex, Pseudoconvex, Quasiconvex};

const PSEUDO: &[Property] = &[Invex, Pseudoconvex, Quasiconvex];
const INVEX_ONLY: &[Property] = &[Invex];

pub static CATALOG: [CatalogEntry; 12] = [
    CatalogEntry {
        id: "abslog",
        recipe: "|log x| on x>0: |t| composed with the transform t = log x",
        expected: PSEUDO,
        figure: None,
        build: abslog,
    },
    CatalogEntry {
        id: "fracx",
        recipe: "|x-1|/x on x>0: fraction of |x-1| over x",
        expected: PSEUDO,
        figure: None,
        build: fracx,
    },
    CatalogEntry {
        id: "fraclog",
        recipe: "|x-1|/x + log x on x>0: weighted sum of fracx and log x",
        expected: PSEUDO,
        figure: None,
        build: fraclog,
    },
    CatalogEntry {
        id: "logreg",
        recipe: "log(|x1|+1) + log(|x2|+1): separable sum of log composites",
        expected: INVEX_ONLY,
        figure: Some("fig3b"),
        build: logreg,
    },
    CatalogEntry {
        id: "powreg",
        recipe: "(|x1|+0.1)^0.5 + (|x2|+0.1)^0.5: separable sum of power composites",
        expected: INVEX_ONLY,
        figure: None,
        build: powreg,
    },
    CatalogEntry {
        id: "ratioreg",
        recipe: "|x1|/(|x1|+1) + |x2|/(|x2|+1): separable sum of ratio composites",
        expected: INVEX_ONLY,
        figure: None,
        build: ratioreg,
    },
    CatalogEntry {
        id: "pert1",
        recipe: "2|x|_1 - cos|x|_2 on R^2: stationarity audit on [-5,5]^2",
        expected: INVEX_ONLY,
        figure: Some("fig5a"),
        build: pert1,
    },
    CatalogEntry {
        id: "pert2",
        recipe: "x^2 - 6 cos x on R: stationarity audit on [-10,10]",
        expected: PSEUDO,
        figure: Some("fig5b"),
        build: pert2,
    },
    CatalogEntry {
        id: "sepPert",
        recipe: "x^2 + y^2 - 6(cos x + cos y): separable sum of two audited parts on [-5,5]",
        expected: INVEX_ONLY,
        figure: Some("fig5c"),
        build: sep_pert,
    },
    CatalogEntry {
        id: "noStat",
        recipe: "x - y^2 on R^2: stationarity audit finds no stationary point",
        expected: INVEX_ONLY,
        figure: Some("fig2"),
        build: no_stat,
    },
    CatalogEntry {
        id: "tangentDemo",
        recipe: "x^2/(x^2+1): ratio composite of x^2",
        expected: PSEUDO,
        figure: Some("fig1"),
        build: tangent_demo,
    },
    CatalogEntry {
        id: "l1norm",
        recipe: "|x1| + |x2|: convex atom",
        expected: &[Invex, Pseudoconvex, Quasiconvex, Convex],
        figure: None,
        build: l1norm,
    },
];

pub fn lookup(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}

fn abslog() -> Result<FunctionObject> {
    compose_transform(&abs_atom(0.0), &Transform::log())
}

fn fracx() -> Result<FunctionObject> {
    fractional(&abs_atom(1.0), &identity_positive())
}

fn fraclog() -> Result<FunctionObject> {
    weighted_sum(&fracx()?, &log_compose(&identity_positive())?, 1.0, 1.0)
}

fn shifted_abs(offset: f64) -> Result<FunctionObject> {
    make_convex_atom(ConvexAtomSpec::Abs { shift: 0.0, offset })
}

/// One-dimensional part of the log regularizer, `log(|t| + 1)`.
pub fn log_part() -> Result<FunctionObject> {
    log_compose(&shifted_abs(1.0)?)
}

fn logreg() -> Result<FunctionObject> {
    let p = log_part()?;
    separable_sum(&[p.clone(), p])
}

fn powreg() -> Result<FunctionObject> {
    let p = power_compose(&shifted_abs(0.1)?, 0.5)?;
    separable_sum(&[p.clone(), p])
}

fn ratioreg() -> Result<FunctionObject> {
    let p = ratio_compose(&abs_atom(0.0), 1.0)?;
    separable_sum(&[p.clone(), p])
}

/// `2|x|_1 - cos|x|_2` with its exact Clarke subdifferential.
pub fn pert1_raw() -> FunctionObject {
    FunctionObject::from_rules(
        "2|x|_1-cos|x|_2",
        DomainSpec::all_space(2),
        |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            2.0 * x.iter().map(|v| v.abs()).sum::<f64>() - r.cos()
        },
        |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let c = if r > 0.0 { r.sin() / r } else { 0.0 };
            let n = x.len();
            let (mut sm, mut lo, mut hi) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            for i in 0..n {
                sm[i] = c * x[i];
                if x[i].abs() <= KINK_TOL {
                    (lo[i], hi[i]) = (-2.0, 2.0);
                } else {
                    sm[i] += 2.0 * x[i].signum();
                }
            }
            SubgradientSet::with_box(sm, lo, hi)
        },
    )
    .with_kinks(vec![vec![0.0]; 2])
    .expect("two kink lists")
}

/// `x^2 - 6 cos x` on the line.
pub fn pert2_raw() -> FunctionObject {
    FunctionObject::from_rules(
        "x^2-6cos(x)",
        DomainSpec::all_space(1),
        |x| x[0] * x[0] - 6.0 * x[0].cos(),
        |x| SubgradientSet::singleton(vec![2.0 * x[0] + 6.0 * x[0].sin()]),
    )
}

/// `x - y^2`, which has no stationary point.
pub fn no_stat_raw() -> FunctionObject {
    FunctionObject::from_rules(
        "x-y^2",
        DomainSpec::all_space(2),
        |x| x[0] - x[1] * x[1],
        |x| SubgradientSet::singleton(vec![1.0, -2.0 * x[1]]),
    )
}

fn audited_pert2(half_width: f64) -> Result<FunctionObject> {
    let region = BoxRegion::cube(1, -half_width, half_width)?;
    let f = pert2_raw().with_sample_region(region.clone())?;
    declare_invex_by_stationarity_audit(&f, Some(&Vector::zeros(1)), &region, CATALOG_AUDIT_DENSITY)
}

fn pert1() -> Result<FunctionObject> {
    let f = pert1_raw();
    let region = f.sample_region().clone();
    declare_invex_by_stationarity_audit(&f, Some(&Vector::zeros(2)), &region, CATALOG_AUDIT_DENSITY)
}

fn pert2() -> Result<FunctionObject> {
    audited_pert2(10.0)
}

fn sep_pert() -> Result<FunctionObject> {
    let p = audited_pert2(5.0)?;
    separable_sum(&[p.clone(), p])
}

fn no_stat() -> Result<FunctionObject> {
    let f = no_stat_raw();
    let region = f.sample_region().clone();
    declare_invex_by_stationarity_audit(&f, None, &region, CATALOG_AUDIT_DENSITY)
}

fn tangent_demo() -> Result<FunctionObject> {
    ratio_compose(&make_convex_atom(ConvexAtomSpec::Square)?, 1.0)
}

fn l1norm() -> Result<FunctionObject> {
    make_convex_atom(ConvexAtomSpec::Norm1 { dim: 2 })
}
