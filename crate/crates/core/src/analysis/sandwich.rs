use serde::{Deserialize, Serialize};

use crate::barriers::{Barrier, Role, VerificationReport};
use crate::error::{Error, Result};
use crate::solver::DiscreteSolution;

/// A barrier together with the report that certified it.
#[derive(Clone, Copy)]
pub struct Certified<'a> {
    pub barrier: &'a dyn Barrier,
    pub report: &'a VerificationReport,
}

impl<'a> Certified<'a> {
    pub fn new(barrier: &'a dyn Barrier, report: &'a VerificationReport) -> Self {
        Certified { barrier, report }
    }

    fn check(&self, role: Role) -> Result<()> {
        if self.report.role != role || self.barrier.role() != role {
            return Err(Error::Uncertified(format!("expected a {role:?} barrier")));
        }
        if !self.report.passed {
            return Err(Error::Uncertified(format!(
                "verification failed (min H = {:.6}, max H = {:.6})",
                self.report.min_h, self.report.max_h
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub h: f64,
    /// `max (W_sub - u)^+ / h` over nodes.
    pub sub_violation: f64,
    /// `max (u - W_super)^+ / h` over nodes, when a super-barrier is given.
    pub super_violation: Option<f64>,
    /// Largest of the two, the constant `C` in `u >= W_sub - C h`.
    pub normalized_violation: f64,
    pub nodes_checked: usize,
    pub worst_point: Option<[f64; 2]>,
}

/// Checks `W_sub - C h <= u` (and `u <= W_super + C h`) at every grid node
/// where the barriers are defined and reports the smallest such `C`.
pub fn sandwich_check(sol: &DiscreteSolution, sub: Certified<'_>, sup: Option<Certified<'_>>) -> Result<SandwichReport> {
    sub.check(Role::Sub)?;
    if let Some(s) = &sup {
        s.check(Role::Super)?;
    }
    let g = &sol.grid;
    let h = g.h;
    let mut sub_v: f64 = 0.0;
    let mut sup_v: f64 = 0.0;
    let mut worst: Option<[f64; 2]> = None;
    let mut worst_val = 0.0;
    let mut checked = 0;
    for (k, x) in g.coords.iter().enumerate() {
        let p = g.point(k);
        let u = sol.values[k];
        let Ok(ws) = sub.barrier.value(&p) else { continue };
        let mut v = (ws - u).max(0.0) / h;
        sub_v = sub_v.max(v);
        if let Some(s) = &sup {
            let Ok(wp) = s.barrier.value(&p) else { continue };
            let vs = (u - wp).max(0.0) / h;
            sup_v = sup_v.max(vs);
            v = v.max(vs);
        }
        checked += 1;
        if v > worst_val {
            worst_val = v;
            worst = Some(*x);
        }
    }
    if checked == 0 {
        return Err(Error::Uncertified("barrier undefined at every node".into()));
    }
    let super_violation = sup.map(|_| sup_v);
    Ok(SandwichReport {
        h,
        sub_violation: sub_v,
        super_violation,
        normalized_violation: sub_v.max(sup_v),
        nodes_checked: checked,
        worst_point: worst,
    })
}
