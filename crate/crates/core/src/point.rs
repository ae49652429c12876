//! δ and δ′ point interactions at the origin.
//!
//! The δ-interaction only scatters in the even sector and the δ′-interaction
//! only in the odd one, so the scattering matrix is `diag(s^α, 1)` or
//! `diag(1, s^β)` in the even/odd basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::linalg::{Mat2, C64, ONE};
use crate::paths::{
    gamma_from_endpoint, loop_winding, BoundaryLoop, BoundaryPath, ResonanceClass, Sector, Side, WindingReport,
};

/// Default sample count handed to the winding engine.
pub const WINDING_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionKind {
    Delta,
    DeltaPrime,
}

impl std::str::FromStr for InteractionKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "delta" => Ok(InteractionKind::Delta),
            "delta-prime" | "deltaprime" => Ok(InteractionKind::DeltaPrime),
            other => Err(format!("unknown interaction '{other}' (delta | delta-prime)")),
        }
    }
}

/// A point interaction; `param` is α (inverse length) for δ, β (length) for δ′.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointInteraction {
    pub kind: InteractionKind,
    pub param: Extended,
}

impl PointInteraction {
    pub fn delta(alpha: impl Into<Extended>) -> Self {
        Self {
            kind: InteractionKind::Delta,
            param: alpha.into(),
        }
    }

    pub fn delta_prime(beta: impl Into<Extended>) -> Self {
        Self {
            kind: InteractionKind::DeltaPrime,
            param: beta.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.param {
            Extended::NegInf => Err(Error::InvalidInput(
                "point interaction parameter must lie in R or be +inf".into(),
            )),
            Extended::Finite(v) if !v.is_finite() => Err(Error::InvalidInput(format!("non-finite parameter {v}"))),
            _ => Ok(()),
        }
    }

    /// The sector in which the interaction acts non-trivially.
    pub fn active_sector(&self) -> Sector {
        match self.kind {
            InteractionKind::Delta => Sector::Even,
            InteractionKind::DeltaPrime => Sector::Odd,
        }
    }

    /// Scalar scattering phase in the active sector at momentum `κ = √λ`.
    pub fn s_scalar(&self, kappa: Extended) -> C64 {
        let lambda = match kappa {
            Extended::Finite(k) => Extended::Finite(k * k),
            other => other,
        };
        match self.kind {
            InteractionKind::Delta => s_alpha(self.param, lambda),
            InteractionKind::DeltaPrime => s_beta(self.param, lambda),
        }
    }

    /// `S(κ)` in the even/odd basis.
    pub fn s_matrix(&self, kappa: Extended) -> Mat2 {
        let s = self.s_scalar(kappa);
        match self.kind {
            InteractionKind::Delta => Mat2::diag(s, ONE),
            InteractionKind::DeltaPrime => Mat2::diag(ONE, s),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            InteractionKind::Delta => format!("delta(alpha={})", self.param),
            InteractionKind::DeltaPrime => format!("delta'(beta={})", self.param),
        }
    }
}

/// `s^α(λ) = (2√λ − iα)/(2√λ + iα)`, continuous on `[0, ∞]`.
pub fn s_alpha(alpha: Extended, lambda: Extended) -> C64 {
    match (alpha, lambda) {
        (Extended::PosInf | Extended::NegInf, _) => -ONE,
        (Extended::Finite(0.0), _) => ONE,
        (Extended::Finite(_), Extended::PosInf) => ONE,
        (Extended::Finite(a), Extended::Finite(l)) => {
            let k2 = 2.0 * l.max(0.0).sqrt();
            C64::new(k2, -a) / C64::new(k2, a)
        }
        (Extended::Finite(_), Extended::NegInf) => -ONE,
    }
}

/// `s^β(λ) = (2 + iβ√λ)/(2 − iβ√λ)`; at `β = ∞` it is −1 on the whole closed half-line.
pub fn s_beta(beta: Extended, lambda: Extended) -> C64 {
    match (beta, lambda) {
        (Extended::PosInf | Extended::NegInf, _) => -ONE,
        (Extended::Finite(0.0), _) => ONE,
        (Extended::Finite(_), Extended::PosInf) => -ONE,
        (Extended::Finite(b), Extended::Finite(l)) => {
            let bk = b * l.max(0.0).sqrt();
            C64::new(2.0, bk) / C64::new(2.0, -bk)
        }
        (Extended::Finite(_), Extended::NegInf) => ONE,
    }
}

/// One eigenvalue for a negative parameter, none otherwise.
pub fn bound_state_count(pi: &PointInteraction) -> usize {
    match pi.param {
        Extended::Finite(v) if v < 0.0 => 1,
        _ => 0,
    }
}

/// Bound states of `pi` living in `sector`.
pub fn sector_bound_states(pi: &PointInteraction, sector: Sector) -> usize {
    if sector == Sector::Full || sector == pi.active_sector() {
        bound_state_count(pi)
    } else {
        0
    }
}

/// The loop `(Γ1, S, Γ3, 1)` built from the endpoint values `S(0)` and `S(∞)`.
pub fn build_loop(pi: &PointInteraction, sector: Sector) -> Result<BoundaryLoop> {
    pi.validate()?;
    if sector != Sector::Full && sector != pi.active_sector() {
        return Ok(BoundaryLoop::trivial());
    }
    let s0 = sector.project(&pi.s_matrix(Extended::Finite(0.0)));
    let s_inf = sector.project(&pi.s_matrix(Extended::PosInf));
    let p = *pi;
    let b2 = BoundaryPath::new(Side::B2, move |k| sector.project(&p.s_matrix(k)));
    BoundaryLoop::new([
        gamma_from_endpoint(s0, Side::B1)?,
        b2,
        gamma_from_endpoint(s_inf, Side::B3)?,
        BoundaryPath::constant(Side::B4, Mat2::IDENTITY),
    ])
}

pub fn verify_levinson(pi: &PointInteraction, sector: Sector) -> Result<WindingReport> {
    let lp = build_loop(pi, sector)?;
    let windings = loop_winding(&lp, WINDING_SAMPLES)?;
    let s0 = pi.s_matrix(Extended::Finite(0.0));
    Ok(WindingReport::new(
        format!("{} [{}]", pi.label(), sector),
        sector,
        windings,
        sector_bound_states(pi, sector),
        ResonanceClass::from_s0(&s0),
    ))
}
