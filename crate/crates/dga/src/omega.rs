//! The chain scenario `D₀ – D₁ – ⋯ – D₆ – D₇` with a genus-1 end component:
//! the Chen-closed element `Ω` and the classes `[N(Ω)]`, `[M(Ω)]`, `[L(Ω)]`.

use std::collections::BTreeMap;

use nearby_core::graph::build;
use nearby_core::{Alphabet, MarkedGraph, Scalar};
use serde::Serialize;

use crate::bar::{apply_m_bar, apply_n_bar, extend_closed_family, is_chen_closed, BarTensor, Primitives, Reducer};
use crate::element::{make_theta, Coord, DgaElement};
use crate::model::{comb, Generator, Model, SurfaceModel, DLOG};
use crate::DgaError;

/// Number of rational components between the disk and the genus-1 end.
pub const CHAIN_INNER: usize = 6;
/// Value printed for `[L(Ω)]` in the source computation.
pub const PRINTED_L: &str = "-32/156*rho";

pub struct OmegaScenario {
    pub model: Model,
    pub rho: Scalar,
    /// Index of the genus-1 end component.
    pub end: usize,
    pub omega: DgaElement,
    pub omegabar: DgaElement,
    /// `μ + η₆ + ⋯ + η₀ + Σ ρ_kl Θ_kl`, a primitive of `−ω∧ω̄`.
    pub psi: DgaElement,
    pub primitives: Primitives,
}

impl OmegaScenario {
    /// Builds the chain with residue symbol `rho`. Edge `i` joins `D_i` and
    /// `D_{i+1}` with `ξ = 0` on `D_i`; every `ρ_{i,i+1}` equals `−ρ`.
    pub fn chain(rho_symbol: &str) -> Result<OmegaScenario, DgaError> {
        let alpha = Alphabet::new([rho_symbol]).map_err(|e| DgaError::Scenario(e.to_string()))?;
        let rho = alpha.symbol(rho_symbol).map_err(|e| DgaError::Scenario(e.to_string()))?;
        OmegaScenario::with_rho(rho)
    }

    /// The same chain with an arbitrary residue scalar.
    pub fn with_rho(rho: Scalar) -> Result<OmegaScenario, DgaError> {
        let end = CHAIN_INNER + 1;
        let mut vertices = vec![build::disk(0, 0)];
        vertices.extend((1..end).map(|i| build::compact(i, 0)));
        vertices.push(build::compact(end, 1));
        let pairs: Vec<(usize, usize)> = (0..end).map(|i| (i, i + 1)).collect();
        let graph = MarkedGraph { vertices, edges: build::edges(&pairs) };

        let mut surfaces = vec![SurfaceModel::disk(0, 0, Scalar::one())];
        for i in 1..end {
            let mut s = SurfaceModel::compact(i, &[i - 1, i]);
            let res = BTreeMap::from([(i - 1, rho.clone()), (i, -&rho)]);
            s.declare(Generator::form("eta", 1, 1, res))?;
            surfaces.push(s);
        }
        let mut s = SurfaceModel::compact(end, &[end - 1]);
        s.declare(Generator::two_form("vol", 0, 1))?;
        s.declare(Generator::form("omega", 0, 1, BTreeMap::new()))?;
        s.declare(Generator::form("omegabar", 0, 0, BTreeMap::new()))?;
        let mu = Generator::form("mu", 1, 1, BTreeMap::from([(end - 1, rho.clone())]))
            .with_differential(comb(&[("vol", Scalar::from_int(-1))]));
        s.declare(mu)?;
        s.declare_wedge("omega", "omegabar", comb(&[("vol", Scalar::one())]))?;
        s.declare_wedge("omega", "mu", comb(&[]))?;
        surfaces.push(s);
        let model = Model::new(graph, surfaces)?;

        let gen = |c: usize, n: &str, x: Scalar| DgaElement::generator(&model, c, n, x);
        let omega = gen(end, "omega", Scalar::one())?;
        let omegabar = gen(end, "omegabar", Scalar::one())?;
        let rho_kl = -&rho;
        let mut psi = gen(end, "mu", Scalar::one())?;
        for i in 1..end {
            psi = psi.plus(&gen(i, "eta", Scalar::one())?);
        }
        psi = psi.plus(&gen(0, DLOG, rho_kl.clone())?);
        for e in 0..end {
            psi = psi.plus(&make_theta(e).scale(&rho_kl));
        }
        let mut primitives = Primitives::new();
        primitives.declare(&model, psi.clone())?;
        Ok(OmegaScenario { model, rho, end, omega, omegabar, psi, primitives })
    }

    /// `Ω` from the closed family `(ω, ω, ω̄)`.
    pub fn omega_element(&self) -> Result<BarTensor, DgaError> {
        let fam = [self.omega.clone(), self.omega.clone(), self.omegabar.clone()];
        extend_closed_family(&self.model, &fam, &self.primitives)
    }

    /// `ω⊗ω⊗ω̄ + ω⊗ψ` written out directly.
    pub fn omega_displayed(&self) -> BarTensor {
        BarTensor::pure(&[&self.omega, &self.omega, &self.omegabar], Scalar::one())
            .plus(&BarTensor::pure(&[&self.omega, &self.psi], Scalar::one()))
    }

    fn omega_coord(&self) -> Coord {
        Coord::Surface { component: self.end, name: "omega".into() }
    }

    /// The scalar `c` with `t = c·[ω]`, if `t` has that shape.
    pub fn omega_multiple(&self, t: &BarTensor) -> Option<Scalar> {
        let c = t.coefficient(&self.omega_coord());
        (BarTensor::pure(&[&self.omega], c.clone()) == *t).then_some(c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaReport {
    pub d: u64,
    pub mk: u64,
    pub omega_matches_display: bool,
    pub chen_closed: bool,
    pub omega_w_level: Option<i32>,
    pub omega_f_level: Option<i32>,
    /// Coefficients of `ω` in the normal forms.
    pub n_omega: Scalar,
    pub m_omega: Scalar,
    pub l_omega: Scalar,
    pub l_nonzero: bool,
    pub printed_l: String,
    pub printed_matches: bool,
    pub note: String,
}

/// `[L(Ω)] = (1/d)[N(Ω)] − (1/mk)[M(Ω)]` with `M` at branch 0.
pub fn scenario_omega(sc: &OmegaScenario, d: u64, mk: u64) -> Result<OmegaReport, DgaError> {
    let m = &sc.model;
    let omega = sc.omega_element()?;
    let chen_closed = is_chen_closed(m, &omega)?;
    let (w, f) = crate::bar::bar_filtrations(m, &omega)?;
    let mut red = Reducer::new(m)?;
    let n = red.reduce(&apply_n_bar(m, &omega)?)?;
    let mm = red.reduce(&apply_m_bar(m, &omega, 0)?)?;
    let n_omega = sc
        .omega_multiple(&n)
        .ok_or_else(|| DgaError::Inconsistent(format!("[N(Ω)] is not a multiple of ω: {n}")))?;
    let m_omega = sc
        .omega_multiple(&mm)
        .ok_or_else(|| DgaError::Inconsistent(format!("[M(Ω)] is not a multiple of ω: {mm}")))?;
    let l_omega = &n_omega.scale(&ratio(1, d)) - &m_omega.scale(&ratio(1, mk));
    let alpha = Alphabet::new(sc.rho.symbols()).map_err(|e| DgaError::Scenario(e.to_string()))?;
    let printed = alpha.parse(&PRINTED_L.replace("rho", &sc.rho.to_string())).ok();
    let printed_matches = printed.as_ref() == Some(&l_omega);
    let note = format!(
        "[L(Ω)] = (1/{d})·({n_omega}) − (1/{mk})·({m_omega}) = {l_omega}; the printed value {PRINTED_L} \
         would need [M(Ω)] = 6ρω"
    );
    Ok(OmegaReport {
        d,
        mk,
        omega_matches_display: omega == sc.omega_displayed(),
        chen_closed,
        omega_w_level: w,
        omega_f_level: f,
        l_nonzero: !l_omega.is_zero(),
        n_omega,
        m_omega,
        l_omega,
        printed_l: PRINTED_L.to_string(),
        printed_matches,
        note,
    })
}

fn ratio(n: i64, d: u64) -> num_rational::BigRational {
    num_rational::BigRational::new(n.into(), (d as i64).into())
}
