use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::automata::{Alphabet, Moqfa};
use crate::error::{Error, Result};
use crate::opcore::{basis_vector, expm, inner, vec_norm, ComplexMatrix, Projector, RealMatrix};

use super::eta::{eta_vectors, prepare_symbol, tau_symbol, EtaMode};
use super::WitnessGrid;

const UNIT_TOL: f64 = 1e-10;
const PARALLEL_TOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-5;

/// The Grassmannian witness: `d = 2rs` balanced test states around the
/// rank-`r` coordinate projector `P_0` on `ℂ^n`.
#[derive(Clone, Debug)]
pub struct MoqfaWitnessBundle {
    pub automaton: Moqfa,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub d: usize,
    pub t: f64,
    pub test_states: Vec<Vec<C64>>,
    pub etas: Vec<Vec<i8>>,
    pub eta_mode: EtaMode,
}

/// R-type states `(|a⟩ + |r+b⟩)/√2` in lexicographic `(a, b)`, then I-type
/// states `(|a⟩ + i|r+b⟩)/√2`.
pub fn balanced_test_states(n: usize) -> Vec<Vec<C64>> {
    let (r, s) = (n / 2, n - n / 2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut states = Vec::with_capacity(2 * r * s);
    for phase in [C64::new(h, 0.0), C64::new(0.0, h)] {
        for a in 0..r {
            for b in 0..s {
                let mut v = vec![C64::new(0.0, 0.0); n];
                v[a] = C64::new(h, 0.0);
                v[r + b] = phase;
                states.push(v);
            }
        }
    }
    states
}

/// `K = [[0, X], [−X†, 0]]` for an `r × s` block `X`.
fn generator(n: usize, r: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(n, n);
    k.set_block(0, r, x);
    k.set_block(r, 0, &(-&x.adjoint()));
    k
}

/// `(X_η)_{a,b} = η^R_{a,b} − i·η^I_{a,b}`.
fn sign_block(r: usize, s: usize, eta: &[i8]) -> ComplexMatrix {
    ComplexMatrix::from_fn(r, s, |a, b| {
        C64::new(eta[a * s + b] as f64, -(eta[r * s + a * s + b] as f64))
    })
}

/// Orthonormal basis whose first vector is `x`, completed by Gram–Schmidt
/// over the standard basis.
fn complete_basis(x: &[C64]) -> ComplexMatrix {
    let n = x.len();
    let mut cols: Vec<Vec<C64>> = vec![x.to_vec()];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = basis_vector(n, k);
        // two passes keep the result orthogonal to machine precision
        for _ in 0..2 {
            for c in &cols {
                let p = inner(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm < PARALLEL_TOL {
            continue;
        }
        cols.push(v.iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// A unitary `V` with `V φ₀ = ψ`.
pub fn prepare_unitary(phi0: &[C64], psi: &[C64]) -> Result<ComplexMatrix> {
    if phi0.len() != psi.len() {
        return Err(Error::dims(phi0.len(), psi.len()));
    }
    for v in [phi0, psi] {
        let norm = vec_norm(v);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized(norm));
        }
    }
    Ok(&complete_basis(psi) * &complete_basis(phi0).adjoint())
}

/// `⟨ψ| e^{−εK} P_0 e^{εK} |ψ⟩`.
fn curve_value(k: &ComplexMatrix, eps: f64, p0: &Projector, psi: &[C64]) -> Result<f64> {
    let u = expm(&k.scale(&C64::new(eps, 0.0)))?;
    Ok(p0.operator().expectation(&u.mul_vec(psi)))
}

/// Central-difference Jacobian of `P ↦ (⟨ψ_j|P|ψ_j⟩)_j` at `P_0` along the
/// tangent directions generated by `X = E_ab` and then `X = i·E_ab`.
pub fn orbit_jacobian(n: usize) -> Result<RealMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("orbit Jacobian needs n >= 2, got {n}")));
    }
    let (r, s) = (n / 2, n - n / 2);
    let d = 2 * r * s;
    let p0 = Projector::coordinate(n, &(0..r).collect::<Vec<_>>())?;
    let states = balanced_test_states(n);
    let mut jac = RealMatrix::zeros(d, d);
    for m in 0..d {
        let (unit, idx) = if m < r * s {
            (C64::new(1.0, 0.0), m)
        } else {
            (C64::new(0.0, 1.0), m - r * s)
        };
        let mut x = ComplexMatrix::zeros(r, s);
        x[(idx / s, idx % s)] = unit;
        let k = generator(n, r, &x);
        for (j, psi) in states.iter().enumerate() {
            let plus = curve_value(&k, FD_STEP, &p0, psi)?;
            let minus = curve_value(&k, -FD_STEP, &p0, psi)?;
            jac[(j, m)] = (plus - minus) / (2.0 * FD_STEP);
        }
    }
    Ok(jac)
}

impl MoqfaWitnessBundle {
    pub fn build(n: usize, eta_mode: EtaMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("MO-1QFA witness needs n >= 2, got {n}")));
        }
        let (r, s) = (n / 2, n - n / 2);
        let d = 2 * r * s;
        let t = 1.0 / (4.0 * (n * n) as f64);
        let etas = eta_vectors(d, eta_mode)?;
        let test_states = balanced_test_states(n);
        let phi0 = basis_vector(n, 0);

        let mut symbols: Vec<String> = (1..=d).map(prepare_symbol).collect();
        symbols.extend(etas.iter().map(|e| tau_symbol(e)));
        let mut unitaries = test_states
            .iter()
            .map(|psi| prepare_unitary(&phi0, psi))
            .collect::<Result<Vec<_>>>()?;
        for eta in &etas {
            let k = generator(n, r, &sign_block(r, s, eta));
            unitaries.push(expm(&k.scale(&C64::new(t, 0.0)))?);
        }
        let p0 = Projector::coordinate(n, &(0..r).collect::<Vec<_>>())?;
        let automaton = Moqfa::new(Alphabet::new(symbols)?, phi0, unitaries, p0)?;
        log::info!("MO-1QFA witness (n={n}): d={d}, t={t:e}, {} tests", etas.len());
        Ok(Self {
            automaton,
            n,
            r,
            s,
            d,
            t,
            test_states,
            etas,
            eta_mode,
        })
    }

    /// `K_η` for a sign vector.
    pub fn generator(&self, eta: &[i8]) -> ComplexMatrix {
        generator(self.n, self.r, &sign_block(self.r, self.s, eta))
    }

    /// The second-order shift `(r − s)·t²` in the expansion of `f(p_j τ_η)`.
    pub fn second_order_shift(&self) -> f64 {
        (self.r as f64 - self.s as f64) * self.t * self.t
    }

    /// `1/(48 n³)`.
    pub fn remainder_bound(&self) -> f64 {
        1.0 / (48.0 * (self.n as f64).powi(3))
    }

    pub fn grid(&self) -> WitnessGrid {
        WitnessGrid::new(self.automaton.alphabet(), self.d, &self.etas)
    }

    pub fn meta(&self) -> Value {
        json!({
            "kind": "moqfa",
            "n": self.n,
            "r": self.r,
            "s": self.s,
            "d": self.d,
            "t": self.t,
            "eta_mode": self.eta_mode,
            "seed": self.eta_mode.seed(),
            "tests": self.etas.len(),
        })
    }
}

pub fn build_moqfa_witness(n: usize, eta_mode: EtaMode) -> Result<MoqfaWitnessBundle> {
    MoqfaWitnessBundle::build(n, eta_mode)
}
