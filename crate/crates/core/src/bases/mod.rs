//! Single-qubit basis family and the n-qubit measurement bases built from it.
//!
//! A family member `a` is the pair `|+_a⟩ = u|0⟩ + v e^{iφ}|1⟩`,
//! `|−_a⟩ = v|0⟩ − u e^{iφ}|1⟩`. From a family of size m we build:
//!
//! * the computational basis,
//! * local bases `L_ab = { |β⟩_{n−b} ⊗ |±_a⟩^{⊗b} }` for `a ∈ 1..=m`, `b ∈ 1..=n`,
//! * entangled bases `E_a = { |β⟩_{n−j} ⊗ |+_a⟩ ⊗ |−_a⟩^{⊗j−1} } ∪ { |−_a⟩^{⊗n} }`.
//!
//! Outcome ordering (the index used by counts files):
//!
//! * `L_ab`: outcome `k = β·2^b + s`, where bit `i < b` of `s` is the sign on
//!   qubit `i` (`0` for `+`, `1` for `−`). This is exactly the computational
//!   readout after applying `U_a†` to qubits `0..b`.
//! * `E_a`: blocks `j = 1..=n` in order, `β` ascending inside each block, and
//!   `|−_a⟩^{⊗n}` last, so `(j, β)` sits at `Σ_{j'<j} 2^{n−j'} + β`.

mod circuit;

pub use circuit::{emit_circuit, entangled_readout_to_outcome, Circuit, Gate};

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::PureState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQubitBasis")]
pub struct QubitBasis {
    u: f64,
    v: f64,
    phi: f64,
}

#[derive(Deserialize)]
struct RawQubitBasis {
    u: f64,
    v: f64,
    phi: f64,
}

impl TryFrom<RawQubitBasis> for QubitBasis {
    type Error = Error;

    fn try_from(raw: RawQubitBasis) -> Result<Self> {
        make_qubit_basis(raw.u, raw.v, raw.phi)
    }
}

pub fn make_qubit_basis(u: f64, v: f64, phi: f64) -> Result<QubitBasis> {
    if !(u.is_finite() && v.is_finite() && phi.is_finite()) || u < 0.0 || v < 0.0 {
        return Err(Error::InvalidQubitBasis(format!(
            "u={u}, v={v}, phi={phi}: need finite u, v >= 0"
        )));
    }
    if ((u * u + v * v) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidQubitBasis(format!(
            "u² + v² = {} is not 1",
            u * u + v * v
        )));
    }
    if u * v == 0.0 {
        return Err(Error::InvalidQubitBasis(
            "u·v = 0 reproduces the computational basis".into(),
        ));
    }
    Ok(QubitBasis {
        u,
        v,
        phi: phi.rem_euclid(TAU),
    })
}

impl QubitBasis {
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `[⟨0|+⟩, ⟨1|+⟩]`
    pub fn plus(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.u, 0.0),
            Complex64::from_polar(self.v, self.phi),
        ]
    }

    /// `[⟨0|−⟩, ⟨1|−⟩]`
    pub fn minus(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.v, 0.0),
            -Complex64::from_polar(self.u, self.phi),
        ]
    }

    pub fn ket(&self, sign: Sign) -> [Complex64; 2] {
        match sign {
            Sign::Plus => self.plus(),
            Sign::Minus => self.minus(),
        }
    }

    /// Rows of `U†`, i.e. `[⟨+|, ⟨−|]` as conjugated kets.
    pub fn adjoint(&self) -> [[Complex64; 2]; 2] {
        let p = self.plus();
        let m = self.minus();
        [[p[0].conj(), p[1].conj()], [m[0].conj(), m[1].conj()]]
    }
}

/// An ordered set of single-qubit bases; member `a` is 1-based in [`BasisId`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<QubitBasis>", into = "Vec<QubitBasis>")]
pub struct Family(Vec<QubitBasis>);

impl TryFrom<Vec<QubitBasis>> for Family {
    type Error = Error;

    fn try_from(members: Vec<QubitBasis>) -> Result<Self> {
        Family::new(members)
    }
}

impl From<Family> for Vec<QubitBasis> {
    fn from(f: Family) -> Self {
        f.0
    }
}

impl Family {
    pub fn new(members: Vec<QubitBasis>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::FamilyTooSmall(members.len()));
        }
        Ok(Family(members))
    }

    /// Number of members, `m`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Member `a` (1-based).
    pub fn get(&self, a: usize) -> Option<&QubitBasis> {
        a.checked_sub(1).and_then(|i| self.0.get(i))
    }

    pub fn member(&self, a: usize) -> Result<&QubitBasis> {
        self.get(a)
            .ok_or_else(|| Error::OutOfRange(format!("family member {a} of {}", self.len())))
    }

    pub fn iter(&self) -> impl Iterator<Item = &QubitBasis> {
        self.0.iter()
    }
}

/// Balanced family with `u = v = 1/√2` and `φ_a = (a−1)·π/m`.
pub fn default_family(m: usize) -> Result<Family> {
    if m < 2 {
        return Err(Error::FamilyTooSmall(m));
    }
    let members = (0..m)
        .map(|i| make_qubit_basis(FRAC_1_SQRT_2, FRAC_1_SQRT_2, i as f64 * PI / m as f64))
        .collect::<Result<Vec<_>>>()?;
    Family::new(members)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum BasisId {
    Computational,
    Local { a: usize, b: usize },
    Entangled { a: usize },
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisId::Computational => f.write_str("computational"),
            BasisId::Local { a, b } => write!(f, "local(a={a}, b={b})"),
            BasisId::Entangled { a } => write!(f, "entangled(a={a})"),
        }
    }
}

impl BasisId {
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        let ok = match *self {
            BasisId::Computational => true,
            BasisId::Local { a, b } => (1..=m).contains(&a) && (1..=n).contains(&b),
            BasisId::Entangled { a } => (1..=m).contains(&a),
        };
        if ok && n >= 1 {
            Ok(())
        } else {
            Err(Error::InvalidBasisId { id: *self, n, m })
        }
    }

    pub fn family_index(&self) -> Option<usize> {
        match *self {
            BasisId::Computational => None,
            BasisId::Local { a, .. } | BasisId::Entangled { a } => Some(a),
        }
    }
}

/// Which family of bases a reconstruction measures besides the computational one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementMode {
    /// `m·n` local bases.
    Local,
    /// `m` entangled bases.
    Entangled,
}

impl std::str::FromStr for MeasurementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "local" | "separable" => Ok(Self::Local),
            "entangled" => Ok(Self::Entangled),
            other => Err(Error::InvalidConfig(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for MeasurementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Local => "local",
            Self::Entangled => "entangled",
        })
    }
}

/// All bases a reconstruction in `mode` needs, computational basis first.
pub fn required_bases(n: usize, m: usize, mode: MeasurementMode) -> Vec<BasisId> {
    let mut ids = vec![BasisId::Computational];
    match mode {
        MeasurementMode::Local => {
            for a in 1..=m {
                for b in 1..=n {
                    ids.push(BasisId::Local { a, b });
                }
            }
        }
        MeasurementMode::Entangled => ids.extend((1..=m).map(|a| BasisId::Entangled { a })),
    }
    ids
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    fn bit(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Equation label for one outcome: projector `|β⟩_{n−j} ⊗ |sign0⟩ ⊗ |tail⟩`
/// built from family member `a`. `tail` lists qubits `j−2` down to `0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeRole {
    pub j: usize,
    pub beta: usize,
    pub sign0: Sign,
    pub tail: Vec<Sign>,
    pub a: usize,
}

impl OutcomeRole {
    pub fn canonical(j: usize, beta: usize, a: usize) -> Self {
        OutcomeRole {
            j,
            beta,
            sign0: Sign::Plus,
            tail: vec![Sign::Minus; j.saturating_sub(1)],
            a,
        }
    }

    /// `+` on the pivot and `−` on every tail qubit.
    pub fn is_canonical(&self) -> bool {
        self.sign0 == Sign::Plus && self.tail.iter().all(|&s| s == Sign::Minus)
    }

    /// Sign pattern packed as the low `j` bits (pivot on bit `j−1`).
    pub fn pattern_bits(&self) -> usize {
        let mut bits = self.sign0.bit();
        for s in &self.tail {
            bits = (bits << 1) | s.bit();
        }
        bits
    }

    fn from_pattern(j: usize, beta: usize, bits: usize, a: usize) -> Self {
        let sign0 = Sign::from_bit((bits >> (j - 1)) & 1);
        let tail = (0..j - 1)
            .rev()
            .map(|q| Sign::from_bit((bits >> q) & 1))
            .collect();
        OutcomeRole {
            j,
            beta,
            sign0,
            tail,
            a,
        }
    }
}

/// Index of block `j` inside an entangled-basis outcome list.
pub fn entangled_offset(n: usize, j: usize) -> usize {
    (1..j).map(|jj| 1usize << (n - jj)).sum()
}

/// Outcome index of the canonical `(j, β)` projector inside `L_aj` or `E_a`.
pub fn canonical_outcome(id: BasisId, n: usize, j: usize, beta: usize) -> Option<usize> {
    match id {
        BasisId::Local { b, .. } if b == j => Some((beta << j) + (1 << (j - 1)) - 1),
        BasisId::Entangled { .. } => Some(entangled_offset(n, j) + beta),
        _ => None,
    }
}

pub fn outcome_role(id: BasisId, outcome: usize, n: usize) -> Option<OutcomeRole> {
    if n == 0 || outcome >= 1 << n {
        return None;
    }
    match id {
        BasisId::Computational => None,
        BasisId::Local { a, b } => {
            if b == 0 || b > n {
                return None;
            }
            let beta = outcome >> b;
            Some(OutcomeRole::from_pattern(
                b,
                beta,
                outcome & ((1 << b) - 1),
                a,
            ))
        }
        BasisId::Entangled { a } => {
            let mut offset = 0;
            for j in 1..=n {
                let block = 1usize << (n - j);
                if outcome < offset + block {
                    return Some(OutcomeRole::canonical(j, outcome - offset, a));
                }
                offset += block;
            }
            // The final outcome is |−_a⟩^{⊗n}.
            None
        }
    }
}

fn ket_state(k: [Complex64; 2]) -> PureState {
    PureState::normalized(k.to_vec()).expect("family kets are unit vectors")
}

fn computational_prefix(n_prefix: usize, beta: usize) -> Option<PureState> {
    (n_prefix > 0).then(|| PureState::basis(n_prefix, beta).expect("prefix in range"))
}

fn with_prefix(prefix: Option<PureState>, rest: PureState) -> PureState {
    match prefix {
        Some(p) => p.tensor(&rest),
        None => rest,
    }
}

/// Full statevector `|β⟩_{n−j} ⊗ |sign0⟩ ⊗ |tail⟩` for a role.
pub fn role_state(n: usize, role: &OutcomeRole, family: &Family) -> Result<PureState> {
    let q = family.member(role.a)?;
    if role.j == 0 || role.j > n || role.beta >= 1 << (n - role.j) || role.tail.len() + 1 != role.j
    {
        return Err(Error::OutOfRange(format!("role {role:?} for n={n}")));
    }
    let mut rest = ket_state(q.ket(role.sign0));
    for &s in &role.tail {
        rest = rest.tensor(&ket_state(q.ket(s)));
    }
    Ok(with_prefix(
        computational_prefix(n - role.j, role.beta),
        rest,
    ))
}

/// `|P^j_β⟩ = |β⟩_{n−j} ⊗ |+⟩ ⊗ |−⟩^{⊗j−1}` as a 2^n statevector.
pub fn projector(n: usize, j: usize, beta: usize, basis: &QubitBasis) -> Result<PureState> {
    if j == 0 || j > n || beta >= 1 << (n - j) {
        return Err(Error::OutOfRange(format!(
            "projector (j={j}, beta={beta}) for n={n}"
        )));
    }
    let mut rest = ket_state(basis.plus());
    for _ in 1..j {
        rest = rest.tensor(&ket_state(basis.minus()));
    }
    Ok(with_prefix(computational_prefix(n - j, beta), rest))
}

/// Every state of basis `id`, in outcome order.
pub fn basis_states(n: usize, id: BasisId, family: &Family) -> Result<Vec<PureState>> {
    id.validate(n, family.len())?;
    let dim = 1usize << n;
    match id {
        BasisId::Computational => (0..dim).map(|k| PureState::basis(n, k)).collect(),
        BasisId::Local { .. } => (0..dim)
            .map(|k| {
                let role = outcome_role(id, k, n).expect("local outcomes all carry roles");
                role_state(n, &role, family)
            })
            .collect(),
        BasisId::Entangled { a } => {
            let q = family.member(a)?;
            let mut out = Vec::with_capacity(dim);
            for j in 1..=n {
                for beta in 0..1 << (n - j) {
                    out.push(projector(n, j, beta, q)?);
                }
            }
            let minus = ket_state(q.minus());
            let mut last = minus.clone();
            for _ in 1..n {
                last = last.tensor(&minus);
            }
            out.push(last);
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn qubit_basis_examples() {
        let h = FRAC_1_SQRT_2;
        let q = make_qubit_basis(h, h, 0.0).unwrap();
        assert!(close(&q.plus(), &[c(h, 0.0), c(h, 0.0)]));
        assert!(close(&q.minus(), &[c(h, 0.0), c(-h, 0.0)]));
        let q = make_qubit_basis(h, h, FRAC_PI_2).unwrap();
        assert!(close(&q.plus(), &[c(h, 0.0), c(0.0, h)]));
        assert!(close(&q.minus(), &[c(h, 0.0), c(0.0, -h)]));
    }

    #[test]
    fn qubit_basis_errors() {
        assert!(make_qubit_basis(1.0, 0.0, 0.0).is_err());
        assert!(make_qubit_basis(0.0, 1.0, 0.3).is_err());
        assert!(make_qubit_basis(0.5, 0.5, 0.0).is_err());
        assert!(make_qubit_basis(-0.6, 0.8, 0.0).is_err());
        assert!(make_qubit_basis(0.6, 0.8, 7.0).is_ok());
    }

    #[test]
    fn default_family_phases() {
        let f = default_family(2).unwrap();
        assert_eq!(f.get(1).unwrap().phi(), 0.0);
        assert!((f.get(2).unwrap().phi() - FRAC_PI_2).abs() < 1e-15);
        let f = default_family(4).unwrap();
        let phis: Vec<f64> = f.iter().map(|q| q.phi()).collect();
        for (p, w) in phis.iter().zip([0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]) {
            assert!((p - w).abs() < 1e-15);
        }
        assert!(default_family(1).is_err());
        assert!(f.get(0).is_none() && f.get(5).is_none());
    }

    #[test]
    fn default_family_pairwise_determinants_nonzero() {
        for m in 2..=8 {
            let f = default_family(m).unwrap();
            let phis: Vec<f64> = f.iter().map(|q| q.phi()).collect();
            for i in 0..m {
                for k in i + 1..m {
                    let det = phis[i].cos() * phis[k].sin() - phis[i].sin() * phis[k].cos();
                    assert!(det.abs() > 1e-3, "m={m} pair ({i},{k}) det={det}");
                }
            }
            let det12 = phis[0].cos() * phis[1].sin() - phis[0].sin() * phis[1].cos();
            assert!((det12 - (PI / m as f64).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_examples() {
        let h = FRAC_1_SQRT_2;
        let q = make_qubit_basis(h, h, 0.0).unwrap();
        let p = projector(1, 1, 0, &q).unwrap();
        assert!(close(p.amps(), &[c(h, 0.0), c(h, 0.0)]));
        let p = projector(2, 1, 1, &q).unwrap();
        assert!(close(
            p.amps(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0), c(h, 0.0)]
        ));
        for beta in 0..4 {
            for beta2 in 0..4 {
                let a = projector(3, 1, beta, &q).unwrap();
                let b = projector(3, 1, beta2, &q).unwrap();
                let ip = a.inner(&b).unwrap().norm();
                let want = if beta == beta2 { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
        assert!(projector(2, 3, 0, &q).is_err());
        assert!(projector(2, 1, 2, &q).is_err());
    }

    #[test]
    fn two_qubit_basis_listings() {
        let family = default_family(2).unwrap();
        let q = *family.get(1).unwrap();
        let k = |s: [Complex64; 2]| PureState::normalized(s.to_vec()).unwrap();
        let k0 = PureState::basis(1, 0).unwrap();
        let k1 = PureState::basis(1, 1).unwrap();
        let (plus, minus) = (k(q.plus()), k(q.minus()));

        let comp = basis_states(2, BasisId::Computational, &family).unwrap();
        for (i, s) in comp.iter().enumerate() {
            assert_eq!(s, &PureState::basis(2, i).unwrap());
        }

        let local = basis_states(2, BasisId::Local { a: 1, b: 1 }, &family).unwrap();
        let want = [
            k0.tensor(&plus),
            k0.tensor(&minus),
            k1.tensor(&plus),
            k1.tensor(&minus),
        ];
        for (s, w) in local.iter().zip(&want) {
            assert!(close(s.amps(), w.amps()));
        }

        let ent = basis_states(2, BasisId::Entangled { a: 1 }, &family).unwrap();
        let want = [
            k0.tensor(&plus),
            k1.tensor(&plus),
            plus.tensor(&minus),
            minus.tensor(&minus),
        ];
        for (s, w) in ent.iter().zip(&want) {
            assert!(close(s.amps(), w.amps()));
        }

        assert!(basis_states(2, BasisId::Local { a: 3, b: 1 }, &family).is_err());
        assert!(basis_states(2, BasisId::Local { a: 1, b: 3 }, &family).is_err());
        assert!(basis_states(2, BasisId::Entangled { a: 0 }, &family).is_err());
    }

    #[test]
    fn outcome_role_examples() {
        let ent = BasisId::Entangled { a: 1 };
        let r = outcome_role(ent, 2, 2).unwrap();
        assert_eq!(
            r,
            OutcomeRole {
                j: 2,
                beta: 0,
                sign0: Sign::Plus,
                tail: vec![Sign::Minus],
                a: 1
            }
        );
        assert!(outcome_role(ent, 3, 2).is_none());

        let r = outcome_role(BasisId::Local { a: 1, b: 1 }, 3, 2).unwrap();
        assert_eq!((r.j, r.beta, r.sign0, r.tail.len()), (1, 1, Sign::Minus, 0));

        for k in 0..4 {
            assert!(outcome_role(BasisId::Computational, k, 2).is_none());
        }
        assert!(outcome_role(BasisId::Local { a: 1, b: 1 }, 4, 2).is_none());
    }

    #[test]
    fn canonical_outcomes_carry_canonical_roles() {
        for n in 1..=6 {
            for j in 1..=n {
                for beta in 0..1 << (n - j) {
                    for id in [BasisId::Local { a: 2, b: j }, BasisId::Entangled { a: 2 }] {
                        let k = canonical_outcome(id, n, j, beta).unwrap();
                        let role = outcome_role(id, k, n).unwrap();
                        assert_eq!(role, OutcomeRole::canonical(j, beta, 2));
                        assert!(role.is_canonical());
                        assert_eq!(role.pattern_bits(), (1 << (j - 1)) - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn entangled_roles_exhaust_basis() {
        for n in 1..=8 {
            let roles = (0..1usize << n)
                .filter(|&k| outcome_role(BasisId::Entangled { a: 1 }, k, n).is_some())
                .count();
            let per_level: usize = (1..=n).map(|j| 1usize << (n - j)).sum();
            assert_eq!(roles, per_level);
            assert_eq!(per_level + 1, 1 << n);
        }
    }

    #[test]
    fn required_bases_counts() {
        assert_eq!(required_bases(10, 2, MeasurementMode::Local).len(), 21);
        assert_eq!(required_bases(6, 3, MeasurementMode::Entangled).len(), 4);
    }

    #[test]
    fn basis_id_json_shape() {
        let id = BasisId::Local { a: 1, b: 2 };
        let text = serde_json::to_string(&id).unwrap();
        assert_eq!(text, r#"{"tag":"local","a":1,"b":2}"#);
        let back: BasisId = serde_json::from_str(&text).unwrap();
        assert_eq!(back, id);
        let fam: Family =
            serde_json::from_str(r#"[{"u":0.6,"v":0.8,"phi":0.0},{"u":0.8,"v":0.6,"phi":1.0}]"#)
                .unwrap();
        assert_eq!(fam.len(), 2);
        assert!(serde_json::from_str::<Family>(r#"[{"u":1.0,"v":0.0,"phi":0.0}]"#).is_err());
    }
}
