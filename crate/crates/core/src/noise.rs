//! Single-qubit noise channels and the noisy two-variant CNOT construction.
//!
//! Each noisy CNOT is `L ∘ CNOT ∘ L` where `L` applies, on every qubit
//! independently, a depolarizing and an amplitude-damping channel. The second
//! variant realizes the same ideal gate as `(H⊗H)·CNOT(1→0)·(H⊗H)`; its
//! Hadamards are noiseless and sit outside the noise layers, so the damping
//! acts in the conjugated basis and the two realizations differ once the noise
//! is asymmetric between qubits.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelEnsemble, KrausChannel};
use crate::error::{arg_err, Error, Result};
use crate::linalg::gates::{cnot, hadamard, pauli_x, pauli_y, pauli_z};
use crate::linalg::{kron, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitNoise {
    pub depolarizing: f64,
    pub amplitude_damping: f64,
}

impl QubitNoise {
    pub const NONE: QubitNoise = QubitNoise { depolarizing: 0.0, amplitude_damping: 0.0 };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseOrder {
    #[default]
    DepolFirst,
    DampFirst,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoiseSpec", into = "RawNoiseSpec")]
pub struct NoiseSpec {
    qubits: Vec<QubitNoise>,
    order: NoiseOrder,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoiseSpec {
    qubits: Vec<QubitNoise>,
    #[serde(default)]
    noise_order: NoiseOrder,
}

impl TryFrom<RawNoiseSpec> for NoiseSpec {
    type Error = Error;
    fn try_from(raw: RawNoiseSpec) -> Result<Self> {
        Self::new(raw.qubits, raw.noise_order)
    }
}

impl From<NoiseSpec> for RawNoiseSpec {
    fn from(s: NoiseSpec) -> Self {
        RawNoiseSpec { qubits: s.qubits, noise_order: s.order }
    }
}

impl NoiseSpec {
    pub fn new(qubits: Vec<QubitNoise>, order: NoiseOrder) -> Result<Self> {
        if qubits.is_empty() {
            return Err(arg_err("noise spec needs at least one qubit"));
        }
        for (i, q) in qubits.iter().enumerate() {
            check_probability("depolarizing", q.depolarizing).map_err(|e| arg_err(format!("qubit {i}: {e}")))?;
            check_probability("amplitude_damping", q.amplitude_damping)
                .map_err(|e| arg_err(format!("qubit {i}: {e}")))?;
        }
        Ok(Self { qubits, order })
    }

    /// Asymmetric two-qubit defaults: qubit 0 (p = 0.01, γ = 0.05),
    /// qubit 1 (p = 0.03, γ = 0.3).
    pub fn table1() -> Self {
        Self {
            qubits: vec![
                QubitNoise { depolarizing: 0.01, amplitude_damping: 0.05 },
                QubitNoise { depolarizing: 0.03, amplitude_damping: 0.3 },
            ],
            order: NoiseOrder::DepolFirst,
        }
    }

    pub fn noiseless(n_qubits: usize) -> Self {
        Self { qubits: vec![QubitNoise::NONE; n_qubits.max(1)], order: NoiseOrder::DepolFirst }
    }

    pub fn qubits(&self) -> &[QubitNoise] {
        &self.qubits
    }

    pub fn order(&self) -> NoiseOrder {
        self.order
    }

    pub fn with_order(mut self, order: NoiseOrder) -> Self {
        self.order = order;
        self
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::table1()
    }
}

fn check_probability(name: &str, x: f64) -> std::result::Result<(), String> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(format!("{name} parameter {x} outside [0, 1]"))
    }
}

/// `{√(1−p) I, √(p/3) X, √(p/3) Y, √(p/3) Z}`
pub fn depolarizing_kraus(p: f64) -> Result<KrausChannel> {
    check_probability("depolarizing", p).map_err(arg_err)?;
    let a = (p / 3.0).sqrt();
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
        pauli_x().scale_real(a),
        pauli_y().scale_real(a),
        pauli_z().scale_real(a),
    ])
}

/// `{[[1, 0], [0, √(1−γ)]], [[0, √γ], [0, 0]]}`
pub fn amplitude_damping_kraus(gamma: f64) -> Result<KrausChannel> {
    check_probability("amplitude_damping", gamma).map_err(arg_err)?;
    KrausChannel::new(vec![
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]])?,
        ComplexMatrix::from_real(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]])?,
    ])
}

pub fn single_qubit_noise(q: QubitNoise, order: NoiseOrder) -> Result<KrausChannel> {
    let dep = depolarizing_kraus(q.depolarizing)?;
    let damp = amplitude_damping_kraus(q.amplitude_damping)?;
    match order {
        NoiseOrder::DepolFirst => dep.compose(&damp),
        NoiseOrder::DampFirst => damp.compose(&dep),
    }
}

/// Independent per-qubit noise tensored across all qubits (qubit 0 leftmost).
pub fn noise_layer(spec: &NoiseSpec) -> Result<KrausChannel> {
    let mut layer: Option<KrausChannel> = None;
    for &q in spec.qubits() {
        let ch = single_qubit_noise(q, spec.order())?;
        layer = Some(match layer {
            None => ch,
            Some(acc) => acc.tensor(&ch),
        });
    }
    Ok(layer.expect("spec has at least one qubit"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateVariant {
    /// CNOT with control qubit 0 and target qubit 1.
    Direct,
    /// Reversed CNOT (control 1, target 0) between Hadamard layers.
    HadamardConjugated,
}

impl GateVariant {
    pub const ALL: [GateVariant; 2] = [GateVariant::Direct, GateVariant::HadamardConjugated];
}

pub fn ideal_cnot_channel() -> KrausChannel {
    KrausChannel::unitary(cnot(0, 1)).expect("4x4 unitary")
}

pub fn build_cnot_variant(variant: GateVariant, spec: &NoiseSpec) -> Result<KrausChannel> {
    if spec.qubits().len() != 2 {
        return Err(arg_err(format!("CNOT variants need a 2-qubit noise spec, got {}", spec.qubits().len())));
    }
    let layer = noise_layer(spec)?;
    match variant {
        GateVariant::Direct => layer.then_unitary(&cnot(0, 1))?.compose(&layer),
        GateVariant::HadamardConjugated => {
            let hh = kron(&hadamard(), &hadamard());
            KrausChannel::unitary(hh.clone())?
                .compose(&layer)?
                .then_unitary(&cnot(1, 0))?
                .compose(&layer)?
                .then_unitary(&hh)
                .map(|c| c.canonicalize())
        }
    }
}

/// Both noisy realizations, built once and mixed on demand.
#[derive(Clone, Debug)]
pub struct CnotVariants {
    pub direct: KrausChannel,
    pub hadamard_conjugated: KrausChannel,
}

impl CnotVariants {
    pub fn build(spec: &NoiseSpec) -> Result<Self> {
        Ok(Self {
            direct: build_cnot_variant(GateVariant::Direct, spec)?,
            hadamard_conjugated: build_cnot_variant(GateVariant::HadamardConjugated, spec)?,
        })
    }

    pub fn get(&self, variant: GateVariant) -> &KrausChannel {
        match variant {
            GateVariant::Direct => &self.direct,
            GateVariant::HadamardConjugated => &self.hadamard_conjugated,
        }
    }

    /// `w1·Direct + (1 − w1)·HadamardConjugated`
    pub fn mixture(&self, w1: f64) -> Result<ChannelEnsemble> {
        if !(0.0..=1.0).contains(&w1) {
            return Err(arg_err(format!("mixing weight {w1} outside [0, 1]")));
        }
        ChannelEnsemble::new(vec![(w1, self.direct.clone()), (1.0 - w1, self.hadamard_conjugated.clone())])
    }
}

pub fn mixed_cnot_channel(w1: f64, spec: &NoiseSpec) -> Result<ChannelEnsemble> {
    if !(0.0..=1.0).contains(&w1) {
        return Err(arg_err(format!("mixing weight {w1} outside [0, 1]")));
    }
    CnotVariants::build(spec)?.mixture(w1)
}
