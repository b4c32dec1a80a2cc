//! Jones-calculus model of the polarization optics: the down-conversion pair
//! source, wave-plate analyzers, projector sets, and the ideal fusion at the
//! polarizing beam splitter.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::ProcessChi;
use crate::qstate::{
    pauli, symmetric_rank, tensor_vec, ComplexMatrix, PauliIndex, PureState, C64, ONE, ZERO,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlateKind {
    Half,
    Quarter,
}

/// Wave plate with its fast axis at `angle_rad` from horizontal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePlate {
    pub kind: PlateKind,
    pub angle_rad: f64,
}

impl WavePlate {
    pub fn half(angle_rad: f64) -> Self {
        Self {
            kind: PlateKind::Half,
            angle_rad,
        }
    }

    pub fn quarter(angle_rad: f64) -> Self {
        Self {
            kind: PlateKind::Quarter,
            angle_rad,
        }
    }
}

fn rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real_rows([[c, -s], [s, c]])
}

/// Jones matrix of a wave plate.
///
/// `HWP(θ) = [[cos2θ, sin2θ], [sin2θ, -cos2θ]]` and
/// `QWP(θ) = R(θ)·diag(1, i)·R(-θ)` with `R` the counter-clockwise rotation.
pub fn waveplate_jones(wp: &WavePlate) -> ComplexMatrix {
    let theta = wp.angle_rad;
    match wp.kind {
        PlateKind::Half => {
            let (s, c) = (2.0 * theta).sin_cos();
            ComplexMatrix::from_real_rows([[c, s], [s, -c]])
        }
        PlateKind::Quarter => {
            let retarder = ComplexMatrix::from_diagonal(&[ONE, C64::new(0.0, 1.0)]);
            rotation(theta).matmul(&retarder).matmul(&rotation(-theta))
        }
    }
}

/// Polarizing beam splitter output port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    H,
    V,
}

/// Per-photon projection basis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    H,
    V,
    P,
    M,
    R,
    L,
}

impl BasisLabel {
    pub const MINIMAL: [Self; 4] = [Self::H, Self::V, Self::P, Self::R];
    pub const OVERCOMPLETE: [Self; 6] = [Self::H, Self::V, Self::P, Self::M, Self::R, Self::L];

    pub fn ket(self) -> [C64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Self::H => [ONE, ZERO],
            Self::V => [ZERO, ONE],
            Self::P => [C64::new(s, 0.0), C64::new(s, 0.0)],
            Self::M => [C64::new(s, 0.0), C64::new(-s, 0.0)],
            Self::R => [C64::new(s, 0.0), C64::new(0.0, s)],
            Self::L => [C64::new(s, 0.0), C64::new(0.0, -s)],
        }
    }

    /// Analyzer basis this label belongs to (one wave-plate configuration).
    pub fn basis(self) -> PauliIndex {
        match self {
            Self::H | Self::V => PauliIndex::Z,
            Self::P | Self::M => PauliIndex::X,
            Self::R | Self::L => PauliIndex::Y,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::H => 'H',
            Self::V => 'V',
            Self::P => 'P',
            Self::M => 'M',
            Self::R => 'R',
            Self::L => 'L',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        Ok(match c {
            'H' => Self::H,
            'V' => Self::V,
            'P' => Self::P,
            'M' => Self::M,
            'R' => Self::R,
            'L' => Self::L,
            other => {
                return Err(Error::InvalidSetting(format!("unknown basis label {other:?}")))
            }
        })
    }
}

/// Wave-plate stack in front of a beam-splitter port; light meets the plates
/// in list order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analyzer {
    pub plates: Vec<WavePlate>,
    pub port: Port,
}

impl Analyzer {
    /// `|π> = J†|port>` where `J` is the stack's total Jones matrix.
    pub fn ket(&self) -> [C64; 2] {
        let total = self
            .plates
            .iter()
            .fold(ComplexMatrix::identity(2), |acc, wp| waveplate_jones(wp).matmul(&acc));
        let port = match self.port {
            Port::H => [ONE, ZERO],
            Port::V => [ZERO, ONE],
        };
        let v = total.adjoint().apply(&port);
        [v[0], v[1]]
    }
}

/// One measurement configuration: an entry per photon, either all basis
/// labels or all wave-plate analyzers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementSetting {
    Labels(#[serde(with = "label_string")] Vec<BasisLabel>),
    Analyzers(Vec<Analyzer>),
}

mod label_string {
    use super::BasisLabel;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(labels: &[BasisLabel], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&labels.iter().map(|l| l.as_char()).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BasisLabel>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| BasisLabel::from_char(c).map_err(D::Error::custom))
            .collect()
    }
}

impl MeasurementSetting {
    pub fn labels(text: &str) -> Result<Self> {
        Ok(Self::Labels(
            text.chars().map(BasisLabel::from_char).collect::<Result<_>>()?,
        ))
    }

    pub fn n_photons(&self) -> usize {
        match self {
            Self::Labels(l) => l.len(),
            Self::Analyzers(a) => a.len(),
        }
    }

    /// Per-photon analyzer kets.
    pub fn kets(&self) -> Vec<[C64; 2]> {
        match self {
            Self::Labels(l) => l.iter().map(|b| b.ket()).collect(),
            Self::Analyzers(a) => a.iter().map(Analyzer::ket).collect(),
        }
    }

    /// The product ket `⊗_k |π_k>`.
    pub fn ket(&self) -> Vec<C64> {
        self.kets()
            .iter()
            .fold(vec![ONE], |acc, k| tensor_vec(&acc, k))
    }
}

/// Rank-1 projector `⊗_k |π_k><π_k|` for a setting covering all `n_qubits` photons.
pub fn projector_from_setting(s: &MeasurementSetting, n_qubits: usize) -> Result<ComplexMatrix> {
    if s.n_photons() != n_qubits || n_qubits == 0 {
        return Err(Error::InvalidSetting(format!(
            "setting covers {} photons, expected {n_qubits}",
            s.n_photons()
        )));
    }
    if let MeasurementSetting::Analyzers(a) = s {
        if a.iter().flat_map(|x| &x.plates).any(|p| !p.angle_rad.is_finite()) {
            return Err(Error::InvalidSetting("non-finite wave-plate angle".into()));
        }
    }
    Ok(ComplexMatrix::projector(&s.ket()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `4^n` settings from `{H, V, P, R}`.
    Minimal,
    /// `6^n` settings from `{H, V, P, M, R, L}`.
    Overcomplete,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(Self::Minimal),
            "overcomplete" => Ok(Self::Overcomplete),
            other => Err(Error::InvalidArgument(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Ordered list of measurement settings over `n_qubits` photons.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectorSet {
    n_qubits: usize,
    complete: bool,
    settings: Vec<MeasurementSetting>,
}

#[derive(Deserialize)]
struct ProjectorSetJson {
    n_qubits: usize,
    settings: Vec<MeasurementSetting>,
}

impl<'de> Deserialize<'de> for ProjectorSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ProjectorSetJson::deserialize(d)?;
        ProjectorSet::new(raw.n_qubits, raw.settings).map_err(serde::de::Error::custom)
    }
}

impl ProjectorSet {
    /// Validates every setting and computes the completeness flag.
    pub fn new(n_qubits: usize, settings: Vec<MeasurementSetting>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("projector set needs n ≥ 1".into()));
        }
        if settings.is_empty() {
            return Err(Error::InvalidArgument("projector set has no settings".into()));
        }
        for s in &settings {
            projector_from_setting(s, n_qubits)?;
        }
        let mut set = Self {
            n_qubits,
            complete: false,
            settings,
        };
        set.complete = set.operator_rank() == set.required_rank();
        Ok(set)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }

    pub fn projector(&self, index: usize) -> ComplexMatrix {
        projector_from_setting(&self.settings[index], self.n_qubits).expect("validated")
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|i| self.projector(i)).collect()
    }

    pub fn required_rank(&self) -> usize {
        1 << (2 * self.n_qubits)
    }

    /// Pauli coordinates `Tr(Π_s P_k)` of every projector, one row per setting.
    ///
    /// Product projectors factor into per-photon Bloch components, so the cost
    /// is O(settings · 4ⁿ · n) with no dense traces.
    pub fn pauli_design(&self) -> DMatrix<f64> {
        let n = self.n_qubits;
        let cols = self.required_rank();
        let mut design = DMatrix::zeros(self.len(), cols);
        for (s, setting) in self.settings.iter().enumerate() {
            let bloch: Vec<[f64; 4]> = setting
                .kets()
                .iter()
                .map(|k| {
                    let rho = ComplexMatrix::projector(k);
                    std::array::from_fn(|p| {
                        rho.trace_product(&pauli(PauliIndex::new(p as u8).unwrap())).re
                    })
                })
                .collect();
            for k in 0..cols {
                let mut value = 1.0;
                for (q, b) in bloch.iter().enumerate() {
                    value *= b[(k >> (2 * (n - 1 - q))) & 3];
                }
                design[(s, k)] = value;
            }
        }
        design
    }

    /// Rank of the Gram matrix `Tr(Π_s Π_t)`, computed through the frame operator.
    pub fn operator_rank(&self) -> usize {
        let design = self.pauli_design();
        let frame = design.transpose() * &design;
        symmetric_rank(&frame, 1e-10)
    }

    /// Groups settings that share one wave-plate configuration (the same
    /// analyzer basis on every photon); only basis-label settings are grouped.
    pub fn configuration_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(Vec<PauliIndex>, Vec<usize>)> = Vec::new();
        for (i, s) in self.settings.iter().enumerate() {
            let key: Vec<PauliIndex> = match s {
                MeasurementSetting::Labels(l) => l.iter().map(|b| b.basis()).collect(),
                MeasurementSetting::Analyzers(_) => {
                    groups.push((Vec::new(), vec![i]));
                    continue;
                }
            };
            match groups.iter_mut().find(|(k, _)| !k.is_empty() && *k == key) {
                Some((_, members)) => members.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }
}

pub fn standard_projector_set(n_qubits: usize, scheme: Scheme) -> Result<ProjectorSet> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("projector set needs n ≥ 1".into()));
    }
    let alphabet: &[BasisLabel] = match scheme {
        Scheme::Minimal => &BasisLabel::MINIMAL,
        Scheme::Overcomplete => &BasisLabel::OVERCOMPLETE,
    };
    let base = alphabet.len();
    let total = base.pow(n_qubits as u32);
    let settings = (0..total)
        .map(|mut idx| {
            let mut labels = vec![BasisLabel::H; n_qubits];
            for slot in labels.iter_mut().rev() {
                *slot = alphabet[idx % base];
                idx /= base;
            }
            MeasurementSetting::Labels(labels)
        })
        .collect();
    ProjectorSet::new(n_qubits, settings)
}

/// `(|hv> + e^{iφ}|vh>)/√2`
pub fn pair_state(phi: f64) -> PureState {
    let s = FRAC_1_SQRT_2;
    PureState::new(vec![
        ZERO,
        C64::new(s, 0.0),
        C64::from_polar(s, phi),
        ZERO,
    ])
    .expect("unit norm")
}

/// Projector onto `span{|hh>, |vv>}`: the ideal polarizing-beam-splitter fusion.
pub fn ideal_fusion() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[ONE, ZERO, ZERO, ONE])
}

/// GHZ state produced by fusing `n/2` ideal `ψ⁺` pairs:
/// `(|hv vh hv …> + |vh hv vh …>)/√2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "GHZ photon number must be even and ≥ 2, got {n}"
        )));
    }
    // photon k (0-based) is h in the first term iff k mod 4 ∈ {0, 3}
    let first: usize = (0..n)
        .filter(|k| k % 4 == 1 || k % 4 == 2)
        .map(|k| 1usize << (n - 1 - k))
        .sum();
    let second = !first & ((1usize << n) - 1);
    let mut amplitudes = vec![ZERO; 1 << n];
    amplitudes[first] = C64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[second] = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new(amplitudes)
}

/// χ of the ideal fusion: `w w†` with `w` equal to 1/2 at Pauli pairs (0,0) and (3,3).
pub fn ideal_chi() -> ProcessChi {
    let mut m = ComplexMatrix::zeros(16);
    for a in [0, 15] {
        for b in [0, 15] {
            m[(a, b)] = C64::new(0.25, 0.0);
        }
    }
    ProcessChi::new(m).expect("ideal chi is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{eig_hermitian, fidelity_with_pure, pauli_pair, tensor};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    /// `|<a|b>|` equals 1 for unit vectors equal up to global phase.
    fn same_ray(a: &[C64], b: &[C64]) -> bool {
        let overlap: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        (overlap.norm() - 1.0).abs() < 1e-12
    }

    #[test]
    fn pair_state_phases() {
        let s = FRAC_1_SQRT_2;
        let plus = pair_state(0.0);
        assert_eq!(
            plus.amplitudes(),
            &[ZERO, C64::new(s, 0.0), C64::new(s, 0.0), ZERO]
        );
        let minus = pair_state(PI);
        assert!(close(minus.amplitudes()[2], C64::new(-s, 0.0)));
        let f = fidelity_with_pure(&pair_state(FRAC_PI_2).density(), &plus).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ghz_examples() {
        assert_eq!(ghz_state(2).unwrap(), pair_state(0.0));
        let g4 = ghz_state(4).unwrap();
        let nonzero: Vec<usize> = (0..16).filter(|&i| g4.amplitudes()[i] != ZERO).collect();
        assert_eq!(nonzero, vec![0b0110, 0b1001]);
        let g6 = ghz_state(6).unwrap();
        let nonzero: Vec<usize> = (0..64).filter(|&i| g6.amplitudes()[i] != ZERO).collect();
        // |hvvhhv> and |vhhvvh>
        assert_eq!(nonzero, vec![0b011001, 0b100110]);
        assert!(ghz_state(3).is_err());
        assert!(ghz_state(0).is_err());
    }

    #[test]
    fn ghz6_matches_brute_force_fusion() {
        let pair = pair_state(0.0);
        let three = pair.tensor(&pair).tensor(&pair);
        let i2 = ComplexMatrix::identity(2);
        let f = ideal_fusion();
        let op = tensor(&tensor(&tensor(&i2, &f), &f), &i2);
        let fused = PureState::normalized(op.apply(three.amplitudes())).unwrap();
        assert!(same_ray(fused.amplitudes(), ghz_state(6).unwrap().amplitudes()));
    }

    #[test]
    fn ghz_has_two_equal_terms() {
        for n in (2..=12).step_by(2) {
            let g = ghz_state(n).unwrap();
            let weights: Vec<f64> = g
                .amplitudes()
                .iter()
                .map(|a| a.norm_sqr())
                .filter(|&w| w > 0.0)
                .collect();
            assert_eq!(weights.len(), 2);
            assert!(weights.iter().all(|w| (w - 0.5).abs() < 1e-15));
        }
    }

    #[test]
    fn fusion_projector() {
        let f = ideal_fusion();
        assert_eq!(f.apply(&[ONE, ZERO, ZERO, ZERO]), vec![ONE, ZERO, ZERO, ZERO]);
        assert_eq!(f.apply(&[ZERO, ONE, ZERO, ZERO]), vec![ZERO; 4]);
        assert!(close(f.trace(), C64::new(2.0, 0.0)));
        let mut pauli_form = pauli_pair(0);
        pauli_form.add_scaled(&pauli_pair(15), ONE);
        assert!(f.max_abs_diff(&pauli_form.scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn ideal_chi_structure() {
        let chi = ideal_chi();
        assert!(close(chi.matrix()[(0, 15)], C64::new(0.25, 0.0)));
        assert!(close(chi.matrix().trace(), C64::new(0.5, 0.0)));
        let e = eig_hermitian(chi.matrix()).unwrap();
        assert!((e.values[0] - 0.5).abs() < 1e-14);
        assert!(e.values[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn half_wave_plate() {
        let h = [ONE, ZERO];
        let out = waveplate_jones(&WavePlate::half(0.0)).apply(&h);
        assert!(same_ray(&out, &h));
        let out = waveplate_jones(&WavePlate::half(FRAC_PI_8)).apply(&h);
        assert!(same_ray(&out, &BasisLabel::P.ket()));
        let theta = 0.3;
        let out = waveplate_jones(&WavePlate::half(theta)).apply(&h);
        assert!(close(out[0], C64::new((2.0 * theta).cos(), 0.0)));
        assert!(close(out[1], C64::new((2.0 * theta).sin(), 0.0)));
    }

    #[test]
    fn quarter_wave_plate_circular_output() {
        let h = [ONE, ZERO];
        // With QWP(θ) = R(θ) diag(1,i) R(-θ), the +45° plate yields (|h> - i|v>)/√2
        // and the -45° plate yields (|h> + i|v>)/√2.
        let out = waveplate_jones(&WavePlate::quarter(FRAC_PI_4)).apply(&h);
        assert!(same_ray(&out, &BasisLabel::L.ket()));
        let out = waveplate_jones(&WavePlate::quarter(-FRAC_PI_4)).apply(&h);
        assert!(same_ray(&out, &BasisLabel::R.ket()));
    }

    #[test]
    fn jones_matrices_are_unitary() {
        for k in 0..24 {
            let angle = k as f64 * 0.37 - 3.0;
            for wp in [WavePlate::half(angle), WavePlate::quarter(angle)] {
                let j = waveplate_jones(&wp);
                assert!(j.matmul(&j.adjoint()).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
            }
        }
    }

    #[test]
    fn projector_examples() {
        let hh = projector_from_setting(&MeasurementSetting::labels("HH").unwrap(), 2).unwrap();
        assert_eq!(hh, ComplexMatrix::projector(&[ONE, ZERO, ZERO, ZERO]));
        let hv = projector_from_setting(&MeasurementSetting::labels("HV").unwrap(), 2).unwrap();
        assert_eq!(hv, ComplexMatrix::projector(&[ZERO, ONE, ZERO, ZERO]));
        let p = MeasurementSetting::Analyzers(vec![Analyzer {
            plates: vec![WavePlate::half(FRAC_PI_8)],
            port: Port::H,
        }]);
        let got = projector_from_setting(&p, 1).unwrap();
        assert!(got.max_abs_diff(&ComplexMatrix::projector(&BasisLabel::P.ket())) < 1e-15);
        assert!(matches!(
            projector_from_setting(&MeasurementSetting::labels("H").unwrap(), 2),
            Err(Error::InvalidSetting(_))
        ));
    }

    #[test]
    fn wave_plate_analyzers_reproduce_labels() {
        // HWP at 22.5° → P, QWP at 45° → R, HWP at 45° → V (port h)
        let cases = [
            (vec![WavePlate::half(FRAC_PI_8)], Port::H, BasisLabel::P),
            (vec![WavePlate::half(FRAC_PI_8)], Port::V, BasisLabel::M),
            (vec![WavePlate::quarter(FRAC_PI_4)], Port::H, BasisLabel::R),
            (vec![WavePlate::quarter(FRAC_PI_4)], Port::V, BasisLabel::L),
            (vec![WavePlate::half(FRAC_PI_4)], Port::H, BasisLabel::V),
        ];
        for (plates, port, label) in cases {
            let ket = Analyzer { plates, port }.ket();
            assert!(same_ray(&ket, &label.ket()), "{label:?}");
        }
    }

    #[test]
    fn projectors_idempotent_unit_trace() {
        let set = standard_projector_set(2, Scheme::Overcomplete).unwrap();
        for p in set.projectors() {
            assert!(p.matmul(&p).max_abs_diff(&p) < 1e-12);
            assert!((p.trace() - ONE).norm() < 1e-12);
        }
        let stack = MeasurementSetting::Analyzers(vec![Analyzer {
            plates: vec![WavePlate::quarter(0.3), WavePlate::half(1.1)],
            port: Port::V,
        }]);
        let p = projector_from_setting(&stack, 1).unwrap();
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn standard_sets() {
        let four = standard_projector_set(4, Scheme::Minimal).unwrap();
        assert_eq!(four.len(), 256);
        assert!(four.is_complete());
        assert_eq!(four.configuration_groups().len(), 81);
        let two = standard_projector_set(2, Scheme::Overcomplete).unwrap();
        assert_eq!(two.len(), 36);
        assert!(two.is_complete());
        let minimal = standard_projector_set(2, Scheme::Minimal).unwrap();
        assert_eq!(minimal.operator_rank(), 16);
    }

    #[test]
    fn gram_rank_by_direct_traces() {
        let set = standard_projector_set(2, Scheme::Minimal).unwrap();
        let projectors = set.projectors();
        let gram = DMatrix::from_fn(16, 16, |s, t| projectors[s].trace_product(&projectors[t]).re);
        assert_eq!(symmetric_rank(&gram, 1e-10), 16);
    }

    #[test]
    fn incomplete_set_is_flagged() {
        let settings = ["HH", "HV", "VH", "VV"]
            .iter()
            .map(|s| MeasurementSetting::labels(s).unwrap())
            .collect();
        let set = ProjectorSet::new(2, settings).unwrap();
        assert!(!set.is_complete());
        assert_eq!(set.operator_rank(), 4);
    }

    #[test]
    fn projector_set_json() {
        let set = ProjectorSet::new(
            2,
            vec![
                MeasurementSetting::labels("HR").unwrap(),
                MeasurementSetting::Analyzers(vec![
                    Analyzer {
                        plates: vec![WavePlate::half(0.25)],
                        port: Port::H,
                    },
                    Analyzer {
                        plates: vec![],
                        port: Port::V,
                    },
                ]),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&set).unwrap();
        assert!(text.contains("\"HR\""));
        assert!(text.contains("\"kind\":\"half\",\"angle_rad\":0.25"));
        let back: ProjectorSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, set);
        assert!(serde_json::from_str::<ProjectorSet>(r#"{"n_qubits":2,"settings":["HX"]}"#).is_err());
        assert!(serde_json::from_str::<ProjectorSet>(r#"{"n_qubits":2,"settings":["H"]}"#).is_err());
    }
}
