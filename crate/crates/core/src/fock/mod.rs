//! Exact few-photon bosonic states over a registry of optical modes.
//!
//! A [`FockState`] is a sparse superposition of occupation vectors. Every
//! passive element is a [`TwoModeUnitary`] or a single-mode phase, and both
//! act on occupation vectors through the usual creation-operator expansion.
//! Detectors count photons per optical mode and never resolve the internal
//! (distinguishability) label, so probabilities are always summed over labels.

mod permanent;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use permanent::{amplitude_by_permanent, permanent};

/// Amplitudes below this modulus are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Tolerance used when validating unitarity and normalization.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Outcome distribution keyed by photon-count tuples.
pub type Distribution = BTreeMap<Vec<usize>, f64>;

/// The two polarization roles of the single spatial mode.
///
/// Qubits are stored in `Register` (vertical) and briefly moved to
/// `Processing` (horizontal) to be manipulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    Register,
    Processing,
}

impl Polarization {
    pub const V: Polarization = Polarization::Register;
    pub const H: Polarization = Polarization::Processing;

    pub fn other(self) -> Self {
        match self {
            Polarization::Register => Polarization::Processing,
            Polarization::Processing => Polarization::Register,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Polarization::Register => 'V',
            Polarization::Processing => 'H',
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Address of one optical mode.
///
/// Ordering is lexicographic on `(spatial, time_bin, polarization, internal)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    /// 0 is the main mode; higher values are ancilla or loss modes.
    pub spatial: u32,
    pub time_bin: u32,
    pub polarization: Polarization,
    /// Wavepacket label; 0 is the reference wavepacket.
    pub internal: u32,
}

impl ModeIndex {
    pub fn new(spatial: u32, time_bin: u32, polarization: Polarization) -> Self {
        ModeIndex {
            spatial,
            time_bin,
            polarization,
            internal: 0,
        }
    }

    /// A mode of the main spatial mode.
    pub fn main(time_bin: u32, polarization: Polarization) -> Self {
        Self::new(0, time_bin, polarization)
    }

    pub fn with_internal(self, internal: u32) -> Self {
        ModeIndex { internal, ..self }
    }

    pub fn with_time_bin(self, time_bin: u32) -> Self {
        ModeIndex { time_bin, ..self }
    }

    /// The same optical mode with the internal label erased.
    pub fn optical(self) -> Self {
        self.with_internal(0)
    }

    pub fn same_optical(&self, other: &ModeIndex) -> bool {
        self.optical() == other.optical()
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}{}", self.spatial, self.time_bin, self.polarization)?;
        if self.internal > 0 {
            write!(f, "#{}", self.internal)?;
        }
        Ok(())
    }
}

/// Ordered set of modes. Positions are stable: growing the registry only
/// appends.
#[derive(Debug, Clone, Default)]
pub struct ModeRegistry {
    modes: Vec<ModeIndex>,
    lookup: HashMap<ModeIndex, usize>,
}

impl PartialEq for ModeRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes
    }
}

impl ModeRegistry {
    pub fn new(modes: impl IntoIterator<Item = ModeIndex>) -> Result<Self> {
        let mut registry = ModeRegistry::default();
        for mode in modes {
            registry.push(mode)?;
        }
        Ok(registry)
    }

    /// Every combination of the given bins, spatial modes `0..spatial_modes`,
    /// both polarizations and internal labels `0..labels`.
    pub fn time_bins(bins: impl IntoIterator<Item = u32>, spatial_modes: u32, labels: u32) -> Self {
        let bins: Vec<u32> = bins.into_iter().collect();
        let mut modes = Vec::new();
        for spatial in 0..spatial_modes.max(1) {
            for &bin in &bins {
                for pol in [Polarization::Register, Polarization::Processing] {
                    for label in 0..labels.max(1) {
                        modes.push(ModeIndex::new(spatial, bin, pol).with_internal(label));
                    }
                }
            }
        }
        ModeRegistry::new(modes).expect("generated modes are distinct")
    }

    fn push(&mut self, mode: ModeIndex) -> Result<usize> {
        if self.lookup.contains_key(&mode) {
            return Err(Error::DuplicateMode(mode));
        }
        let pos = self.modes.len();
        self.modes.push(mode);
        self.lookup.insert(mode, pos);
        Ok(pos)
    }

    /// A copy of this registry with any missing `extra` modes appended.
    pub fn extended(&self, extra: impl IntoIterator<Item = ModeIndex>) -> Self {
        let mut out = self.clone();
        for mode in extra {
            if !out.lookup.contains_key(&mode) {
                out.push(mode).expect("checked above");
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    pub fn get(&self, mode: &ModeIndex) -> Option<usize> {
        self.lookup.get(mode).copied()
    }

    pub fn contains(&self, mode: &ModeIndex) -> bool {
        self.lookup.contains_key(mode)
    }

    pub fn position(&self, mode: &ModeIndex) -> Result<usize> {
        self.get(mode).ok_or(Error::UnknownMode(*mode))
    }

    /// Distinct internal labels, ascending.
    pub fn labels(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.modes.iter().map(|m| m.internal).collect();
        set.into_iter().collect()
    }

    /// Positions of every internal sub-mode of `mode`'s optical mode.
    pub fn optical_positions(&self, mode: &ModeIndex) -> Result<Vec<usize>> {
        let positions: Vec<usize> = self
            .modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.same_optical(mode))
            .map(|(i, _)| i)
            .collect();
        if positions.is_empty() {
            Err(Error::UnknownMode(mode.optical()))
        } else {
            Ok(positions)
        }
    }
}

/// A 2×2 unitary acting on a pair of modes.
///
/// Column `j` is the image of a single photon entering mode `j` of the pair:
/// `a† → m00 a† + m10 b†`, `b† → m01 a† + m11 b†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeUnitary {
    matrix: [[Complex64; 2]; 2],
    modes: (ModeIndex, ModeIndex),
}

impl TwoModeUnitary {
    pub fn new(a: ModeIndex, b: ModeIndex, matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        if a == b {
            return Err(Error::domain(format!(
                "two-mode element needs distinct modes, got {a} twice"
            )));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(TwoModeUnitary { matrix, modes: (a, b) })
    }

    /// `[[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]]`.
    pub fn beam_splitter(a: ModeIndex, b: ModeIndex, theta: f64, phi: f64) -> Result<Self> {
        Self::new(a, b, beam_splitter_matrix(theta, phi))
    }

    /// Half-wave plate at `angle` (radians) between an H mode and a V mode:
    /// `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]` in (H, V) order.
    pub fn half_wave_plate(h: ModeIndex, v: ModeIndex, angle: f64) -> Result<Self> {
        let (s, c) = (2.0 * angle).sin_cos();
        let m = [
            [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
        ];
        Self::new(h, v, m)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.matrix
    }

    pub fn modes(&self) -> (ModeIndex, ModeIndex) {
        self.modes
    }

    /// Same matrix on a different mode pair.
    pub fn on(&self, a: ModeIndex, b: ModeIndex) -> Result<Self> {
        Self::new(a, b, self.matrix)
    }

    /// Full single-photon transfer matrix over `registry`.
    pub fn embed(&self, registry: &ModeRegistry) -> Result<DMatrix<Complex64>> {
        let ia = registry.position(&self.modes.0)?;
        let ib = registry.position(&self.modes.1)?;
        let mut u = DMatrix::identity(registry.len(), registry.len());
        u[(ia, ia)] = self.matrix[0][0];
        u[(ia, ib)] = self.matrix[0][1];
        u[(ib, ia)] = self.matrix[1][0];
        u[(ib, ib)] = self.matrix[1][1];
        Ok(u)
    }
}

pub fn beam_splitter_matrix(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    [[Complex64::new(c, 0.0), -e.conj() * s], [e * s, Complex64::new(c, 0.0)]]
}

/// Max-entry deviation of `U·U†` from the identity.
pub fn unitarity_deviation(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let acc: Complex64 = m[i].iter().zip(&m[j]).map(|(a, b)| a * b.conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (acc - target).norm();
            if dev.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

/// Single-photon transfer matrix of a phase shift on `mode`.
pub fn phase_matrix(registry: &ModeRegistry, mode: &ModeIndex, phi: f64) -> Result<DMatrix<Complex64>> {
    let i = registry.position(mode)?;
    let mut u = DMatrix::identity(registry.len(), registry.len());
    u[(i, i)] = Complex64::from_polar(1.0, phi);
    Ok(u)
}

/// Photon-number detection on one optical mode; the internal label of
/// `mode` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionEvent {
    pub mode: ModeIndex,
    pub count: usize,
}

impl DetectionEvent {
    pub fn new(mode: ModeIndex, count: usize) -> Self {
        DetectionEvent { mode, count }
    }
}

/// Result of heralding: the renormalized conditional state and the
/// probability of the observed pattern. A zero probability leaves an empty
/// state rather than raising.
#[derive(Debug, Clone)]
pub struct HeraldOutcome {
    pub state: FockState,
    pub probability: f64,
}

impl HeraldOutcome {
    pub fn succeeded(&self) -> bool {
        self.probability > 0.0
    }
}

/// Sparse superposition of occupation vectors.
///
/// Modes that have been read out by [`FockState::herald`] keep the detector
/// record in their occupation entries but take no further part in dynamics;
/// `photon_count` counts only the photons still in flight.
#[derive(Debug, Clone)]
pub struct FockState {
    registry: Arc<ModeRegistry>,
    photon_count: usize,
    terms: BTreeMap<Vec<u8>, Complex64>,
    absorbed: BTreeSet<usize>,
}

impl FockState {
    /// Single occupation vector with amplitude 1.
    pub fn new(registry: impl Into<Arc<ModeRegistry>>, placements: &[(ModeIndex, usize)]) -> Result<Self> {
        let registry = registry.into();
        let mut occupation = vec![0u8; registry.len()];
        let mut total = 0usize;
        for &(mode, count) in placements {
            let pos = registry.position(&mode)?;
            let slot = usize::from(occupation[pos]) + count;
            occupation[pos] = u8::try_from(slot).map_err(|_| {
                Error::domain(format!(
                    "{slot} photons in mode {mode} exceeds the supported occupation"
                ))
            })?;
            total += count;
        }
        let mut terms = BTreeMap::new();
        terms.insert(occupation, Complex64::new(1.0, 0.0));
        Ok(FockState {
            registry,
            photon_count: total,
            terms,
            absorbed: BTreeSet::new(),
        })
    }

    pub fn vacuum(registry: impl Into<Arc<ModeRegistry>>) -> Self {
        Self::new(registry, &[]).expect("vacuum has no placements")
    }

    /// Build a state from explicit terms. All occupation vectors must have
    /// the registry's length and the same photon number.
    pub fn from_terms(
        registry: impl Into<Arc<ModeRegistry>>,
        terms: impl IntoIterator<Item = (Vec<u8>, Complex64)>,
    ) -> Result<Self> {
        let registry = registry.into();
        let mut map: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        let mut count = None;
        for (occ, amp) in terms {
            if occ.len() != registry.len() {
                return Err(Error::domain(format!(
                    "occupation has {} entries, registry has {}",
                    occ.len(),
                    registry.len()
                )));
            }
            let n: usize = occ.iter().map(|&c| usize::from(c)).sum();
            match count {
                None => count = Some(n),
                Some(c) if c != n => {
                    return Err(Error::domain(format!("mixed photon numbers {c} and {n} in one state")));
                }
                _ => {}
            }
            *map.entry(occ).or_default() += amp;
        }
        let mut state = FockState {
            registry,
            photon_count: count.unwrap_or(0),
            terms: map,
            absorbed: BTreeSet::new(),
        };
        state.prune();
        Ok(state)
    }

    /// Apply one creation operator per photon to the vacuum. Each photon is a
    /// single-photon wavefunction over modes. The result is not renormalized,
    /// so photons sharing a mode pick up their bosonic enhancement.
    pub fn from_photons(
        registry: impl Into<Arc<ModeRegistry>>,
        photons: &[Vec<(ModeIndex, Complex64)>],
    ) -> Result<Self> {
        let mut state = Self::vacuum(registry);
        for photon in photons {
            state = state.create(photon)?;
        }
        Ok(state)
    }

    /// Apply `Σ c_m a†_m` to this state.
    pub fn create(&self, wavefunction: &[(ModeIndex, Complex64)]) -> Result<Self> {
        let mut positions = Vec::with_capacity(wavefunction.len());
        for (mode, c) in wavefunction {
            let pos = self.live_position(mode)?;
            positions.push((pos, *c));
        }
        let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.terms {
            for &(pos, c) in &positions {
                let n = occ[pos];
                if n == u8::MAX {
                    return Err(Error::domain("mode occupation overflow"));
                }
                let mut next = occ.clone();
                next[pos] = n + 1;
                *out.entry(next).or_default() += amp * c * f64::from(n + 1).sqrt();
            }
        }
        let mut state = FockState {
            registry: Arc::clone(&self.registry),
            photon_count: self.photon_count + 1,
            terms: out,
            absorbed: self.absorbed.clone(),
        };
        state.prune();
        Ok(state)
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn shared_registry(&self) -> Arc<ModeRegistry> {
        Arc::clone(&self.registry)
    }

    /// Photons not yet absorbed by a detector.
    pub fn photon_count(&self) -> usize {
        self.photon_count
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occupation: &[u8]) -> Complex64 {
        self.terms.get(occupation).copied().unwrap_or_default()
    }

    /// Amplitude of the occupation vector described by `placements`.
    pub fn amplitude_of(&self, placements: &[(ModeIndex, usize)]) -> Result<Complex64> {
        let mut occ = vec![0u8; self.registry.len()];
        for &(mode, count) in placements {
            let pos = self.registry.position(&mode)?;
            occ[pos] = occ[pos].saturating_add(count as u8);
        }
        Ok(self.amplitude(&occ))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_absorbed(&self, mode: &ModeIndex) -> bool {
        self.registry.get(mode).is_some_and(|p| self.absorbed.contains(&p))
    }

    /// Scale to unit norm; an empty state stays empty.
    pub fn normalized(&self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / norm, 0.0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for amp in out.terms.values_mut() {
            *amp *= factor;
        }
        out.prune();
        out
    }

    /// `⟨self|other⟩`. Both states must share a registry layout.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.terms.iter().map(|(occ, a)| a.conj() * other.amplitude(occ)).sum()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    fn live_position(&self, mode: &ModeIndex) -> Result<usize> {
        let pos = self.registry.position(mode)?;
        if self.absorbed.contains(&pos) {
            return Err(Error::ModeAbsorbed(*mode));
        }
        Ok(pos)
    }

    /// Evolve under a two-mode unitary.
    pub fn apply_two_mode(&self, u: &TwoModeUnitary) -> Result<Self> {
        let (ma, mb) = u.modes();
        let ia = self.live_position(&ma)?;
        let ib = self.live_position(&mb)?;
        let [[u00, u01], [u10, u11]] = u.matrix();

        let max_n = self.photon_count;
        let fact = factorials(max_n);
        let binom = |n: usize, k: usize| fact[n] / (fact[k] * fact[n - k]);

        let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let na = usize::from(occ[ia]);
            let nb = usize::from(occ[ib]);
            if na == 0 && nb == 0 {
                *out.entry(occ.clone()).or_default() += amp;
                continue;
            }
            let total = na + nb;
            let norm_in = (fact[na] * fact[nb]).sqrt();
            for k in 0..=na {
                let from_a = binom(na, k) * u00.powu(k as u32) * u10.powu((na - k) as u32);
                if from_a == Complex64::default() {
                    continue;
                }
                for l in 0..=nb {
                    let from_b = binom(nb, l) * u01.powu(l as u32) * u11.powu((nb - l) as u32);
                    let out_a = k + l;
                    let out_b = total - out_a;
                    let weight = (fact[out_a] * fact[out_b]).sqrt() / norm_in;
                    let mut next = occ.clone();
                    next[ia] = out_a as u8;
                    next[ib] = out_b as u8;
                    *out.entry(next).or_default() += amp * from_a * from_b * weight;
                }
            }
        }
        let mut state = FockState {
            registry: Arc::clone(&self.registry),
            photon_count: self.photon_count,
            terms: out,
            absorbed: self.absorbed.clone(),
        };
        state.prune();
        Ok(state)
    }

    /// Multiply each term by `e^{i·phi·n}` where `n` is the occupation of `mode`.
    pub fn apply_phase(&self, mode: &ModeIndex, phi: f64) -> Result<Self> {
        let pos = self.live_position(mode)?;
        let mut out = self.clone();
        for (occ, amp) in out.terms.iter_mut() {
            let n = f64::from(occ[pos]);
            if n > 0.0 {
                *amp *= Complex64::from_polar(1.0, phi * n);
            }
        }
        Ok(out)
    }

    /// Rewrite every occupation vector onto `registry`, which must extend the
    /// current one. `fill(old, new)` receives a zeroed `new` of the new
    /// length and must conserve photon number.
    pub(crate) fn map_occupations(&self, registry: Arc<ModeRegistry>, fill: impl Fn(&[u8], &mut [u8])) -> Self {
        let mut terms = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let mut next = vec![0u8; registry.len()];
            fill(occ, &mut next);
            *terms.entry(next).or_default() += *amp;
        }
        FockState {
            registry,
            photon_count: self.photon_count,
            terms,
            absorbed: self.absorbed.clone(),
        }
    }

    /// Keep only terms whose occupation satisfies `keep`. The result is not
    /// renormalized; its squared norm is the post-selection probability.
    pub fn postselect(&self, keep: impl Fn(&[u8]) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|occ, _| keep(occ));
        out
    }

    /// Project onto a photon-number pattern on the detected modes.
    ///
    /// Counts are compared against the sum over internal labels, which makes
    /// the probability an incoherent sum over labels. Detected modes are
    /// marked as absorbed.
    pub fn herald(&self, events: &[DetectionEvent]) -> Result<HeraldOutcome> {
        let mut groups = Vec::with_capacity(events.len());
        let mut seen = BTreeSet::new();
        let mut detected = 0usize;
        for event in events {
            if !seen.insert(event.mode.optical()) {
                return Err(Error::domain(format!("mode {} heralded twice", event.mode.optical())));
            }
            let positions = self.registry.optical_positions(&event.mode)?;
            if positions.iter().any(|p| self.absorbed.contains(p)) {
                return Err(Error::ModeAbsorbed(event.mode.optical()));
            }
            detected += event.count;
            groups.push((positions, event.count));
        }
        if detected > self.photon_count {
            return Err(Error::domain(format!(
                "pattern detects {detected} photons but the state holds {}",
                self.photon_count
            )));
        }

        let projected = self.postselect(|occ| {
            groups
                .iter()
                .all(|(positions, count)| positions.iter().map(|&p| usize::from(occ[p])).sum::<usize>() == *count)
        });
        let probability = projected.norm_sqr();
        let mut state = projected.normalized();
        state.photon_count -= detected;
        for (positions, _) in &groups {
            state.absorbed.extend(positions.iter().copied());
        }
        Ok(HeraldOutcome { state, probability })
    }

    /// Joint photon-count distribution on `modes`, marginalizing everything
    /// else including internal labels. Probabilities sum to the squared norm.
    pub fn measure_distribution(&self, modes: &[ModeIndex]) -> Result<Distribution> {
        let groups = modes
            .iter()
            .map(|m| self.registry.optical_positions(m))
            .collect::<Result<Vec<_>>>()?;
        let mut dist = Distribution::new();
        for (occ, amp) in &self.terms {
            let key: Vec<usize> = groups
                .iter()
                .map(|positions| positions.iter().map(|&p| usize::from(occ[p])).sum())
                .collect();
            *dist.entry(key).or_default() += amp.norm_sqr();
        }
        Ok(dist)
    }
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for i in 1..=n {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn two_modes() -> (Arc<ModeRegistry>, ModeIndex, ModeIndex) {
        let a = ModeIndex::main(1, Polarization::Processing);
        let b = ModeIndex::main(1, Polarization::Register);
        (Arc::new(ModeRegistry::new([a, b]).unwrap()), a, b)
    }

    #[test]
    fn new_state_single_photon() {
        let reg = Arc::new(ModeRegistry::time_bins(1..=3, 1, 1));
        let mode = ModeIndex::main(1, Polarization::Processing);
        let s = FockState::new(reg, &[(mode, 1)]).unwrap();
        assert_eq!(s.photon_count(), 1);
        assert_eq!(s.amplitude_of(&[(mode, 1)]).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn vacuum_and_double_occupation() {
        let (reg, a, _) = two_modes();
        let vac = FockState::new(reg.clone(), &[]).unwrap();
        assert_eq!(vac.photon_count(), 0);
        assert_eq!(vac.norm_sqr(), 1.0);

        let two = FockState::new(reg, &[(a, 2)]).unwrap();
        let (occ, amp) = two.terms().next().unwrap();
        assert_eq!(occ, &[2, 0]);
        assert_eq!(amp, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unknown_mode_is_registry_error() {
        let (reg, _, _) = two_modes();
        let stray = ModeIndex::main(7, Polarization::Register);
        assert_eq!(
            FockState::new(reg, &[(stray, 1)]).unwrap_err(),
            Error::UnknownMode(stray)
        );
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let (reg, a, b) = two_modes();
        let s = FockState::new(reg, &[(a, 1), (b, 1)]).unwrap();
        let bs = TwoModeUnitary::beam_splitter(a, b, FRAC_PI_4, 0.0).unwrap();
        let out = s.apply_two_mode(&bs).unwrap();
        assert!(out.amplitude(&[1, 1]).norm() < 1e-15);
        let dist = out.measure_distribution(&[a, b]).unwrap();
        assert!((dist[&vec![2, 0]] - 0.5).abs() < 1e-12);
        assert!((dist[&vec![0, 2]] - 0.5).abs() < 1e-12);
        assert_eq!(dist.get(&vec![1, 1]).copied().unwrap_or(0.0), 0.0);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let (reg, a, b) = two_modes();
        let s = FockState::new(reg, &[(a, 2), (b, 1)]).unwrap();
        let id = TwoModeUnitary::beam_splitter(a, b, 0.0, 0.0).unwrap();
        let out = s.apply_two_mode(&id).unwrap();
        assert_eq!(out.terms().collect::<Vec<_>>(), s.terms().collect::<Vec<_>>());
    }

    #[test]
    fn one_third_coincidence_amplitude() {
        // cos 2θ = 1/√3 coupler: |1,1⟩ survives with amplitude of modulus 1/3.
        let (reg, a, b) = two_modes();
        let s = FockState::new(reg, &[(a, 1), (b, 1)]).unwrap();
        let theta = (1.0 / 3f64.sqrt()).acos();
        let u = TwoModeUnitary::half_wave_plate(a, b, theta / 2.0).unwrap();
        let out = s.apply_two_mode(&u).unwrap();
        assert!((out.amplitude(&[1, 1]).norm() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_unitary_rejected() {
        let (_, a, b) = two_modes();
        let one = Complex64::new(1.0, 0.0);
        let err = TwoModeUnitary::new(a, b, [[one, one], [one, one]]).unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));
    }

    #[test]
    fn phase_examples() {
        let (reg, a, _) = two_modes();
        let one = FockState::new(reg.clone(), &[(a, 1)]).unwrap();
        assert_eq!(
            one.apply_phase(&a, 0.0).unwrap().amplitude(&[1, 0]),
            Complex64::new(1.0, 0.0)
        );
        let flipped = one.apply_phase(&a, PI).unwrap().amplitude(&[1, 0]);
        assert!((flipped + 1.0).norm() < 1e-15);

        let two = FockState::new(reg, &[(a, 2)]).unwrap();
        let amp = two.apply_phase(&a, FRAC_PI_2).unwrap().amplitude(&[2, 0]);
        assert!((amp + 1.0).norm() < 1e-15);
    }

    #[test]
    fn herald_vacuum_on_empty_ancilla() {
        let reg = Arc::new(ModeRegistry::time_bins(1..=2, 2, 1));
        let photon = ModeIndex::main(1, Polarization::Register);
        let ancilla = ModeIndex::new(1, 1, Polarization::Register);
        let s = FockState::new(reg, &[(photon, 1)]).unwrap();
        let h = s.herald(&[DetectionEvent::new(ancilla, 0)]).unwrap();
        assert_eq!(h.probability, 1.0);
        assert_eq!(h.state.terms().collect::<Vec<_>>(), s.terms().collect::<Vec<_>>());
        assert!(h.state.is_absorbed(&ancilla));
    }

    #[test]
    fn herald_after_balanced_split() {
        let (reg, a, b) = two_modes();
        let s = FockState::new(reg, &[(a, 1)]).unwrap();
        let split = s
            .apply_two_mode(&TwoModeUnitary::beam_splitter(a, b, FRAC_PI_4, 0.0).unwrap())
            .unwrap();
        let h = split.herald(&[DetectionEvent::new(b, 1)]).unwrap();
        assert!((h.probability - 0.5).abs() < 1e-15);
        assert_eq!(h.state.photon_count(), 0);
        assert!((h.state.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn impossible_herald_returns_zero() {
        let (reg, a, b) = two_modes();
        let s = FockState::new(reg, &[(a, 1)]).unwrap();
        let h = s.herald(&[DetectionEvent::new(b, 1)]).unwrap();
        assert!(!h.succeeded());
        assert!(h.state.is_empty());
    }

    #[test]
    fn absorbed_mode_rejects_dynamics() {
        let (reg, a, b) = two_modes();
        let s = FockState::new(reg, &[(a, 1)]).unwrap();
        let h = s.herald(&[DetectionEvent::new(b, 0)]).unwrap();
        assert_eq!(h.state.apply_phase(&b, 1.0).unwrap_err(), Error::ModeAbsorbed(b));
        assert!(h.state.herald(&[DetectionEvent::new(b, 0)]).is_err());
    }

    #[test]
    fn herald_sums_over_internal_labels() {
        let a = ModeIndex::main(2, Polarization::Processing);
        let b = ModeIndex::main(2, Polarization::Register);
        let reg = Arc::new(ModeRegistry::new([a, b, a.with_internal(1), b.with_internal(1)]).unwrap());
        // Fully distinguishable pair on a balanced coupler.
        let s = FockState::new(reg, &[(a, 1), (b.with_internal(1), 1)]).unwrap();
        let bs = TwoModeUnitary::beam_splitter(a, b, FRAC_PI_4, 0.0).unwrap();
        let s = s
            .apply_two_mode(&bs)
            .unwrap()
            .apply_two_mode(&bs.on(a.with_internal(1), b.with_internal(1)).unwrap())
            .unwrap();
        let dist = s.measure_distribution(&[a, b]).unwrap();
        assert!((dist[&vec![1, 1]] - 0.5).abs() < 1e-14);
        let h = s.herald(&[DetectionEvent::new(a, 1)]).unwrap();
        assert!((h.probability - 0.5).abs() < 1e-14);
        // The two label assignments stay orthogonal after detection.
        assert_eq!(h.state.len(), 2);
    }

    #[test]
    fn detecting_too_many_photons_is_domain_error() {
        let (reg, a, _) = two_modes();
        let s = FockState::new(reg, &[(a, 1)]).unwrap();
        assert!(matches!(s.herald(&[DetectionEvent::new(a, 2)]), Err(Error::Domain(_))));
    }

    #[test]
    fn from_photons_bosonic_enhancement() {
        let (reg, a, _) = two_modes();
        let one = Complex64::new(1.0, 0.0);
        let s = FockState::from_photons(reg, &[vec![(a, one)], vec![(a, one)]]).unwrap();
        assert!((s.amplitude(&[2, 0]).re - 2f64.sqrt()).abs() < 1e-15);
    }
}
