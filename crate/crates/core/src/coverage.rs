// SPDX-License-Identifier: Apache-2.0

//! Coverage universes and hit accumulation.
//!
//! A manifest declares every recordable point up front; maps are bitsets
//! over that universe. Merge is a commutative idempotent monoid so lane
//! order never affects totals.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Statement,
    Branch,
    Condition,
    Expression,
    Toggle,
    Fsm,
    Mux,
    CtrlReg,
}

impl Metric {
    pub const ALL: &'static [Metric] = &[
        Metric::Statement,
        Metric::Branch,
        Metric::Condition,
        Metric::Expression,
        Metric::Toggle,
        Metric::Fsm,
        Metric::Mux,
        Metric::CtrlReg,
    ];

    /// The six feedback metrics; mux and ctrlreg are baseline-comparison
    /// metrics and excluded from feedback by default.
    pub const FEEDBACK_DEFAULT: &'static [Metric] = &[
        Metric::Statement,
        Metric::Branch,
        Metric::Condition,
        Metric::Expression,
        Metric::Toggle,
        Metric::Fsm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Statement => "statement",
            Metric::Branch => "branch",
            Metric::Condition => "condition",
            Metric::Expression => "expression",
            Metric::Toggle => "toggle",
            Metric::Fsm => "fsm",
            Metric::Mux => "mux",
            Metric::CtrlReg => "ctrlreg",
        }
    }

    pub fn from_name(s: &str) -> Option<Metric> {
        Metric::ALL.iter().copied().find(|m| m.name() == s)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wire value for toggle tracking. Only signals declared tri-state may
/// carry `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wire {
    Zero,
    One,
    Z,
}

/// Toggle transition kinds. Binary bits use only the first two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    ZeroToOne,
    OneToZero,
    ZeroToZ,
    OneToZ,
    ZToZero,
    ZToOne,
}

impl Transition {
    fn sub_index(self) -> u32 {
        match self {
            Transition::ZeroToOne => 0,
            Transition::OneToZero => 1,
            Transition::ZeroToZ => 2,
            Transition::OneToZ => 3,
            Transition::ZToZero => 4,
            Transition::ZToOne => 5,
        }
    }

    pub fn between(from: Wire, to: Wire) -> Option<Transition> {
        match (from, to) {
            (Wire::Zero, Wire::One) => Some(Transition::ZeroToOne),
            (Wire::One, Wire::Zero) => Some(Transition::OneToZero),
            (Wire::Zero, Wire::Z) => Some(Transition::ZeroToZ),
            (Wire::One, Wire::Z) => Some(Transition::OneToZ),
            (Wire::Z, Wire::Zero) => Some(Transition::ZToZero),
            (Wire::Z, Wire::One) => Some(Transition::ZToOne),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeKind {
    Statement,
    Branch,
    Condition { inputs: u8 },
    Expression { inputs: u8 },
    Toggle { bits: u8, tristate: bool },
    Fsm { states: u8, transitions: u8 },
    Mux,
    CtrlReg { width: u8 },
}

impl ProbeKind {
    pub fn metric(self) -> Metric {
        match self {
            ProbeKind::Statement => Metric::Statement,
            ProbeKind::Branch => Metric::Branch,
            ProbeKind::Condition { .. } => Metric::Condition,
            ProbeKind::Expression { .. } => Metric::Expression,
            ProbeKind::Toggle { .. } => Metric::Toggle,
            ProbeKind::Fsm { .. } => Metric::Fsm,
            ProbeKind::Mux => Metric::Mux,
            ProbeKind::CtrlReg { .. } => Metric::CtrlReg,
        }
    }

    pub fn universe(self) -> usize {
        match self {
            ProbeKind::Statement => 1,
            ProbeKind::Branch => 2,
            ProbeKind::Condition { inputs } | ProbeKind::Expression { inputs } => {
                assert!(inputs >= 1 && inputs <= 6, "expression/condition inputs capped at 6");
                1 << inputs
            }
            ProbeKind::Toggle { bits, tristate } => {
                bits as usize * if tristate { 6 } else { 2 }
            }
            ProbeKind::Fsm { states, transitions } => states as usize + transitions as usize,
            ProbeKind::Mux => 2,
            ProbeKind::CtrlReg { width } => {
                assert!(width >= 1 && width <= 10, "control-register group width capped at 10");
                1 << width
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Probe {
    pub unit: String,
    pub kind: ProbeKind,
    /// Structural block tag (case-study combinational block numbering).
    #[serde(default)]
    pub block: u32,
}

/// One typed point in the declared universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub metric: Metric,
    pub unit: String,
    pub sub: u32,
}

/// Handle into a manifest, resolved once per run for cheap recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeId(usize);

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x1000_0000_01b3;

fn fnv1a(hash: &mut u64, bytes: &[u8]) {
    for &b in bytes {
        *hash ^= b as u64;
        *hash = hash.wrapping_mul(FNV_PRIME);
    }
}

#[derive(Debug)]
pub struct CoverageManifest {
    probes: Vec<Probe>,
    offsets: Vec<usize>,
    by_name: HashMap<(Metric, String), usize>,
    total: usize,
    id: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CoverageError {
    #[error("coverage maps bound to different manifests ({0:#x} vs {1:#x})")]
    ManifestMismatch(u64, u64),
}

impl CoverageManifest {
    pub fn new(probes: Vec<Probe>) -> Arc<CoverageManifest> {
        let mut offsets = Vec::with_capacity(probes.len());
        let mut by_name = HashMap::new();
        let mut total = 0usize;
        let mut id = FNV_OFFSET;
        for (i, p) in probes.iter().enumerate() {
            let prev = by_name.insert((p.kind.metric(), p.unit.clone()), i);
            assert!(prev.is_none(), "duplicate probe unit {:?}/{}", p.kind.metric(), p.unit);
            offsets.push(total);
            total += p.kind.universe();
            fnv1a(&mut id, p.unit.as_bytes());
            fnv1a(&mut id, format!("{:?}{}", p.kind, p.block).as_bytes());
        }
        Arc::new(CoverageManifest { probes, offsets, by_name, total, id })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn total_points(&self) -> usize {
        self.total
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    pub fn probe_id(&self, metric: Metric, unit: &str) -> Option<ProbeId> {
        self.by_name.get(&(metric, unit.to_string())).map(|&i| ProbeId(i))
    }

    pub fn probe(&self, id: ProbeId) -> &Probe {
        &self.probes[id.0]
    }

    /// Resolve a probe that must exist in this manifest.
    pub fn expect_probe(&self, metric: Metric, unit: &str) -> ProbeId {
        self.probe_id(metric, unit)
            .unwrap_or_else(|| panic!("undeclared probe {metric}/{unit}"))
    }

    pub fn point_at(&self, index: usize) -> CoveragePoint {
        let probe_idx = match self.offsets.binary_search(&index) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let p = &self.probes[probe_idx];
        CoveragePoint {
            metric: p.kind.metric(),
            unit: p.unit.clone(),
            sub: (index - self.offsets[probe_idx]) as u32,
        }
    }

    /// Per-metric universe sizes.
    pub fn universe_by_metric(&self) -> Vec<(Metric, usize)> {
        Metric::ALL
            .iter()
            .map(|&m| {
                let n = self
                    .probes
                    .iter()
                    .filter(|p| p.kind.metric() == m)
                    .map(|p| p.kind.universe())
                    .sum();
                (m, n)
            })
            .collect()
    }

    /// Bitmask over the universe selecting the given metrics.
    pub fn metric_mask(&self, metrics: &BTreeSet<Metric>) -> Vec<u64> {
        let mut mask = vec![0u64; self.total.div_ceil(64)];
        for (i, p) in self.probes.iter().enumerate() {
            if metrics.contains(&p.kind.metric()) {
                let start = self.offsets[i];
                for bit in start..start + p.kind.universe() {
                    mask[bit / 64] |= 1 << (bit % 64);
                }
            }
        }
        mask
    }

    /// Total universe size over probes with the given block tag, per metric.
    pub fn block_universe(&self, block: u32, metric: Metric) -> usize {
        self.probes
            .iter()
            .filter(|p| p.block == block && p.kind.metric() == metric)
            .map(|p| p.kind.universe())
            .sum()
    }
}

/// Observation fed to [`CoverageMap::record`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    Statement,
    Branch { taken: bool },
    /// Condition/expression input vector, one bit per declared input.
    Inputs { vector: u8 },
    Toggle { bit: u8, transition: Transition },
    FsmState { state: u8 },
    FsmTransition { index: u8 },
    Mux { select: bool },
    CtrlReg { value: u16 },
}

/// Mergeable hit-set over a manifest's universe.
#[derive(Debug, Clone)]
pub struct CoverageMap {
    manifest: Arc<CoverageManifest>,
    bits: Vec<u64>,
}

impl CoverageMap {
    pub fn empty(manifest: &Arc<CoverageManifest>) -> CoverageMap {
        CoverageMap {
            manifest: Arc::clone(manifest),
            bits: vec![0; manifest.total.div_ceil(64)],
        }
    }

    pub fn manifest(&self) -> &Arc<CoverageManifest> {
        &self.manifest
    }

    pub fn manifest_id(&self) -> u64 {
        self.manifest.id
    }

    fn sub_for(&self, probe: &Probe, obs: Observation) -> u32 {
        let out_of_universe =
            || panic!("out-of-universe observation {:?} for probe {}", obs, probe.unit);
        match (probe.kind, obs) {
            (ProbeKind::Statement, Observation::Statement) => 0,
            (ProbeKind::Branch, Observation::Branch { taken }) => taken as u32,
            (
                ProbeKind::Condition { inputs } | ProbeKind::Expression { inputs },
                Observation::Inputs { vector },
            ) => {
                if u32::from(vector) >= 1 << inputs {
                    out_of_universe();
                }
                vector as u32
            }
            (ProbeKind::Toggle { bits, tristate }, Observation::Toggle { bit, transition }) => {
                let per_bit = if tristate { 6 } else { 2 };
                let t = transition.sub_index();
                if bit >= bits || t >= per_bit {
                    out_of_universe();
                }
                bit as u32 * per_bit + t
            }
            (ProbeKind::Fsm { states, .. }, Observation::FsmState { state }) => {
                if state >= states {
                    out_of_universe();
                }
                state as u32
            }
            (ProbeKind::Fsm { states, transitions }, Observation::FsmTransition { index }) => {
                if index >= transitions {
                    out_of_universe();
                }
                states as u32 + index as u32
            }
            (ProbeKind::Mux, Observation::Mux { select }) => select as u32,
            (ProbeKind::CtrlReg { width }, Observation::CtrlReg { value }) => {
                if u32::from(value) >= 1 << width {
                    out_of_universe();
                }
                value as u32
            }
            _ => out_of_universe(),
        }
    }

    /// Set the point for an observation. Re-recording is a no-op.
    /// Undeclared units and out-of-universe observations are programming
    /// errors and panic.
    pub fn record(&mut self, id: ProbeId, obs: Observation) {
        let probe = &self.manifest.probes[id.0];
        let sub = self.sub_for(probe, obs);
        let index = self.manifest.offsets[id.0] + sub as usize;
        self.bits[index / 64] |= 1 << (index % 64);
    }

    pub fn record_by_name(&mut self, metric: Metric, unit: &str, obs: Observation) {
        let id = self.manifest.expect_probe(metric, unit);
        self.record(id, obs);
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn hit_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hit_count_masked(&self, mask: &[u64]) -> usize {
        self.bits
            .iter()
            .zip(mask)
            .map(|(w, m)| (w & m).count_ones() as usize)
            .sum()
    }

    fn check_same(&self, other: &CoverageMap) -> Result<(), CoverageError> {
        if self.manifest.id != other.manifest.id {
            return Err(CoverageError::ManifestMismatch(self.manifest.id, other.manifest.id));
        }
        Ok(())
    }

    /// Bitwise union in place.
    pub fn merge_from(&mut self, other: &CoverageMap) -> Result<(), CoverageError> {
        self.check_same(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn merge(a: &CoverageMap, b: &CoverageMap) -> Result<CoverageMap, CoverageError> {
        let mut out = a.clone();
        out.merge_from(b)?;
        Ok(out)
    }

    /// Point indices hit by `run` but not by `self` (the global map).
    pub fn delta(&self, run: &CoverageMap) -> Result<Vec<usize>, CoverageError> {
        self.check_same(run)?;
        let mut new_points = Vec::new();
        for (i, (g, r)) in self.bits.iter().zip(&run.bits).enumerate() {
            let mut fresh = r & !g;
            while fresh != 0 {
                let bit = fresh.trailing_zeros() as usize;
                new_points.push(i * 64 + bit);
                fresh &= fresh - 1;
            }
        }
        Ok(new_points)
    }

    /// Like [`CoverageMap::delta`] but restricted to a metric mask; returns
    /// only whether anything new appeared.
    pub fn delta_nonempty_masked(
        &self,
        run: &CoverageMap,
        mask: &[u64],
    ) -> Result<bool, CoverageError> {
        self.check_same(run)?;
        Ok(self
            .bits
            .iter()
            .zip(&run.bits)
            .zip(mask)
            .any(|((g, r), m)| r & !g & m != 0))
    }

    pub fn points(&self, indices: &[usize]) -> Vec<CoveragePoint> {
        indices.iter().map(|&i| self.manifest.point_at(i)).collect()
    }

    /// Per-metric (hit, universe) counts.
    pub fn totals(&self) -> Vec<MetricTotal> {
        let mut hit = HashMap::new();
        for (i, p) in self.manifest.probes.iter().enumerate() {
            let start = self.manifest.offsets[i];
            let n = (start..start + p.kind.universe())
                .filter(|&b| self.contains(b))
                .count();
            *hit.entry(p.kind.metric()).or_insert(0) += n;
        }
        self.manifest
            .universe_by_metric()
            .into_iter()
            .map(|(metric, universe)| MetricTotal {
                metric,
                hit: hit.get(&metric).copied().unwrap_or(0),
                universe,
            })
            .collect()
    }
}

impl PartialEq for CoverageMap {
    fn eq(&self, other: &Self) -> bool {
        self.manifest.id == other.manifest.id && self.bits == other.bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricTotal {
    pub metric: Metric,
    pub hit: usize,
    pub universe: usize,
}

/// Tracks per-bit previous values of a register and records toggle
/// transitions as the value changes.
#[derive(Debug, Clone)]
pub struct ToggleTracker {
    id: ProbeId,
    prev: Vec<Wire>,
}

impl ToggleTracker {
    /// All bits start at `initial`; declared tri-state signals may start
    /// floating (`Wire::Z`).
    pub fn new(manifest: &CoverageManifest, unit: &str, initial: Wire) -> ToggleTracker {
        let id = manifest.expect_probe(Metric::Toggle, unit);
        let ProbeKind::Toggle { bits, tristate } = manifest.probe(id).kind else {
            panic!("probe {unit} is not a toggle probe");
        };
        assert!(tristate || initial != Wire::Z, "binary signal cannot start floating");
        ToggleTracker { id, prev: vec![initial; bits as usize] }
    }

    pub fn observe_bits(&mut self, map: &mut CoverageMap, value: u32) {
        for bit in 0..self.prev.len() {
            let now = if value >> bit & 1 == 1 { Wire::One } else { Wire::Zero };
            if let Some(t) = Transition::between(self.prev[bit], now) {
                map.record(self.id, Observation::Toggle { bit: bit as u8, transition: t });
            }
            self.prev[bit] = now;
        }
    }

    pub fn observe_wires(&mut self, map: &mut CoverageMap, wires: &[Wire]) {
        assert_eq!(wires.len(), self.prev.len());
        for (bit, &now) in wires.iter().enumerate() {
            if let Some(t) = Transition::between(self.prev[bit], now) {
                map.record(self.id, Observation::Toggle { bit: bit as u8, transition: t });
            }
            self.prev[bit] = now;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> Arc<CoverageManifest> {
        CoverageManifest::new(vec![
            Probe { unit: "b".into(), kind: ProbeKind::Branch, block: 0 },
            Probe { unit: "e3".into(), kind: ProbeKind::Expression { inputs: 3 }, block: 0 },
            Probe { unit: "t".into(), kind: ProbeKind::Toggle { bits: 4, tristate: false }, block: 0 },
            Probe { unit: "tz".into(), kind: ProbeKind::Toggle { bits: 1, tristate: true }, block: 0 },
            Probe { unit: "f".into(), kind: ProbeKind::Fsm { states: 2, transitions: 1 }, block: 0 },
            Probe { unit: "cr".into(), kind: ProbeKind::CtrlReg { width: 5 }, block: 0 },
        ])
    }

    #[test]
    fn universe_sizes_follow_metric_formulas() {
        let m = manifest();
        assert_eq!(m.total_points(), 2 + 8 + 8 + 6 + 3 + 32);
        assert_eq!(m.block_universe(0, Metric::CtrlReg), 32);
    }

    #[test]
    fn record_sets_expected_point() {
        let m = manifest();
        let mut map = CoverageMap::empty(&m);
        // expression probe on 3 inputs observing (1,0,1) sets index 5 of 8
        let id = m.expect_probe(Metric::Expression, "e3");
        map.record(id, Observation::Inputs { vector: 0b101 });
        let hits = CoverageMap::empty(&m).delta(&map).unwrap();
        assert_eq!(map.points(&hits), vec![CoveragePoint {
            metric: Metric::Expression,
            unit: "e3".into(),
            sub: 5,
        }]);
    }

    #[test]
    fn rerecord_is_noop() {
        let m = manifest();
        let mut map = CoverageMap::empty(&m);
        let id = m.expect_probe(Metric::Branch, "b");
        map.record(id, Observation::Branch { taken: true });
        let snapshot = map.clone();
        map.record(id, Observation::Branch { taken: true });
        assert_eq!(map, snapshot);
        assert_eq!(map.hit_count(), 1);
    }

    #[test]
    #[should_panic(expected = "out-of-universe")]
    fn out_of_universe_panics() {
        let m = manifest();
        let mut map = CoverageMap::empty(&m);
        let id = m.expect_probe(Metric::Expression, "e3");
        map.record(id, Observation::Inputs { vector: 8 });
    }

    #[test]
    #[should_panic(expected = "undeclared probe")]
    fn undeclared_unit_panics() {
        let m = manifest();
        m.expect_probe(Metric::Branch, "nope");
    }

    #[test]
    fn merge_identity_and_mismatch() {
        let m = manifest();
        let mut a = CoverageMap::empty(&m);
        a.record_by_name(Metric::Branch, "b", Observation::Branch { taken: false });
        let empty = CoverageMap::empty(&m);
        assert_eq!(CoverageMap::merge(&a, &empty).unwrap(), a);

        let other = CoverageManifest::new(vec![Probe {
            unit: "b".into(),
            kind: ProbeKind::Branch,
            block: 1,
        }]);
        let b = CoverageMap::empty(&other);
        assert!(matches!(
            CoverageMap::merge(&a, &b),
            Err(CoverageError::ManifestMismatch(..))
        ));
    }

    #[test]
    fn delta_and_absorption() {
        let m = manifest();
        let mut global = CoverageMap::empty(&m);
        let mut run = CoverageMap::empty(&m);
        run.record_by_name(Metric::Fsm, "f", Observation::FsmState { state: 1 });
        run.record_by_name(Metric::CtrlReg, "cr", Observation::CtrlReg { value: 31 });
        assert_eq!(global.delta(&run).unwrap().len(), 2);
        global.merge_from(&run).unwrap();
        assert!(global.delta(&run).unwrap().is_empty());
    }

    #[test]
    fn toggle_tracker_constant_signal_hits_nothing() {
        let m = manifest();
        let mut map = CoverageMap::empty(&m);
        let mut t = ToggleTracker::new(&m, "t", Wire::Zero);
        for _ in 0..10 {
            t.observe_bits(&mut map, 0);
        }
        assert_eq!(map.hit_count(), 0);
        t.observe_bits(&mut map, 0b1010);
        assert_eq!(map.hit_count(), 2); // bits 1 and 3: 0→1
    }

    #[test]
    fn tristate_tracker_records_z_transitions() {
        let m = manifest();
        let mut map = CoverageMap::empty(&m);
        let mut t = ToggleTracker::new(&m, "tz", Wire::Z);
        t.observe_wires(&mut map, &[Wire::One]);
        t.observe_wires(&mut map, &[Wire::Zero]);
        let totals = map.totals();
        let toggle = totals.iter().find(|t| t.metric == Metric::Toggle).unwrap();
        assert_eq!(toggle.hit, 2); // Z→1 then 1→0
    }

    #[test]
    fn totals_tally_per_metric() {
        let m = manifest();
        let map = CoverageMap::empty(&m);
        for t in map.totals() {
            assert_eq!(t.hit, 0);
        }
        let mut map = CoverageMap::empty(&m);
        for v in 0..8 {
            map.record_by_name(Metric::Expression, "e3", Observation::Inputs { vector: v });
        }
        let totals = map.totals();
        let expr = totals.iter().find(|t| t.metric == Metric::Expression).unwrap();
        assert_eq!((expr.hit, expr.universe), (8, 8));
    }
}
