//! Seeded synthetic scenarios and CLEAR-style association scoring.
//!
//! # Random stream
//!
//! All randomness comes from xoshiro256** whose four state words are the
//! first four outputs of SplitMix64 seeded with `ScenarioSpec::seed`. Draws
//! happen in this order, frame by frame (`t = 1..=n_frames`):
//!
//! 1. for every target alive at `t`, in spec order: one uniform `u`; the
//!    detection is dropped when `u < miss_prob`, otherwise two uniforms feed
//!    a Box-Muller pair `(n0, n1)` and the detection is
//!    `(x + noise_sigma * n0, y + noise_sigma * n1)`;
//! 2. the clutter count `k` from a Poisson(`clutter_rate`) sampler that
//!    multiplies uniforms until the product drops to `exp(-clutter_rate)`
//!    or below;
//! 3. `k` clutter points, two uniforms each: `(u * width, u * height)`.
//!
//! A uniform is `(next_u64 >> 11) * 2^-53`. Box-Muller uses
//! `r = sqrt(-2 ln(1 - u0))`, `n0 = r cos(2 pi u1)`, `n1 = r sin(2 pi u1)`.

use std::collections::{BTreeMap, HashMap};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

use crate::assignment::{self, CostMatrix};
use crate::tracker::{FrameResult, TrackStatus};
use crate::{Detection, Error, Result};

/// Upper limit on `clutter_rate`; the Poisson sampler loses accuracy once
/// `exp(-rate)` approaches the subnormal range.
pub const MAX_CLUTTER_RATE: f64 = 500.0;

pub const DEFAULT_MATCH_RADIUS: f64 = 10.0;

/// A target moving on a straight line at constant velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    /// First frame the target is present.
    pub birth_frame: u64,
    /// Last frame the target is present.
    pub death_frame: u64,
    pub start_x: f64,
    pub start_y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl TargetSpec {
    pub fn is_alive(&self, frame: u64) -> bool {
        (self.birth_frame..=self.death_frame).contains(&frame)
    }

    pub fn position(&self, frame: u64) -> (f64, f64) {
        let dt = frame as f64 - self.birth_frame as f64;
        (self.start_x + self.vx * dt, self.start_y + self.vy * dt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub n_frames: u64,
    pub targets: Vec<TargetSpec>,
    pub noise_sigma: f64,
    pub miss_prob: f64,
    /// Expected false detections per frame.
    pub clutter_rate: f64,
    /// `(width, height)` of the clutter area in pixels.
    pub bounds: (f64, f64),
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            n_frames: 100,
            targets: Vec::new(),
            noise_sigma: 0.0,
            miss_prob: 0.0,
            clutter_rate: 0.0,
            bounds: (640.0, 480.0),
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_frames == 0 {
            return Err(Error::Spec("n_frames must be at least 1".into()));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if t.birth_frame < 1 || t.birth_frame >= t.death_frame || t.death_frame > self.n_frames
            {
                return Err(Error::Spec(format!(
                    "target {}: need 1 <= birth ({}) < death ({}) <= n_frames ({})",
                    i + 1,
                    t.birth_frame,
                    t.death_frame,
                    self.n_frames
                )));
            }
            let motion = [t.start_x, t.start_y, t.vx, t.vy];
            if motion.iter().any(|v| !v.is_finite()) {
                return Err(Error::Spec(format!("target {}: non-finite motion", i + 1)));
            }
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Spec("noise_sigma must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.miss_prob) {
            return Err(Error::Spec("miss_prob must lie in [0, 1]".into()));
        }
        if !(0.0..=MAX_CLUTTER_RATE).contains(&self.clutter_rate) {
            return Err(Error::Spec(format!(
                "clutter_rate must lie in [0, {MAX_CLUTTER_RATE}]"
            )));
        }
        let (w, h) = self.bounds;
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return Err(Error::Spec("bounds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtPoint {
    pub id: u64,
    pub x: f64,
    pub y: f64,
}

/// True target positions, one list per frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    /// `frames[t - 1]` holds the targets alive at frame `t`, ascending id.
    pub frames: Vec<Vec<GtPoint>>,
}

impl GroundTruth {
    pub fn n_frames(&self) -> u64 {
        self.frames.len() as u64
    }

    pub fn at(&self, frame: u64) -> &[GtPoint] {
        frame
            .checked_sub(1)
            .and_then(|i| self.frames.get(i as usize))
            .map_or(&[], Vec::as_slice)
    }

    pub fn total_points(&self) -> usize {
        self.frames.iter().map(Vec::len).sum()
    }

    /// Ground truth as a perfect tracker output: every point becomes a
    /// confirmed, measured record whose track id equals the target id.
    pub fn as_results(&self) -> Vec<FrameResult> {
        use crate::tracker::{Source, TrackRecord};
        self.frames
            .iter()
            .enumerate()
            .map(|(i, pts)| FrameResult {
                frame: i as u64 + 1,
                records: pts
                    .iter()
                    .map(|p| TrackRecord {
                        track_id: p.id,
                        x: p.x,
                        y: p.y,
                        vx: 0.0,
                        vy: 0.0,
                        status: TrackStatus::Confirmed,
                        source: Source::Measured,
                    })
                    .collect(),
                ..Default::default()
            })
            .collect()
    }
}

/// Scenario random stream; see the module docs for the exact algorithm.
pub struct ScenarioRng(Xoshiro256StarStar);

impl ScenarioRng {
    pub fn new(seed: u64) -> Self {
        let mut mixer = SplitMix64::seed_from_u64(seed);
        let mut state = [0u8; 32];
        for chunk in state.chunks_exact_mut(8) {
            chunk.copy_from_slice(&mixer.next_u64().to_le_bytes());
        }
        Self(Xoshiro256StarStar::from_seed(state))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u0 = self.uniform();
        let u1 = self.uniform();
        let r = (-2.0 * (1.0 - u0).ln()).sqrt();
        let theta = std::f64::consts::TAU * u1;
        (r * theta.cos(), r * theta.sin())
    }

    pub fn poisson(&mut self, rate: f64) -> u64 {
        let limit = (-rate).exp();
        let mut k = 0;
        let mut product = self.uniform();
        while product > limit {
            k += 1;
            product *= self.uniform();
        }
        k
    }
}

/// Generates ground truth and noisy detections. Target ids are 1-based
/// positions in `spec.targets`.
pub fn generate(spec: &ScenarioSpec) -> Result<(GroundTruth, Vec<Detection>)> {
    spec.validate()?;
    let mut rng = ScenarioRng::new(spec.seed);
    let mut truth = GroundTruth {
        frames: Vec::with_capacity(spec.n_frames as usize),
    };
    let mut detections = Vec::new();
    let (width, height) = spec.bounds;
    for frame in 1..=spec.n_frames {
        let mut alive = Vec::new();
        for (i, target) in spec.targets.iter().enumerate() {
            if !target.is_alive(frame) {
                continue;
            }
            let (x, y) = target.position(frame);
            alive.push(GtPoint {
                id: i as u64 + 1,
                x,
                y,
            });
            if rng.uniform() < spec.miss_prob {
                continue;
            }
            let (n0, n1) = rng.normal_pair();
            detections.push(Detection::new(
                frame,
                x + spec.noise_sigma * n0,
                y + spec.noise_sigma * n1,
            ));
        }
        let clutter = rng.poisson(spec.clutter_rate);
        for _ in 0..clutter {
            let x = rng.uniform() * width;
            let y = rng.uniform() * height;
            detections.push(Detection::new(frame, x, y));
        }
        truth.frames.push(alive);
    }
    Ok((truth, detections))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Largest hypothesis-to-truth distance counted as a match (px).
    pub match_radius: f64,
    /// Score tentative records as well as confirmed ones.
    pub include_tentative: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            match_radius: DEFAULT_MATCH_RADIUS,
            include_tentative: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub total_gt: usize,
    pub matches: usize,
    pub misses: usize,
    pub false_positives: usize,
    pub id_switches: usize,
    /// Times a ground-truth target is matched again after having been
    /// matched earlier and then missed.
    pub fragmentation: usize,
    /// `1 - (misses + false_positives + id_switches) / total_gt`, with the
    /// denominator floored at 1.
    pub mota: f64,
}

impl Metrics {
    /// `key=value` lines in a fixed order.
    pub fn to_key_values(&self) -> String {
        format!(
            "mota={:.6}\nid_switches={}\nmisses={}\nfalse_positives={}\nmatches={}\nfragmentation={}\ntotal_gt={}\n",
            self.mota,
            self.id_switches,
            self.misses,
            self.false_positives,
            self.matches,
            self.fragmentation,
            self.total_gt
        )
    }
}

/// Scores tracker output against ground truth.
///
/// Per frame, ground-truth points (rows, ascending id) and hypotheses
/// (columns, record order) are matched by the Hungarian solver on
/// Euclidean distance and pairs farther than `match_radius` are dropped.
/// Frames absent from `results` have no hypotheses; result frames past the
/// end of the ground truth have no targets.
pub fn evaluate(results: &[FrameResult], gt: &GroundTruth, opts: EvalOptions) -> Result<Metrics> {
    if !(opts.match_radius.is_finite() && opts.match_radius > 0.0) {
        return Err(Error::param("match_radius", "must be positive"));
    }
    let mut by_frame: BTreeMap<u64, &FrameResult> = BTreeMap::new();
    let mut prev = 0;
    for r in results {
        if r.frame <= prev {
            return Err(Error::Alignment(format!(
                "result frame {} follows frame {prev}; frames must be 1-based and strictly ascending",
                r.frame
            )));
        }
        prev = r.frame;
        by_frame.insert(r.frame, r);
    }
    let last_frame = gt.n_frames().max(prev);

    let mut m = Metrics::default();
    let mut history: HashMap<u64, GtHistory> = HashMap::new();

    for frame in 1..=last_frame {
        let truth = gt.at(frame);
        let hyps: Vec<_> = by_frame
            .get(&frame)
            .map(|r| {
                r.records
                    .iter()
                    .filter(|rec| match rec.status {
                        TrackStatus::Confirmed => true,
                        TrackStatus::Tentative => opts.include_tentative,
                        TrackStatus::Dead => false,
                    })
                    .collect()
            })
            .unwrap_or_default();
        m.total_gt += truth.len();

        let mut matched_track = vec![None; truth.len()];
        if !truth.is_empty() && !hyps.is_empty() {
            let data = truth
                .iter()
                .flat_map(|g| hyps.iter().map(move |h| (g.x - h.x).hypot(g.y - h.y)))
                .collect();
            let cost = CostMatrix::new(truth.len(), hyps.len(), data)?;
            for (r, c) in assignment::solve(&cost)?.pairs {
                if cost.get(r, c) <= opts.match_radius {
                    matched_track[r] = Some(hyps[c].track_id);
                }
            }
        }

        let mut matched = 0;
        for (g, track) in truth.iter().zip(&matched_track) {
            let h = history.entry(g.id).or_default();
            if let Some(track) = *track {
                matched += 1;
                if let Some(prev) = h.last_track {
                    if prev != track {
                        m.id_switches += 1;
                    }
                    if !h.matched_last_seen {
                        m.fragmentation += 1;
                    }
                }
                h.last_track = Some(track);
            }
            h.matched_last_seen = track.is_some();
        }
        m.matches += matched;
        m.misses += truth.len() - matched;
        m.false_positives += hyps.len() - matched;
    }
    let errors = (m.misses + m.false_positives + m.id_switches) as f64;
    m.mota = 1.0 - errors / m.total_gt.max(1) as f64;
    Ok(m)
}

#[derive(Default)]
struct GtHistory {
    /// Track matched the last time this target was matched.
    last_track: Option<u64>,
    /// Whether the target was matched in the last frame it was present.
    matched_last_seen: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::{Source, TrackRecord};

    fn target(birth: u64, death: u64, x: f64, y: f64, vx: f64, vy: f64) -> TargetSpec {
        TargetSpec {
            birth_frame: birth,
            death_frame: death,
            start_x: x,
            start_y: y,
            vx,
            vy,
        }
    }

    fn spec() -> ScenarioSpec {
        ScenarioSpec {
            n_frames: 20,
            targets: vec![
                target(1, 20, 10.0, 10.0, 2.0, 0.0),
                target(5, 15, 300.0, 200.0, -1.0, 1.5),
            ],
            ..Default::default()
        }
    }

    fn record(track_id: u64, x: f64, y: f64) -> TrackRecord {
        TrackRecord {
            track_id,
            x,
            y,
            vx: 0.0,
            vy: 0.0,
            status: TrackStatus::Confirmed,
            source: Source::Measured,
        }
    }

    #[test]
    fn noiseless_detections_equal_truth() {
        let (gt, dets) = generate(&spec()).unwrap();
        let flat: Vec<_> = gt
            .frames
            .iter()
            .enumerate()
            .flat_map(|(i, f)| f.iter().map(move |p| (i as u64 + 1, p.x, p.y)))
            .collect();
        let got: Vec<_> = dets.iter().map(|d| (d.frame, d.x, d.y)).collect();
        assert_eq!(flat, got);
        assert_eq!(gt.at(5).len(), 2);
        assert_eq!(gt.at(16).len(), 1);
        assert_eq!(
            gt.at(5)[1],
            GtPoint {
                id: 2,
                x: 300.0,
                y: 200.0
            }
        );
        assert_eq!(gt.at(7)[0].x, 10.0 + 2.0 * 6.0);
    }

    #[test]
    fn same_seed_same_output() {
        let noisy = ScenarioSpec {
            noise_sigma: 1.5,
            miss_prob: 0.2,
            clutter_rate: 2.0,
            seed: 99,
            ..spec()
        };
        let a = generate(&noisy).unwrap();
        let b = generate(&noisy).unwrap();
        assert_eq!(a, b);
        let bits = |d: &[Detection]| -> Vec<(u64, u64)> {
            d.iter().map(|d| (d.x.to_bits(), d.y.to_bits())).collect()
        };
        assert_eq!(bits(&a.1), bits(&b.1));
        let other = generate(&ScenarioSpec { seed: 100, ..noisy }).unwrap();
        assert_ne!(a.1, other.1);
    }

    #[test]
    fn certain_miss_yields_nothing() {
        let (gt, dets) = generate(&ScenarioSpec {
            miss_prob: 1.0,
            ..spec()
        })
        .unwrap();
        assert!(dets.is_empty());
        assert!(gt.total_points() > 0);
    }

    #[test]
    fn clutter_stays_in_bounds() {
        let (_, dets) = generate(&ScenarioSpec {
            targets: vec![],
            clutter_rate: 5.0,
            bounds: (100.0, 50.0),
            ..spec()
        })
        .unwrap();
        assert!(!dets.is_empty());
        assert!(dets
            .iter()
            .all(|d| (0.0..100.0).contains(&d.x) && (0.0..50.0).contains(&d.y)));
    }

    #[test]
    fn rng_stream_is_pinned() {
        // SplitMix64(0) first output, then xoshiro256** on top of it.
        let mut mixer = SplitMix64::seed_from_u64(0);
        assert_eq!(mixer.next_u64(), 0xe220a8397b1dcdaf);
        let mut rng = ScenarioRng::new(42);
        let first: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        let mut again = ScenarioRng::new(42);
        assert_eq!(first, (0..3).map(|_| again.next_u64()).collect::<Vec<_>>());
        let u = ScenarioRng::new(7).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn poisson_mean_is_close() {
        let mut rng = ScenarioRng::new(1);
        let n = 20_000;
        let total: u64 = (0..n).map(|_| rng.poisson(3.0)).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 3.0).abs() < 0.05, "mean {mean}");
        assert_eq!(rng.poisson(0.0), 0);
    }

    #[test]
    fn normal_pair_moments() {
        let mut rng = ScenarioRng::new(5);
        let n = 20_000;
        let samples: Vec<f64> = (0..n)
            .flat_map(|_| {
                let (a, b) = rng.normal_pair();
                [a, b]
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / samples.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = [
            ScenarioSpec {
                targets: vec![target(5, 5, 0.0, 0.0, 0.0, 0.0)],
                ..spec()
            },
            ScenarioSpec {
                targets: vec![target(1, 30, 0.0, 0.0, 0.0, 0.0)],
                ..spec()
            },
            ScenarioSpec {
                targets: vec![target(0, 3, 0.0, 0.0, 0.0, 0.0)],
                ..spec()
            },
            ScenarioSpec {
                miss_prob: 1.5,
                ..spec()
            },
            ScenarioSpec {
                clutter_rate: -1.0,
                ..spec()
            },
            ScenarioSpec {
                bounds: (0.0, 10.0),
                ..spec()
            },
            ScenarioSpec {
                noise_sigma: f64::NAN,
                ..spec()
            },
            ScenarioSpec {
                n_frames: 0,
                targets: vec![],
                ..spec()
            },
        ];
        for s in bad {
            assert!(matches!(generate(&s), Err(Error::Spec(_))), "{s:?}");
        }
    }

    #[test]
    fn perfect_tracking_scores_one() {
        let (gt, _) = generate(&spec()).unwrap();
        let m = evaluate(&gt.as_results(), &gt, EvalOptions::default()).unwrap();
        assert_eq!(m.mota, 1.0);
        assert_eq!(m.id_switches, 0);
        assert_eq!(m.misses, 0);
        assert_eq!(m.false_positives, 0);
        assert_eq!(m.matches, gt.total_points());
        assert_eq!(m.fragmentation, 0);
    }

    #[test]
    fn swapped_ids_count_two_switches() {
        // two targets, ids swap from frame 4 onward
        let gt = GroundTruth {
            frames: (1..=6)
                .map(|f| {
                    vec![
                        GtPoint {
                            id: 1,
                            x: 0.0,
                            y: f as f64,
                        },
                        GtPoint {
                            id: 2,
                            x: 100.0,
                            y: f as f64,
                        },
                    ]
                })
                .collect(),
        };
        let results: Vec<_> = (1..=6)
            .map(|f| {
                let (a, b) = if f < 4 { (1, 2) } else { (2, 1) };
                FrameResult {
                    frame: f,
                    records: vec![record(a, 0.0, f as f64), record(b, 100.0, f as f64)],
                    ..Default::default()
                }
            })
            .collect();
        let m = evaluate(&results, &gt, EvalOptions::default()).unwrap();
        assert_eq!(m.id_switches, 2);
        assert_eq!(m.matches, 12);
        assert!((m.mota - (1.0 - 2.0 / 12.0)).abs() < 1e-12);
    }

    #[test]
    fn no_output_is_all_misses() {
        let (gt, _) = generate(&spec()).unwrap();
        let m = evaluate(&[], &gt, EvalOptions::default()).unwrap();
        assert_eq!(m.misses, gt.total_points());
        assert!(m.mota <= 0.0);
    }

    #[test]
    fn tentative_records_skipped_unless_requested() {
        let gt = GroundTruth {
            frames: vec![vec![GtPoint {
                id: 1,
                x: 0.0,
                y: 0.0,
            }]],
        };
        let mut rec = record(1, 0.0, 0.0);
        rec.status = TrackStatus::Tentative;
        let results = vec![FrameResult {
            frame: 1,
            records: vec![rec],
            ..Default::default()
        }];
        let m = evaluate(&results, &gt, EvalOptions::default()).unwrap();
        assert_eq!(m.misses, 1);
        let m = evaluate(
            &results,
            &gt,
            EvalOptions {
                include_tentative: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.matches, 1);
    }

    #[test]
    fn far_hypothesis_is_miss_and_false_positive() {
        let gt = GroundTruth {
            frames: vec![vec![GtPoint {
                id: 1,
                x: 0.0,
                y: 0.0,
            }]],
        };
        let results = vec![FrameResult {
            frame: 1,
            records: vec![record(1, 11.0, 0.0)],
            ..Default::default()
        }];
        let m = evaluate(&results, &gt, EvalOptions::default()).unwrap();
        assert_eq!((m.matches, m.misses, m.false_positives), (0, 1, 1));
        assert_eq!(m.mota, -1.0);
    }

    #[test]
    fn fragmentation_counts_resumed_matches() {
        let gt = GroundTruth {
            frames: (1..=5)
                .map(|_| {
                    vec![GtPoint {
                        id: 1,
                        x: 0.0,
                        y: 0.0,
                    }]
                })
                .collect(),
        };
        let results: Vec<_> = [1, 2, 4, 5]
            .into_iter()
            .map(|f| FrameResult {
                frame: f,
                records: vec![record(9, 0.0, 0.0)],
                ..Default::default()
            })
            .collect();
        let m = evaluate(&results, &gt, EvalOptions::default()).unwrap();
        assert_eq!(m.fragmentation, 1);
        assert_eq!(m.misses, 1);
        assert_eq!(m.id_switches, 0);
    }

    #[test]
    fn misaligned_results_rejected() {
        let gt = GroundTruth::default();
        let results = vec![FrameResult::empty(3), FrameResult::empty(2)];
        assert!(matches!(
            evaluate(&results, &gt, EvalOptions::default()),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            evaluate(&[FrameResult::empty(0)], &gt, EvalOptions::default()),
            Err(Error::Alignment(_))
        ));
    }
}
