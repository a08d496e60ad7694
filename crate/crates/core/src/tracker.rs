//! Frame-by-frame tracking loop.
//!
//! Every frame: predict the live tracks, build a Euclidean cost matrix
//! between predicted positions and detections, solve and gate the
//! assignment, update matched tracks, coast or retire unmatched ones and
//! start a tentative track for each leftover detection.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::assignment::{self, Assignment, CostMatrix};
use crate::kfilter::{self, KalmanState, Measurement, MotionModel};
use crate::{Error, Result};

pub use crate::detection::Detection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Dead,
}

/// Whether a track position came from a matched detection or from the
/// motion model alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Measured,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub frame: u64,
    pub x: f64,
    pub y: f64,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    pub state: KalmanState,
    pub status: TrackStatus,
    pub hit_streak: u32,
    pub miss_streak: u32,
    /// Frames since birth.
    pub age: u32,
    pub history: Vec<HistoryEntry>,
}

impl Track {
    pub fn position(&self) -> (f64, f64) {
        self.state.position()
    }

    pub fn is_alive(&self) -> bool {
        self.status != TrackStatus::Dead
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Largest predicted-to-detection distance accepted as a match (px).
    pub gate_px: f64,
    /// Consecutive hits (birth included) needed to confirm a track.
    pub confirm_hits: u32,
    /// Consecutive misses a confirmed track survives.
    pub max_misses: u32,
    pub sigma_a: f64,
    pub sigma_z: f64,
    pub p0_pos: f64,
    pub p0_vel: f64,
    /// Detections below this confidence are ignored.
    pub min_confidence: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            gate_px: 50.0,
            confirm_hits: 3,
            max_misses: 5,
            sigma_a: kfilter::DEFAULT_SIGMA_A,
            sigma_z: kfilter::DEFAULT_SIGMA_Z,
            p0_pos: kfilter::DEFAULT_P0_POS,
            p0_vel: kfilter::DEFAULT_P0_VEL,
            min_confidence: 0.0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gate_px.is_finite() && self.gate_px > 0.0) {
            return Err(Error::param("gate_px", "must be positive"));
        }
        if self.confirm_hits < 1 {
            return Err(Error::param("confirm_hits", "must be at least 1"));
        }
        if !self.min_confidence.is_finite() {
            return Err(Error::param("min_confidence", "must be finite"));
        }
        MotionModel::constant_velocity(self.sigma_a, self.sigma_z)?;
        kfilter::init_state(&Detection::new(1, 0.0, 0.0), self.p0_pos, self.p0_vel)?;
        Ok(())
    }
}

/// One emitted track position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRecord {
    pub track_id: u64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub status: TrackStatus,
    pub source: Source,
}

/// Tracker output for one frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameResult {
    pub frame: u64,
    /// One record per live track, ascending track id.
    pub records: Vec<TrackRecord>,
    pub born: Vec<u64>,
    pub died: Vec<u64>,
    /// `(track_id, detection_index)` for each association made this frame;
    /// indices refer to the detection slice passed to [`Tracker::step`].
    pub matched: Vec<(u64, usize)>,
}

impl FrameResult {
    pub fn empty(frame: u64) -> Self {
        Self {
            frame,
            ..Default::default()
        }
    }
}

/// Euclidean distances between predicted track positions (rows, sorted by
/// track id) and detections (columns, input order).
pub fn build_cost_matrix(
    predicted: &[(u64, f64, f64)],
    detections: &[Detection],
) -> Result<CostMatrix> {
    if predicted.is_empty() || detections.is_empty() {
        return Err(Error::Empty {
            tracks: predicted.len(),
            detections: detections.len(),
        });
    }
    let mut rows = predicted.to_vec();
    rows.sort_by_key(|p| p.0);
    let data = rows
        .iter()
        .flat_map(|&(_, px, py)| detections.iter().map(move |d| (px - d.x).hypot(py - d.y)))
        .collect();
    CostMatrix::new(rows.len(), detections.len(), data)
}

/// Drops every pair whose cost exceeds `gate_px`.
pub fn gate(assignment: &Assignment, cost: &CostMatrix, gate_px: f64) -> Assignment {
    let kept = assignment
        .pairs
        .iter()
        .copied()
        .filter(|&(r, c)| cost.get(r, c) <= gate_px)
        .collect();
    Assignment::from_pairs(kept, cost)
}

/// Sequential multi-target tracker.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    model: MotionModel,
    tracks: Vec<Track>,
    retired: Vec<Track>,
    next_id: u64,
    last_frame: u64,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        let model = MotionModel::constant_velocity(config.sigma_a, config.sigma_z)?;
        Ok(Self {
            config,
            model,
            tracks: Vec::new(),
            retired: Vec::new(),
            next_id: 1,
            last_frame: 0,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Live tracks, ascending id.
    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Tracks that have died, in order of death.
    pub fn retired(&self) -> &[Track] {
        &self.retired
    }

    pub fn tracks_created(&self) -> u64 {
        self.next_id - 1
    }

    pub fn last_frame(&self) -> u64 {
        self.last_frame
    }

    /// Where each live track will be predicted at the next step.
    pub fn predictions(&self) -> Vec<(u64, f64, f64)> {
        self.tracks
            .iter()
            .map(|t| {
                let (x, y) = self.model.predict(&t.state).position();
                (t.id, x, y)
            })
            .collect()
    }

    /// Processes the detections of `frame`, which must be later than every
    /// frame seen so far.
    pub fn step(&mut self, frame: u64, detections: &[Detection]) -> Result<FrameResult> {
        if frame <= self.last_frame {
            return Err(Error::Order {
                frame,
                last: self.last_frame,
            });
        }
        if let Some(d) = detections.iter().find(|d| d.frame != frame) {
            return Err(Error::FrameMismatch {
                expected: frame,
                found: d.frame,
            });
        }
        let min_conf = self.config.min_confidence;
        let kept: Vec<usize> = (0..detections.len())
            .filter(|&i| detections[i].confidence >= min_conf)
            .collect();
        let dets: Vec<Detection> = kept.iter().map(|&i| detections[i]).collect();

        for track in &mut self.tracks {
            track.state = self.model.predict(&track.state);
            track.age += 1;
        }

        let association = if !self.tracks.is_empty() && !dets.is_empty() {
            let predicted: Vec<_> = self
                .tracks
                .iter()
                .map(|t| (t.id, t.state.mean[0], t.state.mean[1]))
                .collect();
            let cost = build_cost_matrix(&predicted, &dets)?;
            let solved = assignment::solve(&cost)?;
            gate(&solved, &cost, self.config.gate_px)
        } else {
            Assignment {
                pairs: Vec::new(),
                unmatched_rows: (0..self.tracks.len()).collect(),
                unmatched_cols: (0..dets.len()).collect(),
                total_cost: 0.0,
            }
        };

        let mut result = FrameResult::empty(frame);
        for &(row, col) in &association.pairs {
            let det = &dets[col];
            let track = &mut self.tracks[row];
            let (posterior, _) = self.model.update(&track.state, Measurement::from(det))?;
            track.state = posterior;
            track.hit_streak += 1;
            track.miss_streak = 0;
            if track.status == TrackStatus::Tentative
                && track.hit_streak >= self.config.confirm_hits
            {
                track.status = TrackStatus::Confirmed;
            }
            let (x, y) = track.position();
            track.history.push(HistoryEntry {
                frame,
                x,
                y,
                source: Source::Measured,
            });
            result.matched.push((track.id, kept[col]));
        }

        for &row in &association.unmatched_rows {
            let track = &mut self.tracks[row];
            track.hit_streak = 0;
            track.miss_streak += 1;
            if track.status == TrackStatus::Tentative || track.miss_streak > self.config.max_misses
            {
                track.status = TrackStatus::Dead;
                result.died.push(track.id);
            } else {
                let (x, y) = track.position();
                track.history.push(HistoryEntry {
                    frame,
                    x,
                    y,
                    source: Source::Predicted,
                });
            }
        }
        result.died.sort_unstable();

        let (alive, dead): (Vec<_>, Vec<_>) = std::mem::take(&mut self.tracks)
            .into_iter()
            .partition(Track::is_alive);
        self.tracks = alive;
        self.retired.extend(dead);

        for &col in &association.unmatched_cols {
            let det = &dets[col];
            let state = kfilter::init_state(det, self.config.p0_pos, self.config.p0_vel)?;
            let status = if self.config.confirm_hits <= 1 {
                TrackStatus::Confirmed
            } else {
                TrackStatus::Tentative
            };
            let id = self.next_id;
            self.next_id += 1;
            self.tracks.push(Track {
                id,
                state,
                status,
                hit_streak: 1,
                miss_streak: 0,
                age: 0,
                history: vec![HistoryEntry {
                    frame,
                    x: det.x,
                    y: det.y,
                    source: Source::Measured,
                }],
            });
            result.born.push(id);
        }

        result.records = self
            .tracks
            .iter()
            .map(|t| {
                let last = t.history.last().expect("live track has history");
                let (vx, vy) = t.state.velocity();
                TrackRecord {
                    track_id: t.id,
                    x: last.x,
                    y: last.y,
                    vx,
                    vy,
                    status: t.status,
                    source: last.source,
                }
            })
            .collect();
        self.last_frame = frame;
        Ok(result)
    }
}

/// Runs a fresh tracker over every frame in `frames`; frames missing from
/// `detections` are stepped with no detections.
pub fn run(
    detections: &BTreeMap<u64, Vec<Detection>>,
    config: &TrackerConfig,
    frames: RangeInclusive<u64>,
) -> Result<Vec<FrameResult>> {
    let mut tracker = Tracker::new(config.clone())?;
    frames
        .map(|frame| {
            let dets = detections.get(&frame).map_or(&[][..], Vec::as_slice);
            tracker.step(frame, dets)
        })
        .collect()
}
