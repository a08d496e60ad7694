//! Line-oriented file formats and SVG overlays.
//!
//! | file        | line layout                                   |
//! |-------------|-----------------------------------------------|
//! | detections  | `frame,x,y[,confidence]`                      |
//! | tracks      | `frame,track_id,x,y,vx,vy,status,source`      |
//! | truth       | `frame,gt_id,x,y`                             |
//! | config      | `key = value`, `#` starts a comment           |
//!
//! Writers print every real number with six decimals, so equal inputs give
//! equal bytes. Parsers report the 1-based line of the first bad line.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::synth::{GroundTruth, GtPoint, ScenarioSpec, TargetSpec};
use crate::tracker::{FrameResult, Source, TrackRecord, TrackStatus, TrackerConfig};
use crate::{Detection, Error, Result};

/// Detections grouped by frame; frames ascending, file order within a frame.
pub type DetectionMap = BTreeMap<u64, Vec<Detection>>;

/// Trail length drawn behind each track in overlays.
pub const TRAIL_LEN: usize = 20;

/// Largest frame index accepted by the parsers. Frames are stepped and
/// stored densely, so an unbounded index would be a resource hazard.
pub const MAX_FRAME: u64 = 10_000_000;

/// Fixed overlay palette; tracks pick a color by hashing their id.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939",
];

fn fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_real(field: &str, what: &str, line: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(
            line,
            format!("{what}: expected a finite number, got `{field}`"),
        )),
    }
}

fn parse_count(field: &str, what: &str, line: usize) -> Result<u64> {
    field.parse::<u64>().map_err(|_| {
        Error::parse(
            line,
            format!("{what}: expected a nonnegative integer, got `{field}`"),
        )
    })
}

fn parse_index(field: &str, what: &str, line: usize) -> Result<u64> {
    match parse_count(field, what, line)? {
        0 => Err(Error::parse(line, format!("{what} must be at least 1"))),
        v => Ok(v),
    }
}

fn parse_frame(field: &str, line: usize) -> Result<u64> {
    let frame = parse_index(field, "frame", line)?;
    if frame > MAX_FRAME {
        return Err(Error::parse(
            line,
            format!("frame {frame} exceeds {MAX_FRAME}"),
        ));
    }
    Ok(frame)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_detections(text: &str) -> Result<DetectionMap> {
    let mut map = DetectionMap::new();
    for (line, content) in content_lines(text) {
        let f = fields(content);
        if !(3..=4).contains(&f.len()) {
            return Err(Error::parse(
                line,
                format!(
                    "expected `frame,x,y[,confidence]`, found {} fields",
                    f.len()
                ),
            ));
        }
        let frame = parse_frame(f[0], line)?;
        let x = parse_real(f[1], "x", line)?;
        let y = parse_real(f[2], "y", line)?;
        let confidence = match f.get(3) {
            Some(c) => {
                let c = parse_real(c, "confidence", line)?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::parse(line, format!("confidence {c} outside [0, 1]")));
                }
                c
            }
            None => 1.0,
        };
        map.entry(frame).or_default().push(Detection {
            frame,
            x,
            y,
            confidence,
        });
    }
    Ok(map)
}

/// Writes detections sorted by frame, keeping input order within a frame.
pub fn write_detections<'a>(detections: impl IntoIterator<Item = &'a Detection>) -> String {
    let mut sorted: Vec<&Detection> = detections.into_iter().collect();
    sorted.sort_by_key(|d| d.frame);
    let mut out = String::new();
    for d in sorted {
        writeln!(out, "{},{:.6},{:.6},{:.6}", d.frame, d.x, d.y, d.confidence).unwrap();
    }
    out
}

fn status_code(status: TrackStatus) -> char {
    match status {
        TrackStatus::Tentative => 'T',
        TrackStatus::Confirmed => 'C',
        // never emitted; dead tracks carry no records
        TrackStatus::Dead => 'D',
    }
}

fn source_code(source: Source) -> char {
    match source {
        Source::Measured => 'M',
        Source::Predicted => 'P',
    }
}

/// Serializes records ordered by frame, then track id.
pub fn write_tracks(results: &[FrameResult]) -> String {
    let mut out = String::new();
    let mut frames: Vec<&FrameResult> = results.iter().collect();
    frames.sort_by_key(|r| r.frame);
    for r in frames {
        let mut records: Vec<&TrackRecord> = r.records.iter().collect();
        records.sort_by_key(|rec| rec.track_id);
        for rec in records {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
                r.frame,
                rec.track_id,
                rec.x,
                rec.y,
                rec.vx,
                rec.vy,
                status_code(rec.status),
                source_code(rec.source)
            )
            .unwrap();
        }
    }
    out
}

/// Parses a track file into one [`FrameResult`] per frame that has
/// records. Lines must be ordered by frame, then strictly by track id.
pub fn parse_tracks(text: &str) -> Result<Vec<FrameResult>> {
    let mut results: Vec<FrameResult> = Vec::new();
    let mut last_key: Option<(u64, u64)> = None;
    for (line, content) in content_lines(text) {
        let f = fields(content);
        if f.len() != 8 {
            return Err(Error::parse(
                line,
                format!(
                    "expected `frame,track_id,x,y,vx,vy,status,source`, found {} fields",
                    f.len()
                ),
            ));
        }
        let frame = parse_frame(f[0], line)?;
        let track_id = parse_index(f[1], "track_id", line)?;
        let x = parse_real(f[2], "x", line)?;
        let y = parse_real(f[3], "y", line)?;
        let vx = parse_real(f[4], "vx", line)?;
        let vy = parse_real(f[5], "vy", line)?;
        let status = match f[6] {
            "T" => TrackStatus::Tentative,
            "C" => TrackStatus::Confirmed,
            other => {
                return Err(Error::parse(
                    line,
                    format!("status must be T or C, got `{other}`"),
                ))
            }
        };
        let source = match f[7] {
            "M" => Source::Measured,
            "P" => Source::Predicted,
            other => {
                return Err(Error::parse(
                    line,
                    format!("source must be M or P, got `{other}`"),
                ))
            }
        };
        if let Some(prev) = last_key {
            if (frame, track_id) <= prev {
                return Err(Error::parse(
                    line,
                    format!(
                        "line ({frame}, {track_id}) is not after ({}, {}); order by frame then track id",
                        prev.0, prev.1
                    ),
                ));
            }
        }
        last_key = Some((frame, track_id));
        if results.last().is_none_or(|r| r.frame != frame) {
            results.push(FrameResult::empty(frame));
        }
        results.last_mut().unwrap().records.push(TrackRecord {
            track_id,
            x,
            y,
            vx,
            vy,
            status,
            source,
        });
    }
    Ok(results)
}

pub fn write_ground_truth(gt: &GroundTruth) -> String {
    let mut out = String::new();
    for (i, pts) in gt.frames.iter().enumerate() {
        for p in pts {
            writeln!(out, "{},{},{:.6},{:.6}", i + 1, p.id, p.x, p.y).unwrap();
        }
    }
    out
}

/// Parses `frame,gt_id,x,y` lines. The result spans frames `1..=max frame`.
pub fn parse_ground_truth(text: &str) -> Result<GroundTruth> {
    let mut by_frame: BTreeMap<u64, BTreeMap<u64, GtPoint>> = BTreeMap::new();
    for (line, content) in content_lines(text) {
        let f = fields(content);
        if f.len() != 4 {
            return Err(Error::parse(
                line,
                format!("expected `frame,gt_id,x,y`, found {} fields", f.len()),
            ));
        }
        let frame = parse_frame(f[0], line)?;
        let id = parse_index(f[1], "gt_id", line)?;
        let x = parse_real(f[2], "x", line)?;
        let y = parse_real(f[3], "y", line)?;
        if by_frame
            .entry(frame)
            .or_default()
            .insert(id, GtPoint { id, x, y })
            .is_some()
        {
            return Err(Error::parse(
                line,
                format!("duplicate gt_id {id} in frame {frame}"),
            ));
        }
    }
    let n_frames = by_frame.keys().next_back().copied().unwrap_or(0);
    let mut gt = GroundTruth {
        frames: vec![Vec::new(); n_frames as usize],
    };
    for (frame, pts) in by_frame {
        gt.frames[frame as usize - 1] = pts.into_values().collect();
    }
    Ok(gt)
}

/// Tracker and scenario settings read from one config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub tracker: TrackerConfig,
    pub scenario: ScenarioSpec,
}

const CONFIG_KEYS: [&str; 15] = [
    "gate_px",
    "confirm_hits",
    "max_misses",
    "sigma_a",
    "sigma_z",
    "p0_pos",
    "p0_vel",
    "min_confidence",
    "n_frames",
    "targets",
    "noise_sigma",
    "miss_prob",
    "clutter_rate",
    "bounds",
    "seed",
];

/// Parses `WxH` (for example `640x480`).
pub fn parse_bounds(value: &str) -> Option<(f64, f64)> {
    let (w, h) = value.trim().split_once(['x', 'X'])?;
    let w: f64 = w.trim().parse().ok()?;
    let h: f64 = h.trim().parse().ok()?;
    (w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0).then_some((w, h))
}

fn parse_target(value: &str, line: usize) -> Result<TargetSpec> {
    let f = fields(value);
    if f.len() != 6 {
        return Err(Error::parse(
            line,
            format!("target needs `birth,death,start_x,start_y,vx,vy`, got `{value}`"),
        ));
    }
    Ok(TargetSpec {
        birth_frame: parse_count(f[0], "birth_frame", line)?,
        death_frame: parse_count(f[1], "death_frame", line)?,
        start_x: parse_real(f[2], "start_x", line)?,
        start_y: parse_real(f[3], "start_y", line)?,
        vx: parse_real(f[4], "vx", line)?,
        vy: parse_real(f[5], "vy", line)?,
    })
}

/// Parses a config file. Keys are the field names of [`TrackerConfig`]
/// and [`ScenarioSpec`]; absent keys keep their defaults. `targets` may
/// repeat and each value may hold several `;`-separated targets, given as
/// `birth,death,start_x,start_y,vx,vy`.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    let mut seen: HashMap<&'static str, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            Error::parse(line, format!("expected `key = value`, got `{content}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let key = *CONFIG_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::parse(line, format!("unknown key `{key}`")))?;
        if key != "targets" {
            if let Some(first) = seen.insert(key, line) {
                return Err(Error::parse(
                    line,
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
        }
        let t = &mut cfg.tracker;
        let s = &mut cfg.scenario;
        let small = |v: u64| -> Result<u32> {
            u32::try_from(v).map_err(|_| Error::parse(line, format!("`{key}` is too large")))
        };
        match key {
            "gate_px" => t.gate_px = parse_real(value, key, line)?,
            "confirm_hits" => t.confirm_hits = small(parse_count(value, key, line)?)?,
            "max_misses" => t.max_misses = small(parse_count(value, key, line)?)?,
            "sigma_a" => t.sigma_a = parse_real(value, key, line)?,
            "sigma_z" => t.sigma_z = parse_real(value, key, line)?,
            "p0_pos" => t.p0_pos = parse_real(value, key, line)?,
            "p0_vel" => t.p0_vel = parse_real(value, key, line)?,
            "min_confidence" => t.min_confidence = parse_real(value, key, line)?,
            "n_frames" => s.n_frames = parse_count(value, key, line)?,
            "targets" => {
                for part in value.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                    s.targets.push(parse_target(part, line)?);
                }
            }
            "noise_sigma" => s.noise_sigma = parse_real(value, key, line)?,
            "miss_prob" => s.miss_prob = parse_real(value, key, line)?,
            "clutter_rate" => s.clutter_rate = parse_real(value, key, line)?,
            "bounds" => {
                s.bounds = parse_bounds(value).ok_or_else(|| {
                    Error::parse(line, format!("bounds must be `WxH`, got `{value}`"))
                })?
            }
            "seed" => s.seed = parse_count(value, key, line)?,
            _ => unreachable!("key list and match arms agree"),
        }
    }
    Ok(cfg)
}

fn color_for(id: u64) -> &'static str {
    let h = id.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 32;
    PALETTE[(h % PALETTE.len() as u64) as usize]
}

/// One SVG 1.1 document per frame of `results`: a marker and id label for
/// every live track plus a trail through its last [`TRAIL_LEN`] positions.
/// Ground-truth points, when given, are drawn as small gray squares.
pub fn render_overlay(
    results: &[FrameResult],
    gt: Option<&GroundTruth>,
    bounds: (f64, f64),
) -> Vec<(u64, String)> {
    let (w, h) = bounds;
    let mut trails: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut frames: Vec<&FrameResult> = results.iter().collect();
    frames.sort_by_key(|r| r.frame);
    let mut out = Vec::with_capacity(frames.len());
    for r in frames {
        let mut svg = String::new();
        svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
        )
        .unwrap();
        writeln!(
            svg,
            "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>"
        )
        .unwrap();
        if let Some(gt) = gt {
            for p in gt.at(r.frame) {
                writeln!(
                    svg,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"6\" height=\"6\" fill=\"none\" stroke=\"#555555\"/>",
                    p.x - 3.0,
                    p.y - 3.0
                )
                .unwrap();
            }
        }
        let mut records: Vec<&TrackRecord> = r.records.iter().collect();
        records.sort_by_key(|rec| rec.track_id);
        for rec in &records {
            let trail = trails.entry(rec.track_id).or_default();
            trail.push((rec.x, rec.y));
            if trail.len() > TRAIL_LEN {
                trail.remove(0);
            }
        }
        for rec in records {
            let color = color_for(rec.track_id);
            let points = trails[&rec.track_id]
                .iter()
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect::<Vec<_>>()
                .join(" ");
            let dash = match rec.status {
                TrackStatus::Tentative => " stroke-dasharray=\"4 2\"",
                _ => "",
            };
            writeln!(
                svg,
                "<polyline points=\"{points}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>"
            )
            .unwrap();
            let fill = match rec.source {
                Source::Measured => color,
                Source::Predicted => "none",
            };
            writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"{fill}\" stroke=\"{color}\"/>",
                rec.x, rec.y
            )
            .unwrap();
            writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>",
                rec.x + 7.0,
                rec.y - 7.0,
                rec.track_id
            )
            .unwrap();
        }
        svg.push_str("</svg>\n");
        out.push((r.frame, svg));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(track_id: u64, x: f64, y: f64) -> TrackRecord {
        TrackRecord {
            track_id,
            x,
            y,
            vx: 1.0,
            vy: 0.0,
            status: TrackStatus::Confirmed,
            source: Source::Measured,
        }
    }

    #[test]
    fn parses_detection_line() {
        let map = parse_detections("1,10.5,20.0,0.9").unwrap();
        assert_eq!(
            map[&1],
            vec![Detection {
                frame: 1,
                x: 10.5,
                y: 20.0,
                confidence: 0.9
            }]
        );
        assert!(parse_detections("").unwrap().is_empty());
        assert_eq!(parse_detections("2,1,1").unwrap()[&2][0].confidence, 1.0);
    }

    #[test]
    fn detection_errors_carry_line_numbers() {
        assert!(matches!(
            parse_detections("1,abc,2"),
            Err(Error::Parse { line: 1, .. })
        ));
        let cases = [
            ("1,1,1\n\n0,1,1\n", 3),
            ("1,1\n", 1),
            ("1,1,1,1,1\n", 1),
            ("1,1,1,1.5\n", 1),
            ("1,1,1\n2,nan,1\n", 2),
            ("1,1,1\n-2,1,1\n", 2),
            ("1.5,1,1\n", 1),
            ("1,inf,1\n", 1),
        ];
        for (text, line) in cases {
            match parse_detections(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn detections_sorted_by_frame() {
        let map = parse_detections("3,1,1\n1,2,2\n\n3,4,4\n").unwrap();
        assert_eq!(map.keys().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(map[&3][1].x, 4.0);
    }

    #[test]
    fn write_single_track_record() {
        let mut r = rec(1, 10.5, 20.0);
        r.vx = 1.0;
        let results = vec![FrameResult {
            frame: 3,
            records: vec![r],
            ..Default::default()
        }];
        assert_eq!(
            write_tracks(&results),
            "3,1,10.500000,20.000000,1.000000,0.000000,C,M\n"
        );
        assert_eq!(write_tracks(&[]), "");
    }

    #[test]
    fn track_lines_ordered_by_id() {
        let results = vec![FrameResult {
            frame: 1,
            records: vec![rec(5, 0.0, 0.0), rec(2, 1.0, 1.0)],
            ..Default::default()
        }];
        let text = write_tracks(&results);
        let ids: Vec<&str> = text.lines().map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(ids, vec!["2", "5"]);
    }

    #[test]
    fn track_parse_rejects_disorder_and_codes() {
        let ok = "1,1,0,0,0,0,T,M\n1,2,0,0,0,0,C,P\n2,1,0,0,0,0,C,M\n";
        assert_eq!(parse_tracks(ok).unwrap().len(), 2);
        let bad = [
            ("1,2,0,0,0,0,C,M\n1,1,0,0,0,0,C,M\n", 2),
            ("2,1,0,0,0,0,C,M\n1,1,0,0,0,0,C,M\n", 2),
            ("1,1,0,0,0,0,C,M\n1,1,0,0,0,0,C,M\n", 2),
            ("1,1,0,0,0,0,D,M\n", 1),
            ("1,1,0,0,0,0,C,X\n", 1),
            ("1,0,0,0,0,0,C,M\n", 1),
            ("1,1,0,0,0,C,M\n", 1),
        ];
        for (text, line) in bad {
            match parse_tracks(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn ground_truth_round_trip_and_gaps() {
        let text = "3,2,1.000000,2.000000\n1,1,0.000000,0.000000\n3,1,5.000000,5.000000\n";
        let gt = parse_ground_truth(text).unwrap();
        assert_eq!(gt.n_frames(), 3);
        assert!(gt.at(2).is_empty());
        assert_eq!(
            gt.at(3).iter().map(|p| p.id).collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert_eq!(parse_ground_truth(&write_ground_truth(&gt)).unwrap(), gt);
        assert!(matches!(
            parse_ground_truth("1,1,0,0\n1,1,2,2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_ground_truth("99999999999999,1,0,0\n").is_err());
    }

    #[test]
    fn config_parsing() {
        let text = "\
# tracker
gate_px = 30   # px
confirm_hits = 2
max_misses=4
min_confidence = 0.3

n_frames = 50
targets = 1,50,10,10,1,0; 5,40,200,200,-1,1
targets = 2,20,0,0,0,0
bounds = 800x600
seed = 7
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.tracker.gate_px, 30.0);
        assert_eq!(cfg.tracker.confirm_hits, 2);
        assert_eq!(cfg.tracker.max_misses, 4);
        assert_eq!(cfg.tracker.min_confidence, 0.3);
        assert_eq!(cfg.tracker.sigma_z, TrackerConfig::default().sigma_z);
        assert_eq!(cfg.scenario.n_frames, 50);
        assert_eq!(cfg.scenario.targets.len(), 3);
        assert_eq!(cfg.scenario.targets[1].vx, -1.0);
        assert_eq!(cfg.scenario.bounds, (800.0, 600.0));
        assert_eq!(cfg.scenario.seed, 7);
        assert_eq!(parse_config("").unwrap(), Config::default());
    }

    #[test]
    fn config_errors() {
        let cases = [
            ("gate_px = 1\ncolor = red\n", 2),
            ("gate_px 1\n", 1),
            ("seed = 1\nseed = 2\n", 2),
            ("gate_px = wide\n", 1),
            ("targets = 1,2,3\n", 1),
            ("bounds = 640\n", 1),
            ("confirm_hits = -1\n", 1),
            ("confirm_hits = 99999999999\n", 1),
        ];
        for (text, line) in cases {
            match parse_config(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn overlay_empty_frame_is_background_only() {
        let svgs = render_overlay(&[FrameResult::empty(1)], None, (640.0, 480.0));
        assert_eq!(svgs.len(), 1);
        let svg = &svgs[0].1;
        assert!(svg.contains("<rect"));
        assert_eq!(svg.matches('<').count(), 4, "{svg}"); // xml decl, svg, rect, /svg
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn overlay_trail_and_determinism() {
        let results: Vec<_> = (1..=3)
            .map(|f| FrameResult {
                frame: f,
                records: vec![rec(4, f as f64 * 10.0, 5.0)],
                ..Default::default()
            })
            .collect();
        let a = render_overlay(&results, None, (100.0, 100.0));
        let b = render_overlay(&results, None, (100.0, 100.0));
        assert_eq!(a, b);
        let last = &a[2].1;
        let poly = last.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let points = poly.split('"').nth(1).unwrap();
        assert_eq!(points.split(' ').count(), 3);
        assert_eq!(points, "10.00,5.00 20.00,5.00 30.00,5.00");
        assert!(last.contains(">4</text>"));
        assert!(last.contains(color_for(4)));
    }

    #[test]
    fn trail_is_capped() {
        let results: Vec<_> = (1..=30)
            .map(|f| FrameResult {
                frame: f,
                records: vec![rec(1, f as f64, 0.0)],
                ..Default::default()
            })
            .collect();
        let svgs = render_overlay(&results, None, (100.0, 100.0));
        let poly = svgs[29]
            .1
            .lines()
            .find(|l| l.starts_with("<polyline"))
            .unwrap();
        assert_eq!(
            poly.split('"').nth(1).unwrap().split(' ').count(),
            TRAIL_LEN
        );
    }

    #[test]
    fn overlay_draws_ground_truth() {
        let gt = GroundTruth {
            frames: vec![vec![GtPoint {
                id: 1,
                x: 10.0,
                y: 10.0,
            }]],
        };
        let svgs = render_overlay(&[FrameResult::empty(1)], Some(&gt), (50.0, 50.0));
        assert!(svgs[0].1.contains("x=\"7.00\" y=\"7.00\""));
    }
}
