/// One measured target position in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// 1-based frame index.
    pub frame: u64,
    pub x: f64,
    pub y: f64,
    /// Detector confidence in `[0, 1]`; 1.0 when the source does not report one.
    pub confidence: f64,
}

impl Detection {
    pub fn new(frame: u64, x: f64, y: f64) -> Self {
        Self {
            frame,
            x,
            y,
            confidence: 1.0,
        }
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }
}
