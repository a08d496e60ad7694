//! Linear Kalman filter with a constant-velocity motion model.
//!
//! State is `[px, py, vx, vy]` in pixels and pixels/frame; the measurement
//! is the position `[zx, zy]`. Time advances one frame per step.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Matrix4x2, Vector2, Vector4};

use crate::{Detection, Error, Result};

pub const DEFAULT_SIGMA_A: f64 = 1.0;
pub const DEFAULT_SIGMA_Z: f64 = 2.0;
pub const DEFAULT_P0_POS: f64 = 10.0;
pub const DEFAULT_P0_VEL: f64 = 100.0;

/// Frames per step.
const DT: f64 = 1.0;

/// Innovation covariances with a smaller determinant (relative to their
/// scale) are treated as singular.
const SINGULAR_TOL: f64 = 1e-12;

pub type StateVector = Vector4<f64>;
pub type Covariance = Matrix4<f64>;

/// Gaussian belief over one target's state.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub mean: StateVector,
    pub covariance: Covariance,
}

impl KalmanState {
    pub fn new(mean: StateVector, covariance: Covariance) -> Self {
        Self { mean, covariance }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.mean[0], self.mean[1])
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.mean[2], self.mean[3])
    }
}

/// A measured target position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub x: f64,
    pub y: f64,
}

impl Measurement {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }
}

impl From<&Detection> for Measurement {
    fn from(d: &Detection) -> Self {
        Self::new(d.x, d.y)
    }
}

/// System matrices shared by every track.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionModel {
    pub transition: Matrix4<f64>,
    pub process_noise: Matrix4<f64>,
    pub observation: Matrix2x4<f64>,
    pub measurement_noise: Matrix2<f64>,
}

impl MotionModel {
    /// Constant-velocity model with discrete white-noise acceleration of
    /// standard deviation `sigma_a` (px/frame²) and isotropic position noise
    /// `sigma_z` (px).
    pub fn constant_velocity(sigma_a: f64, sigma_z: f64) -> Result<Self> {
        positive("sigma_a", sigma_a)?;
        positive("sigma_z", sigma_z)?;

        #[rustfmt::skip]
        let transition = Matrix4::new(
            1.0, 0.0, DT,  0.0,
            0.0, 1.0, 0.0, DT,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        // Q = sigma_a^2 * G G^T per axis, G = [dt^2/2, dt]^T.
        let q = sigma_a * sigma_a;
        let (g_pos, g_vel) = (DT * DT / 2.0, DT);
        let mut process_noise = Matrix4::zeros();
        for axis in 0..2 {
            let (p, v) = (axis, axis + 2);
            process_noise[(p, p)] = q * g_pos * g_pos;
            process_noise[(p, v)] = q * g_pos * g_vel;
            process_noise[(v, p)] = q * g_pos * g_vel;
            process_noise[(v, v)] = q * g_vel * g_vel;
        }
        #[rustfmt::skip]
        let observation = Matrix2x4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
        );
        let measurement_noise = Matrix2::identity() * (sigma_z * sigma_z);
        Ok(Self {
            transition,
            process_noise,
            observation,
            measurement_noise,
        })
    }

    /// Propagates the belief one frame forward.
    pub fn predict(&self, state: &KalmanState) -> KalmanState {
        let f = &self.transition;
        let mean = f * state.mean;
        let covariance = symmetrize(f * state.covariance * f.transpose() + self.process_noise);
        KalmanState { mean, covariance }
    }

    /// Corrects the belief with a position measurement. Returns the
    /// posterior and the innovation `z - H x`.
    ///
    /// The covariance uses the Joseph form
    /// `(I - K H) P (I - K H)^T + K R K^T`, which stays positive
    /// semidefinite under rounding.
    pub fn update(
        &self,
        state: &KalmanState,
        z: Measurement,
    ) -> Result<(KalmanState, Vector2<f64>)> {
        let (gain, innovation) = self.gain_and_innovation(state, z)?;
        let mean = state.mean + gain * innovation;
        let i_kh = Matrix4::identity() - gain * self.observation;
        let covariance = symmetrize(
            i_kh * state.covariance * i_kh.transpose()
                + gain * self.measurement_noise * gain.transpose(),
        );
        Ok((KalmanState { mean, covariance }, innovation))
    }

    /// Update with the short-form covariance `(I - K H) P`. Only meant for
    /// comparison against [`MotionModel::update`].
    pub fn update_simple_form(&self, state: &KalmanState, z: Measurement) -> Result<KalmanState> {
        let (gain, innovation) = self.gain_and_innovation(state, z)?;
        let mean = state.mean + gain * innovation;
        let covariance = (Matrix4::identity() - gain * self.observation) * state.covariance;
        Ok(KalmanState { mean, covariance })
    }

    fn gain_and_innovation(
        &self,
        state: &KalmanState,
        z: Measurement,
    ) -> Result<(Matrix4x2<f64>, Vector2<f64>)> {
        let h = &self.observation;
        let innovation = z.as_vector() - h * state.mean;
        let s = h * state.covariance * h.transpose() + self.measurement_noise;
        let s_inv = invert_2x2(&s)?;
        let gain = state.covariance * h.transpose() * s_inv;
        Ok((gain, innovation))
    }
}

impl Default for MotionModel {
    fn default() -> Self {
        Self::constant_velocity(DEFAULT_SIGMA_A, DEFAULT_SIGMA_Z).expect("defaults are valid")
    }
}

/// Belief for a newly observed target: position at the detection, zero
/// velocity, diagonal covariance.
pub fn init_state(detection: &Detection, p0_pos: f64, p0_vel: f64) -> Result<KalmanState> {
    positive("p0_pos", p0_pos)?;
    positive("p0_vel", p0_vel)?;
    Ok(KalmanState {
        mean: Vector4::new(detection.x, detection.y, 0.0, 0.0),
        covariance: Matrix4::from_diagonal(&Vector4::new(p0_pos, p0_pos, p0_vel, p0_vel)),
    })
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

fn symmetrize(p: Matrix4<f64>) -> Matrix4<f64> {
    (p + p.transpose()) * 0.5
}

/// Closed-form inverse through the adjugate.
fn invert_2x2(s: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let scale = s.abs().max();
    if !det.is_finite() || det.abs() <= SINGULAR_TOL * scale * scale {
        return Err(Error::Numerical(format!(
            "innovation covariance is singular (det = {det:e})"
        )));
    }
    Ok(Matrix2::new(s[(1, 1)], -s[(0, 1)], -s[(1, 0)], s[(0, 0)]) / det)
}
