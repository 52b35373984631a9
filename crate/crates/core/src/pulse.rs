//! Analytic pulse envelopes used for Rabi couplings, detunings, bias ramps
//! and microwave amplitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScrapError};

/// Closed time interval [start, end] in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(ScrapError::invalid("window", format!("[{start}, {end}] is degenerate")));
        }
        Ok(Self { start, end })
    }

    /// [−half_width, +half_width].
    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

impl TryFrom<[f64; 2]> for Window {
    type Error = ScrapError;

    fn try_from(value: [f64; 2]) -> Result<Self> {
        Window::new(value[0], value[1])
    }
}

impl From<Window> for [f64; 2] {
    fn from(w: Window) -> Self {
        [w.start, w.end]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PulseShape {
    Constant { amplitude: f64 },
    /// offset + rate·t
    LinearRamp {
        rate: f64,
        #[serde(default)]
        offset: f64,
    },
    /// amplitude·exp(−(t − center)²/width²)
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// Linear interpolation through (t, value) breakpoints, held constant
    /// beyond the first and last breakpoint.
    PiecewiseLinear { points: Vec<[f64; 2]> },
}

/// A pulse shape that is switched off outside its window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    #[serde(flatten)]
    pub shape: PulseShape,
    pub window: Window,
}

impl PulseSchedule {
    pub fn new(shape: PulseShape, window: Window) -> Result<Self> {
        let schedule = Self { shape, window };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn constant(amplitude: f64, window: Window) -> Self {
        Self {
            shape: PulseShape::Constant { amplitude },
            window,
        }
    }

    pub fn linear_ramp(rate: f64, window: Window) -> Self {
        Self {
            shape: PulseShape::LinearRamp { rate, offset: 0.0 },
            window,
        }
    }

    pub fn gaussian(amplitude: f64, width: f64, window: Window) -> Result<Self> {
        Self::new(
            PulseShape::Gaussian {
                amplitude,
                width,
                center: 0.0,
            },
            window,
        )
    }

    pub fn piecewise_linear(points: Vec<[f64; 2]>, window: Window) -> Result<Self> {
        Self::new(PulseShape::PiecewiseLinear { points }, window)
    }

    pub fn zero(window: Window) -> Self {
        Self::constant(0.0, window)
    }

    pub fn validate(&self) -> Result<()> {
        Window::new(self.window.start, self.window.end)?;
        let finite = |v: f64, field: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ScrapError::invalid(field, "must be finite"))
            }
        };
        match &self.shape {
            PulseShape::Constant { amplitude } => finite(*amplitude, "amplitude"),
            PulseShape::LinearRamp { rate, offset } => {
                finite(*rate, "rate")?;
                finite(*offset, "offset")
            }
            PulseShape::Gaussian {
                amplitude,
                width,
                center,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(*center, "center")?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(ScrapError::invalid("width", "gaussian width must be positive"));
                }
                Ok(())
            }
            PulseShape::PiecewiseLinear { points } => {
                if points.is_empty() {
                    return Err(ScrapError::invalid("points", "need at least one breakpoint"));
                }
                for p in points {
                    finite(p[0], "points")?;
                    finite(p[1], "points")?;
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(ScrapError::invalid("points", "breakpoint times must increase"));
                }
                Ok(())
            }
        }
    }

    /// Envelope value at `t`; zero outside the window.
    pub fn value(&self, t: f64) -> f64 {
        if !self.window.contains(t) {
            return 0.0;
        }
        self.shape_value(t)
    }

    /// Time derivative at `t`; zero outside the window. Piecewise-linear
    /// schedules return the slope of the segment containing `t` (the right
    /// segment at a breakpoint).
    pub fn derivative(&self, t: f64) -> f64 {
        if !self.window.contains(t) {
            return 0.0;
        }
        match &self.shape {
            PulseShape::Constant { .. } => 0.0,
            PulseShape::LinearRamp { rate, .. } => *rate,
            PulseShape::Gaussian {
                amplitude,
                width,
                center,
            } => {
                let x = t - center;
                -2.0 * x / (width * width) * amplitude * (-(x * x) / (width * width)).exp()
            }
            PulseShape::PiecewiseLinear { points } => {
                if t < points[0][0] || t >= points[points.len() - 1][0] {
                    return 0.0;
                }
                let k = points.partition_point(|p| p[0] <= t);
                let (a, b) = (points[k - 1], points[k]);
                (b[1] - a[1]) / (b[0] - a[0])
            }
        }
    }

    /// Largest |value| over the window (exact for every shape).
    pub fn max_abs(&self) -> f64 {
        let w = self.window;
        match &self.shape {
            PulseShape::Constant { amplitude } => amplitude.abs(),
            PulseShape::LinearRamp { .. } => self.shape_value(w.start).abs().max(self.shape_value(w.end).abs()),
            PulseShape::Gaussian { center, .. } => {
                let peak = center.clamp(w.start, w.end);
                self.shape_value(peak).abs()
            }
            PulseShape::PiecewiseLinear { points } => points
                .iter()
                .filter(|p| w.contains(p[0]))
                .map(|p| p[1].abs())
                .chain([self.shape_value(w.start).abs(), self.shape_value(w.end).abs()])
                .fold(0.0, f64::max),
        }
    }

    /// Same envelope multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            PulseShape::Constant { amplitude } => PulseShape::Constant {
                amplitude: amplitude * factor,
            },
            PulseShape::LinearRamp { rate, offset } => PulseShape::LinearRamp {
                rate: rate * factor,
                offset: offset * factor,
            },
            PulseShape::Gaussian {
                amplitude,
                width,
                center,
            } => PulseShape::Gaussian {
                amplitude: amplitude * factor,
                width: *width,
                center: *center,
            },
            PulseShape::PiecewiseLinear { points } => PulseShape::PiecewiseLinear {
                points: points.iter().map(|p| [p[0], p[1] * factor]).collect(),
            },
        };
        Self {
            shape,
            window: self.window,
        }
    }

    fn shape_value(&self, t: f64) -> f64 {
        match &self.shape {
            PulseShape::Constant { amplitude } => *amplitude,
            PulseShape::LinearRamp { rate, offset } => offset + rate * t,
            PulseShape::Gaussian {
                amplitude,
                width,
                center,
            } => {
                let x = (t - center) / width;
                amplitude * (-x * x).exp()
            }
            PulseShape::PiecewiseLinear { points } => {
                let last = points.len() - 1;
                if t <= points[0][0] {
                    return points[0][1];
                }
                if t >= points[last][0] {
                    return points[last][1];
                }
                let k = points.partition_point(|p| p[0] <= t);
                let (a, b) = (points[k - 1], points[k]);
                a[1] + (b[1] - a[1]) * (t - a[0]) / (b[0] - a[0])
            }
        }
    }
}
