//! Dormand–Prince 5(4) integrator with adaptive step control.
//!
//! States are flat `f64` slices; matrix-valued systems pack their entries
//! column-major.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b5 - b4
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size (0 means unbounded).
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 0.0,
            max_steps: 2_000_000,
        }
    }
}

/// Outcome of a call to [`Dopri5::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    /// Time actually reached.
    pub t: f64,
    /// Step size suggested for a continuation.
    pub h_next: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// True when the observer stopped the integration.
    pub stopped: bool,
}

/// Smallest admissible step at time `t`.
pub fn min_step(t: f64) -> f64 {
    1e-14 * t.abs().max(1.0)
}

struct Work {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Work {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` in place.
    pub fn integrate<F>(&self, f: F, t0: f64, y: &mut [f64], t1: f64, h0: Option<f64>) -> Result<Outcome>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        self.integrate_observed(f, t0, y, t1, h0, |_, _, _| ControlFlow::Continue(()))
    }

    /// Like [`integrate`](Self::integrate), calling `observer(t, y, h)` after
    /// every accepted step. Returning `Break` stops the integration at the
    /// current (accepted) time.
    pub fn integrate_observed<F, O>(
        &self,
        mut f: F,
        t0: f64,
        y: &mut [f64],
        t1: f64,
        h0: Option<f64>,
        mut observer: O,
    ) -> Result<Outcome>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64], f64) -> ControlFlow<()>,
    {
        let n = y.len();
        let mut out = Outcome {
            t: t0,
            h_next: 0.0,
            accepted: 0,
            rejected: 0,
            stopped: false,
        };
        let span = t1 - t0;
        if span <= 0.0 {
            out.h_next = h0.unwrap_or(0.0);
            return Ok(out);
        }
        let mut w = Work::new(n);
        let mut t = t0;
        f(t, y, &mut w.k[0]);
        let mut h = match h0 {
            Some(h) if h > 0.0 => h,
            _ => self.initial_step(&mut f, t, y, &mut w, span),
        };
        if self.h_max > 0.0 {
            h = h.min(self.h_max);
        }
        let mut last_rejected = false;
        let mut steps = 0usize;

        while t < t1 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::TooManySteps { t });
            }
            let mut h_try = h.min(t1 - t);
            let hits_end = h_try >= t1 - t;
            if hits_end {
                h_try = t1 - t;
            }
            if h_try < min_step(t) && !hits_end {
                return Err(Error::StepUnderflow { t });
            }
            let err = self.step(&mut f, t, y, h_try, &mut w);
            if !err.is_finite() {
                if h_try < min_step(t) {
                    return Err(Error::NonFinite { t });
                }
                h = 0.25 * h_try;
                out.rejected += 1;
                last_rejected = true;
                continue;
            }
            if err <= 1.0 {
                t = if hits_end { t1 } else { t + h_try };
                y.copy_from_slice(&w.y_new);
                // FSAL: k7 = f(t + h, y_new)
                let (first, rest) = w.k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                out.accepted += 1;
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 5.0);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                last_rejected = false;
                // keep the natural step rather than the end-truncated one
                let base = if hits_end { h.max(h_try) } else { h_try };
                h = base * fac;
                if self.h_max > 0.0 {
                    h = h.min(self.h_max);
                }
                if observer(t, y, h_try).is_break() {
                    out.stopped = true;
                    break;
                }
            } else {
                out.rejected += 1;
                last_rejected = true;
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                h = h_try * fac;
            }
        }
        out.t = t;
        out.h_next = h;
        Ok(out)
    }

    fn initial_step<F>(&self, f: &mut F, t: f64, y: &[f64], w: &mut Work, span: f64) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let sc = |yi: f64| self.atol + self.rtol * yi.abs();
        let d0 = rms(y.iter().map(|&yi| yi / sc(yi)));
        let d1 = rms(y.iter().zip(&w.k[0]).map(|(&yi, &fi)| fi / sc(yi)));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        for ((tmp, &yi), &fi) in w.tmp.iter_mut().zip(y).zip(&w.k[0]) {
            *tmp = yi + h0 * fi;
        }
        f(t + h0, &w.tmp, &mut w.k[1]);
        let d2 = rms(y
            .iter()
            .zip(w.k[1].iter().zip(&w.k[0]))
            .map(|(&yi, (&f1, &f0))| (f1 - f0) / sc(yi)))
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// One trial step; fills `w.y_new` and `w.k[6]`, returns the scaled error.
    fn step<F>(&self, f: &mut F, t: f64, y: &[f64], h: f64, w: &mut Work) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        let Work { k, tmp, y_new } = w;
        let [k1, k2, k3, k4, k5, k6, k7] = k;

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, tmp, k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, tmp, k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, y_new, k7);

        let mut acc = 0.0;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            acc += (e / sc).powi(2);
        }
        (acc / n.max(1) as f64).sqrt()
    }
}

fn rms<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0usize;
    for v in it {
        s += v * v;
        c += 1;
    }
    if c == 0 {
        0.0
    } else {
        (s / c as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut y = [1.0];
        let out = Dopri5::new(1e-10, 1e-12)
            .integrate(|_, y, dy| dy[0] = -y[0], 0.0, &mut y, 5.0, None)
            .unwrap();
        assert_eq!(out.t, 5.0);
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_long_run() {
        let mut y = [0.0, 1.0];
        Dopri5::new(1e-11, 1e-13)
            .integrate(
                |_, y, dy| {
                    dy[0] = y[1];
                    dy[1] = -y[0];
                },
                0.0,
                &mut y,
                20.0,
                None,
            )
            .unwrap();
        assert!((y[0] - 20f64.sin()).abs() < 1e-9);
        assert!((y[1] - 20f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn observer_can_stop() {
        let mut y = [1.0];
        let out = Dopri5::default()
            .integrate_observed(
                |_, _, dy| dy[0] = 1.0,
                0.0,
                &mut y,
                10.0,
                None,
                |t, _, _| {
                    if t > 3.0 {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                },
            )
            .unwrap();
        assert!(out.stopped);
        assert!(out.t > 3.0 && out.t < 10.0);
        assert!((y[0] - 1.0 - out.t).abs() < 1e-12);
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y², y(0) = 1 blows up at t = 1
        let mut y = [1.0];
        let r = Dopri5::default().integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &mut y, 2.0, None);
        match r {
            Err(Error::StepUnderflow { t }) | Err(Error::NonFinite { t }) => assert!((t - 1.0).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }
}
