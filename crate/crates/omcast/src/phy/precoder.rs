//! Multicast precoding and rate evaluation.
//!
//! The group precoder on subcarrier `n` is the normalized sum of per-user
//! matched filters:
//!
//! ```text
//! W_n = alpha * sum_{k in S} H_{n,k}^H / ||H_{n,k}||_F^2
//! ```
//!
//! with a single scalar `alpha = 1 / max_n ||sum_k ...||_F` shared by all
//! subcarriers, so `||W_n||_F^2 <= 1` everywhere and the constraint is tight
//! on at least one subcarrier. A user's achievable rate is the mean over
//! subcarriers of `log2 det(I + H W W^H H^H / N0)` in bits/s/Hz.

use num_complex::Complex64;

use super::{ChannelMatrix, NoiseModel, PhyError};

/// Transmit precoder: one `n_tx x n_streams` matrix per subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub n_subcarriers: usize,
    pub n_tx: usize,
    pub n_streams: usize,
    /// Normalization scalar actually applied to the matched-filter sum.
    pub alpha: f64,
    /// Row-major `[subcarrier][tx][stream]`.
    data: Vec<Complex64>,
}

impl Precoder {
    /// Builds a precoder from raw per-subcarrier data (tests, baselines).
    pub fn from_data(
        n_subcarriers: usize,
        n_tx: usize,
        n_streams: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, PhyError> {
        if data.len() != n_subcarriers * n_tx * n_streams {
            return Err(PhyError::DimensionMismatch("precoder data length"));
        }
        Ok(Self { n_subcarriers, n_tx, n_streams, alpha: 1.0, data })
    }

    #[inline]
    pub fn subcarrier(&self, sc: usize) -> &[Complex64] {
        let stride = self.n_tx * self.n_streams;
        &self.data[sc * stride..(sc + 1) * stride]
    }

    /// Squared Frobenius norm of one subcarrier's precoding matrix.
    pub fn sc_norm_sq(&self, sc: usize) -> f64 {
        self.subcarrier(sc).iter().map(|w| w.norm_sqr()).sum()
    }

    /// Largest per-subcarrier squared norm; 1.0 (up to rounding) for the
    /// normalized multicast precoder.
    pub fn max_norm_sq(&self) -> f64 {
        (0..self.n_subcarriers)
            .map(|sc| self.sc_norm_sq(sc))
            .fold(0.0, f64::max)
    }

    /// Rescales every subcarrier to unit norm independently. Used where the
    /// per-subcarrier power budget applies (single-user matched filtering is
    /// then rate-optimal for one receive antenna).
    pub fn per_subcarrier_normalized(&self) -> Result<Self, PhyError> {
        let mut out = self.clone();
        let stride = self.n_tx * self.n_streams;
        for sc in 0..self.n_subcarriers {
            let norm = self.sc_norm_sq(sc).sqrt();
            if norm == 0.0 {
                return Err(PhyError::DegenerateChannel);
            }
            for w in &mut out.data[sc * stride..(sc + 1) * stride] {
                *w /= norm;
            }
        }
        out.alpha = 1.0;
        Ok(out)
    }
}

/// Builds the group matched-filter precoder for the users in `channels`.
///
/// All members must share dimensions, and `n_streams == n_rx` is required
/// (the receive combiner is then the identity). Errors on a zero-norm
/// subcarrier channel.
pub fn multicast_precoder(channels: &[&ChannelMatrix]) -> Result<Precoder, PhyError> {
    let first = channels.first().ok_or(PhyError::DimensionMismatch("empty group"))?;
    let (n_sc, n_rx, n_tx) = (first.n_subcarriers, first.n_rx, first.n_tx);
    for ch in channels {
        if ch.n_subcarriers != n_sc || ch.n_rx != n_rx || ch.n_tx != n_tx {
            return Err(PhyError::DimensionMismatch("group channel dimensions differ"));
        }
    }
    let n_streams = n_rx;
    let stride = n_tx * n_streams;
    let mut data = vec![Complex64::new(0.0, 0.0); n_sc * stride];
    for sc in 0..n_sc {
        let out = &mut data[sc * stride..(sc + 1) * stride];
        for ch in channels {
            let h = ch.subcarrier(sc);
            let norm_sq: f64 = h.iter().map(|v| v.norm_sqr()).sum();
            if norm_sq == 0.0 {
                return Err(PhyError::DegenerateChannel);
            }
            // H^H has entry (t, r) = conj(H[r][t]).
            for t in 0..n_tx {
                for r in 0..n_rx {
                    out[t * n_streams + r] += h[r * n_tx + t].conj() / norm_sq;
                }
            }
        }
    }
    let mut max_norm_sq = 0.0f64;
    for sc in 0..n_sc {
        let s: f64 = data[sc * stride..(sc + 1) * stride]
            .iter()
            .map(|w| w.norm_sqr())
            .sum();
        max_norm_sq = max_norm_sq.max(s);
    }
    if max_norm_sq == 0.0 {
        return Err(PhyError::DegenerateChannel);
    }
    let alpha = 1.0 / max_norm_sq.sqrt();
    for w in &mut data {
        *w *= alpha;
    }
    Ok(Precoder { n_subcarriers: n_sc, n_tx, n_streams, alpha, data })
}

/// Mean spectral efficiency of `chan` under `prec` in bits/s/Hz:
/// `(1/N) sum_n log2 det(I + H W W^H H^H / N0)`.
pub fn user_rate(chan: &ChannelMatrix, prec: &Precoder, noise: &NoiseModel) -> f64 {
    assert_eq!(chan.n_subcarriers, prec.n_subcarriers, "subcarrier counts differ");
    assert_eq!(chan.n_tx, prec.n_tx, "antenna counts differ");
    let n0 = noise.n0;
    let mut acc = 0.0;
    if chan.n_rx == 1 && prec.n_streams == 1 {
        for sc in 0..chan.n_subcarriers {
            let h = chan.subcarrier(sc);
            let w = prec.subcarrier(sc);
            let mut y = Complex64::new(0.0, 0.0);
            for t in 0..chan.n_tx {
                y += h[t] * w[t];
            }
            acc += (1.0 + y.norm_sqr() / n0).log2();
        }
    } else {
        for sc in 0..chan.n_subcarriers {
            acc += log2_det_capacity(
                chan.subcarrier(sc),
                prec.subcarrier(sc),
                chan.n_rx,
                chan.n_tx,
                prec.n_streams,
                n0,
            );
        }
    }
    acc / chan.n_subcarriers as f64
}

/// `log2 det(I + A A^H / n0)` with `A = H W` for one subcarrier.
fn log2_det_capacity(
    h: &[Complex64],
    w: &[Complex64],
    n_rx: usize,
    n_tx: usize,
    n_streams: usize,
    n0: f64,
) -> f64 {
    let mut a = vec![Complex64::new(0.0, 0.0); n_rx * n_streams];
    for r in 0..n_rx {
        for s in 0..n_streams {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n_tx {
                acc += h[r * n_tx + t] * w[t * n_streams + s];
            }
            a[r * n_streams + s] = acc;
        }
    }
    let mut g = vec![Complex64::new(0.0, 0.0); n_rx * n_rx];
    for i in 0..n_rx {
        for j in 0..n_rx {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..n_streams {
                acc += a[i * n_streams + s] * a[j * n_streams + s].conj();
            }
            g[i * n_rx + j] = acc / n0;
        }
        g[i * n_rx + i] += 1.0;
    }
    complex_det(&mut g, n_rx).re.max(f64::MIN_POSITIVE).log2()
}

/// Determinant of a small complex matrix by LU with partial pivoting.
/// Consumes its input buffer.
fn complex_det(m: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a * n + col]
                    .norm_sqr()
                    .partial_cmp(&m[b * n + col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        if m[pivot * n + col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            for j in col..n {
                let sub = f * m[col * n + j];
                m[row * n + j] -= sub;
            }
        }
    }
    det
}

/// Spatial-compatibility metric between two users: the mean over subcarriers
/// of `||H_a H_b^H||_F^2`. Large when the channel rows are aligned, zero when
/// orthogonal; symmetric for single-antenna receivers.
pub fn grouping_metric(a: &ChannelMatrix, b: &ChannelMatrix) -> f64 {
    assert_eq!(a.n_subcarriers, b.n_subcarriers, "subcarrier counts differ");
    assert_eq!(a.n_tx, b.n_tx, "antenna counts differ");
    let mut acc = 0.0;
    for sc in 0..a.n_subcarriers {
        let ha = a.subcarrier(sc);
        let hb = b.subcarrier(sc);
        for i in 0..a.n_rx {
            for j in 0..b.n_rx {
                let mut e = Complex64::new(0.0, 0.0);
                for t in 0..a.n_tx {
                    e += ha[i * a.n_tx + t] * hb[j * b.n_tx + t].conj();
                }
                acc += e.norm_sqr();
            }
        }
    }
    acc / a.n_subcarriers as f64
}
