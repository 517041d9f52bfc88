//! Instrumented reference kernels.
//!
//! Each kernel computes its real result while an [`OpCounter`] records every
//! scalar operation it performs, loads, stores and loop branches included.
//! The recorded [`OperationProfile`] is what an external profiler would emit
//! for the same program, so it exercises the extractor end to end.

use crate::workload::{KernelError, KernelSpec, OperationProfile};

/// Counts scalar operations by mnemonic while performing them.
#[derive(Debug, Default)]
pub struct OpCounter {
    profile: OperationProfile,
}

impl OpCounter {
    pub fn new(source: impl Into<String>) -> Self {
        OpCounter {
            profile: OperationProfile::new(source),
        }
    }

    fn tick(&mut self, mnemonic: &str) {
        self.profile.add(mnemonic, 1);
    }

    pub fn fadd(&mut self, a: f64, b: f64) -> f64 {
        self.tick("fadd");
        a + b
    }

    pub fn fsub(&mut self, a: f64, b: f64) -> f64 {
        self.tick("fsub");
        a - b
    }

    pub fn fmul(&mut self, a: f64, b: f64) -> f64 {
        self.tick("fmul");
        a * b
    }

    pub fn load(&mut self, xs: &[f64], i: usize) -> f64 {
        self.tick("ld");
        xs[i]
    }

    pub fn store(&mut self, xs: &mut [f64], i: usize, v: f64) {
        self.tick("st");
        xs[i] = v;
    }

    pub fn addr(&mut self) {
        self.tick("lea");
    }

    pub fn branch(&mut self) {
        self.tick("br");
    }

    pub fn finish(self) -> OperationProfile {
        self.profile
    }
}

/// `a` is `n×n` row-major; returns `a·b`.
pub fn matmul(c: &mut OpCounter, a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            c.addr();
            let mut acc = {
                let x = c.load(a, i * n);
                let y = c.load(b, j);
                c.fmul(x, y)
            };
            for k in 1..n {
                c.addr();
                let x = c.load(a, i * n + k);
                let y = c.load(b, k * n + j);
                let p = c.fmul(x, y);
                acc = c.fadd(acc, p);
                c.branch();
            }
            c.store(&mut out, i * n + j, acc);
            c.branch();
        }
        c.branch();
    }
    out
}

pub fn dot(c: &mut OpCounter, x: &[f64], y: &[f64]) -> f64 {
    let a = c.load(x, 0);
    let b = c.load(y, 0);
    let mut acc = c.fmul(a, b);
    for i in 1..x.len() {
        let a = c.load(x, i);
        let b = c.load(y, i);
        let p = c.fmul(a, b);
        acc = c.fadd(acc, p);
        c.branch();
    }
    acc
}

/// Direct-form FIR over a zero-padded history: `y[i] = Σ_t h[t]·x[i−t]`.
/// Every tap is evaluated for every sample, including the padded ones.
pub fn fir(c: &mut OpCounter, x: &[f64], taps: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for i in 0..x.len() {
        let sample = |c: &mut OpCounter, t: usize| {
            if i >= t {
                c.load(x, i - t)
            } else {
                c.branch();
                0.0
            }
        };
        let h0 = c.load(taps, 0);
        let x0 = sample(c, 0);
        let mut acc = c.fmul(h0, x0);
        for t in 1..taps.len() {
            let h = c.load(taps, t);
            let xv = sample(c, t);
            let p = c.fmul(h, xv);
            acc = c.fadd(acc, p);
            c.branch();
        }
        c.store(&mut y, i, acc);
        c.branch();
    }
    y
}

/// Iterative radix-2 decimation-in-time FFT on separate real/imaginary
/// arrays. Every butterfly performs a full complex twiddle multiply.
pub fn fft(c: &mut OpCounter, re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    assert!(n.is_power_of_two() && n == im.len());
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
            c.tick("mov");
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let angle = -2.0 * std::f64::consts::PI * k as f64 / len as f64;
                let (w_re, w_im) = (angle.cos(), angle.sin());
                let (top, bot) = (start + k, start + k + half);
                let b_re = c.load(re, bot);
                let b_im = c.load(im, bot);
                // t = w · b
                let rr = c.fmul(w_re, b_re);
                let ii = c.fmul(w_im, b_im);
                let ri = c.fmul(w_re, b_im);
                let ir = c.fmul(w_im, b_re);
                let t_re = c.fsub(rr, ii);
                let t_im = c.fadd(ri, ir);
                let a_re = c.load(re, top);
                let a_im = c.load(im, top);
                let v = c.fadd(a_re, t_re);
                c.store(re, top, v);
                let v = c.fadd(a_im, t_im);
                c.store(im, top, v);
                let v = c.fsub(a_re, t_re);
                c.store(re, bot, v);
                let v = c.fsub(a_im, t_im);
                c.store(im, bot, v);
                c.branch();
            }
        }
        len *= 2;
    }
}

/// Deterministic non-trivial input values.
fn ramp(n: usize, phase: f64) -> Vec<f64> {
    (0..n).map(|i| ((i as f64 + phase) * 0.37).sin() + 0.5).collect()
}

/// Runs the kernel described by `spec` on fixed inputs and returns the
/// operation profile it produced.
pub fn run_instrumented(spec: KernelSpec) -> Result<OperationProfile, KernelError> {
    spec.validate()?;
    let mut c = OpCounter::new(format!("reference kernel {}", spec.label()));
    match spec {
        KernelSpec::Matmul { n } => {
            let n = n as usize;
            let (a, b) = (ramp(n * n, 0.0), ramp(n * n, 1.0));
            matmul(&mut c, &a, &b, n);
        }
        KernelSpec::Dot { n } => {
            let n = n as usize;
            dot(&mut c, &ramp(n, 0.0), &ramp(n, 2.0));
        }
        KernelSpec::Fir { n_samples, k_taps } => {
            fir(&mut c, &ramp(n_samples as usize, 0.0), &ramp(k_taps as usize, 3.0));
        }
        KernelSpec::Fft { n } => {
            let n = n as usize;
            let (mut re, mut im) = (ramp(n, 0.0), ramp(n, 5.0));
            fft(&mut c, &mut re, &mut im);
        }
    }
    Ok(c.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn matmul_matches_naive_product() {
        let n = 5;
        let (a, b) = (ramp(n * n, 0.0), ramp(n * n, 1.0));
        let got = matmul(&mut OpCounter::default(), &a, &b, n);
        for i in 0..n {
            for j in 0..n {
                let want: f64 = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
                assert!(close(got[i * n + j], want));
            }
        }
    }

    #[test]
    fn fir_matches_convolution() {
        let (x, h) = (ramp(20, 0.0), ramp(4, 3.0));
        let got = fir(&mut OpCounter::default(), &x, &h);
        for i in 0..x.len() {
            let want: f64 = (0..h.len()).filter(|&t| t <= i).map(|t| h[t] * x[i - t]).sum();
            assert!(close(got[i], want));
        }
    }

    #[test]
    fn fft_matches_naive_dft() {
        for n in [2usize, 4, 8, 16, 32] {
            let (x_re, x_im) = (ramp(n, 0.0), ramp(n, 5.0));
            let (mut re, mut im) = (x_re.clone(), x_im.clone());
            fft(&mut OpCounter::default(), &mut re, &mut im);
            for k in 0..n {
                let (mut s_re, mut s_im) = (0.0, 0.0);
                for t in 0..n {
                    let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                    s_re += x_re[t] * ang.cos() - x_im[t] * ang.sin();
                    s_im += x_re[t] * ang.sin() + x_im[t] * ang.cos();
                }
                assert!(close(re[k], s_re) && close(im[k], s_im), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn dot_matches_sum() {
        let (x, y) = (ramp(9, 0.0), ramp(9, 2.0));
        let want: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!(close(dot(&mut OpCounter::default(), &x, &y), want));
    }

    #[test]
    fn profiles_record_overhead_too() {
        let p = run_instrumented(KernelSpec::Matmul { n: 4 }).unwrap();
        assert_eq!(p.get("fmul"), 64);
        assert_eq!(p.get("fadd"), 48);
        assert!(p.get("ld") > 0 && p.get("st") > 0 && p.get("br") > 0);
    }
}
