use crate::alphabet::SymbolSet;
use crate::encoding::{Column, Encoding};
use crate::error::{Error, Result};
use crate::substrings::Substrings;

use super::ClampMode;

/// Longest string the network accepts.
pub const MAX_STRING_LEN: usize = 20;

/// Soft subtree memberships: `rho[t][a]` is the weight of symbol `a`
/// occurring below vertex `t`. Row `T` is an all-zero phantom vertex.
#[derive(Clone, Debug)]
pub struct Rho {
    n: usize,
    values: Vec<f64>,
    pre: Vec<f64>,
}

impl Rho {
    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.values[t * self.n + k]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.n..(t + 1) * self.n]
    }
}

/// Computes `rho` from the last vertex up to the root.
pub fn compute_rho(theta: &Encoding, mode: ClampMode) -> Rho {
    let n = theta.alphabet().len();
    let big_t = theta.bound();
    let mut values = vec![0.0; (big_t + 1) * n];
    let mut pre = vec![0.0; (big_t + 1) * n];
    for t in (0..big_t).rev() {
        let w_any: f64 = Column::OPERATORS.iter().map(|&c| theta.w(t, c)).sum();
        let w_bin: f64 = Column::BINARY.iter().map(|&c| theta.w(t, c)).sum();
        for k in 0..n {
            let right: f64 = (t + 2..big_t).map(|c| theta.u(t, c) * values[c * n + k]).sum();
            let z = theta.w(t, Column::Symbol(k)) + w_any * values[(t + 1) * n + k] + w_bin * right;
            pre[t * n + k] = z;
            values[t * n + k] = mode.apply(z);
        }
    }
    Rho { n, values, pre }
}

/// Gradient of a loss with respect to `w` and `u` (flat layouts of
/// [`Encoding`]), plus the pending gradient on `rho` before it has been
/// propagated into the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub dw: Vec<f64>,
    pub du: Vec<f64>,
    pub(crate) drho: Vec<f64>,
}

impl Gradient {
    pub fn zeros(theta: &Encoding) -> Gradient {
        Gradient {
            dw: vec![0.0; theta.w_flat().len()],
            du: vec![0.0; theta.u_flat().len()],
            drho: vec![0.0; (theta.bound() + 1) * theta.alphabet().len()],
        }
    }

    /// Adds `other` into `self`.
    pub fn accumulate(&mut self, other: &Gradient) {
        for (a, b) in self.dw.iter_mut().zip(&other.dw) {
            *a += b;
        }
        for (a, b) in self.du.iter_mut().zip(&other.du) {
            *a += b;
        }
        for (a, b) in self.drho.iter_mut().zip(&other.drho) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for x in self.dw.iter_mut().chain(self.du.iter_mut()).chain(self.drho.iter_mut()) {
            *x *= factor;
        }
    }
}

/// Everything the forward pass computed for one string.
#[derive(Clone, Debug)]
pub struct ForwardTrace {
    subs: Substrings,
    bound: usize,
    n: usize,
    present: SymbolSet,
    rho: Vec<f64>,
    /// `flags[(t * (T + 1) + t2) * slots + slot]` for `t2 > t`. With `t2 = T`
    /// (the phantom vertex) the flag is the soft test "no symbol of the slot
    /// lies below `t`".
    flags: Vec<f64>,
    g: Vec<f64>,
    y_pre: f64,
    y_hat: f64,
    /// Symbol attaining the largest `σ01(1[a ∈ s] − rho[0][a])`.
    missing_arg: Option<usize>,
}

impl ForwardTrace {
    pub fn y_hat(&self) -> f64 {
        self.y_hat
    }

    fn slot(&self, start: usize, end: usize) -> usize {
        if start >= end {
            self.subs.eps()
        } else {
            self.subs.idx(start, end - 1)
        }
    }

    /// Soft `g` of vertex `t` on `s[start..end]`; an empty range is ε.
    pub fn g(&self, t: usize, start: usize, end: usize) -> f64 {
        self.g[t * self.subs.slots() + self.slot(start, end)]
    }

    /// Soft flag between vertex `t` and a descendant candidate `t2 > t`;
    /// `t2 = T` gives the emptiness test of `t`.
    pub fn flag(&self, t: usize, t2: usize, start: usize, end: usize) -> f64 {
        assert!(t2 > t && t2 <= self.bound);
        self.flags[(t * (self.bound + 1) + t2) * self.subs.slots() + self.slot(start, end)]
    }

    pub fn rho(&self, t: usize, k: usize) -> f64 {
        self.rho[t * self.n + k]
    }

    /// Every stored intermediate value, for range checks.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let flag_slots = self.subs.slots();
        let bound = self.bound;
        let flags = self
            .flags
            .chunks(flag_slots)
            .enumerate()
            .filter(move |(k, _)| k % (bound + 1) > k / (bound + 1))
            .flat_map(|(_, c)| c.iter().copied());
        self.rho.iter().copied().chain(flags).chain(self.g.iter().copied()).chain([self.y_hat])
    }
}

/// The network for one parameter setting. `rho` is computed once and shared
/// by every string evaluated with it.
pub struct Network<'a> {
    theta: &'a Encoding,
    mode: ClampMode,
    rho: Rho,
    max_len: usize,
}

/// Which operand attained a `min` or `max` (lowest index on ties).
#[inline]
fn argmin<const N: usize>(xs: [f64; N]) -> (f64, usize) {
    let mut best = 0;
    for k in 1..N {
        if xs[k] < xs[best] {
            best = k;
        }
    }
    (xs[best], best)
}

struct Weights {
    opt: f64,
    star: f64,
    plus: f64,
    cat: f64,
    int: f64,
    uni: f64,
}

impl<'a> Network<'a> {
    pub fn new(theta: &'a Encoding, mode: ClampMode) -> Network<'a> {
        Network {
            theta,
            mode,
            rho: compute_rho(theta, mode),
            max_len: MAX_STRING_LEN,
        }
    }

    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = max_len;
        self
    }

    pub fn rho(&self) -> &Rho {
        &self.rho
    }

    pub fn mode(&self) -> ClampMode {
        self.mode
    }

    fn weights(&self, t: usize) -> Weights {
        let th = self.theta;
        Weights {
            opt: th.w(t, Column::Optional),
            star: th.w(t, Column::Star),
            plus: th.w(t, Column::Plus),
            cat: th.w(t, Column::Concat),
            int: th.w(t, Column::Interleave),
            uni: th.w(t, Column::Union),
        }
    }

    /// Evaluates the network on `s`.
    pub fn forward(&self, s: &str) -> Result<ForwardTrace> {
        let len = s.chars().count();
        if len > self.max_len {
            return Err(Error::StringTooLong { len, max: self.max_len });
        }
        let sigma = self.theta.alphabet();
        if let Some(c) = s.chars().find(|&c| !sigma.contains(c)) {
            return Err(Error::UnknownCharacter(c));
        }
        let subs = Substrings::new(s, sigma);
        let n = sigma.len();
        let big_t = self.theta.bound();
        let slots = subs.slots();
        let eps = subs.eps();
        let sig = |x: f64| self.mode.apply(x);

        // Flags for every vertex pair t < t2 <= T.
        let mut flags = vec![0.0; big_t * (big_t + 1) * slots];
        for t in 0..big_t {
            for t2 in t + 1..=big_t {
                let base = (t * (big_t + 1) + t2) * slots;
                for slot in 0..slots {
                    let set = subs.set(slot);
                    let z: f64 = (0..n)
                        .map(|k| {
                            let present = if set.contains(k) { 1.0 } else { 0.0 };
                            sig(present + self.rho.get(t, k) - self.rho.get(t2, k) - 1.0)
                        })
                        .sum();
                    flags[base + slot] = 1.0 - sig(z);
                }
            }
        }
        let fl = |t: usize, t2: usize, slot: usize| flags[(t * (big_t + 1) + t2) * slots + slot];

        let mut g: Vec<f64> = vec![0.0; (big_t + 1) * slots];
        let weights: Vec<Weights> = (0..big_t).map(|t| self.weights(t)).collect();
        for (i, j, slot) in subs.ascending() {
            let nonempty = slot != eps;
            for t in (0..big_t).rev() {
                let gv = |v: usize, slot: usize| -> f64 { g[v * slots + slot] };
                let w = &weights[t];
                let l = t + 1;
                let singles = subs.singles(slot);
                let mut value: f64 = (0..n)
                    .filter(|&k| singles.contains(k))
                    .map(|k| self.theta.w(t, Column::Symbol(k)))
                    .sum();

                let gl = gv(l, slot);
                let empty = fl(t, big_t, slot);
                let mut split = 0.0;
                if nonempty {
                    for k in i..j {
                        let m = gv(t, subs.idx(i, k)).min(gv(l, subs.idx(k + 1, j)));
                        if m > split {
                            split = m;
                        }
                    }
                }
                value += w.opt * sig(empty + gl) + w.star * sig(empty + gl + split) + w.plus * sig(gl + split);

                if w.cat != 0.0 || w.int != 0.0 || w.uni != 0.0 {
                    for c in t + 2..big_t {
                        let uu = self.theta.u(t, c);
                        if uu == 0.0 {
                            continue;
                        }
                        let gc = gv(c, slot);
                        let (fl_l, fl_c) = (fl(t, l, slot), fl(t, c, slot));
                        let mut binary = 0.0;
                        if w.cat != 0.0 {
                            let a = fl_l.min(gl).min(gv(c, eps));
                            let b = fl_c.min(gc).min(gv(l, eps));
                            let mut m = 0.0;
                            if nonempty {
                                for k in i..j {
                                    let (x, y) = (subs.idx(i, k), subs.idx(k + 1, j));
                                    let v = fl(t, l, x).min(gv(l, x)).min(fl(t, c, y)).min(gv(c, y));
                                    if v > m {
                                        m = v;
                                    }
                                }
                            }
                            binary += w.cat * sig(a + b + m);
                        }
                        binary += w.int * gl.min(gc);
                        binary += w.uni * sig(fl_l.min(gl) + fl_c.min(gc));
                        value += uu * binary;
                    }
                }
                g[t * slots + slot] = value;
            }
        }

        let present = subs.set(subs.whole());
        let mut missing = 0.0;
        let mut missing_arg = None;
        for k in 0..n {
            let indicator = if present.contains(k) { 1.0 } else { 0.0 };
            let v = sig(indicator - self.rho.get(0, k));
            if missing_arg.is_none() || v > missing {
                missing = v;
                missing_arg = Some(k);
            }
        }
        let y_pre = g[subs.whole()] - missing;
        let y_hat = sig(y_pre);
        Ok(ForwardTrace {
            rho: self.rho.values.clone(),
            subs,
            bound: big_t,
            n,
            present,
            flags,
            g,
            y_pre,
            y_hat,
            missing_arg,
        })
    }

    /// Accumulates into `grad` the gradient of `d_yhat · ŷ` through one trace.
    /// The `rho` part stays pending in `grad` until [`finish`](Self::finish).
    pub fn backward(&self, trace: &ForwardTrace, d_yhat: f64, grad: &mut Gradient) {
        let subs = &trace.subs;
        let n = trace.n;
        let big_t = trace.bound;
        let slots = subs.slots();
        let eps = subs.eps();
        let width = self.theta.width();
        let mode = self.mode;
        let sig = |x: f64| mode.apply(x);
        let dsig = |x: f64| mode.slope(x);
        let g = &trace.g;
        let gv = |v: usize, slot: usize| g[v * slots + slot];
        let flags = &trace.flags;
        let fidx = |t: usize, t2: usize, slot: usize| (t * (big_t + 1) + t2) * slots + slot;
        let fl = |t: usize, t2: usize, slot: usize| flags[fidx(t, t2, slot)];
        let col = |c: Column| c.index(n);

        let mut dg = vec![0.0; (big_t + 1) * slots];
        let mut dfl = vec![0.0; flags.len()];

        // ŷ = σ(g[0][s] − max_a σ(1[a ∈ s] − rho[0][a]))
        let d_pre = d_yhat * dsig(trace.y_pre);
        dg[subs.whole()] += d_pre;
        if let Some(k) = trace.missing_arg {
            let indicator = if trace.present.contains(k) { 1.0 } else { 0.0 };
            let dq = -d_pre * dsig(indicator - trace.rho(0, k));
            grad.drho[k] -= dq;
        }

        let order: Vec<(usize, usize, usize)> = subs.ascending().collect();
        let weights: Vec<Weights> = (0..big_t).map(|t| self.weights(t)).collect();
        for &(i, j, slot) in order.iter().rev() {
            let nonempty = slot != eps;
            for t in 0..big_t {
                let grad_g = dg[t * slots + slot];
                if grad_g == 0.0 {
                    continue;
                }
                let w = &weights[t];
                let l = t + 1;
                let row = t * width;
                let singles = subs.singles(slot);
                for k in (0..n).filter(|&k| singles.contains(k)) {
                    grad.dw[row + k] += grad_g;
                }

                let gl = gv(l, slot);
                let empty = fl(t, big_t, slot);
                let mut split = 0.0;
                let mut split_at: Option<(usize, usize, usize)> = None;
                if nonempty {
                    for k in i..j {
                        let (x, y) = (subs.idx(i, k), subs.idx(k + 1, j));
                        let (m, which) = argmin([gv(t, x), gv(l, y)]);
                        if split_at.is_none() || m > split {
                            split = m;
                            split_at = Some(if which == 0 { (t, x, 0) } else { (l, y, 0) });
                        }
                    }
                }

                let z_opt = empty + gl;
                let z_star = empty + gl + split;
                let z_plus = gl + split;
                grad.dw[row + col(Column::Optional)] += grad_g * sig(z_opt);
                grad.dw[row + col(Column::Star)] += grad_g * sig(z_star);
                grad.dw[row + col(Column::Plus)] += grad_g * sig(z_plus);
                let d_opt = grad_g * w.opt * dsig(z_opt);
                let d_star = grad_g * w.star * dsig(z_star);
                let d_plus = grad_g * w.plus * dsig(z_plus);
                dfl[fidx(t, big_t, slot)] += d_opt + d_star;
                dg[l * slots + slot] += d_opt + d_star + d_plus;
                let d_split = d_star + d_plus;
                if let Some((v, x, _)) = split_at {
                    if d_split != 0.0 {
                        dg[v * slots + x] += d_split;
                    }
                }

                let u_start = self.theta.u_range(t).start;
                for c in t + 2..big_t {
                    let uu = self.theta.u(t, c);
                    let gc = gv(c, slot);
                    let (fl_l, fl_c) = (fl(t, l, slot), fl(t, c, slot));

                    // Concatenation: two boundary terms and the split maximum.
                    let (a, a_arg) = argmin([fl_l, gl, gv(c, eps)]);
                    let (b, b_arg) = argmin([fl_c, gc, gv(l, eps)]);
                    let mut m = 0.0;
                    let mut m_at: Option<(usize, usize, usize)> = None;
                    if nonempty {
                        for k in i..j {
                            let (x, y) = (subs.idx(i, k), subs.idx(k + 1, j));
                            let (v, which) = argmin([fl(t, l, x), gv(l, x), fl(t, c, y), gv(c, y)]);
                            if m_at.is_none() || v > m {
                                m = v;
                                m_at = Some((x, y, which));
                            }
                        }
                    }
                    let z_cat = a + b + m;
                    let p_cat = sig(z_cat);
                    let (p_int, int_arg) = argmin([gl, gc]);
                    let (ul, ul_arg) = argmin([fl_l, gl]);
                    let (uc, uc_arg) = argmin([fl_c, gc]);
                    let z_uni = ul + uc;
                    let p_uni = sig(z_uni);

                    grad.dw[row + col(Column::Concat)] += grad_g * uu * p_cat;
                    grad.dw[row + col(Column::Interleave)] += grad_g * uu * p_int;
                    grad.dw[row + col(Column::Union)] += grad_g * uu * p_uni;
                    grad.du[u_start + c - t - 2] += grad_g * (w.cat * p_cat + w.int * p_int + w.uni * p_uni);
                    if uu == 0.0 {
                        continue;
                    }

                    let d_cat = grad_g * uu * w.cat * dsig(z_cat);
                    if d_cat != 0.0 {
                        match a_arg {
                            0 => dfl[fidx(t, l, slot)] += d_cat,
                            1 => dg[l * slots + slot] += d_cat,
                            _ => dg[c * slots + eps] += d_cat,
                        }
                        match b_arg {
                            0 => dfl[fidx(t, c, slot)] += d_cat,
                            1 => dg[c * slots + slot] += d_cat,
                            _ => dg[l * slots + eps] += d_cat,
                        }
                        if let Some((x, y, which)) = m_at {
                            match which {
                                0 => dfl[fidx(t, l, x)] += d_cat,
                                1 => dg[l * slots + x] += d_cat,
                                2 => dfl[fidx(t, c, y)] += d_cat,
                                _ => dg[c * slots + y] += d_cat,
                            }
                        }
                    }

                    let d_int = grad_g * uu * w.int;
                    if d_int != 0.0 {
                        if int_arg == 0 {
                            dg[l * slots + slot] += d_int;
                        } else {
                            dg[c * slots + slot] += d_int;
                        }
                    }

                    let d_uni = grad_g * uu * w.uni * dsig(z_uni);
                    if d_uni != 0.0 {
                        if ul_arg == 0 {
                            dfl[fidx(t, l, slot)] += d_uni;
                        } else {
                            dg[l * slots + slot] += d_uni;
                        }
                        if uc_arg == 0 {
                            dfl[fidx(t, c, slot)] += d_uni;
                        } else {
                            dg[c * slots + slot] += d_uni;
                        }
                    }
                }
            }
        }

        // Flags: fl = 1 − σ(Σ_a σ(1[a ∈ slot] + rho[t][a] − rho[t2][a] − 1)).
        for t in 0..big_t {
            for t2 in t + 1..=big_t {
                for slot in 0..slots {
                    let d = dfl[fidx(t, t2, slot)];
                    if d == 0.0 {
                        continue;
                    }
                    let set = subs.set(slot);
                    let q = |k: usize| {
                        let present = if set.contains(k) { 1.0 } else { 0.0 };
                        present + trace.rho(t, k) - trace.rho(t2, k) - 1.0
                    };
                    let z: f64 = (0..n).map(|k| sig(q(k))).sum();
                    let dz = -d * dsig(z);
                    if dz == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        let dq = dz * dsig(q(k));
                        grad.drho[t * n + k] += dq;
                        grad.drho[t2 * n + k] -= dq;
                    }
                }
            }
        }
    }

    /// Propagates the pending `rho` gradient into `w` and `u`.
    pub fn finish(&self, grad: &mut Gradient) {
        let theta = self.theta;
        let n = theta.alphabet().len();
        let big_t = theta.bound();
        let width = theta.width();
        for t in 0..big_t {
            let w_any: f64 = Column::OPERATORS.iter().map(|&c| theta.w(t, c)).sum();
            let w_bin: f64 = Column::BINARY.iter().map(|&c| theta.w(t, c)).sum();
            let row = t * width;
            let u_start = theta.u_range(t).start;
            for k in 0..n {
                let dz = grad.drho[t * n + k] * self.mode.slope(self.rho.pre[t * n + k]);
                if dz == 0.0 {
                    continue;
                }
                grad.dw[row + k] += dz;
                let below = self.rho.get(t + 1, k);
                for c in Column::OPERATORS {
                    grad.dw[row + c.index(n)] += dz * below;
                }
                grad.drho[(t + 1) * n + k] += dz * w_any;
                let right: f64 = (t + 2..big_t).map(|c| theta.u(t, c) * self.rho.get(c, k)).sum();
                for c in Column::BINARY {
                    grad.dw[row + c.index(n)] += dz * right;
                }
                for c in t + 2..big_t {
                    grad.du[u_start + c - t - 2] += dz * w_bin * self.rho.get(c, k);
                    grad.drho[c * n + k] += dz * w_bin * theta.u(t, c);
                }
            }
        }
        grad.drho.iter_mut().for_each(|x| *x = 0.0);
    }

    /// Loss `½(ŷ − y)²` and its gradient for one labeled string.
    pub fn loss_gradient(&self, s: &str, label: bool, grad: &mut Gradient) -> Result<f64> {
        let trace = self.forward(s)?;
        let y = if label { 1.0 } else { 0.0 };
        let diff = trace.y_hat - y;
        if diff != 0.0 {
            self.backward(&trace, diff, grad);
        }
        Ok(0.5 * diff * diff)
    }
}

/// Evaluates the network of `theta` on `s`.
pub fn forward(theta: &Encoding, s: &str, mode: ClampMode) -> Result<(f64, ForwardTrace)> {
    let trace = Network::new(theta, mode).forward(s)?;
    Ok((trace.y_hat(), trace))
}

/// Gradient of `½(ŷ − y)²` with respect to `w` and `u`.
pub fn backward(theta: &Encoding, s: &str, label: bool, mode: ClampMode) -> Result<Gradient> {
    let net = Network::new(theta, mode);
    let mut grad = Gradient::zeros(theta);
    net.loss_gradient(s, label, &mut grad)?;
    net.finish(&mut grad);
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::soiretm;
    use crate::{Alphabet, Soire};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn figure() -> (Alphabet, Encoding) {
        let sigma = Alphabet::parse("abc").unwrap();
        let r = Soire::parse("(a&b)c*", &sigma).unwrap();
        let theta = Encoding::encode(&r, 6).unwrap();
        (sigma, theta)
    }

    #[test]
    fn rho_of_faithful_encoding() {
        let (_, theta) = figure();
        let rho = compute_rho(&theta, ClampMode::Exact);
        assert_eq!(rho.row(0), &[1.0, 1.0, 1.0]);
        assert_eq!(rho.row(1), &[1.0, 1.0, 0.0]);
        assert_eq!(rho.row(4), &[0.0, 0.0, 1.0]);
        assert_eq!(rho.row(6), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn leaf_rho() {
        let sigma = Alphabet::parse("ab").unwrap();
        let mut theta = Encoding::zeros(&sigma, 1);
        theta.set_w(0, Column::Symbol(0), 1.0);
        let rho = compute_rho(&theta, ClampMode::Exact);
        assert_eq!(rho.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn soft_flags() {
        let (_, theta) = figure();
        let (_, trace) = forward(&theta, "bac", ClampMode::Exact).unwrap();
        assert_eq!(trace.flag(0, 1, 0, 2), 1.0);
        assert_eq!(trace.flag(0, 1, 2, 3), 0.0);
        assert_eq!(trace.flag(0, 1, 0, 0), 1.0);
    }

    #[test]
    fn figure_outputs() {
        let (sigma, theta) = figure();
        let abcd = Alphabet::parse("abcd").unwrap();
        assert_eq!(forward(&theta, "bac", ClampMode::Exact).unwrap().0, 1.0);
        assert_eq!(forward(&theta, "acb", ClampMode::Exact).unwrap().0, 0.0);
        // An encoding over a larger alphabet that leaves d unused.
        let wide = Encoding::encode(&Soire::parse("(a&b)c*", &abcd).unwrap(), 6).unwrap();
        assert_eq!(forward(&wide, "dbac", ClampMode::Exact).unwrap().0, 0.0);
        assert!(matches!(forward(&theta, "dbac", ClampMode::Exact), Err(Error::UnknownCharacter('d'))));
        let long = "a".repeat(21);
        assert!(matches!(forward(&theta, &long, ClampMode::Exact), Err(Error::StringTooLong { .. })));
        let (y, trace) = forward(&theta, "", ClampMode::Exact).unwrap();
        assert_eq!(y, trace.g(0, 0, 0));
        let _ = sigma;
    }

    #[test]
    fn faithful_forward_is_exact() {
        let sigma = Alphabet::parse("abcd").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..60 {
            let k = rng.gen_range(1..=4);
            let r = crate::datagen::random_soire(&sigma, k, 0.4, &mut rng).normalize_unary();
            let bound = r.size() + rng.gen_range(0..3);
            let theta = Encoding::encode(&r, bound).unwrap();
            let net = Network::new(&theta, ClampMode::Exact);
            for _ in 0..5 {
                let len = rng.gen_range(0..7);
                let s: String = (0..len).map(|_| sigma.symbol(rng.gen_range(0..4))).collect();
                let trace = net.forward(&s).unwrap();
                let expected = if soiretm(&r, &s) { 1.0 } else { 0.0 };
                assert_eq!(trace.y_hat(), expected, "{r} on {s:?}");
                assert!(trace.values().all(|v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn no_gradient_when_exact() {
        let (_, theta) = figure();
        let g = backward(&theta, "bac", true, ClampMode::Exact).unwrap();
        assert!(g.dw.iter().chain(&g.du).all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_matches_differences() {
        let sigma = Alphabet::parse("abc").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mode = ClampMode::TRAINING;
        let mut checked = 0;
        let mut good = 0;
        for _ in 0..4 {
            let theta = Encoding::random(&sigma, 6, &mut rng);
            let len = rng.gen_range(1..6);
            let s: String = (0..len).map(|_| sigma.symbol(rng.gen_range(0..3))).collect();
            let label = rng.gen_bool(0.5);
            let grad = backward(&theta, &s, label, mode).unwrap();
            let loss = |e: &Encoding| {
                let y = forward(e, &s, mode).unwrap().0;
                super::super::loss(y, if label { 1.0 } else { 0.0 })
            };
            let h = 1e-6;
            for k in 0..theta.w_flat().len() + theta.u_flat().len() {
                let mut plus = theta.clone();
                let mut minus = theta.clone();
                let nw = theta.w_flat().len();
                let analytic = if k < nw {
                    plus.w_flat_mut()[k] += h;
                    minus.w_flat_mut()[k] -= h;
                    grad.dw[k]
                } else {
                    plus.u_flat_mut()[k - nw] += h;
                    minus.u_flat_mut()[k - nw] -= h;
                    grad.du[k - nw]
                };
                let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                checked += 1;
                if (fd - analytic).abs() <= 1e-5 * (1.0 + fd.abs()) {
                    good += 1;
                }
            }
        }
        assert!(good as f64 >= 0.95 * checked as f64, "{good}/{checked}");
    }
}
