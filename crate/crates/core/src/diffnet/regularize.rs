//! Penalties pushing an encoding towards the seven faithfulness conditions.

use crate::encoding::{Column, Encoding};

use super::Gradient;

/// `Mean_i (1 − x_i) x_i + (1 − Σ x)²`.
pub fn onehot_loss(x: &[f64]) -> f64 {
    mean_part(x) + (1.0 - x.iter().sum::<f64>()).powi(2)
}

fn mean_part(x: &[f64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        x.iter().map(|&v| (1.0 - v) * v).sum::<f64>() / x.len() as f64
    }
}

/// A parameter of the flat layout `w ++ u`.
#[derive(Clone, Copy)]
enum Param {
    W(usize),
    U(usize),
}

struct Terms<'a> {
    theta: &'a Encoding,
    grad: Option<&'a mut Gradient>,
}

impl Terms<'_> {
    fn value(&self, p: Param) -> f64 {
        match p {
            Param::W(k) => self.theta.w_flat()[k],
            Param::U(k) => self.theta.u_flat()[k],
        }
    }

    fn add_grad(&mut self, p: Param, d: f64) {
        if let Some(grad) = self.grad.as_deref_mut() {
            match p {
                Param::W(k) => grad.dw[k] += d,
                Param::U(k) => grad.du[k] += d,
            }
        }
    }

    /// One-hot loss of a vector scaled by `scale`. With `allow_zero` the
    /// squared term only penalises a sum above one, so the all-zero vector
    /// also scores 0.
    fn onehot(&mut self, params: &[Param], allow_zero: bool, scale: f64) -> f64 {
        let x: Vec<f64> = params.iter().map(|&p| self.value(p)).collect();
        let sum: f64 = x.iter().sum();
        let excess = if allow_zero { (sum - 1.0).max(0.0) } else { sum - 1.0 };
        let m = x.len().max(1) as f64;
        for (&p, &v) in params.iter().zip(&x) {
            self.add_grad(p, scale * ((1.0 - 2.0 * v) / m + 2.0 * excess));
        }
        scale * (mean_part(&x) + excess * excess)
    }

    /// `scale · ReLU(Σ coef·x − offset)`.
    fn hinge(&mut self, params: &[(Param, f64)], offset: f64, scale: f64) -> f64 {
        let z: f64 = params.iter().map(|&(p, c)| c * self.value(p)).sum::<f64>() - offset;
        if z <= 0.0 {
            return 0.0;
        }
        for &(p, c) in params {
            self.add_grad(p, scale * c);
        }
        scale * z
    }
}

fn run(theta: &Encoding, grad: Option<&mut Gradient>) -> [f64; 7] {
    let big_t = theta.bound();
    let n = theta.alphabet().len();
    let width = theta.width();
    let wp = |t: usize, c: Column| Param::W(t * width + c.index(n));
    let up = |t: usize, c: usize| Param::U(theta.u_range(t).start + c - t - 2);
    let row_u = |t: usize| (t + 2..big_t).map(move |c| up(t, c));
    let mut terms = Terms { theta, grad };
    let mut out = [0.0; 7];
    let per = |count: usize| if count == 0 { 0.0 } else { 1.0 / count as f64 };

    // 1: rows of w are one-hot.
    let scale = per(big_t);
    for t in 0..big_t {
        let row: Vec<Param> = (0..width).map(|k| Param::W(t * width + k)).collect();
        out[0] += terms.onehot(&row, false, scale);
    }

    // 2: rows of u are one-hot or zero.
    for t in 0..big_t {
        let row: Vec<Param> = row_u(t).collect();
        out[1] += terms.onehot(&row, true, scale);
    }

    // 3: right child iff binary.
    for t in 0..big_t {
        let mut v: Vec<Param> = row_u(t).collect();
        v.extend((0..n).map(|k| wp(t, Column::Symbol(k))));
        v.extend(Column::UNARY.iter().map(|&c| wp(t, c)));
        v.push(wp(t, Column::None));
        out[2] += terms.onehot(&v, false, scale);
    }

    // 4: none never switches off.
    let scale4 = per(big_t.saturating_sub(1));
    for t in 0..big_t.saturating_sub(1) {
        out[3] += terms.hinge(&[(wp(t, Column::None), 1.0), (wp(t + 1, Column::None), -1.0)], 0.0, scale4);
    }

    // 5: every vertex but the root has exactly one parent, or is none.
    for t in 1..big_t {
        let mut v: Vec<Param> = Column::OPERATORS.iter().map(|&c| wp(t - 1, c)).collect();
        v.extend((0..t.saturating_sub(1)).map(|p| up(p, t)));
        v.push(wp(t, Column::None));
        out[4] += terms.onehot(&v, false, scale4);
    }

    // 6: preorder numbering of right children.
    let scale6 = per(big_t.saturating_sub(2));
    for t in 2..big_t {
        let inner = scale6 / (t - 1) as f64;
        for p in 0..t - 1 {
            let span = (t - 1 - p) as f64;
            let mut v = vec![(up(p, t), span)];
            for q in p + 1..t {
                v.extend((t + 1..big_t).map(|c| (up(q, c), 1.0)));
            }
            out[5] += terms.hinge(&v, span, inner);
        }
    }

    // 7: each symbol used at most once.
    let scale7 = per(n);
    for k in 0..n {
        let v: Vec<(Param, f64)> = (0..big_t).map(|t| (wp(t, Column::Symbol(k)), 1.0)).collect();
        out[6] += terms.hinge(&v, 1.0, scale7);
    }
    out
}

/// The seven penalty terms, one per faithfulness condition.
///
/// The second term uses `Mean_i (1 − x_i) x_i + ReLU(Σ x − 1)²` so that the
/// all-zero `u` rows of symbol, unary and `none` vertices cost nothing.
pub fn regularizers(theta: &Encoding) -> [f64; 7] {
    run(theta, None)
}

/// Adds `scale ·` the gradient of the sum of all seven terms into `grad`.
pub fn regularizer_gradient(theta: &Encoding, scale: f64, grad: &mut Gradient) {
    let mut local = Gradient::zeros(theta);
    run(theta, Some(&mut local));
    local.scale(scale);
    grad.accumulate(&local);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Alphabet, Soire};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn onehot_examples() {
        assert_eq!(onehot_loss(&[1.0, 0.0, 0.0]), 0.0);
        assert!(close(onehot_loss(&[0.5, 0.5]), 0.25));
        assert_eq!(onehot_loss(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn faithful_encoding_scores_zero() {
        let sigma = Alphabet::parse("abc").unwrap();
        let r = Soire::parse("(a&b)c*", &sigma).unwrap();
        for bound in [6, 8, 10] {
            let e = Encoding::encode(&r, bound).unwrap();
            assert_eq!(regularizers(&e), [0.0; 7]);
        }
    }

    #[test]
    fn zero_encoding_first_term() {
        let sigma = Alphabet::parse("ab").unwrap();
        let e = Encoding::zeros(&sigma, 5);
        assert_eq!(regularizers(&e)[0], 1.0);
    }

    #[test]
    fn none_decrease() {
        let sigma = Alphabet::parse("abc").unwrap();
        let r = Soire::parse("(a&b)c*", &sigma).unwrap();
        let mut e = Encoding::encode(&r, 8).unwrap();
        e.set_w(6, Column::None, 1.0);
        e.set_w(7, Column::None, 0.7);
        assert!(close(regularizers(&e)[3], 0.3 / 7.0));
    }

    #[test]
    fn gradient_matches_differences() {
        use rand::SeedableRng;
        let sigma = Alphabet::parse("abc").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut e = Encoding::random(&sigma, 7, &mut rng);
        // Push some entries up so the hinges are active, and keep the
        // single-entry u rows off the kink at 1.
        for t in 0..7 {
            e.set_w(t, Column::Symbol(0), 0.6);
        }
        e.u_flat_mut().iter_mut().for_each(|x| *x *= 0.9);
        let mut grad = Gradient::zeros(&e);
        regularizer_gradient(&e, 1.0, &mut grad);
        let total = |e: &Encoding| regularizers(e).iter().sum::<f64>();
        let h = 1e-6;
        for k in 0..e.w_flat().len() {
            let mut plus = e.clone();
            plus.w_flat_mut()[k] += h;
            let mut minus = e.clone();
            minus.w_flat_mut()[k] -= h;
            let fd = (total(&plus) - total(&minus)) / (2.0 * h);
            assert!((fd - grad.dw[k]).abs() < 1e-6, "w[{k}]: {fd} vs {}", grad.dw[k]);
        }
        for k in 0..e.u_flat().len() {
            let mut plus = e.clone();
            plus.u_flat_mut()[k] += h;
            let mut minus = e.clone();
            minus.u_flat_mut()[k] -= h;
            let fd = (total(&plus) - total(&minus)) / (2.0 * h);
            assert!((fd - grad.du[k]).abs() < 1e-6, "u[{k}]: {fd} vs {}", grad.du[k]);
        }
    }
}
