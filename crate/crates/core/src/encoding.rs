//! Parameter encodings of bounded-size syntax trees.
//!
//! An encoding of length `T` holds a `T × |B|` matrix `w`, where
//! `B = Σ ∪ {?, *, +, ., &, |, none}` and `w[t][b]` is the weight of vertex
//! `t` carrying label `b`, and the strictly upper band `u[t][t']` for
//! `t' ≥ t + 2`, the weight of vertex `t` taking `t'` as its right child.
//!
//! An encoding whose entries are 0/1 and which satisfies seven structural
//! conditions is *faithful*; faithful encodings of length `T` correspond one
//! to one with prefix forms of expressions of size at most `T`.

use rand::Rng;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::soire::{Label, Soire};

/// A column of `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Column {
    Symbol(usize),
    Optional,
    Star,
    Plus,
    Concat,
    Interleave,
    Union,
    None,
}

impl Column {
    pub const UNARY: [Column; 3] = [Column::Optional, Column::Star, Column::Plus];
    pub const BINARY: [Column; 3] = [Column::Concat, Column::Interleave, Column::Union];
    pub const OPERATORS: [Column; 6] = [
        Column::Optional,
        Column::Star,
        Column::Plus,
        Column::Concat,
        Column::Interleave,
        Column::Union,
    ];

    /// Position in a row of `w` for an alphabet of `n` symbols.
    #[inline]
    pub fn index(self, n: usize) -> usize {
        match self {
            Column::Symbol(k) => k,
            Column::Optional => n,
            Column::Star => n + 1,
            Column::Plus => n + 2,
            Column::Concat => n + 3,
            Column::Interleave => n + 4,
            Column::Union => n + 5,
            Column::None => n + 6,
        }
    }

    pub fn from_index(index: usize, n: usize) -> Column {
        match index.checked_sub(n) {
            None => Column::Symbol(index),
            Some(0) => Column::Optional,
            Some(1) => Column::Star,
            Some(2) => Column::Plus,
            Some(3) => Column::Concat,
            Some(4) => Column::Interleave,
            Some(5) => Column::Union,
            Some(6) => Column::None,
            Some(_) => panic!("column {index} out of range"),
        }
    }

    pub fn of_label(label: Label, sigma: &Alphabet) -> Column {
        match label {
            Label::Symbol(c) => Column::Symbol(sigma.index_of(c).expect("symbol in alphabet")),
            Label::Optional => Column::Optional,
            Label::Star => Column::Star,
            Label::Plus => Column::Plus,
            Label::Concat => Column::Concat,
            Label::Interleave => Column::Interleave,
            Label::Union => Column::Union,
        }
    }

    pub fn name(self, sigma: &Alphabet) -> String {
        match self {
            Column::Symbol(k) => sigma.symbol(k).to_string(),
            Column::None => "none".to_string(),
            Column::Optional => "?".into(),
            Column::Star => "*".into(),
            Column::Plus => "+".into(),
            Column::Concat => ".".into(),
            Column::Interleave => "&".into(),
            Column::Union => "|".into(),
        }
    }
}

/// Exact 0/1 checks for codec tests.
pub const STRICT: f64 = 0.0;
/// Tolerance for checks on learnt (floating point) encodings.
pub const LEARNT_TOLERANCE: f64 = 1e-9;

/// Outcome of a faithfulness check: the 1-based indices of violated conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaithfulReport {
    pub violated: Vec<u8>,
}

impl FaithfulReport {
    pub fn is_faithful(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Parameters `(w, u)` of the matching network.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    alphabet: Alphabet,
    bound: usize,
    w: Vec<f64>,
    u: Vec<f64>,
}

/// Number of stored `u` entries for bound `t`.
fn band_len(bound: usize) -> usize {
    if bound < 2 {
        0
    } else {
        (bound - 1) * (bound - 2) / 2
    }
}

impl Encoding {
    /// The all-zero encoding.
    pub fn zeros(alphabet: &Alphabet, bound: usize) -> Encoding {
        assert!(bound >= 1, "bounded size must be positive");
        let width = alphabet.len() + 7;
        Encoding {
            alphabet: alphabet.clone(),
            bound,
            w: vec![0.0; bound * width],
            u: vec![0.0; band_len(bound)],
        }
    }

    /// Builds an encoding from raw parameters and clamps every entry to [0, 1].
    pub fn project_from(alphabet: &Alphabet, bound: usize, w: Vec<f64>, u: Vec<f64>) -> Result<Encoding> {
        let mut e = Encoding::zeros(alphabet, bound);
        if w.len() != e.w.len() || u.len() != e.u.len() {
            return Err(Error::Config(format!(
                "expected {} w and {} u entries, got {} and {}",
                e.w.len(),
                e.u.len(),
                w.len(),
                u.len()
            )));
        }
        e.w = w;
        e.u = u;
        e.project();
        Ok(e)
    }

    /// Random soft initialization: every row of `w` and every non-empty row
    /// of `u` is drawn uniformly and normalized to sum to one.
    pub fn random<R: Rng>(alphabet: &Alphabet, bound: usize, rng: &mut R) -> Encoding {
        let mut e = Encoding::zeros(alphabet, bound);
        let width = e.width();
        for row in e.w.chunks_mut(width) {
            normalize_random(row, rng);
        }
        for t in 0..bound {
            let range = e.u_range(t);
            normalize_random(&mut e.u[range], rng);
        }
        e
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The bounded size `T`.
    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `|B| = |Σ| + 7`.
    pub fn width(&self) -> usize {
        self.alphabet.len() + 7
    }

    pub fn param_count(&self) -> usize {
        self.w.len() + self.u.len()
    }

    #[inline]
    pub fn w(&self, t: usize, column: Column) -> f64 {
        self.w[t * self.width() + column.index(self.alphabet.len())]
    }

    pub fn set_w(&mut self, t: usize, column: Column, value: f64) {
        let idx = t * self.width() + column.index(self.alphabet.len());
        self.w[idx] = value;
    }

    pub fn w_row(&self, t: usize) -> &[f64] {
        let width = self.width();
        &self.w[t * width..(t + 1) * width]
    }

    /// Index range in the flat `u` storage of row `t` (entries `t' = t+2..T`).
    pub fn u_range(&self, t: usize) -> std::ops::Range<usize> {
        let start = band_len(self.bound) - band_len(self.bound - t);
        start..start + self.bound.saturating_sub(t + 2)
    }

    /// `u[t][child]`; zero outside the stored band.
    #[inline]
    pub fn u(&self, t: usize, child: usize) -> f64 {
        if child < t + 2 || child >= self.bound {
            0.0
        } else {
            self.u[self.u_range(t).start + child - t - 2]
        }
    }

    pub fn set_u(&mut self, t: usize, child: usize, value: f64) {
        assert!(child >= t + 2 && child < self.bound, "u[{t}][{child}] is not stored");
        let idx = self.u_range(t).start + child - t - 2;
        self.u[idx] = value;
    }

    pub fn u_row(&self, t: usize) -> &[f64] {
        &self.u[self.u_range(t)]
    }

    /// Flat `w`, row-major.
    pub fn w_flat(&self) -> &[f64] {
        &self.w
    }

    /// Flat `u` in `(t, t')` lexicographic order.
    pub fn u_flat(&self) -> &[f64] {
        &self.u
    }

    pub fn w_flat_mut(&mut self) -> &mut [f64] {
        &mut self.w
    }

    pub fn u_flat_mut(&mut self) -> &mut [f64] {
        &mut self.u
    }

    /// Clamps every entry to [0, 1].
    pub fn project(&mut self) {
        for x in self.w.iter_mut().chain(self.u.iter_mut()) {
            *x = x.clamp(0.0, 1.0);
        }
    }

    /// Checks the seven faithfulness conditions. Entries within `tol` of 0 or
    /// 1 count as 0 or 1.
    ///
    /// Condition 5 also covers the two boundary vertices: the root must not
    /// be `none`, and the last vertex cannot be an operator since no vertex
    /// is left to be its child.
    pub fn faithfulness(&self, tol: f64) -> FaithfulReport {
        let n = self.alphabet.len();
        let big_t = self.bound;
        let near = |x: f64, target: f64| (x - target).abs() <= tol;
        let binary = |x: f64| near(x, 0.0) || near(x, 1.0);
        let sum_cols = |t: usize, cols: &[Column]| cols.iter().map(|&c| self.w(t, c)).sum::<f64>();
        let op_sum = |t: usize| sum_cols(t, &Column::OPERATORS);
        let mut violated = Vec::new();

        // 1: every row of w is one-hot.
        let c1 = (0..big_t).all(|t| {
            let row = self.w_row(t);
            row.iter().all(|&x| binary(x)) && near(row.iter().sum(), 1.0)
        });
        // 2: every row of u is one-hot or all zero.
        let c2 = (0..big_t).all(|t| {
            let row = self.u_row(t);
            let sum: f64 = row.iter().sum();
            row.iter().all(|&x| binary(x)) && (near(sum, 0.0) || near(sum, 1.0))
        });
        // 3: a vertex has a right child iff it is not a symbol, unary or none.
        let c3 = (0..big_t).all(|t| {
            let mut cols: Vec<Column> = (0..n).map(Column::Symbol).collect();
            cols.extend([Column::Optional, Column::Star, Column::Plus, Column::None]);
            near(self.u_row(t).iter().sum::<f64>() + sum_cols(t, &cols), 1.0)
        });
        // 4: none is absorbing towards the end.
        let c4 = (0..big_t.saturating_sub(1))
            .all(|t| self.w(t + 1, Column::None) - self.w(t, Column::None) >= -tol);
        // 5: a vertex is none iff it is nobody's child.
        let c5 = (1..big_t).all(|t| {
            let parents: f64 = (0..t.saturating_sub(1)).map(|p| self.u(p, t)).sum();
            near(op_sum(t - 1) + parents + self.w(t, Column::None), 1.0)
        }) && near(self.w(0, Column::None), 0.0)
            && near(op_sum(big_t - 1), 0.0);
        // 6: right children respect preorder numbering.
        let c6 = (2..big_t).all(|t| {
            (0..t - 1).all(|p| {
                let span = (t - 1 - p) as f64;
                let crossing: f64 = (p + 1..t)
                    .map(|q| (t + 1..big_t).map(|c| self.u(q, c)).sum::<f64>())
                    .sum();
                span * self.u(p, t) + crossing <= span + tol
            })
        });
        // 7: each symbol labels at most one vertex.
        let c7 = (0..n).all(|k| (0..big_t).map(|t| self.w(t, Column::Symbol(k))).sum::<f64>() <= 1.0 + tol);

        for (index, ok) in [c1, c2, c3, c4, c5, c6, c7].into_iter().enumerate() {
            if !ok {
                violated.push(index as u8 + 1);
            }
        }
        FaithfulReport { violated }
    }

    pub fn is_faithful(&self, tol: f64) -> bool {
        self.faithfulness(tol).is_faithful()
    }

    /// The column carrying the largest weight in row `t` (lowest index on ties).
    pub fn argmax_column(&self, t: usize) -> Column {
        let row = self.w_row(t);
        let mut best = 0;
        for (k, &x) in row.iter().enumerate() {
            if x > row[best] {
                best = k;
            }
        }
        Column::from_index(best, self.alphabet.len())
    }

    /// Decodes a faithful encoding into prefix notation: the labels of
    /// vertices `1..=last`, where `last` precedes the first `none`.
    pub fn decode(&self) -> Result<String> {
        let report = self.faithfulness(LEARNT_TOLERANCE);
        if !report.is_faithful() {
            return Err(Error::NotFaithful(report.violated));
        }
        let mut out = String::new();
        for t in 0..self.bound {
            let glyph = match self.argmax_column(t) {
                Column::None => break,
                Column::Symbol(k) => self.alphabet.symbol(k),
                Column::Optional => '?',
                Column::Star => '*',
                Column::Plus => '+',
                Column::Concat => '.',
                Column::Interleave => '&',
                Column::Union => '|',
            };
            out.push(glyph);
        }
        Ok(out)
    }

    /// Decodes into a syntax tree.
    pub fn decode_tree(&self) -> Result<Soire> {
        Soire::parse_prefix(&self.decode()?, &self.alphabet)
    }

    /// The faithful encoding of `r` with length `bound`.
    pub fn encode(r: &Soire, bound: usize) -> Result<Encoding> {
        if r.size() > bound {
            return Err(Error::SizeExceedsBound {
                size: r.size(),
                bound,
            });
        }
        let sigma = r.alphabet();
        let mut e = Encoding::zeros(sigma, bound);
        for (t, v) in r.vertices().iter().enumerate() {
            e.set_w(t, Column::of_label(v.label, sigma), 1.0);
            if let Some(right) = v.right {
                e.set_u(t, right, 1.0);
            }
        }
        for t in r.size()..bound {
            e.set_w(t, Column::None, 1.0);
        }
        Ok(e)
    }
}

fn normalize_random<R: Rng>(row: &mut [f64], rng: &mut R) {
    if row.is_empty() {
        return;
    }
    for x in row.iter_mut() {
        *x = rng.gen::<f64>();
    }
    let sum: f64 = row.iter().sum();
    if sum > 0.0 {
        for x in row.iter_mut() {
            *x /= sum;
        }
    }
}

/// Bounded size sufficient for every expression over `sigma` up to
/// language equivalence: `4|Σ| − 2`.
pub fn required_bound(sigma: &Alphabet) -> usize {
    4 * sigma.len() - 2
}
