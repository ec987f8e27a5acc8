//! Two-phase dense tableau simplex with Bland's rule, generic over the
//! scalar type so that rational instances are solved exactly.
//!
//! Problems have the form `max c·x  s.t.  A x ≤ b,  C x = d` with `x` free.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, value: S },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [S], obj_rhs: &mut S) {
        let pv = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.clone() / pv.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / pv;
        self.rows[r][c] = S::one();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() && (S::EXACT || f == S::zero()) {
                continue;
            }
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                *x = x.clone() - f.clone() * y.clone();
            }
            self.rows[i][c] = S::zero();
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        let f = obj[c].clone();
        for (x, y) in obj.iter_mut().zip(&prow) {
            *x = x.clone() - f.clone() * y.clone();
        }
        obj[c] = S::zero();
        *obj_rhs = obj_rhs.clone() - f * prhs;
        self.basis[r] = c;
    }

    /// Maximize with reduced-cost row `obj` (entries are reduced costs;
    /// `obj_rhs` tracks minus the objective value). Columns in `allowed`
    /// may enter. Returns false when unbounded.
    fn run(&mut self, obj: &mut [S], obj_rhs: &mut S, allowed: usize) -> bool {
        loop {
            let enter = (0..allowed).find(|&j| obj[j].is_pos());
            let Some(c) = enter else { return true };
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_pos() {
                    let ratio = self.rhs[i].clone() / a.clone();
                    match &best {
                        None => best = Some((i, ratio)),
                        Some((bi, br)) => {
                            let d = ratio.clone() - br.clone();
                            if d.is_neg() || (d.is_zero() && self.basis[i] < self.basis[*bi]) {
                                best = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c, obj, obj_rhs);
        }
    }
}

/// Solve `max c·x s.t. a x ≤ b, ce x = de`.
pub fn maximize<S: Scalar>(c: &[S], a: &[Vec<S>], b: &[S], ce: &[Vec<S>], de: &[S]) -> LpOutcome<S> {
    let n = c.len();
    let mi = a.len();
    let me = ce.len();
    let m = mi + me;
    // columns: x+ (n), x- (n), slacks (mi), artificials (m at most)
    let nslack = mi;
    let base = 2 * n + nslack;
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut rhs: Vec<S> = Vec::with_capacity(m);
    let mut needs_art: Vec<bool> = Vec::with_capacity(m);
    for i in 0..m {
        let (coef, r, slack) = if i < mi { (&a[i], b[i].clone(), true) } else { (&ce[i - mi], de[i - mi].clone(), false) };
        let mut row = vec![S::zero(); base];
        for j in 0..n {
            row[j] = coef[j].clone();
            row[n + j] = -coef[j].clone();
        }
        if slack {
            row[2 * n + i] = S::one();
        }
        let flip = r.is_neg() || (!S::EXACT && r < S::zero());
        if flip {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        let r = if flip { -r } else { r };
        needs_art.push(!slack || flip);
        rows.push(row);
        rhs.push(r);
    }
    let art_cols: Vec<usize> = (0..m).filter(|&i| needs_art[i]).collect();
    let ncols = base + art_cols.len();
    let mut basis = vec![0usize; m];
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(ncols, S::zero());
        if !needs_art[i] {
            basis[i] = 2 * n + i;
        }
    }
    for (k, &i) in art_cols.iter().enumerate() {
        rows[i][base + k] = S::one();
        basis[i] = base + k;
    }
    let mut t = Tableau { rows, rhs, basis, ncols };

    if !art_cols.is_empty() {
        // phase 1: maximize -sum(artificials)
        let mut obj = vec![S::zero(); ncols];
        let mut obj_rhs = S::zero();
        for k in 0..art_cols.len() {
            obj[base + k] = -S::one();
        }
        for &i in &art_cols {
            for j in 0..ncols {
                obj[j] = obj[j].clone() + t.rows[i][j].clone();
            }
            obj_rhs = obj_rhs + t.rhs[i].clone();
        }
        t.run(&mut obj, &mut obj_rhs, ncols);
        // obj_rhs now equals the sum of artificials at the optimum
        if obj_rhs.is_pos() {
            return LpOutcome::Infeasible;
        }
        // drive artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= base {
                let col = (0..base).find(|&j| !t.rows[i][j].is_zero());
                match col {
                    Some(j) => {
                        let mut dummy = vec![S::zero(); ncols];
                        let mut dr = S::zero();
                        t.pivot(i, j, &mut dummy, &mut dr);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in t.rows.iter_mut() {
            row.truncate(base);
        }
        t.ncols = base;
    }

    // phase 2
    let mut obj = vec![S::zero(); t.ncols];
    for j in 0..n {
        obj[j] = c[j].clone();
        obj[n + j] = -c[j].clone();
    }
    let mut obj_rhs = S::zero();
    for i in 0..t.rows.len() {
        let bc = t.basis[i];
        let f = obj[bc].clone();
        if !f.is_zero() || (!S::EXACT && f != S::zero()) {
            for j in 0..t.ncols {
                obj[j] = obj[j].clone() - f.clone() * t.rows[i][j].clone();
            }
            obj_rhs = obj_rhs - f * t.rhs[i].clone();
        }
    }
    let ncols = t.ncols;
    if !t.run(&mut obj, &mut obj_rhs, ncols) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![S::zero(); n];
    for (i, &bc) in t.basis.iter().enumerate() {
        if bc < n {
            x[bc] = x[bc].clone() + t.rhs[i].clone();
        } else if bc < 2 * n {
            x[bc - n] = x[bc - n].clone() - t.rhs[i].clone();
        }
    }
    let value = crate::linalg::dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// A feasible point of `{a x ≤ b, ce x = de}`, if any.
pub fn feasible_point<S: Scalar>(n: usize, a: &[Vec<S>], b: &[S], ce: &[Vec<S>], de: &[S]) -> Option<Vec<S>> {
    match maximize(&vec![S::zero(); n], a, b, ce, de) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Point maximizing a common margin `s ≤ 1` for the `strict` rows
/// (`a x + s ≤ b`) while keeping `a x ≤ b` for the other rows and
/// `ce x = de`. Returns `(x, s)` when the margin is positive, i.e. when the
/// system with the strict rows strict is feasible.
pub fn strict_point<S: Scalar>(
    n: usize,
    a: &[Vec<S>],
    b: &[S],
    strict: &[bool],
    ce: &[Vec<S>],
    de: &[S],
) -> Option<(Vec<S>, S)> {
    if !strict.iter().any(|&s| s) {
        return feasible_point(n, a, b, ce, de).map(|x| (x, S::one()));
    }
    let mut aa: Vec<Vec<S>> = Vec::with_capacity(a.len() + 1);
    let mut bb = b.to_vec();
    for (row, &st) in a.iter().zip(strict) {
        let mut r = row.clone();
        r.push(if st { S::one() } else { S::zero() });
        aa.push(r);
    }
    let mut cap = vec![S::zero(); n + 1];
    cap[n] = S::one();
    aa.push(cap);
    bb.push(S::one());
    let cee: Vec<Vec<S>> = ce
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(S::zero());
            r
        })
        .collect();
    let mut c = vec![S::zero(); n + 1];
    c[n] = S::one();
    match maximize(&c, &aa, &bb, &cee, de) {
        LpOutcome::Optimal { mut x, value } if value.is_pos() => {
            x.pop();
            Some((x, value))
        }
        _ => None,
    }
}
