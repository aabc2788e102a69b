//! Dense two-phase tableau simplex with Bland's rule. Slow and simple on
//! purpose; it only has to be trustworthy on a few dozen variables.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn objective(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(*objective),
            _ => None,
        }
    }
}

/// `min c x` subject to rows and `lower <= x <= upper` (infinite allowed).
#[derive(Debug, Clone, Default)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
}

const EPS: f64 = 1e-10;

impl DenseLp {
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.c.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        for r in &mut self.rows {
            r.0.push(0.0);
        }
        self.c.len() - 1
    }

    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) {
        let mut a = vec![0.0; self.c.len()];
        for &(j, v) in terms {
            a[j] += v;
        }
        self.rows.push((a, sense, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.c.len();
        // x_j = offset_j + sum coef * y_col
        let mut map: Vec<(f64, Vec<(usize, f64)>)> = Vec::with_capacity(n);
        let mut cols = 0;
        let mut extra: Vec<(Vec<(usize, f64)>, Sense, f64)> = Vec::new();
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_finite() {
                map.push((lo, vec![(cols, 1.0)]));
                if hi.is_finite() {
                    extra.push((vec![(cols, 1.0)], Sense::Le, hi - lo));
                }
                cols += 1;
            } else if hi.is_finite() {
                map.push((hi, vec![(cols, -1.0)]));
                cols += 1;
            } else {
                map.push((0.0, vec![(cols, 1.0), (cols + 1, -1.0)]));
                cols += 2;
            }
        }
        let mut std_rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
        for (a, sense, rhs) in &self.rows {
            let mut row = vec![0.0; cols];
            let mut r = *rhs;
            for j in 0..n {
                if a[j] != 0.0 {
                    r -= a[j] * map[j].0;
                    for &(c, k) in &map[j].1 {
                        row[c] += a[j] * k;
                    }
                }
            }
            std_rows.push((row, *sense, r));
        }
        for (terms, sense, rhs) in extra {
            let mut row = vec![0.0; cols];
            for (c, k) in terms {
                row[c] += k;
            }
            std_rows.push((row, sense, rhs));
        }
        let mut cost = vec![0.0; cols];
        let mut offset = 0.0;
        for j in 0..n {
            offset += self.c[j] * map[j].0;
            for &(c, k) in &map[j].1 {
                cost[c] += self.c[j] * k;
            }
        }

        match simplex_standard(&std_rows, &cost, cols) {
            StdOutcome::Optimal(y) => {
                let x: Vec<f64> =
                    map.iter().map(|(off, terms)| off + terms.iter().map(|&(c, k)| k * y[c]).sum::<f64>()).collect();
                let objective = offset + cost.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
                LpOutcome::Optimal { objective, x }
            }
            StdOutcome::Infeasible => LpOutcome::Infeasible,
            StdOutcome::Unbounded => LpOutcome::Unbounded,
        }
    }
}

enum StdOutcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

/// `min cost y`, rows over `y >= 0`.
fn simplex_standard(rows: &[(Vec<f64>, Sense, f64)], cost: &[f64], n: usize) -> StdOutcome {
    let m = rows.len();
    let slacks: usize = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    // Columns: structural | slacks | artificials | rhs
    let width = n + slacks + m + 1;
    let rhs_col = width - 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut s = n;
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(a);
        match sense {
            Sense::Le => {
                t[i][s] = 1.0;
                s += 1;
            }
            Sense::Ge => {
                t[i][s] = -1.0;
                s += 1;
            }
            Sense::Eq => {}
        }
        t[i][rhs_col] = *b;
        if *b < 0.0 {
            for v in t[i].iter_mut() {
                *v = -*v;
            }
        }
        t[i][n + slacks + i] = 1.0;
    }
    let art0 = n + slacks;
    let mut basis: Vec<usize> = (0..m).map(|i| art0 + i).collect();

    // Phase 1
    let mut obj = vec![0.0; width];
    for j in art0..art0 + m {
        obj[j] = 1.0;
    }
    reduce(&mut obj, &t, &basis);
    if !pivot_loop(&mut t, &mut obj, &mut basis, art0) {
        return StdOutcome::Unbounded;
    }
    if -obj[rhs_col] > 1e-8 {
        return StdOutcome::Infeasible;
    }
    // Drive artificials out of the basis.
    let mut keep = vec![true; m];
    for i in 0..m {
        if basis[i] >= art0 {
            match (0..art0).find(|&j| t[i][j].abs() > 1e-9) {
                Some(j) => pivot(&mut t, &mut obj, &mut basis, i, j),
                None => keep[i] = false,
            }
        }
    }
    let mut t: Vec<Vec<f64>> = t.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(r, _)| r).collect();
    let mut basis: Vec<usize> = basis.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(b, _)| b).collect();
    for row in t.iter_mut() {
        for v in row[art0..art0 + m].iter_mut() {
            *v = 0.0;
        }
    }

    // Phase 2
    let mut obj = vec![0.0; width];
    obj[..n].copy_from_slice(cost);
    reduce(&mut obj, &t, &basis);
    if !pivot_loop(&mut t, &mut obj, &mut basis, art0) {
        return StdOutcome::Unbounded;
    }
    let mut y = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = t[i][rhs_col];
        }
    }
    StdOutcome::Optimal(y)
}

fn reduce(obj: &mut [f64], t: &[Vec<f64>], basis: &[usize]) {
    for (i, &b) in basis.iter().enumerate() {
        let f = obj[b];
        if f != 0.0 {
            for (o, v) in obj.iter_mut().zip(&t[i]) {
                *o -= f * v;
            }
        }
    }
}

fn pivot(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let pr = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            let f = row[c];
            if f != 0.0 {
                for (v, q) in row.iter_mut().zip(&pr) {
                    *v -= f * q;
                }
            }
        }
    }
    let f = obj[c];
    if f != 0.0 {
        for (v, q) in obj.iter_mut().zip(&pr) {
            *v -= f * q;
        }
    }
    basis[r] = c;
}

/// Bland's rule over columns `< max_col`. False when unbounded.
fn pivot_loop(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], max_col: usize) -> bool {
    let rhs = obj.len() - 1;
    loop {
        let Some(c) = (0..max_col).find(|&j| obj[j] < -EPS && !basis.contains(&j)) else {
            return true;
        };
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[c] > 1e-12 {
                let ratio = row[rhs] / row[c];
                let better = match best {
                    None => true,
                    Some((r, _, b)) => ratio < r - 1e-12 || (ratio <= r + 1e-12 && basis[i] < b),
                };
                if better {
                    best = Some((ratio, i, basis[i]));
                }
            }
        }
        match best {
            Some((_, r, _)) => pivot(t, obj, basis, r, c),
            None => return false,
        }
    }
}

/// LP relaxation of a model, rebuilt for the dense solver.
pub fn relaxation_of(model: &ici_core::milp::MilpModel) -> DenseLp {
    use ici_core::milp::RowSense;
    let mut lp = DenseLp::default();
    for v in model.variables() {
        lp.c.push(v.objective);
        lp.lower.push(v.lower);
        lp.upper.push(v.upper);
    }
    for row in model.constraints() {
        let terms: Vec<(usize, f64)> = row.terms.iter().map(|&(v, a)| (v.index(), a)).collect();
        let sense = match row.sense {
            RowSense::Le => Sense::Le,
            RowSense::Eq => Sense::Eq,
            RowSense::Ge => Sense::Ge,
        };
        lp.add_row(&terms, sense, row.rhs);
    }
    lp
}
