//! Exact two-phase primal simplex over rationals.
//!
//! The solver keeps a condensed sparse tableau: each row stores only the
//! coefficients of nonbasic columns (the basic column of a row is implicitly
//! 1), plus a per-column list of rows that may hold an entry. Reduced costs
//! are kept as a dense vector. Arithmetic is exact, so there are no
//! tolerances anywhere.
//!
//! The default pivot rule is Bland's: the lowest-index improving column
//! enters and ratio ties leave by lowest basic index, so the method cannot
//! cycle and the pivot sequence is deterministic. [`PivotRule::Dantzig`]
//! picks the largest reduced cost instead and drops to Bland's rule after a
//! run of degenerate pivots, until the objective moves again.

use std::fmt::Write as _;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize c·x` subject to sparse rows, `x >= 0` and optional upper bounds.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    upper: Vec<Option<Rational>>,
    names: Vec<String>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> usize {
        self.objective.push(Rational::zero());
        self.upper.push(None);
        self.names.push(name.into());
        self.objective.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn set_upper_bound(&mut self, var: usize, bound: Rational) {
        self.upper[var] = Some(bound);
    }

    pub fn upper_bound(&self, var: usize) -> Option<&Rational> {
        self.upper[var].as_ref()
    }

    /// Adds a row and returns its index.
    ///
    /// # Panics
    /// Panics if a coefficient references an undeclared variable.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        for &(v, _) in &coeffs {
            assert!(v < self.num_vars(), "constraint references variable {v} >= {}", self.num_vars());
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Exact feasibility check by substitution; reports the first violated row.
    pub fn check(&self, x: &[Rational]) -> Result<(), String> {
        if x.len() != self.num_vars() {
            return Err(format!("expected {} values, got {}", self.num_vars(), x.len()));
        }
        for (j, v) in x.iter().enumerate() {
            if v.is_negative() {
                return Err(format!("{} = {v} is negative", self.names[j]));
            }
            if let Some(u) = &self.upper[j] {
                if v > u {
                    return Err(format!("{} = {v} exceeds its bound {u}", self.names[j]));
                }
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs: Rational = c.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
            let ok = match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            };
            if !ok {
                return Err(format!("row {i}: {lhs} {} {} fails", c.relation.symbol(), c.rhs));
            }
        }
        Ok(())
    }

    /// Human-readable dump, one line per row as `row: sum coef*x_i REL rhs`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("max:");
        write_terms(&mut out, self.objective.iter().enumerate().filter(|(_, c)| !c.is_zero()));
        out.push('\n');
        for (i, c) in self.constraints.iter().enumerate() {
            write!(out, "r{i}:").unwrap();
            write_terms(&mut out, c.coeffs.iter().map(|(j, a)| (*j, a)));
            writeln!(out, " {} {}", c.relation.symbol(), c.rhs).unwrap();
        }
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                writeln!(out, "b{j}: 1*x{j} <= {u}").unwrap();
            }
        }
        out
    }
}

fn write_terms<'a>(out: &mut String, terms: impl Iterator<Item = (usize, &'a Rational)>) {
    let mut any = false;
    for (j, a) in terms {
        let sep = if any { " +" } else { "" };
        write!(out, "{sep} {a}*x{j}").unwrap();
        any = true;
    }
    if !any {
        out.push_str(" 0");
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest-index improving column throughout.
    #[default]
    Bland,
    /// Largest reduced cost, falling back to Bland during degenerate stalls.
    Dantzig,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub rule: PivotRule,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub stall_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { rule: PivotRule::Bland, stall_limit: 20 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimplexStats {
    pub phase1_pivots: usize,
    pub phase2_pivots: usize,
    pub degenerate_pivots: usize,
    pub rows: usize,
    pub columns: usize,
    pub redundant_rows: usize,
}

pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    solve_lp_with(lp, &SimplexOptions::default()).0
}

pub fn solve_lp_with(lp: &LinearProgram, options: &SimplexOptions) -> (LpOutcome, SimplexStats) {
    let mut tab = Tableau::new(lp, *options);
    let outcome = tab.run(lp);
    #[cfg(debug_assertions)]
    if let LpOutcome::Optimal(sol) = &outcome {
        if let Err(e) = lp.check(&sol.values) {
            panic!("simplex returned an infeasible point: {e}");
        }
    }
    (outcome, tab.stats)
}

type SparseRow = Vec<(u32, Rational)>;

struct Tableau {
    rows: Vec<SparseRow>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Rows that may contain a given column; may hold stale or duplicate entries.
    col_rows: Vec<Vec<u32>>,
    /// Reduced costs, maximization convention (entering needs `d > 0`).
    reduced: Vec<Rational>,
    objective: Rational,
    structural: usize,
    first_artificial: usize,
    columns: usize,
    options: SimplexOptions,
    /// Consecutive degenerate pivots.
    stall: usize,
    stats: SimplexStats,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn new(lp: &LinearProgram, options: SimplexOptions) -> Self {
        let structural = lp.num_vars();
        let mut rows_in: Vec<(SparseRow, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut dense: Vec<(usize, Rational)> = c.coeffs.clone();
            dense.sort_by_key(|(j, _)| *j);
            let mut row: SparseRow = Vec::with_capacity(dense.len());
            for (j, a) in dense {
                match row.last_mut() {
                    Some((last, acc)) if *last as usize == j => *acc += &a,
                    _ => row.push((j as u32, a)),
                }
            }
            row.retain(|(_, a)| !a.is_zero());
            rows_in.push((row, c.relation, c.rhs.clone()));
        }
        for (j, u) in lp.upper.iter().enumerate() {
            if let Some(u) = u {
                rows_in.push((vec![(j as u32, Rational::one())], Relation::Le, u.clone()));
            }
        }

        // Normalize to rhs >= 0; a zero-rhs >= row becomes a <= row needing no artificial.
        for (row, rel, rhs) in rows_in.iter_mut() {
            let flip = rhs.is_negative() || (rhs.is_zero() && *rel == Relation::Ge);
            if flip {
                for (_, a) in row.iter_mut() {
                    *a = -&*a;
                }
                *rhs = -&*rhs;
                *rel = match *rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }

        let slack_count = rows_in.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let first_artificial = structural + slack_count;
        let mut next_slack = structural;
        let mut next_art = first_artificial;
        let mut rows = Vec::with_capacity(rows_in.len());
        let mut rhs = Vec::with_capacity(rows_in.len());
        let mut basis = Vec::with_capacity(rows_in.len());
        for (mut row, rel, b) in rows_in {
            match rel {
                Relation::Le => {
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row.push((next_slack as u32, -Rational::one()));
                    next_slack += 1;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        let columns = next_art;
        let mut col_rows = vec![Vec::new(); columns];
        for (i, row) in rows.iter().enumerate() {
            for (j, _) in row {
                col_rows[*j as usize].push(i as u32);
            }
        }
        let stats = SimplexStats { rows: rows.len(), columns, ..Default::default() };
        Tableau {
            rows,
            rhs,
            basis,
            col_rows,
            reduced: vec![Rational::zero(); columns],
            objective: Rational::zero(),
            structural,
            first_artificial,
            columns,
            options,
            stall: 0,
            stats,
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.first_artificial
    }

    fn run(&mut self, lp: &LinearProgram) -> LpOutcome {
        if self.basis.iter().any(|&b| self.is_artificial(b)) {
            self.price_phase1();
            loop {
                match self.step() {
                    Step::Pivoted => self.stats.phase1_pivots += 1,
                    Step::Optimal => break,
                    Step::Unbounded => unreachable!("phase 1 objective is bounded by zero"),
                }
            }
            if self.objective.is_negative() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
        }

        self.price_phase2(lp);
        loop {
            match self.step() {
                Step::Pivoted => self.stats.phase2_pivots += 1,
                Step::Optimal => break,
                Step::Unbounded => return LpOutcome::Unbounded,
            }
        }

        let mut values = vec![Rational::zero(); self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                values[b] = self.rhs[r].clone();
            }
        }
        let objective = lp.objective_value(&values);
        debug_assert_eq!(objective, self.objective);
        LpOutcome::Optimal(LpSolution { values, objective })
    }

    fn price_phase1(&mut self) {
        self.reduced = vec![Rational::zero(); self.columns];
        self.objective = Rational::zero();
        for r in 0..self.rows.len() {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            self.objective -= &self.rhs[r];
            for (j, a) in &self.rows[r] {
                self.reduced[*j as usize] += a;
            }
        }
    }

    fn price_phase2(&mut self, lp: &LinearProgram) {
        let cost = |j: usize| -> Rational {
            if j < self.structural {
                lp.objective[j].clone()
            } else {
                Rational::zero()
            }
        };
        let mut reduced: Vec<Rational> = (0..self.columns).map(cost).collect();
        let mut objective = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if b == usize::MAX {
                continue;
            }
            reduced[b] = Rational::zero();
            let cb = cost(b);
            if cb.is_zero() {
                continue;
            }
            objective += &cb * &self.rhs[r];
            for (j, a) in &self.rows[r] {
                let j = *j as usize;
                reduced[j] = reduced[j].sub_mul(&cb, a);
            }
        }
        self.reduced = reduced;
        self.objective = objective;
    }

    /// Pivots every remaining zero-level artificial out of the basis; rows
    /// with no eligible column are linearly dependent and are dropped.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] == usize::MAX || !self.is_artificial(self.basis[r]) {
                continue;
            }
            debug_assert!(self.rhs[r].is_zero());
            match self.rows[r].first() {
                Some(&(j, _)) => {
                    let col = self.column_rows(j as usize);
                    self.pivot(r, j as usize, &col);
                    self.stats.phase1_pivots += 1;
                }
                None => {
                    self.basis[r] = usize::MAX;
                    self.stats.redundant_rows += 1;
                }
            }
        }
    }

    /// Compacts and returns the rows holding a nonzero in column `j`.
    fn column_rows(&mut self, j: usize) -> Vec<u32> {
        let mut list = std::mem::take(&mut self.col_rows[j]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&r| self.rows[r as usize].binary_search_by_key(&(j as u32), |e| e.0).is_ok());
        self.col_rows[j] = list.clone();
        list
    }

    fn entry(&self, r: usize, j: usize) -> &Rational {
        let row = &self.rows[r];
        let k = row.binary_search_by_key(&(j as u32), |e| e.0).expect("entry present");
        &row[k].1
    }

    fn use_bland(&self) -> bool {
        self.options.rule == PivotRule::Bland || self.stall >= self.options.stall_limit
    }

    fn choose_entering(&self) -> Option<usize> {
        let candidates = (0..self.first_artificial).filter(|&j| self.reduced[j].is_positive());
        if self.use_bland() {
            return candidates.into_iter().next();
        }
        let mut best: Option<usize> = None;
        for j in candidates {
            if best.is_none_or(|b| self.reduced[j] > self.reduced[b]) {
                best = Some(j);
            }
        }
        best
    }

    fn step(&mut self) -> Step {
        let Some(j) = self.choose_entering() else { return Step::Optimal };
        let col = self.column_rows(j);
        let mut leave: Option<(usize, Rational)> = None;
        for &r in &col {
            let r = r as usize;
            let a = self.entry(r, j);
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[r] / a;
            let better = match &leave {
                None => true,
                Some((lr, best)) => {
                    ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((r, ratio)) = leave else { return Step::Unbounded };
        if ratio.is_zero() {
            self.stats.degenerate_pivots += 1;
            self.stall += 1;
        } else {
            self.stall = 0;
        }
        self.pivot(r, j, &col);
        Step::Pivoted
    }

    fn pivot(&mut self, r: usize, j: usize, col: &[u32]) {
        let leaving = self.basis[r];
        let a_rj = self.entry(r, j).clone();
        let inv = a_rj.recip();

        let old = std::mem::take(&mut self.rows[r]);
        let mut p: SparseRow = Vec::with_capacity(old.len());
        let keep_leaving = !self.is_artificial(leaving);
        let mut leaving_placed = !keep_leaving;
        for (c, a) in old {
            if c as usize == j {
                continue;
            }
            if !leaving_placed && c as usize > leaving {
                p.push((leaving as u32, inv.clone()));
                leaving_placed = true;
            }
            p.push((c, &a * &inv));
        }
        if !leaving_placed {
            p.push((leaving as u32, inv.clone()));
        }
        if keep_leaving {
            self.col_rows[leaving].push(r as u32);
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        self.basis[r] = j;

        let pivot_rhs = self.rhs[r].clone();
        for &i in col {
            let i = i as usize;
            if i == r {
                continue;
            }
            let f = self.entry(i, j).clone();
            let row = std::mem::take(&mut self.rows[i]);
            self.rows[i] = merge_update(row, &f, &p, j as u32, |c| self.col_rows[c as usize].push(i as u32));
            self.rhs[i] = self.rhs[i].sub_mul(&f, &pivot_rhs);
        }

        let f = self.reduced[j].clone();
        if !f.is_zero() {
            for (c, a) in &p {
                let c = *c as usize;
                self.reduced[c] = self.reduced[c].sub_mul(&f, a);
            }
            self.objective += &f * &pivot_rhs;
        }
        self.reduced[j] = Rational::zero();
        self.col_rows[j].clear();
        self.rows[r] = p;
    }
}

/// `row - f * p`, dropping column `skip`; `on_fill` sees every column new to the row.
fn merge_update(
    row: SparseRow,
    f: &Rational,
    p: &SparseRow,
    skip: u32,
    mut on_fill: impl FnMut(u32),
) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + p.len());
    let mut pi = p.iter().peekable();
    for (c, a) in row {
        while let Some((pc, pa)) = pi.peek() {
            if *pc >= c {
                break;
            }
            out.push((*pc, -(f * pa)));
            on_fill(*pc);
            pi.next();
        }
        if c == skip {
            continue;
        }
        match pi.peek() {
            Some((pc, pa)) if *pc == c => {
                let v = a.sub_mul(f, pa);
                if !v.is_zero() {
                    out.push((c, v));
                }
                pi.next();
            }
            _ => out.push((c, a)),
        }
    }
    for (pc, pa) in pi {
        out.push((*pc, -(f * pa)));
        on_fill(*pc);
    }
    out
}
