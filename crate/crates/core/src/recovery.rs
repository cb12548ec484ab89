//! The edge-labeling polynomial
//! `p_f = Π_{i<j} ((x_{f(j)} − x_j)² − (x_{f(i)} − x_i)²)`, kept as a multiset
//! of linear factors, and the reconstruction of `G_f` and `f` from it.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::labelings::{LoopGraph, ZnFunction};

/// Integer linear form `Σ_v c_v x_v`, nonzero, with coefficients summing to
/// zero, normalized so the first nonzero coefficient is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    coeffs: Vec<i64>,
}

/// Shape of a factor by its nonzero coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// `x_s − x_t`.
    Binomial,
    /// `±(2x_r − x_s − x_t)`.
    Trinomial,
    /// `x_a + x_b − x_c − x_d`.
    Quadrinomial,
    Other,
}

impl LinearForm {
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        let Some(&lead) = coeffs.iter().find(|&&c| c != 0) else {
            bail!(Structure, "a factor cannot be identically zero");
        };
        if coeffs.iter().sum::<i64>() != 0 {
            bail!(Structure, "coefficients {coeffs:?} do not sum to zero");
        }
        if lead < 0 {
            coeffs.iter_mut().for_each(|c| *c = -*c);
        }
        Ok(Self { coeffs })
    }

    /// `x_s − x_t`, canonicalized.
    pub fn binomial(n: usize, s: usize, t: usize) -> Result<Self> {
        let mut c = vec![0; n];
        c[s] += 1;
        c[t] -= 1;
        Self::new(c)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn kind(&self) -> FormKind {
        let mut nz: Vec<i64> = self.coeffs.iter().copied().filter(|&c| c != 0).map(i64::abs).collect();
        nz.sort_unstable();
        match nz.as_slice() {
            [1, 1] => FormKind::Binomial,
            [1, 1, 2] => FormKind::Trinomial,
            [1, 1, 1, 1] => FormKind::Quadrinomial,
            _ => FormKind::Other,
        }
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        self.coeffs.iter().zip(x).map(|(&c, &v)| c as i128 * v as i128).sum()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            if first {
                write!(f, "{sign}{coef}x{v}")?;
            } else {
                write!(f, " {sign} {coef}x{v}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Factors of `p_f`: two per pair `i < j`, with identically-zero factors counted separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorMultiset {
    pub n: usize,
    pub forms: Vec<LinearForm>,
    /// Number of factors that vanished identically (then `p_f ≡ 0`).
    pub zero_factors: usize,
    /// `±1`: sign lost when each factor was canonicalized.
    pub unit: i8,
}

impl FactorMultiset {
    pub fn from_forms(forms: Vec<LinearForm>) -> Result<Self> {
        let Some(n) = forms.first().map(LinearForm::n) else {
            bail!(Structure, "no factors given");
        };
        if forms.iter().any(|f| f.n() != n) {
            bail!(Structure, "factors have different numbers of variables");
        }
        Ok(Self { n, forms, zero_factors: 0, unit: 1 })
    }

    pub fn is_identically_zero(&self) -> bool {
        self.zero_factors > 0
    }

    pub fn total(&self) -> usize {
        self.forms.len() + self.zero_factors
    }

    /// Product of all factors at an integer point; `None` on overflow.
    pub fn eval(&self, x: &[i64]) -> Option<i128> {
        if self.zero_factors > 0 {
            return Some(0);
        }
        self.forms.iter().try_fold(self.unit as i128, |acc, f| acc.checked_mul(f.eval(x)))
    }
}

/// The canonical form and whether canonicalizing negated it.
fn pair_factor(n: usize, terms: [(usize, i64); 4]) -> Option<(LinearForm, bool)> {
    let mut c = vec![0i64; n];
    for (v, s) in terms {
        c[v] += s;
    }
    let lead = c.iter().copied().find(|&v| v != 0)?;
    LinearForm::new(c).ok().map(|form| (form, lead < 0))
}

/// For each `i < j`: `x_{f(j)} − x_j + x_{f(i)} − x_i` and `x_{f(j)} − x_j − x_{f(i)} + x_i`.
pub fn edge_labeling_factors(f: &ZnFunction) -> FactorMultiset {
    let n = f.n();
    let mut forms = Vec::with_capacity(n * (n.saturating_sub(1)));
    let mut zero_factors = 0;
    let mut unit = 1;
    for j in 0..n {
        for i in 0..j {
            let (fi, fj) = (f.apply(i), f.apply(j));
            for sign in [1, -1] {
                match pair_factor(n, [(fj, 1), (j, -1), (fi, sign), (i, -sign)]) {
                    Some((form, flipped)) => {
                        if flipped {
                            unit = -unit;
                        }
                        forms.push(form);
                    }
                    None => zero_factors += 1,
                }
            }
        }
    }
    FactorMultiset { n, forms, zero_factors, unit }
}

/// `p_f` evaluated straight from its defining product; `None` on overflow.
pub fn eval_definition(f: &ZnFunction, x: &[i64]) -> Option<i128> {
    let n = f.n();
    let d = |k: usize| x[f.apply(k)] as i128 - x[k] as i128;
    let mut acc = 1i128;
    for j in 0..n {
        for i in 0..j {
            acc = acc.checked_mul(d(j) * d(j) - d(i) * d(i))?;
        }
    }
    Some(acc)
}

/// Whether `p_f` is not identically zero: at most one fixed point and no 2-cycles.
pub fn pf_nonzero(f: &ZnFunction) -> bool {
    f.fixed_points().len() <= 1 && !f.has_two_cycle()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveredGraph {
    pub has_fixed_point: bool,
    /// Non-loop edges of `G_f`; the loop is not recoverable from the factors.
    pub graph: LoopGraph,
}

/// Pairs each trinomial `±(2x_r − x_s − x_t)` with a binomial `x_s − x_t`
/// and reads the edges of `G_f` off the squared binomials that remain.
pub fn recover_graph(fac: &FactorMultiset) -> Result<RecoveredGraph> {
    if fac.is_identically_zero() {
        bail!(Precondition, "the factorization contains an identically zero factor");
    }
    let n = fac.n;
    let mut binomials: BTreeMap<LinearForm, usize> = BTreeMap::new();
    let mut trinomials: Vec<&LinearForm> = Vec::new();
    for form in &fac.forms {
        match form.kind() {
            FormKind::Binomial => *binomials.entry(form.clone()).or_default() += 1,
            FormKind::Trinomial => trinomials.push(form),
            FormKind::Quadrinomial => {}
            FormKind::Other => bail!(Structure, "factor {form} has an unexpected shape"),
        }
    }
    trinomials.sort();
    for t in trinomials {
        let ends: Vec<usize> = (0..n).filter(|&v| t.coeffs[v].abs() == 1).collect();
        let partner = LinearForm::binomial(n, ends[0], ends[1])?;
        match binomials.get_mut(&partner) {
            Some(count) if *count > 0 => *count -= 1,
            _ => bail!(Structure, "trinomial {t} has no matching binomial {partner}"),
        }
    }
    let mut edges = Vec::new();
    for (form, count) in binomials {
        match count {
            0 => {}
            2 => {
                let ends: Vec<usize> = (0..n).filter(|&v| form.coeffs[v] != 0).collect();
                edges.push((ends[0], ends[1]));
            }
            c => bail!(Structure, "binomial {form} remains {c} times; expected a square"),
        }
    }
    let has_fixed_point = !edges.is_empty();
    Ok(RecoveredGraph { has_fixed_point, graph: LoopGraph::new(n, &edges)? })
}

/// Orients the tree away from `fixed_point`: `f(fixed_point) = fixed_point`
/// and every other vertex maps to its BFS parent.
pub fn recover_function(g: &LoopGraph, fixed_point: usize) -> Result<ZnFunction> {
    let n = g.n();
    if fixed_point >= n {
        bail!(Domain, "fixed point {fixed_point} is outside 0..{n}");
    }
    let edges = g.non_loop_edges();
    if edges.len() != n - 1 {
        bail!(Domain, "expected {} non-loop edges, found {}", n - 1, edges.len());
    }
    let mut table = vec![usize::MAX; n];
    table[fixed_point] = fixed_point;
    let mut queue = VecDeque::from([fixed_point]);
    while let Some(x) = queue.pop_front() {
        for v in g.neighbors(x) {
            if table[v] == usize::MAX {
                table[v] = x;
                queue.push_back(v);
            }
        }
    }
    if table.contains(&usize::MAX) {
        bail!(Domain, "graph is disconnected");
    }
    ZnFunction::new(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labelings::all_contracting;

    fn f(t: &[usize]) -> ZnFunction {
        ZnFunction::new(t.to_vec()).unwrap()
    }

    #[test]
    fn canonical_sign() {
        let l = LinearForm::new(vec![0, -1, 2, -1]).unwrap();
        assert_eq!(l.coeffs(), &[0, 1, -2, 1]);
        assert_eq!(l.kind(), FormKind::Trinomial);
        assert!(LinearForm::new(vec![0, 0]).is_err());
        assert!(LinearForm::new(vec![1, 1]).is_err());
        assert_eq!(l.to_string(), "x1 - 2x2 + x3");
    }

    #[test]
    fn path_factors() {
        let fac = edge_labeling_factors(&f(&[0, 0, 1, 2]));
        assert_eq!(fac.total(), 12);
        assert_eq!(fac.zero_factors, 0);
        for j in 1..4 {
            let b = LinearForm::binomial(4, j - 1, j).unwrap();
            assert!(fac.forms.iter().filter(|&x| *x == b).count() >= 2, "x{} - x{j}", j - 1);
        }
    }

    #[test]
    fn two_fixed_points_vanish() {
        let fac = edge_labeling_factors(&f(&[0, 1, 0]));
        assert!(fac.is_identically_zero());
        assert!(!pf_nonzero(&f(&[0, 1, 0])));
        assert!(recover_graph(&fac).is_err());
    }

    #[test]
    fn nonzero_predicate() {
        assert!(!pf_nonzero(&ZnFunction::identity(2)));
        assert!(!pf_nonzero(&f(&[1, 0])));
        for n in 1..=6 {
            for g in all_contracting(n) {
                assert!(pf_nonzero(&g));
                assert!(!edge_labeling_factors(&g).is_identically_zero());
            }
        }
    }

    #[test]
    fn factors_match_definition() {
        let g = ZnFunction::zero(3);
        let fac = edge_labeling_factors(&g);
        assert_eq!(fac.total(), 6);
        let pts: [[i64; 3]; 4] = [[1, -2, 3], [0, 0, 1], [-3, 2, 2], [3, 1, -1]];
        for x in pts {
            assert_eq!(fac.eval(&x), eval_definition(&g, &x));
        }
    }

    #[test]
    fn path_recovery() {
        let fac = edge_labeling_factors(&f(&[0, 0, 1, 2]));
        let r = recover_graph(&fac).unwrap();
        assert!(r.has_fixed_point);
        assert_eq!(r.graph.non_loop_edges(), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(recover_function(&r.graph, 0).unwrap(), f(&[0, 0, 1, 2]));
    }

    #[test]
    fn star_recovery() {
        let r = recover_graph(&edge_labeling_factors(&ZnFunction::zero(4))).unwrap();
        assert_eq!(r.graph.non_loop_edges(), vec![(0, 1), (0, 2), (0, 3)]);
        assert!(recover_function(&r.graph, 0).unwrap().is_zero());
    }

    #[test]
    fn fixed_point_free_three_cycle() {
        let g = f(&[1, 2, 0]);
        assert!(pf_nonzero(&g));
        let r = recover_graph(&edge_labeling_factors(&g)).unwrap();
        assert!(!r.has_fixed_point);
        assert_eq!(r.graph.edge_count(), 0);
    }

    #[test]
    fn recover_function_errors() {
        let g = LoopGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(recover_function(&g, 0).is_err());
        let g = LoopGraph::new(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(recover_function(&g, 0).is_err());
    }

    #[test]
    fn unpaired_trinomial_rejected() {
        let fac = FactorMultiset::from_forms(vec![LinearForm::new(vec![2, -1, -1]).unwrap()]).unwrap();
        assert!(matches!(recover_graph(&fac), Err(crate::Error::Structure(_))));
    }
}
