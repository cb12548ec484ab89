use super::function::{underlying_graphs, ZnFunction};
use super::next_permutation;
use crate::error::{bail, Result};

/// Largest `n` accepted by [`max_induced_labels`].
pub const MAX_INDUCED_N: usize = 8;

fn require_contracting(f: &ZnFunction) -> Result<()> {
    if !f.is_contracting() {
        bail!(Domain, "{f} is not contracting");
    }
    Ok(())
}

/// The run `f⁻¹(f(n−1))`, which must be a block of consecutive integers
/// ending at `n − 1`.
fn tail_run(f: &ZnFunction) -> Result<Vec<usize>> {
    let n = f.n();
    let run = f.preimage(f.apply(n - 1));
    let start = run[0];
    if run.iter().enumerate().any(|(k, &v)| v != start + k) || run[run.len() - 1] != n - 1 {
        bail!(Domain, "f⁻¹(f(n−1)) = {run:?} is not a consecutive run ending at {}", n - 1);
    }
    Ok(run)
}

/// Checks every precondition of [`compose_step`] and returns the run
/// `f⁻¹(f(n−1))` that the step rewires.
pub fn compose_preconditions(f: &ZnFunction) -> Result<Vec<usize>> {
    require_contracting(f)?;
    let run = tail_run(f)?;
    let n = f.n();
    let (_, g) = underlying_graphs(f);
    let dist = g.distances(0)[n - 1].unwrap_or(0);
    let diam = g.diameter().unwrap_or(0);
    if dist != diam {
        bail!(Domain, "the path from 0 to {} has length {dist} but the diameter is {diam}", n - 1);
    }
    Ok(run)
}

fn rewire(f: &ZnFunction, run: &[usize]) -> ZnFunction {
    let mut table = f.table().to_vec();
    for &i in run {
        table[i] = f.apply(f.apply(i));
    }
    ZnFunction::new(table).expect("values stay in range")
}

/// One composition step: `g(i) = f(f(i))` on the run `f⁻¹(f(n−1))`, `g = f`
/// elsewhere. The zero function is returned unchanged.
pub fn compose_step(f: &ZnFunction) -> Result<ZnFunction> {
    require_contracting(f)?;
    if f.is_zero() {
        return Ok(f.clone());
    }
    let run = compose_preconditions(f)?;
    Ok(rewire(f, &run))
}

/// Iterates composition steps from a contracting `f` down to the zero function.
///
/// Before each step the current function is relabelled (by conjugation) so
/// that vertices are numbered by depth below 0 and one deepest sibling group
/// occupies the top labels. Only the run condition of [`compose_step`] is
/// enforced along the way. Returns the trajectory, starting at `f` and ending
/// at zero.
pub fn compose_iterate(f: &ZnFunction) -> Result<Vec<ZnFunction>> {
    require_contracting(f)?;
    let n = f.n();
    let mut path = vec![f.clone()];
    let mut cur = f.clone();
    while !cur.is_zero() {
        let mut depth = vec![0usize; n];
        for i in 1..n {
            depth[i] = depth[cur.apply(i)] + 1;
        }
        let deepest = (0..n).max_by_key(|&i| (depth[i], i)).unwrap_or(0);
        let parent = cur.apply(deepest);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (depth[v], cur.apply(v) == parent && v != 0, v));
        let mut pi = vec![0; n];
        for (pos, &v) in order.iter().enumerate() {
            pi[v] = pos;
        }
        let relabelled = cur.conjugate(&pi)?;
        let run = tail_run(&relabelled)?;
        cur = rewire(&relabelled, &run);
        path.push(cur.clone());
    }
    Ok(path)
}

/// `max_π |{|π(f(v)) − π(v)| : v ∈ Z_n}|`, by exhaustive enumeration of `S_n`.
pub fn max_induced_labels(f: &ZnFunction) -> Result<usize> {
    let n = f.n();
    if n > MAX_INDUCED_N {
        bail!(Size, "exhaustive enumeration is limited to n ≤ {MAX_INDUCED_N}, got {n}");
    }
    let mut pi: Vec<usize> = (0..n).collect();
    let mut best = 0;
    loop {
        let mut mask = 0u32;
        for v in 0..n {
            mask |= 1 << pi[f.apply(v)].abs_diff(pi[v]);
        }
        best = best.max(mask.count_ones() as usize);
        if best == n || !next_permutation(&mut pi) {
            return Ok(best);
        }
    }
}
