use std::fmt::Write as _;
use std::io::Read as _;
use std::path::Path;

use serde::Serialize;
use serde_json::value::RawValue;

use apportion::blowup::{
    apportion_blowup, apportion_blowup_restricted, cyclic_blowup, frak_u_min, tf_matrix, GroupSearch,
};
use apportion::certify::{
    certify_with_margin, psd_apportionability_with_tol, u_bounds, PSD_RANK_TOL, VIOLATION_MARGIN,
};
use apportion::interlace::{check_sum_identity, interlacing_bounds, mask_family, InterlaceRow};
use apportion::io::{
    factors_from_str, function_from_str, loopgraph_from_str, loopgraph_to_string, matrix_from_str, matrix_to_string,
    values_from_str, values_to_string,
};
use apportion::labelings::{
    compose_iterate, compose_step, is_graceful, is_rho_labeling, loopgraph_to_nif, max_induced_labels,
    nif_to_loopgraph, LoopGraph, ZnFunction, MAX_INDUCED_N,
};
use apportion::linalg::{
    dft, dft_multiplicities, fourth_root_multiplicities, is_uniform, normal_eig, norms, DEFAULT_UNIFORM_TOL,
};
use apportion::rank_one::apportion_rank_one;
use apportion::recovery::{edge_labeling_factors, recover_function, recover_graph, FactorMultiset};
use apportion::search::{
    additive_apport_test, constant_spectrum_check, example_family, kron_uniform, realizable_real_pair, search_gl,
    search_unitary, similarity_2x2, spectra_zero_pad, uar_estimate, SearchOptions, SEARCH_TOL,
};
use apportion::{ApportionReport, CMatrix, Error, Result, Status};

use crate::{Command, Global, Spectra};

const CONSTRUCTED_TOL: f64 = 1e-9;
const EXAMPLE_TOL: f64 = 1e-10;
const INTERLACE_TOL: f64 = 1e-12;
const SNAP_TOL: f64 = 1e-8;

/// A verdict (`None` when the command only computes), the human rendering
/// and the structured payload.
#[derive(Debug)]
pub struct Outcome {
    pub verdict: Option<bool>,
    pub human: String,
    pub data: Box<RawValue>,
}

impl Outcome {
    fn new<T: Serialize>(verdict: Option<bool>, human: String, data: &T) -> Result<Self> {
        let json = serde_json::to_string(data).map_err(|e| Error::Numeric(e.to_string()))?;
        let data = RawValue::from_string(json).map_err(|e| Error::Numeric(e.to_string()))?;
        Ok(Self { verdict, human, data })
    }

    fn matrix(m: &CMatrix) -> Result<Self> {
        Self::new(None, matrix_to_string(m) + "\n", m)
    }
}

fn read(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<CMatrix> {
    matrix_from_str(&read(path)?)
}

fn read_graph(path: &Path) -> Result<LoopGraph> {
    loopgraph_from_str(&read(path)?)
}

fn read_function(path: &Path) -> Result<ZnFunction> {
    function_from_str(&read(path)?)
}

#[derive(Serialize)]
struct GraphData {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl From<&LoopGraph> for GraphData {
    fn from(g: &LoopGraph) -> Self {
        Self { n: g.n(), edges: g.edges().collect() }
    }
}

fn render_report(r: &ApportionReport) -> String {
    let status = match r.status {
        Status::Uniform => "uniform",
        Status::Inconclusive => "inconclusive",
        Status::InfeasibleByTheorem => "infeasible-by-theorem",
    };
    let mut s = format!("status: {status}\nkappa: {}\nresidual: {}\n", r.kappa, r.residual);
    if let Some(t) = &r.theorem {
        let _ = writeln!(s, "theorem: {t}");
    }
    let _ = writeln!(s, "iterations: {}\nseed: {}", r.iterations, r.seed);
    let _ = writeln!(s, "transform: {}", matrix_to_string(&r.transform));
    let _ = writeln!(s, "result: {}", matrix_to_string(&r.result));
    s
}

/// Re-judges a construction: uniform iff `residual ≤ tol·(1 + κ)`.
fn judge_constructed(mut r: ApportionReport, tol: f64) -> ApportionReport {
    r.status = if r.residual <= tol * (1.0 + r.kappa) { Status::Uniform } else { Status::Inconclusive };
    r
}

/// Re-judges a search result at `tol`; a closed-form verdict is kept.
fn judge_search(mut r: ApportionReport, tol: f64) -> ApportionReport {
    if r.status != Status::InfeasibleByTheorem {
        r.status = if is_uniform(&r.result, tol).0 { Status::Uniform } else { Status::Inconclusive };
    }
    r
}

fn report_outcome(r: &ApportionReport) -> Result<Outcome> {
    Outcome::new(Some(r.status == Status::Uniform), render_report(r), r)
}

fn line(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Returns the command name, the tolerance in effect (if any) and the outcome.
pub fn run(cmd: &Command, g: &Global) -> Result<(&'static str, Option<f64>, Outcome)> {
    let tol = |default: f64| g.tol.unwrap_or(default);
    let opts = SearchOptions { restarts: g.restarts, iters: g.iters, seed: g.seed, jobs: g.jobs };
    Ok(match cmd {
        Command::Norms { matrix } => {
            let a = read_matrix(matrix)?;
            let t = tol(DEFAULT_UNIFORM_TOL);
            #[derive(Serialize)]
            struct Data {
                norms: apportion::linalg::NormReport,
                bounds: apportion::certify::UBounds,
                uniform: bool,
                c: f64,
            }
            let (uniform, c) = is_uniform(&a, t);
            let d = Data { norms: norms(&a), bounds: u_bounds(&a), uniform, c };
            let mut h = format!(
                "max: {}\nfrobenius: {}\nspectral: {}\nnuclear: {}\nu lower bound: {}\nu upper bound: {}\n",
                d.norms.max, d.norms.frobenius, d.norms.spectral, d.norms.nuclear, d.bounds.lower, d.bounds.upper
            );
            if let Some(nu) = d.bounds.normal_upper {
                let _ = writeln!(h, "u upper bound (normal): {nu}");
            }
            let _ = writeln!(h, "uniform: {uniform}");
            ("norms", Some(t), Outcome::new(None, h, &d)?)
        }
        Command::UniformCheck { matrix } => {
            let a = read_matrix(matrix)?;
            let t = tol(DEFAULT_UNIFORM_TOL);
            let (uniform, c) = is_uniform(&a, t);
            #[derive(Serialize)]
            struct Data {
                uniform: bool,
                c: f64,
            }
            let h = format!("uniform: {uniform}\nc: {c}\n");
            ("uniform-check", Some(t), Outcome::new(Some(uniform), h, &Data { uniform, c })?)
        }
        Command::ApportionRank1 { matrix } => {
            let t = tol(CONSTRUCTED_TOL);
            let r = judge_constructed(apportion_rank_one(&read_matrix(matrix)?)?, t);
            ("apportion-rank1", Some(t), report_outcome(&r)?)
        }
        Command::Certify { matrix } => {
            let t = tol(VIOLATION_MARGIN);
            let c = certify_with_margin(&read_matrix(matrix)?, t)?;
            let h = if c.is_certificate() {
                format!(
                    "certificate: not unitarily apportionable\nwitness c: {}\n|c|: {}\nbound: {}\n",
                    c.witness_c, c.lhs, c.rhs
                )
            } else {
                "certificate: none found (inconclusive)\n".to_string()
            };
            ("certify", Some(t), Outcome::new(Some(c.is_certificate()), h, &c)?)
        }
        Command::PsdCheck { matrix } => {
            let t = tol(PSD_RANK_TOL);
            let v = psd_apportionability_with_tol(&read_matrix(matrix)?, t)?;
            let eig: Vec<String> = v.eigenvalues.iter().map(|l| l.to_string()).collect();
            let h = format!(
                "rank: {}\nunitarily apportionable: {}\neigenvalues: {}\n",
                v.rank,
                v.u_apportionable,
                eig.join(" ")
            );
            ("psd-check", Some(t), Outcome::new(Some(v.u_apportionable), h, &v)?)
        }
        Command::RhoCheck { graph, labels } => {
            let ok = is_rho_labeling(&read_graph(graph)?, &values_from_str(&read(labels)?)?)?;
            ("rho-check", None, Outcome::new(Some(ok), format!("rho-labeling: {ok}\n"), &ok)?)
        }
        Command::GracefulCheck { graph } => {
            let ok = is_graceful(&read_graph(graph)?)?;
            ("graceful-check", None, Outcome::new(Some(ok), format!("graceful: {ok}\n"), &ok)?)
        }
        Command::Nif { input, inverse } => {
            if *inverse {
                let f = loopgraph_to_nif(&read_graph(input)?)?;
                ("nif", None, Outcome::new(None, values_to_string(f.table()), &f.table())?)
            } else {
                let lg = nif_to_loopgraph(&read_function(input)?)?;
                ("nif", None, Outcome::new(None, loopgraph_to_string(&lg), &GraphData::from(&lg))?)
            }
        }
        Command::Compose { function, step } => {
            let f = read_function(function)?;
            let path = if *step { vec![f.clone(), compose_step(&f)?] } else { compose_iterate(&f)? };
            let induced = if f.n() <= MAX_INDUCED_N { Some(max_induced_labels(&f)?) } else { None };
            #[derive(Serialize)]
            struct Data {
                path: Vec<Vec<usize>>,
                induced_labels: Option<usize>,
            }
            let d = Data { path: path.iter().map(|p| p.table().to_vec()).collect(), induced_labels: induced };
            let mut h: String = d.path.iter().map(|p| line(p) + "\n").collect();
            if let Some(k) = induced {
                let _ = writeln!(h, "induced labels: {k}");
            }
            ("compose", None, Outcome::new(None, h, &d)?)
        }
        Command::Blowup { graph } => {
            let lg = read_graph(graph)?;
            ("blowup", None, Outcome::matrix(&cyclic_blowup(&lg, lg.n())?)?)
        }
        Command::BlowupApportion { graph, labels } => {
            let t = tol(CONSTRUCTED_TOL);
            let lg = read_graph(graph)?;
            let found = match labels {
                Some(p) => {
                    let labeling = values_from_str(&read(p)?)?;
                    Some((labeling.clone(), apportion_blowup(&lg, &labeling)?))
                }
                None => apportion_blowup_restricted(&lg)?,
            };
            #[derive(Serialize)]
            struct Data<'a> {
                perm: Option<&'a [usize]>,
                report: Option<&'a ApportionReport>,
            }
            let found = found.map(|(p, r)| (p, judge_constructed(r, t)));
            let outcome = match &found {
                Some((p, r)) => Outcome::new(
                    Some(r.status == Status::Uniform),
                    format!("labels: {}\n{}", line(p), render_report(r)),
                    &Data { perm: Some(p), report: Some(r) },
                )?,
                None => Outcome::new(
                    Some(false),
                    "no element of the restricted group apportions the blowup\n".to_string(),
                    &Data { perm: None, report: None },
                )?,
            };
            ("blowup-apportion", Some(t), outcome)
        }
        Command::Tf { function } => ("tf", None, Outcome::matrix(&tf_matrix(&read_function(function)?)?)?),
        Command::FrakMin { input, function, samples } => {
            let t = tol(CONSTRUCTED_TOL);
            let (a, n) = if *function {
                let f = read_function(input)?;
                (tf_matrix(&f)?, f.n())
            } else {
                let a = read_matrix(input)?;
                let m = (a.n() as f64).sqrt().round() as usize;
                if m * m != a.n() || m.is_multiple_of(2) {
                    return Err(Error::Domain(format!("size {} is not (2n−1)² for an integer n ≥ 2", a.n())));
                }
                (a, m.div_ceil(2))
            };
            let mode = match samples {
                Some(k) => GroupSearch::Sampled { samples: *k, seed: g.seed },
                None => GroupSearch::Exhaustive,
            };
            let best = frak_u_min(&a, n, mode)?;
            let bound = a.frobenius() / a.n() as f64;
            #[derive(Serialize)]
            struct Data<'a> {
                value: f64,
                perm: &'a [usize],
                evaluated: usize,
                frobenius_bound: f64,
                gap: f64,
                attains_bound: bool,
            }
            let gap = best.value - bound;
            let d = Data {
                value: best.value,
                perm: &best.perm,
                evaluated: best.evaluated,
                frobenius_bound: bound,
                gap,
                attains_bound: gap <= t,
            };
            let h = format!(
                "minimum: {}\npermutation: {}\nevaluated: {}\nfrobenius bound: {}\ngap: {}\nseed: {}\n",
                d.value,
                line(d.perm),
                d.evaluated,
                bound,
                gap,
                g.seed
            );
            ("frak-min", Some(t), Outcome::new(None, h, &d)?)
        }
        Command::Interlace { matrix, graph } => {
            let t = tol(INTERLACE_TOL);
            let m = read_matrix(matrix)?;
            let fam = mask_family(&m, &read_graph(graph)?)?;
            let residual = check_sum_identity(&fam)?;
            let rows = interlacing_bounds(&fam)?;
            let sum_ok = residual <= t * (1.0 + m.max_abs());
            let ok = sum_ok && rows.iter().all(|r| r.pass);
            #[derive(Serialize)]
            struct Data<'a> {
                sum_residual: f64,
                sum_ok: bool,
                rows: &'a [InterlaceRow],
                spectra: &'a [Vec<f64>],
                masks: &'a [Vec<Vec<i8>>],
            }
            let mut h = format!("sum identity residual: {residual}\n");
            for r in &rows {
                let _ = writeln!(
                    h,
                    "l={} {} <= {} <= {} {}",
                    r.ell,
                    r.lower,
                    r.lambda,
                    r.upper,
                    if r.pass { "ok" } else { "FAIL" }
                );
            }
            let d = Data { sum_residual: residual, sum_ok, rows: &rows, spectra: &fam.spectra, masks: &fam.masks };
            ("interlace", Some(t), Outcome::new(Some(ok), h, &d)?)
        }
        Command::Recover { input, factors, fixed_point } => {
            let fac = if *factors {
                FactorMultiset::from_forms(factors_from_str(&read(input)?)?)?
            } else {
                edge_labeling_factors(&read_function(input)?)
            };
            let rec = recover_graph(&fac)?;
            let n = rec.graph.n();
            let f = if rec.graph.non_loop_edges().len() + 1 == n {
                Some(recover_function(&rec.graph, *fixed_point)?)
            } else {
                None
            };
            #[derive(Serialize)]
            struct Data<'a> {
                factors: usize,
                has_fixed_point: bool,
                graph: GraphData,
                function: Option<&'a [usize]>,
            }
            let mut h = format!(
                "factors: {}\nhas fixed point: {}\ngraph:\n{}",
                fac.total(),
                rec.has_fixed_point,
                loopgraph_to_string(&rec.graph)
            );
            if let Some(f) = &f {
                let _ = write!(h, "function:\n{}", values_to_string(f.table()));
            }
            let d = Data {
                factors: fac.total(),
                has_fixed_point: rec.has_fixed_point,
                graph: GraphData::from(&rec.graph),
                function: f.as_ref().map(|f| f.table()),
            };
            ("recover", None, Outcome::new(None, h, &d)?)
        }
        Command::SearchU { matrix } => {
            let t = tol(SEARCH_TOL);
            let r = judge_search(search_unitary(&read_matrix(matrix)?, &opts)?, t);
            ("search-u", Some(t), report_outcome(&r)?)
        }
        Command::SearchGl { matrix } => {
            let t = tol(SEARCH_TOL);
            let r = judge_search(search_gl(&read_matrix(matrix)?, &opts)?, t);
            ("search-gl", Some(t), report_outcome(&r)?)
        }
        Command::Uar { matrix } => {
            let ratio = uar_estimate(&read_matrix(matrix)?, &opts)?;
            #[derive(Serialize)]
            struct Data {
                ratio: f64,
                seed: u64,
            }
            let h = format!("ratio: {ratio}\nseed: {}\n", g.seed);
            ("uar", None, Outcome::new(None, h, &Data { ratio, seed: g.seed })?)
        }
        Command::Spectra { which } => spectra(which, g)?,
    })
}

fn spectra(which: &Spectra, g: &Global) -> Result<(&'static str, Option<f64>, Outcome)> {
    let tol = |default: f64| g.tol.unwrap_or(default);
    Ok(match which {
        Spectra::Dft { n } => {
            if *n == 0 {
                return Err(Error::Domain("n must be positive".into()));
            }
            let t = tol(SNAP_TOL);
            let numeric = fourth_root_multiplicities(&normal_eig(&dft(*n))?, t);
            // the closed form is for the e^{−2πi/n} kernel; ±i swap for dft()
            let c = dft_multiplicities(*n);
            let expected = [c[0], c[1], c[3], c[2]];
            #[derive(Serialize)]
            struct Data {
                order: [&'static str; 4],
                numeric: Option<[usize; 4]>,
                expected: [usize; 4],
            }
            let ok = numeric == Some(expected);
            let shown = numeric.map_or("eigenvalues off the fourth roots of unity".to_string(), |m| format!("{m:?}"));
            let h = format!("order: 1 -1 -i i\nnumeric: {shown}\nexpected: {expected:?}\n");
            ("spectra", Some(t), Outcome::new(Some(ok), h, &Data { order: ["1", "-1", "-i", "i"], numeric, expected })?)
        }
        Spectra::Pair { r } => {
            let (ok, witness) = realizable_real_pair(*r);
            let mut h = format!("realizable: {ok}\n");
            if let Some(w) = &witness {
                let _ = writeln!(h, "witness: {}", matrix_to_string(w));
            }
            #[derive(Serialize)]
            struct Data {
                realizable: bool,
                witness: Option<CMatrix>,
            }
            ("spectra", None, Outcome::new(Some(ok), h, &Data { realizable: ok, witness })?)
        }
        Spectra::Constant { lambda } => {
            let ok = constant_spectrum_check(*lambda);
            ("spectra", None, Outcome::new(Some(ok), format!("realizable: {ok}\n"), &ok)?)
        }
        Spectra::Similarity { c, x, y, z } => ("spectra", None, Outcome::matrix(&similarity_2x2(*c, *x, *y, *z)?)?),
        Spectra::Example { a, theta } => {
            let t = tol(EXAMPLE_TOL);
            let r = judge_constructed(example_family(*a, *theta)?, t);
            ("spectra", Some(t), report_outcome(&r)?)
        }
        Spectra::Pad { matrix, r } => {
            ("spectra", None, Outcome::matrix(&spectra_zero_pad(&read_matrix(matrix)?, *r)?)?)
        }
        Spectra::Kron { left, right } => {
            ("spectra", None, Outcome::matrix(&kron_uniform(&read_matrix(left)?, &read_matrix(right)?)?)?)
        }
        Spectra::Additive { matrix, transform } => {
            let ok = additive_apport_test(&read_matrix(matrix)?, &read_matrix(transform)?)?;
            ("spectra", None, Outcome::new(Some(ok), format!("apportions: {ok}\n"), &ok)?)
        }
    })
}
