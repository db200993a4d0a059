use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use spectra1d::contact_tensor::{build_tensor, check_state_permutation_symmetry, TensorExport, TwoBodyTensor};
use spectra1d::exact_diag::{build_hamiltonian, SectorBlock, SectorSpectrum, Truncation};
use spectra1d::group_theory::partitions;
use spectra1d::one_body::{one_body_solve, BasisExport, OneBodyBasis, TrapSpec};
use spectra1d::tolerances::ENERGY_GROUPING_TOL;
use spectra1d::unitary_limit::{
    degeneracy_count, distinct_tunneling_parameters, fit_cutoffs, near_unitary_splitting, palindromic_tunneling,
    tunneling_from_fit, unitary_spectrum, SectorGraph,
};
use spectra1d::verify::{run_check, CheckOutcome};
use spectra1d::weak_coupling::{
    basis_coverage, enumerate_levels, reports_csv, split_levels, DegenerateLevel, SplittingReport, Statistics,
};

use crate::config::{
    check_components, check_e_cut, check_particles, worker_count, Format, RunConfig, TrapChoice, DEFAULT_GRID_POINTS,
    DEFAULT_SEED,
};
use crate::report::{csv_field, fmt12, join_indices, write_output, Report};
use crate::{
    Command, CommonArgs, Failure, LevelsArgs, NearPtArgs, OneBodyArgs, ParticleArgs, TensorArgs, TrapArgs, UnitaryArgs,
    VerifyArgs, WeakPtArgs, XdiagArgs,
};

/// Larger bases than this are not grown automatically.
const MAX_AUTO_LEVELS: usize = 512;
/// Dense commutator checks are skipped above this dimension.
const COMMUTATOR_DIMENSION: usize = 400;
/// Couplings used to fit tunnelling amplitudes when none are given.
const FIT_COUPLINGS: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::OneBody(a) => emit(&a.common, |s| one_body(s, &a)),
        Command::Tensor(a) => emit(&a.common, |s| tensor(s, &a)),
        Command::Levels(a) => emit(&a.common, |s| levels(s, &a)),
        Command::WeakPt(a) => emit(&a.common, |s| weak_pt(s, &a)),
        Command::Unitary(a) => emit(&a.common, |s| unitary(s, &a)),
        Command::NearPt(a) => emit(&a.common, |s| near_pt(s, &a)),
        Command::Xdiag(a) => emit(&a.common, |s| xdiag(s, &a)),
        Command::Verify(a) => verify(&a),
    }
}

struct Session {
    config: RunConfig,
    format: Format,
    output: Option<PathBuf>,
    seed: u64,
    params: Map<String, Value>,
}

impl Session {
    fn open(common: &CommonArgs) -> Result<Session, Failure> {
        let config = RunConfig::load(common.config.as_deref())?;
        if let Some(workers) = worker_count(common.threads, config.threads)? {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build_global()
                .map_err(|e| Failure::Io(e.to_string()))?;
        }
        Ok(Session {
            format: common.format.or(config.format).unwrap_or_default(),
            output: common.output.clone().or_else(|| config.output.clone()),
            seed: common.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
            config,
            params: Map::new(),
        })
    }

    fn set(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
    }

    fn trap(&mut self, args: &TrapArgs) -> Result<(TrapSpec, Option<usize>), Failure> {
        let choice = args
            .trap
            .clone()
            .map(TrapChoice::Named)
            .or_else(|| self.config.trap.clone())
            .unwrap_or_else(|| TrapChoice::Named("harmonic".into()));
        let points = args.grid_points.or(self.config.grid_points).unwrap_or(DEFAULT_GRID_POINTS);
        let spec = choice.resolve(points)?;
        if choice.uses_grid_points() {
            self.set("grid_points", points);
        }
        self.set("trap", &choice);
        let levels = args.levels.or(self.config.levels);
        if let Some(l) = levels {
            self.set("levels", l);
        }
        Ok((spec, levels))
    }

    fn particles(&mut self, args: &ParticleArgs) -> Result<(usize, usize, Statistics), Failure> {
        let n = check_particles(args.n.or(self.config.n).unwrap_or(2))?;
        let j = check_components(args.j.or(self.config.components).unwrap_or(1))?;
        let statistics = args.statistics.or(self.config.statistics).unwrap_or(Statistics::Boson);
        self.set("n", n);
        self.set("components", j);
        self.set("statistics", statistics);
        Ok((n, j, statistics))
    }

    /// `e_cut` from flag or config, else `floor + span · (ε_1 - ε_0)`.
    fn e_cut(&mut self, flag: Option<f64>, trap: &TrapSpec, floor_levels: &[usize], span: f64) -> Result<f64, Failure> {
        let e_cut = match flag.or(self.config.e_cut) {
            Some(e) => check_e_cut(e)?,
            None => {
                let top = floor_levels.iter().copied().max().unwrap_or(0).max(1);
                let probe = one_body_solve(trap, top + 1)?;
                let floor: f64 = floor_levels.iter().map(|&k| probe.energy(k)).sum();
                floor + span * (probe.energy(1) - probe.energy(0))
            }
        };
        self.set("e_cut", e_cut);
        Ok(e_cut)
    }

    fn finish(self, command: &'static str, result: Value, csv: String) -> Result<(), Failure> {
        let report = Report {
            command,
            config: self.params,
            result,
            csv,
        };
        write_output(&report.render(self.format), self.output.as_deref())
    }
}

fn emit<F>(common: &CommonArgs, body: F) -> Result<(), Failure>
where
    F: FnOnce(&mut Session) -> Result<(&'static str, Value, String), Failure>,
{
    let mut session = Session::open(common)?;
    let (command, result, csv) = body(&mut session)?;
    session.finish(command, result, csv)
}

fn to_json(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report serializes")
}

/// Smallest basis whose coverage for `n` particles reaches `e_cut`.
fn basis_covering(trap: &TrapSpec, n: usize, e_cut: f64, levels: Option<usize>) -> Result<OneBodyBasis, Failure> {
    if let Some(l) = levels {
        return Ok(one_body_solve(trap, l)?);
    }
    let mut l = (n + 1).max(4);
    loop {
        let basis = one_body_solve(trap, l)?;
        if basis_coverage(&basis, n) + ENERGY_GROUPING_TOL >= e_cut {
            return Ok(basis);
        }
        if l >= MAX_AUTO_LEVELS {
            return Err(Failure::Usage(format!(
                "e_cut {e_cut} needs more than {MAX_AUTO_LEVELS} single-particle levels; pass --levels explicitly"
            )));
        }
        l = (2 * l).min(MAX_AUTO_LEVELS);
    }
}

/// Orbitals a level of `n` particles below `e_cut` can occupy.
fn orbitals_below(basis: &OneBodyBasis, n: usize, e_cut: f64) -> usize {
    let room = e_cut - (n as f64 - 1.0) * basis.energy(0) + ENERGY_GROUPING_TOL;
    basis.energies().iter().take_while(|&&e| e <= room).count().max(1)
}

fn read_result<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{} is not JSON: {e}", path.display())))?;
    let body = match value {
        Value::Object(mut map) if map.contains_key("result") => map.remove("result").unwrap(),
        other => other,
    };
    serde_json::from_value(body).map_err(|e| Failure::Usage(format!("{} has the wrong layout: {e}", path.display())))
}

fn one_body(s: &mut Session, args: &OneBodyArgs) -> Result<(&'static str, Value, String), Failure> {
    if let Some(path) = &args.import {
        s.set("import", path);
        let basis = OneBodyBasis::import(read_result::<BasisExport>(path)?)?;
        basis.check_invariants()?;
        let result = json!({
            "imported": true,
            "trap": basis.trap().name(),
            "basis_hash": basis.hash(),
            "energies": basis.energies(),
            "orthonormality_residual": basis.orthonormality_residual(),
        });
        return Ok(("one-body", result, basis.energies_csv()));
    }
    let (trap, levels) = s.trap(&args.trap)?;
    let levels = levels.unwrap_or(8);
    s.set("levels", levels);
    let samples = args.samples.or(s.config.samples).unwrap_or(0);
    s.set("samples", samples);
    let basis = one_body_solve(&trap, levels)?;
    let mut result = to_json(basis.export(samples));
    result["orthonormality_residual"] = json!(basis.orthonormality_residual());
    let csv = if samples > 0 { basis.to_csv(samples) } else { basis.energies_csv() };
    Ok(("one-body", result, csv))
}

fn tensor_csv(tensor: &TwoBodyTensor) -> String {
    let mut out = String::from("a,b,c,d,value\n");
    for ([a, b, c, d], v) in tensor.entries() {
        writeln!(out, "{a},{b},{c},{d},{}", fmt12(v)).unwrap();
    }
    out
}

/// Positivity of `(a,a,a,a)` and Cauchy-Schwarz for `(a,a,b,b)`.
fn tensor_invariants(tensor: &TwoBodyTensor) -> bool {
    let c = tensor.cutoff();
    (0..c).all(|a| tensor.get(a, a, a, a) > 0.0)
        && (0..c).all(|a| {
            (0..c).all(|b| tensor.get(a, a, b, b) <= (tensor.get(a, a, a, a) * tensor.get(b, b, b, b)).sqrt() + 1e-12)
        })
}

fn tensor(s: &mut Session, args: &TensorArgs) -> Result<(&'static str, Value, String), Failure> {
    if let Some(path) = &args.import {
        s.set("import", path);
        let tensor = TwoBodyTensor::import(read_result::<TensorExport>(path)?)?;
        let ok = tensor_invariants(&tensor);
        let result = json!({
            "imported": true,
            "basis_hash": tensor.basis_hash(),
            "cutoff": tensor.cutoff(),
            "entries": tensor.len(),
            "invariants_hold": ok,
        });
        if !ok {
            return Err(Failure::Domain(spectra1d::Error::Tensor(
                "imported tensor violates positivity or Cauchy-Schwarz".into(),
            )));
        }
        return Ok(("tensor", result, tensor_csv(&tensor)));
    }
    let (trap, levels) = s.trap(&args.trap)?;
    let cutoff = args.cutoff.or(s.config.cutoff).or(levels).unwrap_or(8);
    s.set("cutoff", cutoff);
    s.set("seed", s.seed);
    let basis = one_body_solve(&trap, levels.unwrap_or(cutoff).max(cutoff))?;
    let tensor = build_tensor(&basis, cutoff)?;
    let symmetry = check_state_permutation_symmetry(&basis, 50, s.seed);
    let mut result = to_json(tensor.export());
    result["invariants_hold"] = json!(tensor_invariants(&tensor));
    result["index_order_check"] = to_json(&symmetry);
    Ok(("tensor", result, tensor_csv(&tensor)))
}

fn levels(s: &mut Session, args: &LevelsArgs) -> Result<(&'static str, Value, String), Failure> {
    let (trap, levels) = s.trap(&args.trap)?;
    let (n, _, _) = s.particles(&args.particles)?;
    let e_cut = s.e_cut(args.e_cut, &trap, &vec![0; n], 4.0)?;
    let basis = basis_covering(&trap, n, e_cut, levels)?;
    let found = enumerate_levels(&basis, n, e_cut)?;
    let mut csv = String::from("energy,multiset,states,generic\n");
    let rows: Vec<Value> = found
        .iter()
        .map(|l| {
            writeln!(csv, "{},{},{},{}", fmt12(l.energy), join_indices(&l.multiset), l.states.len(), l.is_generic()).unwrap();
            json!({
                "energy": l.energy,
                "multiset": l.multiset,
                "states": l.states.len(),
                "generic": l.is_generic(),
                "accidental_partners": l.accidental_partners,
            })
        })
        .collect();
    Ok(("levels", json!({ "basis_levels": basis.len(), "levels": rows }), csv))
}

fn weak_pt(s: &mut Session, args: &WeakPtArgs) -> Result<(&'static str, Value, String), Failure> {
    let (trap, levels) = s.trap(&args.trap)?;
    let (n, j, statistics) = s.particles(&args.particles)?;
    let merge = args.merge || s.config.merge.unwrap_or(false);
    s.set("merge", merge);
    let e_cut = s.e_cut(args.e_cut, &trap, &vec![0; n], 4.0)?;
    let basis = basis_covering(&trap, n, e_cut, levels)?;
    let found = enumerate_levels(&basis, n, e_cut)?;

    let (analysed, skipped): (Vec<DegenerateLevel>, Vec<DegenerateLevel>) = if merge {
        (DegenerateLevel::merge_all(&found), Vec::new())
    } else {
        found.into_iter().partition(|l| l.accidental_partners.is_empty())
    };
    let cutoff = analysed.iter().flat_map(|l| l.multiset.iter().chain(l.multisets.iter().flatten())).max().map_or(1, |m| m + 1);
    let tensor = build_tensor(&basis, cutoff)?;
    let reports: Vec<SplittingReport> = split_levels(&analysed, &tensor)
        .into_iter()
        .map(|r| r.map(|r| r.with_views(&[(statistics, j)])))
        .collect::<Result<_, _>>()?;
    let max_block = reports.iter().map(|r| r.max_block_size()).max().unwrap_or(0);
    let skipped: Vec<Value> = skipped
        .iter()
        .map(|l| json!({ "energy": l.energy, "multiset": l.multiset, "accidental_partners": l.accidental_partners }))
        .collect();
    let result = json!({
        "basis_levels": basis.len(),
        "max_block_size": max_block,
        "solvable": reports.iter().all(|r| r.solvable),
        "reports": reports,
        "skipped_accidental": skipped,
    });
    Ok(("weak-pt", result, reports_csv(&reports)))
}

fn unitary(s: &mut Session, args: &UnitaryArgs) -> Result<(&'static str, Value, String), Failure> {
    let (trap, levels) = s.trap(&args.trap)?;
    let (n, j, statistics) = s.particles(&args.particles)?;
    let lowest: Vec<usize> = (0..n).collect();
    let e_cut = s.e_cut(args.e_cut, &trap, &lowest, 4.0)?;
    let basis = basis_covering(&trap, n, e_cut, levels)?;
    let physical = degeneracy_count(n, j, statistics)?;
    let found = unitary_spectrum(&basis, n, e_cut)?;
    let mut csv = String::from("energy,orbitals,pre_symmetrization_degeneracy,physical_degeneracy\n");
    let rows: Vec<Value> = found
        .iter()
        .map(|l| {
            writeln!(csv, "{},{},{},{physical}", fmt12(l.energy), join_indices(&l.orbital_set), l.pre_symmetrization_degeneracy).unwrap();
            json!({
                "energy": l.energy,
                "orbitals": l.orbital_set,
                "pre_symmetrization_degeneracy": l.pre_symmetrization_degeneracy,
                "physical_degeneracy": physical,
            })
        })
        .collect();
    Ok(("unitary", json!({ "physical_degeneracy": physical, "levels": rows }), csv))
}

fn near_pt(s: &mut Session, args: &NearPtArgs) -> Result<(&'static str, Value, String), Failure> {
    let (trap, levels) = s.trap(&args.trap)?;
    let (n, j, statistics) = s.particles(&args.particles)?;
    if n < 2 {
        return Err(Failure::Usage("near-pt needs at least two particles".into()));
    }
    let symmetric = trap.is_symmetric();
    let given = args.t.clone().or_else(|| s.config.t.clone());
    let (t, fit) = match given {
        Some(t) => {
            s.set("t", &t);
            let full = if symmetric && t.len() == distinct_tunneling_parameters(n, true) && t.len() != n - 1 {
                palindromic_tunneling(n, &t)?
            } else {
                t
            };
            (full, None)
        }
        None => {
            let g = args.g.clone().or_else(|| s.config.g.clone().map(|g| g.into_vec())).unwrap_or(FIT_COUPLINGS.to_vec());
            s.set("g", &g);
            let need = fit_cutoffs(n).last().copied().unwrap_or(0) + 1;
            let basis = one_body_solve(&trap, levels.unwrap_or(need).max(need))?;
            let fit = tunneling_from_fit(&basis, n, &g)?;
            let Some(amplitude) = fit.tunneling else {
                return Err(Failure::Usage(
                    "a fitted amplitude needs two particles or three in a symmetric trap; pass --t".into(),
                ));
            };
            (vec![amplitude; n - 1], Some(fit))
        }
    };
    let graph = SectorGraph::new(n, t)?;
    let report = near_unitary_splitting(&graph, symmetric)?.with_views(&[(statistics, j)]);

    let mut csv = String::from("lambda,reversal,size,irrep_dimension,shift\n");
    for b in &report.blocks {
        let reversal = b.reversal.map(|r| r.to_string()).unwrap_or_default();
        for &e in &b.eigenvalues {
            writeln!(csv, "{},{reversal},{},{},{}", join_indices(b.lambda.rows()), b.size, b.irrep_dimension, fmt12(e)).unwrap();
        }
    }
    let result = json!({
        "trap_symmetric": symmetric,
        "amplitude_source": if fit.is_some() { "fit" } else { "given" },
        "shift_unit": if fit.is_some() { "1/g" } else { "t" },
        "fit": fit,
        "report": report,
    });
    Ok(("near-pt", result, csv))
}

fn xdiag(s: &mut Session, args: &XdiagArgs) -> Result<(&'static str, Value, String), Failure> {
    let (trap, levels) = s.trap(&args.trap)?;
    let (n, _, _) = s.particles(&args.particles)?;
    let couplings = args.g.clone().or_else(|| s.config.g.clone().map(|g| g.into_vec())).unwrap_or(vec![1.0]);
    s.set("g", &couplings);
    let k = args.k.or(s.config.k).unwrap_or(4);
    s.set("k", k);

    let index_sum = args.index_sum.or(if args.e_cut.is_some() { None } else { s.config.index_sum });
    let (truncation, basis, cutoff) = match index_sum {
        Some(sum) => {
            s.set("index_sum", sum);
            let basis = one_body_solve(&trap, levels.unwrap_or(sum + 1).max(sum + 1))?;
            (Truncation::IndexSum(sum), basis, sum + 1)
        }
        None => {
            let e_cut = s.e_cut(args.e_cut, &trap, &vec![0; n], 8.0)?;
            let basis = basis_covering(&trap, n, e_cut, levels)?;
            let cutoff = orbitals_below(&basis, n, e_cut);
            (Truncation::Energy(e_cut), basis, cutoff)
        }
    };
    let tensor = build_tensor(&basis, cutoff)?;
    let h = build_hamiltonian(&basis, &tensor, n, 0.0, truncation)?;

    let mut spectra = Vec::new();
    for lambda in partitions(n) {
        let block = SectorBlock::new(&h, &lambda)?;
        if block.multiplicity == 0 {
            continue;
        }
        for &g in &couplings {
            spectra.push(SectorSpectrum {
                g,
                truncation,
                sector: lambda.clone(),
                eigenvalues: block.eigenvalues(g, Some(k)),
            });
        }
    }
    spectra.sort_by(|a, b| a.g.total_cmp(&b.g));

    let commutators = if h.dimension() <= COMMUTATOR_DIMENSION {
        let strongest = couplings.iter().copied().fold(0.0f64, |m, g| if g.abs() > m.abs() { g } else { m });
        let hg = h.with_coupling(strongest);
        json!({ "g": strongest, "permutation": hg.permutation_commutator(), "parity": hg.parity_commutator() })
    } else {
        Value::Null
    };

    let label = match truncation {
        Truncation::Energy(e) => format!("e_cut={}", fmt12(e)),
        Truncation::IndexSum(sum) => format!("index_sum={sum}"),
    };
    let mut csv = String::from("g,truncation,sector,index,eigenvalue\n");
    for sp in &spectra {
        for (i, &e) in sp.eigenvalues.iter().enumerate() {
            writeln!(csv, "{},{label},{},{i},{}", fmt12(sp.g), join_indices(sp.sector.rows()), fmt12(e)).unwrap();
        }
    }
    let result = json!({
        "basis_levels": basis.len(),
        "tensor_cutoff": cutoff,
        "dimension": h.dimension(),
        "spectra": spectra,
        "commutators": commutators,
    });
    Ok(("xdiag", result, csv))
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let mut s = Session::open(&args.common)?;
    let ids = args.only.clone().unwrap_or_else(|| (1..=10).collect());
    if let Some(bad) = ids.iter().find(|&&id| !(1..=10).contains(&id)) {
        return Err(Failure::Usage(format!("no acceptance criterion {bad} (expected 1..=10)")));
    }
    s.set("quick", args.quick);
    s.set("criteria", &ids);
    s.set("seed", s.seed);

    let mut runs: Vec<(u64, usize)> = ids.iter().map(|&id| (s.seed, id)).collect();
    if !args.quick {
        // randomized criteria get extra seeds
        for extra in 1..=4 {
            runs.extend(ids.iter().filter(|&&id| id == 1 || id == 7).map(|&id| (s.seed + extra, id)));
        }
    }
    let mut outcomes: Vec<(u64, CheckOutcome)> = Vec::new();
    for (seed, id) in runs {
        let outcome = run_check(id, seed);
        eprintln!("{}", outcome.line());
        outcomes.push((seed, outcome));
    }
    let failed = outcomes.iter().filter(|(_, o)| !(o.passed && o.within_time())).count();

    let mut csv = String::from("id,name,seed,passed,time_limit,detail\n");
    for (seed, o) in &outcomes {
        writeln!(
            csv,
            "{},{},{seed},{},{},{}",
            o.id,
            csv_field(&o.name),
            o.passed && o.within_time(),
            fmt12(o.time_limit),
            csv_field(&o.detail)
        )
        .unwrap();
    }
    let checks: Vec<Value> = outcomes
        .iter()
        .map(|(seed, o)| {
            json!({
                "id": o.id,
                "name": o.name,
                "seed": seed,
                "passed": o.passed && o.within_time(),
                "time_limit": o.time_limit,
                "detail": o.detail,
            })
        })
        .collect();
    let result = json!({ "all_passed": failed == 0, "failed": failed, "checks": checks });
    s.finish("verify", result, csv)?;
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}
