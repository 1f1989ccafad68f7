//! Subcommand implementations. Each returns the JSON report body and writes its
//! auxiliary files through [`Output`].

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use lpnf::kam::{
    filter_k_with, gamma_star, norm_ball_checks, radii_limit, russmann_constant, schedule_coherence,
    strictly_diophantine_check, t_m, CompactGrid, DiophantineSchedule, GammaStarInputs,
};
use lpnf::normalform::{newton_step, NormalizationState, StepOptions};
use lpnf::psalg::{FieldRecord, SeriesRecord, C64};
use lpnf::resonance::{
    nondegeneracy_index, nonzero_weights_in, omega_s_with_budget, NondegeneracyOptions, OMEGA_BUDGET,
};
use lpnf::verify::{
    conjugacy_residual, divergence_free_field, invariant_residual, oracle_equivalence, scenario_hamiltonian,
    scenario_volume, FlowOptions, PerturbationSpec, Scenario, TimeConvention,
};
use lpnf::Error;

use crate::error::CliError;
use crate::problem::{GridSpec, NormalizeSpec, ProblemFile, ScheduleSpec};

/// Flags shared by the problem-driven subcommands.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// Target order.
    pub order: Option<u32>,
    /// Base point.
    pub base: Option<Vec<C64>>,
    /// Last filtering stage.
    pub kmax: Option<u32>,
    /// Grid spacing.
    pub grid_h: Option<f64>,
    /// Sampling seed.
    pub seed: u64,
    /// Reject floating-point morphisms.
    pub exact_resonance: bool,
    /// Report a trivial invariant ring instead of failing.
    pub allow_trivial_ring: bool,
}

/// Output directory with a `stages/` subdirectory.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    /// Creates the directory tree.
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir.join("stages"))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    /// Writes a text file relative to the output directory.
    pub fn text(&self, rel: &str, body: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(rel), body)?;
        Ok(())
    }

    /// Writes pretty JSON with a trailing newline.
    pub fn json(&self, rel: &str, v: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
        s.push('\n');
        self.text(rel, &s)
    }
}

fn cjson(v: C64) -> Value {
    json!([v.re, v.im])
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Problem with the overrides applied.
pub fn load(path: &Path, ov: &Overrides) -> Result<ProblemFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    let mut pf = ProblemFile::parse(&text)?;
    if let Some(o) = ov.order {
        pf.normalize.order = o;
    }
    if let Some(b) = &ov.base {
        if b.len() != pf.dims.p {
            return Err(CliError::Schema(format!("--base needs {} coordinates", pf.dims.p)));
        }
        pf.normalize.base = b.iter().map(|v| [v.re, v.im]).collect();
    }
    if let Some(g) = pf.grid.as_mut() {
        if let Some(k) = ov.kmax {
            g.k_max = k;
        }
        if let Some(h) = ov.grid_h {
            if h.is_nan() || h <= 0.0 {
                return Err(CliError::Schema("--grid-h must be positive".into()));
            }
            g.h = h;
        }
    }
    Ok(pf)
}

fn schedule_echo(sched: &DiophantineSchedule, m_r: f64, k_max: u32) -> Result<Value, CliError> {
    let (coherence, threshold) = schedule_coherence(sched, k_max);
    let radii = radii_limit(1.0, 0, k_max, sched)?;
    Ok(json!({
        "schedule": to_value(sched),
        "m_r": m_r,
        "c1_formula": "4 (gamma_cap / 2 + p n l m_r)",
        "t_m": (0..=k_max).map(|k| json!({"k": k, "m": 1u64 << k, "t_m": t_m(k, sched)})).collect::<Vec<_>>(),
        "coherence": to_value(&coherence),
        "coherence_threshold": threshold,
        "radii": to_value(&radii),
    }))
}

/// States `m0, 2 m0, …` up to the target order.
fn normalize_states(pf: &ProblemFile, scn: &Scenario, order: u32) -> Result<Vec<NormalizationState>, CliError> {
    let (xmax, umax) = truncation(pf, scn, order);
    let base = pf.base();
    let ring = scn.ring(xmax, umax, base.clone())?;
    let opts = StepOptions { divisor_floor: pf.normalize.divisor_floor };
    let mut states = vec![scn.initial_state(&ring)?];
    loop {
        let last = states.last().expect("nonempty");
        if last.m >= order {
            break;
        }
        match newton_step(last, &opts) {
            Ok(st) => states.push(st),
            Err(e @ Error::ZeroSmallDivisor { .. }) => {
                let b: Vec<String> = base.iter().map(|v| format!("{}{:+}i", v.re, v.im)).collect();
                eprintln!("small divisor at base b = ({})", b.join(", "));
                return Err(e.into());
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(states)
}

fn truncation(pf: &ProblemFile, scn: &Scenario, order: u32) -> (u32, u32) {
    match &pf.truncation {
        Some(t) => (t.xmax, t.umax),
        None => (scn.required_xmax(order), order.div_ceil(scn.r.min_degree().max(1)).max(1)),
    }
}

/// `resonances`: generators, weights per window and the `ω_k(S)` table.
pub fn resonances(pf: &ProblemFile, ov: &Overrides) -> Result<Value, CliError> {
    let s = pf.morphism(ov.exact_resonance)?;
    let rows: Vec<Vec<u32>> = match pf.resonant_structure(&s) {
        Ok(r) => r.rows().to_vec(),
        Err(CliError::Core(Error::EmptyRing { .. })) if ov.allow_trivial_ring => Vec::new(),
        Err(e) => return Err(e),
    };
    let k_max = ov.kmax.or(pf.grid.as_ref().map(|g| g.k_max)).unwrap_or(3);
    let window = pf.schedule.window;
    let mut weights = Vec::new();
    let mut omega = Vec::new();
    for k in 0..=k_max {
        let (lo, hi) = window.bounds(k);
        let ws = nonzero_weights_in(&s, lo, hi);
        let min = ws.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
        weights.push(json!({
            "k": k, "low": lo, "high": hi, "distinct_weights": ws.len(),
            "min_norm": if min.is_finite() { json!(min) } else { Value::Null },
        }));
        if k >= 1 {
            let v = omega_s_with_budget(&s, k, window, OMEGA_BUDGET)?;
            omega.push(json!({"k": k, "omega_s": v.value, "certificate": to_value(&v.certificate)}));
        }
    }
    Ok(json!({
        "command": "resonances",
        "problem": pf.name,
        "exact": s.exact().is_some(),
        "generators": rows,
        "p": rows.len(),
        "window": to_value(&window),
        "weights": weights,
        "omega_s": omega,
        "lambda_max": s.lam_max(),
    }))
}

/// `normalize`: Newton steps with ledger, ball checks and the final coefficients.
pub fn normalize(pf: &ProblemFile, ov: &Overrides, out: &Output) -> Result<Value, CliError> {
    let scn = pf.scenario(ov.exact_resonance)?;
    let order = pf.normalize.order;
    let (sched, mr) = pf.schedule(&scn)?;
    let states = normalize_states(pf, &scn, order)?;
    let fin = states.last().expect("nonempty");
    let steps: Vec<Value> = states
        .iter()
        .skip(1)
        .map(|st| {
            let k = st.m.ilog2();
            json!({
                "record": to_value(st.ledger.last().expect("one record per step")),
                "good_perturbation": st.good_perturbation_check(),
                "norm_balls": to_value(&norm_ball_checks(st, k, pf.schedule.r, &sched)),
            })
        })
        .collect();
    let mut csv = String::from("k,m,min_divisor,generator_max,resonant_max,low_degree_residual,span_residual,remainder_max\n");
    for st in states.iter().skip(1) {
        let r = st.ledger.last().expect("record");
        csv.push_str(&format!(
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.k, r.m, r.min_divisor, r.generator_max, r.resonant_max, r.low_degree_residual, r.span_residual, r.remainder_max
        ));
    }
    out.text("stages/steps.csv", &csv)?;
    let conj = conjugacy_residual(&scn, fin, pf.verify.rho)?;
    out.json(
        "state.series.json",
        &json!({
            "a": fin.a.iter().map(|a| to_value(&SeriesRecord::from_series(a))).collect::<Vec<_>>(),
            "nf": to_value(&FieldRecord::from_field(&fin.nf())),
            "remainder": to_value(&FieldRecord::from_field(&fin.remainder)),
        }),
    )?;
    let base = pf.base();
    let (xmax, umax) = truncation(pf, &scn, order);
    let k_max = fin.m.max(1).ilog2() + 1;
    Ok(json!({
        "command": "normalize",
        "problem": pf.name,
        "order": order,
        "m_final": fin.m,
        "base": base.iter().map(|v| cjson(*v)).collect::<Vec<_>>(),
        "xmax": xmax,
        "umax": umax,
        "divisor_floor": pf.normalize.divisor_floor,
        "constants": {
            "c1": sched.c1,
            "lambda_max": sched.lam_max,
            "l_inv_norm": fin.extraction.inverse_norm,
            "good_tolerance": lpnf::normalform::GOOD_TOL,
        },
        "schedule": schedule_echo(&sched, mr, k_max)?,
        "steps": steps,
        "a_at_base": fin.a_at(&base).into_iter().map(cjson).collect::<Vec<_>>(),
        "conjugacy": to_value(&conj),
    }))
}

fn grid_of(spec: &GridSpec) -> Result<CompactGrid, CliError> {
    let rects: Vec<((f64, f64), (f64, f64))> =
        spec.rect.iter().map(|[re, im]| ((re[0], re[1]), (im[0], im[1]))).collect();
    CompactGrid::rectangle(&rects, spec.h).map_err(|e| CliError::Schema(e.to_string()))
}

struct Filtered {
    grid: CompactGrid,
    sched: DiophantineSchedule,
    m_r: f64,
    states: Vec<NormalizationState>,
}

fn run_filter(pf: &ProblemFile, ov: &Overrides) -> Result<(Scenario, Filtered), CliError> {
    let scn = pf.scenario(ov.exact_resonance)?;
    let spec = pf.grid.as_ref().ok_or_else(|| CliError::Schema("problem has no grid block".into()))?;
    let (sched, mr) = pf.schedule(&scn)?;
    let target = pf.normalize.order.min(1u32 << spec.k_max.min(30)).max(scn.m0);
    let states = normalize_states(pf, &scn, target)?;
    let exact = scn.perturbation.is_empty();
    let mut grid = grid_of(spec)?;
    for k in 0..=spec.k_max {
        let st = states.iter().rev().find(|s| s.m <= 1u32 << k.min(30)).unwrap_or(&states[0]);
        let trust = if exact { f64::INFINITY } else { t_m(st.m.max(1).ilog2().saturating_sub(1), &sched) };
        grid = filter_k_with(&grid, &st.a, &st.s, k, &sched, pf.schedule.window, trust)?;
    }
    Ok((scn, Filtered { grid, sched, m_r: mr, states }))
}

fn stage_summaries(out: &Output, grid: &CompactGrid) -> Result<Vec<Value>, CliError> {
    let total = grid.len() as f64;
    let mut v = Vec::new();
    for (i, st) in grid.stages.iter().enumerate() {
        out.text(&format!("stages/stage_{}.csv", st.k), &grid.stage_csv(i)?)?;
        let alive = st.points.iter().filter(|p| p.alive).count();
        let untrusted = st.points.iter().filter(|p| !p.trusted).count();
        v.push(json!({
            "k": st.k,
            "threshold": st.threshold,
            "trust_radius": if st.trust_radius.is_finite() { json!(st.trust_radius) } else { json!("exact") },
            "weights": st.weights,
            "alive": alive,
            "survival_fraction": alive as f64 / total,
            "untrusted": untrusted,
        }));
    }
    Ok(v)
}

/// `filter`: the nested sets `K_k` on the grid.
pub fn filter(pf: &ProblemFile, ov: &Overrides, out: &Output) -> Result<Value, CliError> {
    let (_, f) = run_filter(pf, ov)?;
    let stages = stage_summaries(out, &f.grid)?;
    let k_max = pf.grid.as_ref().map_or(0, |g| g.k_max);
    Ok(json!({
        "command": "filter",
        "problem": pf.name,
        "points": f.grid.len(),
        "cell_volume": f.grid.cell_volume,
        "measure": f.grid.measure(),
        "alive_measure": f.grid.alive_measure(),
        "survival_fraction": 1.0 - f.grid.excluded_fraction(),
        "excluded_fraction": f.grid.excluded_fraction(),
        "normalized_to": f.states.last().map(|s| s.m),
        "stages": stages,
        "schedule": schedule_echo(&f.sched, f.m_r, k_max)?,
    }))
}

/// `measure`: empirical excluded measure against the analytic estimate.
pub fn measure(pf: &ProblemFile, ov: &Overrides, out: &Output) -> Result<Value, CliError> {
    let ms = pf.measure.clone().ok_or_else(|| CliError::Schema("problem has no measure block".into()))?;
    let (scn, f) = run_filter(pf, ov)?;
    let stages = stage_summaries(out, &f.grid)?;
    let a = &f.states[0].a;
    let stride = (f.grid.len() / 32).max(1);
    let sample: Vec<Vec<C64>> = f.grid.points.iter().step_by(stride).cloned().collect();
    let nd_opts = NondegeneracyOptions { seed: ov.seed, ..Default::default() };
    let nd = nondegeneracy_index(a, &sample, ms.mu_max, &nd_opts)?;
    // The running maximum makes β nondecreasing in μ, so an index of 0 also
    // certifies index 1 with the same lower bound.
    let mu_est = nd.mu0.max(1);
    let strict = strictly_diophantine_check(&f.sched, &scn.s, mu_est, ms.strict_k_max.max(2), pf.schedule.window)?;
    let p = scn.r.p() as u32;
    let n_real = 2 * p;
    let spec = pf.grid.as_ref().expect("filter checked the grid");
    let diameter = spec
        .rect
        .iter()
        .map(|[re, im]| (re[1] - re[0]).powi(2) + (im[1] - im[0]).powi(2))
        .sum::<f64>()
        .sqrt();
    let x0 = vec![C64::new(0.0, 0.0); scn.n()];
    let x0 = &x0;
    let g_norm = f
        .grid
        .points
        .iter()
        .flat_map(|b| a.iter().map(move |aj| aj.eval(x0, b).norm()))
        .fold(0.0, f64::max);
    let mu0 = mu_est as f64;
    let nr = n_real as f64;
    let m_const = russmann_constant(mu_est, n_real)
        * diameter.powf(nr - 1.0)
        * (1.0 / nr.sqrt() + 2.0 * diameter + diameter / ms.theta)
        * nd.beta_safe.powf(-1.0 - 1.0 / mu0)
        * g_norm;
    let a_i = |i: usize| strict.sequence[i] / (2f64.powi(i as i32 + 1) + scn.n() as f64 + 1.0).powf(scn.n() as f64 + 1.0);
    let inputs = GammaStarInputs {
        eps_star: ms.eps_star,
        m: m_const,
        a1: a_i(0),
        a2: a_i(1),
        mu0: mu_est,
        n: p,
        m_ratio: strict.m_ratio,
        m_pow: strict.m_pow,
        beta: nd.beta_safe,
    };
    let pn = p as f64;
    let denom = (4.0 + pn).powf(pn) * inputs.a2 - (pn + 1.0) * inputs.a1 + pn / 4.0 * inputs.m_pow;
    let fact: f64 = (1..p.max(1)).map(|v| v as f64).product();
    let analytic = f.sched.gamma.powf(2.0 / mu0) * m_const * denom / fact;
    let (gstar, gstar_error) = match gamma_star(&inputs) {
        Ok(g) => (json!(g), Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };
    let empirical = f.grid.measure() - f.grid.alive_measure();
    Ok(json!({
        "command": "measure",
        "problem": pf.name,
        "gamma": f.sched.gamma,
        "measure_k": f.grid.measure(),
        "empirical_excluded_measure": empirical,
        "analytic_excluded_bound": analytic,
        "bound_holds": empirical <= analytic,
        "nondegeneracy": to_value(&nd),
        "mu0_used": mu_est,
        "nondegeneracy_sample_points": sample.len(),
        "strict_diophantine": to_value(&strict),
        "constants": {
            "russmann_b": russmann_constant(mu_est, n_real),
            "n_real": n_real,
            "diameter": diameter,
            "theta": ms.theta,
            "g_norm": g_norm,
            "m": m_const,
            "bracket": denom,
        },
        "gamma_star_inputs": to_value(&inputs),
        "gamma_star": gstar,
        "gamma_star_error": gstar_error,
        "stages": stages,
    }))
}

/// `verify`: conjugacy residual, flow invariance and the oracle comparison.
pub fn verify(pf: &ProblemFile, ov: &Overrides) -> Result<Value, CliError> {
    let scn = pf.scenario(ov.exact_resonance)?;
    let order = pf.normalize.order;
    let states = normalize_states(pf, &scn, order)?;
    let fin = states.last().expect("nonempty");
    let vs = &pf.verify;
    let conj = conjugacy_residual(&scn, fin, vs.rho)?;
    let flow_opts = FlowOptions { tol: vs.tol, ..Default::default() };
    let inv = invariant_residual(&scn, fin, vs.rho, vs.t_end, vs.samples, &flow_opts)?;
    let oracle = if vs.oracle {
        let zero = vec![C64::new(0.0, 0.0); scn.r.p()];
        match oracle_equivalence(&scn, order, &zero, pf.normalize.divisor_floor) {
            Ok(c) => to_value(&c),
            Err(e) => json!({"skipped": e.to_string()}),
        }
    } else {
        Value::Null
    };
    Ok(json!({
        "command": "verify",
        "problem": pf.name,
        "order": order,
        "base": pf.base().into_iter().map(cjson).collect::<Vec<_>>(),
        "rho": vs.rho,
        "t_end": vs.t_end,
        "integrator_tol": vs.tol,
        "conjugacy": to_value(&conj),
        "invariance": to_value(&inv),
        "oracle": oracle,
    }))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The two reference problems: one resonant oscillator pair with a quintic
/// Hamiltonian perturbation, and a volume-preserving field on `C^3`.
pub fn reference_problems() -> Result<Vec<(String, ProblemFile)>, CliError> {
    let eps = 1e-3;
    let h = vec![(vec![3u32, 2], c(eps / 4.0)), (vec![2, 3], c(eps / 4.0))];
    let ham = scenario_hamiltonian(1, &[vec![1.0]], &PerturbationSpec::Hamiltonian(h), TimeConvention::Real)?;
    let sched = ScheduleSpec {
        omega: lpnf::kam::OmegaPreset::Constant,
        gamma: 0.1,
        gamma_cap: 1.0,
        r: 0.75,
        window: lpnf::resonance::OmegaWindow::Dyadic,
    };
    let ham_pf = ProblemFile::from_scenario(
        &ham,
        sched.clone(),
        NormalizeSpec { order: 16, base: vec![[0.01, 0.0]], divisor_floor: 1e-12 },
        Some(GridSpec { rect: vec![[[0.0, 0.02], [-0.01, 0.01]]], h: 0.002, k_max: 3 }),
    );
    let pert = divergence_free_field(
        3,
        &[(0, 1, vec![(vec![2, 1, 2], c(1e-3))]), (1, 2, vec![(vec![3, 0, 2], c(5e-4))])],
    );
    let a = vec![
        vec![(vec![0], c(1.0)), (vec![1], c(1.0))],
        vec![(vec![0], C64::new(0.0, 1.0)), (vec![1], c(-1.0))],
    ];
    let vol = scenario_volume(3, a, pert)?;
    let mut vol_pf = ProblemFile::from_scenario(
        &vol,
        sched,
        NormalizeSpec { order: 16, base: vec![[1e-6, 0.0]], divisor_floor: 1e-12 },
        Some(GridSpec { rect: vec![[[-0.01, 0.01], [-0.01, 0.01]]], h: 0.002, k_max: 3 }),
    );
    vol_pf.verify.rho = 0.1;
    Ok(vec![("hamiltonian.json".into(), ham_pf), ("volume.json".into(), vol_pf)])
}

/// `scenario`: writes the reference problem files.
pub fn scenario(out: &Output) -> Result<Value, CliError> {
    let mut names = Vec::new();
    for (name, pf) in reference_problems()? {
        let mut s = serde_json::to_string_pretty(&pf).expect("problem serializes");
        s.push('\n');
        out.text(&name, &s)?;
        names.push(name);
    }
    Ok(json!({"command": "scenario", "files": names}))
}
