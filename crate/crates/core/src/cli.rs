//! Configuration-driven runs: JSON config in, CSV/JSON artifacts and a
//! manifest out.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::analysis::{auto_window, fit_tail_exponent_of, NOISE_FLOOR};
use crate::error::{Error, Result};
use crate::evolution::{evolve_fdtd, evolve_spectral_with, CauchyData, EvolutionResult, Mode, SpectralParams};
use crate::jost::{self, solve_m, turning_point_residual, GridSpec, Side};
use crate::lowenergy::{self, lowenergy_turning_residual, solve_zero_energy};
use crate::potential::{
    make_inverse_power, make_poschl_teller, make_regge_wheeler, make_zero, PotentialKind, PotentialModel,
    SchwarzschildParams,
};
use crate::spectral::{resonance_and_bound_states, spectral_csv, SpectralContext};
use crate::verify::{run_suite, CriterionResult, Suite};

/// Potential block of a run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub c_plus: Option<f64>,
    #[serde(default)]
    pub c_minus: Option<f64>,
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub n: Option<u32>,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<PotentialModel> {
        match self.kind {
            PotentialKind::InversePower => {
                let alpha = self.alpha.ok_or_else(|| Error::Config("inverse_power needs alpha".into()))?;
                make_inverse_power(alpha, self.c_plus.unwrap_or(1.0), self.c_minus.unwrap_or(1.0))
            }
            PotentialKind::ReggeWheeler => {
                let sigma = self.sigma.unwrap_or(1.0);
                if ![0.0, 1.0, -3.0].contains(&sigma) {
                    return Err(Error::Config(format!("sigma must be 0, 1 or -3, got {sigma}")));
                }
                let p = SchwarzschildParams::new(self.mass.unwrap_or(1.0), sigma)
                    .map_err(|e| Error::Config(e.to_string()))?;
                Ok(make_regge_wheeler(p))
            }
            PotentialKind::PoschlTeller => {
                let n = self.n.ok_or_else(|| Error::Config("poschl_teller needs n".into()))?;
                make_poschl_teller(n).map_err(|e| Error::Config(e.to_string()))
            }
            PotentialKind::Zero => Ok(make_zero()),
            PotentialKind::Custom => Err(Error::Config("custom potentials are only available through the library".into())),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let s = serde_json::to_string(self).expect("potential spec serializes");
        Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Jost,
    Lowenergy,
    Spectral,
    Evolve,
    Fdtd,
    Fit,
    Verify,
}

/// Explicit list or an evenly (or log-) spaced range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Times {
    List(Vec<f64>),
    Range {
        start: f64,
        end: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Times {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Times::List(v) => v.clone(),
            Times::Range { start, end, count, log } => {
                if *count < 2 || !(end > start) || (*log && !(*start > 0.0)) {
                    return Err(Error::Config("time range needs count >= 2, end > start (> 0 when log)".into()));
                }
                (0..*count)
                    .map(|i| {
                        let s = i as f64 / (*count - 1) as f64;
                        if *log {
                            start * (end / start).powf(s)
                        } else {
                            start + (end - start) * s
                        }
                    })
                    .collect()
            }
        };
        if v.is_empty() || v.iter().any(|t| !(*t >= 0.0)) || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("times must be nonnegative and strictly increasing".into()));
        }
        Ok(v)
    }
}

fn default_dx() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

fn default_mode() -> Mode {
    Mode::Full
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    /// Energies for jost, lowenergy and spectral tasks.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    /// `(x, x')` pairs whose kernel `Im G` the spectral table reports.
    #[serde(default)]
    pub kernel_points: Vec<[f64; 2]>,
    /// Restricts jost and lowenergy tasks to one side.
    #[serde(default)]
    pub side: Option<Side>,
    #[serde(default)]
    pub data: Option<CauchyData>,
    #[serde(default)]
    pub observer_x: f64,
    #[serde(default)]
    pub times: Option<Times>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_dx")]
    pub dx: f64,
    #[serde(default)]
    pub spectral: SpectralParams,
    /// Fixed fit window; otherwise chosen automatically inside `window_bounds`.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub window_bounds: Option<[f64; 2]>,
    /// Time-series CSV (`t,psi,...`) read by the fit task.
    #[serde(default)]
    pub series: Option<PathBuf>,
    #[serde(default)]
    pub suite: Option<Suite>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Recorded in the manifest; every task is deterministic.
    #[serde(default = "default_true")]
    pub deterministic: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let needs_model = !matches!(self.task, Task::Fit | Task::Verify);
        if needs_model && self.potential.is_none() {
            return Err(Error::Config(format!("task {:?} needs a potential block", self.task)));
        }
        if self.lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::Config("lambdas must be positive".into()));
        }
        if matches!(self.task, Task::Jost | Task::Spectral) && self.lambdas.is_empty() {
            return Err(Error::Config(format!("task {:?} needs lambdas", self.task)));
        }
        if matches!(self.task, Task::Evolve | Task::Fdtd) && self.data.is_none() {
            return Err(Error::Config("evolution tasks need data".into()));
        }
        if let Some(d) = &self.data {
            CauchyData::new(d.f, d.g).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.task == Task::Evolve && self.times.is_none() {
            return Err(Error::Config("evolve needs times".into()));
        }
        if let Some(t) = &self.times {
            t.values()?;
        }
        if self.task == Task::Fdtd && self.t_max.is_none() && self.times.is_none() {
            return Err(Error::Config("fdtd needs t_max or times".into()));
        }
        if !(self.dx > 0.0) {
            return Err(Error::Config("dx must be positive".into()));
        }
        if self.task == Task::Fit && self.series.is_none() {
            return Err(Error::Config("fit needs a series path".into()));
        }
        if self.task == Task::Verify && self.suite.is_none() {
            return Err(Error::Config("verify needs a suite".into()));
        }
        for w in [self.window, self.window_bounds].into_iter().flatten() {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return Err(Error::Config("windows need 0 < start < end".into()));
            }
        }
        Ok(())
    }

    fn model(&self) -> Result<PotentialModel> {
        self.potential.as_ref().ok_or_else(|| Error::Config("missing potential".into()))?.build()
    }

    fn sides(&self) -> Vec<Side> {
        match self.side {
            Some(s) => vec![s],
            None => vec![Side::Plus, Side::Minus],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub task: Option<Task>,
    pub config: Value,
    pub versions: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub model_hash: Option<String>,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub status: String,
    pub error_code: Option<String>,
    pub error_message: Option<String>,
    pub artifacts: Vec<String>,
}

fn tolerances(cfg: Option<&RunConfig>) -> BTreeMap<String, f64> {
    let g = GridSpec::default();
    let mut t = BTreeMap::new();
    t.insert("volterra_tol".into(), g.tol);
    t.insert("noise_floor".into(), NOISE_FLOOR);
    t.insert("resonance_floor".into(), crate::spectral::RESONANCE_FLOOR);
    t.insert("delta".into(), crate::spectral::DELTA);
    let sp = cfg.map(|c| c.spectral.clone()).unwrap_or_default();
    t.insert("lambda_min".into(), sp.lambda_min);
    t.insert("h_uniform".into(), sp.h_uniform);
    t.insert("fourier_threshold".into(), sp.fourier_threshold);
    t.insert("taper".into(), sp.taper);
    t.insert("tail_threshold".into(), sp.tail_threshold);
    if let Some(c) = cfg {
        t.insert("dx".into(), c.dx);
    }
    t
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.dir.join(name), body)?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn c16(v: f64) -> String {
    format!("{v:.16e}")
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Plus => "plus",
        Side::Minus => "minus",
    }
}

fn evolution_header(cfg: &RunConfig, r: &EvolutionResult) -> String {
    let hash = cfg.potential.as_ref().map(|p| p.hash()).unwrap_or_default();
    let sp = serde_json::to_string(&cfg.spectral).unwrap_or_default();
    format!("model_hash={hash}\nobserver_x={}\nmethod={:?}\nquadrature={sp}", r.observer_x, r.method)
}

fn run_task(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    match cfg.task {
        Task::Jost => {
            let model = cfg.model()?;
            let mut table = String::from(
                "lambda,side,mu,turning_point,re_f,im_f,re_df,im_df,re_res_f,im_res_f,re_res_df,im_res_df\n",
            );
            for (i, &l) in cfg.lambdas.iter().enumerate() {
                for side in cfg.sides() {
                    let jd = solve_m(&model, side, l, &GridSpec::default())?;
                    out.write(&format!("jost_profile_{i}_{}.csv", side_name(side)), &jost::to_csv(&jd, model.alpha, GridSpec::default().tol))?;
                    if let Ok(r) = turning_point_residual(&model, side, l) {
                        let vals = [
                            r.mu,
                            r.turning_point,
                            r.f_value[0],
                            r.f_value[1],
                            r.f_deriv[0],
                            r.f_deriv[1],
                            r.residual_value[0],
                            r.residual_value[1],
                            r.residual_deriv[0],
                            r.residual_deriv[1],
                        ];
                        let cols: Vec<String> = vals.iter().map(|v| c16(*v)).collect();
                        table.push_str(&format!("{},{},{}\n", c16(l), side_name(side), cols.join(",")));
                    }
                }
            }
            out.write("jost.csv", &table)
        }
        Task::Lowenergy => {
            let model = cfg.model()?;
            let mut table = String::from("lambda,side,mu,u0,du0,u1,du1,res_u0,res_du0,res_u1,res_du1\n");
            for side in cfg.sides() {
                let zs = solve_zero_energy(&model, side)?;
                out.write(&format!("zero_energy_{}.csv", side_name(side)), &lowenergy::to_csv(&zs))?;
                for &l in &cfg.lambdas {
                    let r = lowenergy_turning_residual(&model, &zs, l)?;
                    let cols: Vec<String> = r.values.iter().chain(&r.residuals).map(|v| c16(*v)).collect();
                    table.push_str(&format!("{},{},{},{}\n", c16(l), side_name(side), c16(r.mu), cols.join(",")));
                }
            }
            if !cfg.lambdas.is_empty() {
                out.write("lowenergy.csv", &table)?;
            }
            Ok(())
        }
        Task::Spectral => {
            let ctx = SpectralContext::new(&cfg.model()?)?;
            let pairs: Vec<(f64, f64)> = cfg.kernel_points.iter().map(|p| (p[0], p[1])).collect();
            out.write("spectral.csv", &spectral_csv(&ctx, &cfg.lambdas, &pairs)?)?;
            let rep = resonance_and_bound_states(&ctx)?;
            out.write("resonance.json", &serde_json::to_string_pretty(&rep).expect("report serializes"))
        }
        Task::Evolve => {
            let ctx = SpectralContext::new(&cfg.model()?)?;
            let data = cfg.data.expect("validated");
            let times = cfg.times.as_ref().expect("validated").values()?;
            let r = evolve_spectral_with(&ctx, &data, cfg.observer_x, &times, cfg.mode, &cfg.spectral)?;
            out.write("evolution.csv", &r.to_csv(&evolution_header(cfg, &r)))
        }
        Task::Fdtd => {
            let model = cfg.model()?;
            let data = cfg.data.expect("validated");
            let t_max = match (cfg.t_max, &cfg.times) {
                (Some(t), _) => t,
                (None, Some(t)) => *t.values()?.last().expect("nonempty"),
                _ => unreachable!("validated"),
            };
            let r = evolve_fdtd(&model, &data, cfg.observer_x, t_max, cfg.dx)?;
            out.write("fdtd.csv", &r.to_csv(&evolution_header(cfg, &r)))
        }
        Task::Fit => {
            let path = cfg.series.as_ref().expect("validated");
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let (t, p) = read_series(&text)?;
            let window = match (cfg.window, cfg.window_bounds) {
                (Some(w), _) => (w[0], w[1]),
                (None, b) => {
                    let b = b.map(|b| (b[0], b[1])).unwrap_or((t[1], t[t.len() - 2]));
                    auto_window(&t, &p, b, 0.1, 2.0)?
                }
            };
            let rep = fit_tail_exponent_of(&t, &p, window)?;
            out.write("fit.json", &rep.to_json())
        }
        Task::Verify => {
            let suite = cfg.suite.expect("validated");
            let results = run_suite(suite);
            let text = results.iter().map(|r| r.line()).collect::<Vec<_>>().join("\n");
            out.write("verify.txt", &(text + "\n"))?;
            out.write("verify.json", &verify_json(suite, &results))
        }
    }
}

fn verify_json(suite: Suite, results: &[CriterionResult]) -> String {
    let v = serde_json::json!({
        "suite": suite,
        "passed": results.iter().all(|r| r.passed),
        "criteria": results,
    });
    serde_json::to_string_pretty(&v).expect("verify report serializes")
}

/// Reads `t` and `psi` from a CSV with a header line; `#` lines are skipped.
pub fn read_series(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Config("empty series file".into()))?;
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    let find = |name: &str| cols.iter().position(|c| *c == name).ok_or_else(|| Error::Config(format!("series lacks a '{name}' column")));
    let (it, ip) = (find("t")?, find("psi")?);
    let (mut t, mut p) = (Vec::new(), Vec::new());
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            f.get(i).and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Config(format!("bad series row '{line}'")))
        };
        t.push(get(it)?);
        p.push(get(ip)?);
    }
    if t.len() < 5 {
        return Err(Error::Config("series has fewer than five rows".into()));
    }
    Ok((t, p))
}

/// Runs a configuration into `out_dir`, always leaving a manifest.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    run_value(Ok(cfg.clone()), serde_json::to_value(cfg).unwrap_or(Value::Null), out_dir)
}

/// Parses, runs and records; `raw` is echoed into the manifest even when
/// it does not validate.
pub fn run_value(cfg: Result<RunConfig>, raw: Value, out_dir: &Path) -> Result<Manifest> {
    let start = Instant::now();
    fs::create_dir_all(out_dir)?;
    let mut out = Outputs { dir: out_dir, written: Vec::new() };
    let outcome = match &cfg {
        Ok(c) => c.validate().and_then(|_| run_task(c, &mut out)),
        Err(e) => Err(e.clone()),
    };
    let c = cfg.as_ref().ok();
    let mut versions = BTreeMap::new();
    versions.insert("wavetail".to_string(), env!("CARGO_PKG_VERSION").to_string());
    versions.insert("manifest_format".to_string(), "1".to_string());
    let manifest = Manifest {
        task: c.map(|c| c.task),
        config: raw,
        versions,
        tolerances: tolerances(c),
        model_hash: c.and_then(|c| c.potential.as_ref()).map(|p| p.hash()),
        threads: rayon::current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        status: if outcome.is_ok() { "ok".into() } else { "error".into() },
        error_code: outcome.as_ref().err().map(|e| e.code().to_string()),
        error_message: outcome.as_ref().err().map(|e| e.to_string()),
        artifacts: out.written.clone(),
    };
    fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    outcome.map(|_| manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_and_ranges_are_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"task":"verify","suite":"free","colour":1}"#), Err(Error::Config(_))));
        let c = RunConfig::from_json(r#"{"task":"spectral","lambdas":[0.1],"potential":{"kind":"inverse_power","alpha":5}}"#).unwrap();
        assert_eq!(c.model().unwrap_err().code(), "HYPOTHESIS_RANGE");
        assert!(RunConfig::from_json(r#"{"task":"evolve","potential":{"kind":"zero"}}"#).is_err());
        let t = Times::Range { start: 1.0, end: 100.0, count: 3, log: true }.values().unwrap();
        assert!((t[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn series_round_trip() {
        let text = "# comment\nt,psi,method,truncation_estimate\n1,2,fdtd,0\n2,3,fdtd,0\n3,4,fdtd,0\n4,5,fdtd,0\n5,6,fdtd,0\n";
        let (t, p) = read_series(text).unwrap();
        assert_eq!(t, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(p[4], 6.0);
    }
}
