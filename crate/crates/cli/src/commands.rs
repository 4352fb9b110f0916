use std::path::{Path, PathBuf};

use clap::Args;
use nalgebra::{DMatrix, DVector};
use qprior::born::{born_probability, data_distribution, expectation, DensityOperator};
use qprior::contrast::{
    bayes_prior_analytic, bayes_prior_mc, quantum_prior_binary, quantum_prior_binary_born,
    quantum_prior_grid, treatment_contrast_covariance, DirectionPair, McEstimate,
};
use qprior::hilbert::{projector_onto, spectral_decompose_with, Interval, Tolerances, ValueSet};
use qprior::io::{
    read_channel, read_json, read_table_file, ActionJson, BasisSpec, BayesConfig, GridPriorConfig,
    OperatorJson, ParameterJson,
};
use qprior::reduction::{cross_validate_m, linearize, pls_fit, pls_fit_saturating, Activation, PlsFit};
use qprior::symmetry::{induced_action, invariant_measure, is_permissible, is_transitive, orbits, FiniteSpace};
use qprior::{Error, ErrorKind};
use serde::Serialize;

use crate::report::{bound, num, row, Report, Row};

/// Reads a data file; anything but a numerical failure exits as a data error.
fn data<T>(r: Result<T, impl Into<Error>>) -> Result<T, Error> {
    r.map_err(|e| e.into().as_kind(ErrorKind::Data))
}

fn config<T>(r: Result<T, impl Into<Error>>) -> Result<T, Error> {
    r.map_err(|e| e.into().as_kind(ErrorKind::Config))
}

const DISCREPANCY_NOTE: &str = "A previously published approximation of 0.43 for the Bayesian \
    prior P(zeta_b > 0 | zeta_a > 0) does not match the exact orthant probability at correlation \
    -1/3, which is 0.391827; the exact value is reported and the Monte Carlo estimate is checked \
    against it.";

#[derive(Serialize)]
pub struct DemoContrast {
    pub directions: DirectionPair,
    pub dot: f64,
    pub quantum_closed_form: f64,
    pub quantum_born: f64,
    pub covariance: [[f64; 2]; 2],
    pub correlation: f64,
    pub bayes_analytic: f64,
    pub bayes_mc: McEstimate,
    /// `(mc - analytic) / std_error`.
    pub mc_z: f64,
    pub note: &'static str,
}

impl Report for DemoContrast {
    fn rows(&self) -> Vec<Row> {
        vec![
            num("quantum", "dot", self.dot),
            num("quantum", "closed_form", self.quantum_closed_form),
            num("quantum", "born", self.quantum_born),
            num("bayes", "correlation", self.correlation),
            num("bayes", "analytic", self.bayes_analytic),
            num("bayes", "mc_estimate", self.bayes_mc.estimate),
            num("bayes", "mc_std_error", self.bayes_mc.std_error),
            row("bayes", "mc_n", self.bayes_mc.n),
            row("bayes", "mc_n_conditioning", self.bayes_mc.n_conditioning),
            row("bayes", "mc_seed", self.bayes_mc.seed),
            num("bayes", "mc_z", self.mc_z),
            row("note", "", self.note),
        ]
    }
}

pub fn demo_contrast(n: u64, seed: u64, config_path: Option<&Path>) -> Result<DemoContrast, Error> {
    let (cov, n, seed) = match config_path {
        Some(p) => {
            let c: BayesConfig = config(read_json(p))?;
            (c.cov, c.n, c.seed)
        }
        None => (treatment_contrast_covariance(), n, seed),
    };
    let d = DirectionPair::treatment_example();
    let correlation = cov[0][1] / (cov[0][0] * cov[1][1]).sqrt();
    let bayes_analytic = config(bayes_prior_analytic(correlation))?;
    let mc = config(bayes_prior_mc(cov, n, seed))?;
    Ok(DemoContrast {
        directions: d,
        dot: d.dot(),
        quantum_closed_form: quantum_prior_binary(&d),
        quantum_born: quantum_prior_binary_born(&d)?,
        covariance: cov,
        correlation,
        bayes_analytic,
        mc_z: (mc.estimate - bayes_analytic) / mc.std_error,
        bayes_mc: mc,
        note: DISCREPANCY_NOTE,
    })
}

#[derive(Serialize)]
pub struct SetProbability {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub probability: f64,
}

#[derive(Serialize)]
pub struct PartitionCheck {
    /// Distinct eigenvalues of the complementary operator.
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub total: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct PriorReport {
    pub basis: String,
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub sets: Vec<SetProbability>,
    pub partition: PartitionCheck,
}

impl Report for PriorReport {
    fn rows(&self) -> Vec<Row> {
        let mut rows = vec![row("basis", "", &self.basis)];
        for s in &self.sets {
            rows.push(num("set", format!("[{},{}]", bound(s.lo), bound(s.hi)), s.probability));
        }
        for (v, p) in self.partition.values.iter().zip(&self.partition.probabilities) {
            rows.push(num("partition", qprior::io::fmt17(*v), *p));
        }
        rows.push(num("partition", "total", self.partition.total));
        rows.push(row("partition", "passed", self.partition.passed));
        rows
    }
}

const PARTITION_TOL: f64 = 1e-9;

pub fn prior(path: &Path) -> Result<PriorReport, Error> {
    let cfg: GridPriorConfig = config(read_json(path))?;
    let basis = match config(cfg.basis_spec())? {
        BasisSpec::Identity => "identity".to_string(),
        BasisSpec::Qubit(d) => format!(
            "qubit:{};{}",
            d.a.map(qprior::io::fmt17).join(","),
            d.b.map(qprior::io::fmt17).join(",")
        ),
    };
    let prior = config(cfg.build())?;
    let sets = cfg
        .sets
        .iter()
        .zip(cfg.intervals())
        .map(|(raw, iv)| {
            Ok(SetProbability {
                lo: raw[0],
                hi: raw[1],
                probability: quantum_prior_grid(&prior, &[iv])?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let rho = prior.density()?;
    let comp = prior.complementary_decomposition()?;
    let probabilities = comp
        .eigenvalues()
        .iter()
        .map(|&u| Ok(born_probability(&rho, &projector_onto(&comp, &ValueSet::Points(vec![u])))?))
        .collect::<Result<Vec<f64>, Error>>()?;
    let total: f64 = probabilities.iter().sum();
    Ok(PriorReport {
        basis,
        grid: prior.grid().to_vec(),
        weights: prior.weights().to_vec(),
        sets,
        partition: PartitionCheck {
            values: comp.eigenvalues().to_vec(),
            probabilities,
            total,
            passed: (total - 1.0).abs() <= PARTITION_TOL,
        },
    })
}

#[derive(Args, Debug)]
pub struct PlsArgs {
    /// CSV table with a header row.
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Number of components.
    #[arg(long, conflicts_with = "cv")]
    pub k: Option<usize>,
    /// Choose the number of components by cross-validation.
    #[arg(long)]
    pub cv: bool,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Largest component count tried by --cv (default: number of features).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Seed for the fold assignment; required with --cv.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PerceptronArgs {
    #[command(flatten)]
    pub pls: PlsArgs,
    /// Output nonlinearity: identity, tanh or arctan.
    #[arg(long, default_value = "tanh")]
    pub activation: String,
}

#[derive(Serialize)]
pub struct CvSummary {
    pub folds: usize,
    pub seed: u64,
    pub m_hat: usize,
}

#[derive(Serialize)]
pub struct PlsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activation: Option<Activation>,
    pub response: String,
    pub features: Vec<String>,
    pub n: usize,
    /// Components in the reported fit.
    pub k: usize,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// `training` (in-sample mean squared error) or `cross-validation`.
    pub loss_kind: &'static str,
    /// Loss for each component count `0..=k_max`.
    pub losses: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvSummary>,
}

impl Report for PlsReport {
    fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        if let Some(a) = self.activation {
            rows.push(row("activation", "", a.name()));
        }
        rows.push(row("fit", "n", self.n));
        rows.push(row("fit", "k", self.k));
        for (name, b) in self.features.iter().zip(&self.coefficients) {
            rows.push(num("coefficient", name, *b));
        }
        rows.push(num("intercept", "", self.intercept));
        for (k, l) in self.losses.iter().enumerate() {
            rows.push(num(self.loss_kind, k, *l));
        }
        if let Some(cv) = &self.cv {
            rows.push(row("cv", "folds", cv.folds));
            rows.push(row("cv", "seed", cv.seed));
            rows.push(row("cv", "m_hat", cv.m_hat));
        }
        rows
    }
}

fn intercept(fit: &PlsFit) -> f64 {
    fit.y_mean - fit.x_mean.iter().zip(&fit.coefficients).map(|(m, b)| m * b).sum::<f64>()
}

fn mse(fit: &PlsFit, x: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    (fit.predict(x) - y).norm_squared() / y.len() as f64
}

fn pls_on(
    args: &PlsArgs,
    features: Vec<String>,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    activation: Option<Activation>,
) -> Result<PlsReport, Error> {
    let (fit, losses, cv, loss_kind) = if args.cv {
        let seed = args
            .seed
            .ok_or_else(|| Error::config("--cv needs --seed for the fold assignment"))?;
        let k_max = args.k_max.unwrap_or(x.ncols());
        let r = cross_validate_m(x, y, args.folds, k_max, seed)?;
        // Folds can support more components than the full sample; the
        // final fit stops at what the full sample attains.
        let fit = pls_fit_saturating(x, y, r.best_k)?;
        let summary = CvSummary {
            folds: r.folds,
            seed: r.seed,
            m_hat: r.best_k,
        };
        (fit, r.losses, Some(summary), "cross-validation")
    } else {
        let k = args
            .k
            .ok_or_else(|| Error::config("give --k or --cv"))?;
        let losses = (0..=k)
            .map(|j| Ok(mse(&pls_fit(x, y, j)?, x, y)))
            .collect::<Result<Vec<f64>, Error>>()?;
        (pls_fit(x, y, k)?, losses, None, "training")
    };
    Ok(PlsReport {
        activation,
        response: args.response.clone(),
        features,
        n: x.nrows(),
        k: fit.components,
        intercept: intercept(&fit),
        coefficients: fit.coefficients,
        loss_kind,
        losses,
        cv,
    })
}

pub fn pls(args: &PlsArgs) -> Result<PlsReport, Error> {
    let table = data(read_table_file(&args.data))?;
    let (features, x, y) = data(table.split_response(&args.response))?;
    pls_on(args, features, &x, &y, None)
}

pub fn perceptron(args: &PerceptronArgs) -> Result<PlsReport, Error> {
    let activation = config(Activation::parse(&args.activation))?;
    let table = data(read_table_file(&args.pls.data))?;
    let (features, x, a) = data(table.split_response(&args.pls.response))?;
    let y = data(linearize(&a, activation))?;
    pls_on(&args.pls, features, &x, &y, Some(activation))
}

#[derive(Serialize)]
pub struct OrbitSummary {
    pub orbits: Vec<Vec<String>>,
    pub transitive: bool,
    pub invariant_measure: Vec<f64>,
}

#[derive(Serialize)]
pub struct InducedSummary {
    /// Values taken by the parameter, labelling the induced action's points.
    pub points: Vec<String>,
    pub order: usize,
    pub elements: Vec<Vec<usize>>,
    pub orbits: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct PermissibleSummary {
    pub permissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub induced: Option<InducedSummary>,
}

#[derive(Serialize)]
pub struct SymmetryReport {
    pub points: Vec<String>,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<OrbitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permissible: Option<PermissibleSummary>,
}

impl Report for SymmetryReport {
    fn rows(&self) -> Vec<Row> {
        let mut rows = vec![row("group", "order", self.order)];
        if let Some(o) = &self.orbits {
            for (i, orbit) in o.orbits.iter().enumerate() {
                rows.push(row("orbit", i, orbit.join(" ")));
            }
            rows.push(row("group", "transitive", o.transitive));
            for (p, w) in self.points.iter().zip(&o.invariant_measure) {
                rows.push(num("invariant_measure", p, *w));
            }
        }
        if let Some(p) = &self.permissible {
            rows.push(row("permissible", "", p.permissible));
            if let Some(ind) = &p.induced {
                rows.push(row("induced", "order", ind.order));
                for (i, orbit) in ind.orbits.iter().enumerate() {
                    rows.push(row("induced_orbit", i, orbit.join(" ")));
                }
            }
        }
        rows
    }
}

fn labelled(space: &FiniteSpace, sets: Vec<Vec<usize>>) -> Vec<Vec<String>> {
    sets.into_iter()
        .map(|o| o.into_iter().map(|x| space.label(x).to_string()).collect())
        .collect()
}

pub fn symmetry(action: &Path, show_orbits: bool, zeta: Option<&Path>) -> Result<SymmetryReport, Error> {
    let spec: ActionJson = data(read_json(action))?;
    let g = data(spec.to_action())?;
    let space = g.space().clone();
    let orbit_summary = (show_orbits || zeta.is_none()).then(|| OrbitSummary {
        orbits: labelled(&space, orbits(&g)),
        transitive: is_transitive(&g),
        invariant_measure: invariant_measure(&g),
    });
    let permissible = match zeta {
        None => None,
        Some(path) => {
            let z: ParameterJson = data(read_json(path))?;
            let f = data(z.to_function(&space))?;
            let ok = data(is_permissible(&g, &f))?;
            let induced = if ok {
                let ind = data(induced_action(&g, &f))?;
                let s = ind.action.space();
                Some(InducedSummary {
                    points: s.labels().to_vec(),
                    order: ind.action.order(),
                    elements: ind.action.elements().iter().map(|p| p.images().to_vec()).collect(),
                    orbits: labelled(s, orbits(&ind.action)),
                })
            } else {
                None
            };
            Some(PermissibleSummary {
                permissible: ok,
                induced,
            })
        }
    };
    Ok(SymmetryReport {
        points: space.labels().to_vec(),
        order: g.order(),
        orbits: orbit_summary,
        permissible,
    })
}

#[derive(Args, Debug)]
pub struct BornArgs {
    /// Density operator (operator JSON).
    #[arg(long)]
    pub state: PathBuf,
    /// Hermitian observable (operator JSON).
    #[arg(long)]
    pub observable: PathBuf,
    /// Closed value interval `lo:hi`; an empty end is unbounded. Repeatable.
    #[arg(long = "set", value_name = "LO:HI", value_parser = parse_interval)]
    pub sets: Vec<Interval>,
    /// Channel `q(z | u)` over the observable's eigenvalues (JSON or CSV).
    #[arg(long)]
    pub channel: Option<PathBuf>,
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let end = |t: &str, inf: f64| -> Result<f64, String> {
        let t = t.trim();
        if t.is_empty() {
            Ok(inf)
        } else {
            t.parse().map_err(|_| format!("{t:?} is not a number"))
        }
    };
    Ok(Interval::new(end(lo, f64::NEG_INFINITY)?, end(hi, f64::INFINITY)?))
}

#[derive(Serialize)]
pub struct DataSummary {
    pub z: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub mean: f64,
}

#[derive(Serialize)]
pub struct BornReport {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub maximal: bool,
    pub probabilities: Vec<f64>,
    pub expectation: f64,
    pub sets: Vec<SetProbability>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSummary>,
}

impl Report for BornReport {
    fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for ((u, m), p) in self.eigenvalues.iter().zip(&self.multiplicities).zip(&self.probabilities) {
            rows.push(num("probability", qprior::io::fmt17(*u), *p));
            rows.push(row("multiplicity", qprior::io::fmt17(*u), m));
        }
        rows.push(row("observable", "maximal", self.maximal));
        rows.push(num("observable", "expectation", self.expectation));
        for s in &self.sets {
            rows.push(num("set", format!("[{},{}]", bound(s.lo), bound(s.hi)), s.probability));
        }
        if let Some(d) = &self.data {
            for (z, p) in d.z.iter().zip(&d.probabilities) {
                rows.push(num("data", qprior::io::fmt17(*z), *p));
            }
            rows.push(num("data", "mean", d.mean));
        }
        rows
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn born(args: &BornArgs, degen_rel: Option<f64>) -> Result<BornReport, Error> {
    let rho_json: OperatorJson = data(read_json(&args.state))?;
    let rho = data(rho_json.to_matrix().map_err(Error::from).and_then(|m| Ok(DensityOperator::new(m)?)))?;
    let a_json: OperatorJson = data(read_json(&args.observable))?;
    let a = data(a_json.to_hermitian())?;
    let mut tol = Tolerances::default();
    if let Some(t) = degen_rel {
        tol.degen_rel = t;
    }
    let s = spectral_decompose_with(&a, &tol)?;
    let probabilities = s
        .projectors()
        .iter()
        .map(|p| Ok(born_probability(&rho, &qprior::hilbert::ComplexMatrix::new(p.clone())?)?))
        .collect::<Result<Vec<f64>, Error>>()?;
    let sets = args
        .sets
        .iter()
        .map(|iv| {
            Ok(SetProbability {
                lo: finite(iv.lo),
                hi: finite(iv.hi),
                probability: born_probability(&rho, &projector_onto(&s, &ValueSet::Intervals(vec![*iv])))?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let data_summary = match &args.channel {
        None => None,
        Some(path) => {
            let q = data(read_channel(path))?;
            let probabilities = data(data_distribution(&rho, &s, &q))?;
            let mean = q.z_values().iter().zip(&probabilities).map(|(z, p)| z * p).sum();
            Some(DataSummary {
                z: q.z_values().to_vec(),
                probabilities,
                mean,
            })
        }
    };
    Ok(BornReport {
        dim: a.dim(),
        eigenvalues: s.eigenvalues().to_vec(),
        multiplicities: (0..s.len()).map(|j| s.rank(j)).collect(),
        maximal: s.is_nondegenerate(),
        probabilities,
        expectation: expectation(&rho, &a)?,
        sets,
        data: data_summary,
    })
}
