use std::collections::BTreeMap;
use std::io::Read;

use qstrata::composite::{convex_roof_estimate, schmidt, RoofStrategy, TensorFactorization};
use qstrata::entanglement::{
    alpha_coefficients, build_form_bipartite, build_form_mixture, build_form_signs, optimize_lower_bound,
    pure_concurrence, pure_concurrence_trace_form, BoundStrategy, ConcurrenceForm, ProjectorMixture,
    SignPattern,
};
use qstrata::hermitian::{TAU_HERM, TAU_NORM, TAU_TRACE};
use qstrata::kraus::{apply, canonical_form, is_nondegenerate, normalized_apply, try_as_group_element, ChoiOperator};
use qstrata::linalg::{hermitian_residual, max_abs_diff, ComplexMatrix};
use qstrata::random::{random_density, random_kraus, random_vector, rng};
use qstrata::strata::{
    chart_forward, chart_reconstruct, rank_of, select_chart, signature_of, ChartIndex,
};
use qstrata::{DensityState, Error, HermitianOperator, PureStateVector};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::args::{Command, ConcurrenceArgs, Mode, RandomKind, RoofSearch, ZStrategy};
use crate::error::CliError;
use crate::matrix_file::{matrix_entries, vector_entries, Kind, Loaded, MatrixFile};

pub(crate) struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    hasher: Sha256,
    pub tol_rank: f64,
    pub tol_psd: f64,
    pub warnings: Vec<String>,
}

impl<'a> Ctx<'a> {
    pub fn new(stdin: &'a mut dyn Read, tol_rank: f64, tol_psd: f64) -> Self {
        Ctx { stdin, stdin_used: false, hasher: Sha256::new(), tol_rank, tol_psd, warnings: Vec::new() }
    }

    fn absorb(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn absorb_echo(&mut self, echo: &Value) {
        let s = crate::json::to_string(echo);
        self.absorb("command", s.as_bytes());
    }

    pub fn digest(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }

    fn read(&mut self, label: &str, path: &str) -> Result<String, CliError> {
        let text = if path == "-" {
            if self.stdin_used {
                return Err(CliError::Io("stdin can only be read once".into()));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {path}: {e}")))?
        };
        self.absorb(label, text.as_bytes());
        Ok(text)
    }

    fn matrix_file(&mut self, label: &str, path: &str) -> Result<MatrixFile, CliError> {
        let text = self.read(label, path)?;
        MatrixFile::from_json(&text)
    }

    fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn tolerances(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tol_rank".into(), json!(self.tol_rank));
        m.insert("tol_psd".into(), json!(self.tol_psd));
        m.insert("tol_trace".into(), json!(TAU_TRACE));
        m.insert("tol_hermitian".into(), json!(TAU_HERM));
        m.insert("tol_norm".into(), json!(TAU_NORM));
        m
    }
}

pub(crate) enum Success {
    Report { results: Value, diagnostics: Map<String, Value>, pass: bool },
    File(MatrixFile),
}

fn report(results: Value, diagnostics: Map<String, Value>) -> Success {
    Success::Report { results, diagnostics, pass: true }
}

/// Parameters echoed into the report, without file paths.
pub(crate) fn echo(cmd: &Command) -> Value {
    match cmd {
        Command::Density { .. } => json!({ "name": "density" }),
        Command::Chart { j, roundtrip, .. } => json!({ "name": "chart", "J": j, "roundtrip": roundtrip }),
        Command::Schmidt { dims, frames, .. } => json!({ "name": "schmidt", "dims": dims, "frames": frames }),
        Command::Concurrence(a) => json!({
            "name": "concurrence",
            "dims": a.dims,
            "signs": a.signs,
            "mixture": a.mixture.is_some(),
            "mode": a.mode.as_str(),
            "z_strategy": a.z_strategy.as_str(),
            "alpha": a.alpha,
            "roof_strategy": a.roof_strategy.as_str(),
            "max_terms": a.max_terms,
            "samples": a.samples,
            "iters": a.iters,
            "seed": a.seed,
        }),
        Command::Kraus { normalize, canonical, output, .. } => json!({
            "name": "kraus",
            "normalize": normalize,
            "canonical": canonical,
            "output": output.is_some(),
        }),
        Command::Random { kind, dims, rank, ops, seed } => json!({
            "name": "random",
            "kind": format!("{kind:?}").to_lowercase(),
            "dims": dims,
            "rank": rank,
            "ops": ops,
            "seed": seed,
        }),
    }
}

pub(crate) fn execute(cmd: &Command, ctx: &mut Ctx) -> Result<Success, CliError> {
    match cmd {
        Command::Density { file } => density(ctx, file),
        Command::Chart { file, j, roundtrip } => chart(ctx, file, j.as_deref(), *roundtrip),
        Command::Schmidt { file, dims, frames } => schmidt_cmd(ctx, file, dims.as_deref(), *frames),
        Command::Concurrence(a) => concurrence(ctx, a),
        Command::Kraus { kraus_file, state_file, normalize, canonical, output } => {
            kraus(ctx, kraus_file, state_file, *normalize, *canonical, output.as_deref())
        }
        Command::Random { kind, dims, rank, ops, seed } => random(*kind, dims, *rank, *ops, *seed),
    }
}

fn complex(z: qstrata::linalg::C64) -> Value {
    json!([z.re, z.im])
}

fn density(ctx: &mut Ctx, path: &str) -> Result<Success, CliError> {
    let file = ctx.matrix_file("input", path)?;
    if !matches!(file.kind, Kind::Hermitian | Kind::Density) {
        return Err(CliError::Parse(format!("density expects a hermitian or density file, got '{}'", file.kind.as_str())));
    }
    file.factorization()?;
    let raw = file.raw_matrix()?;
    if !qstrata::linalg::all_finite(&raw) {
        return Err(Error::NonFinite.into());
    }
    let scale = qstrata::linalg::max_abs(&raw).max(1.0);
    let herm_residual = hermitian_residual(&raw);
    let hermitian = herm_residual <= TAU_HERM * scale;
    let op = HermitianOperator::hermitian_part(&raw);
    let spec = op.spectrum();
    let min = spec.min_eigenvalue();
    let max = spec.eigenvalues.first().copied().unwrap_or(0.0);
    let trace = op.trace();
    let trace_residual = (trace - 1.0).abs();
    let rank = rank_of(&op, ctx.tol_rank);
    let sig = signature_of(&op, ctx.tol_rank);

    let mut results = json!({
        "kind": file.kind.as_str(),
        "dimension": op.dim(),
        "hermitian_residual": herm_residual,
        "min_eigenvalue": min,
        "max_eigenvalue": max,
        "trace": trace,
        "trace_residual": trace_residual,
        "rank": rank,
        "signature": [sig.k_plus, sig.k_minus],
        "hermitian": hermitian,
    });
    let pass = match file.kind {
        Kind::Density => {
            let positive = min >= -ctx.tol_psd;
            let unit_trace = trace_residual <= TAU_TRACE;
            let valid = hermitian && positive && unit_trace;
            results["positive"] = json!(positive);
            results["unit_trace"] = json!(unit_trace);
            if valid {
                results["purity"] = json!(DensityState::with_tolerances(op.clone(), ctx.tol_psd, TAU_TRACE)?.purity());
            }
            results["extreme_point"] = json!(valid && rank == 1);
            valid
        }
        _ => hermitian,
    };
    results["valid"] = json!(pass);
    Ok(Success::Report { results, diagnostics: ctx.tolerances(), pass })
}

fn load_operator(ctx: &mut Ctx, label: &str, path: &str) -> Result<(MatrixFile, HermitianOperator), CliError> {
    let file = ctx.matrix_file(label, path)?;
    let op = match file.load(ctx.tol_psd)? {
        Loaded::Hermitian(h) => h,
        Loaded::Density(d) => d.into_op(),
        _ => {
            return Err(CliError::Parse(format!(
                "{label} must be a hermitian or density file, got '{}'",
                file.kind.as_str()
            )))
        }
    };
    Ok((file, op))
}

fn chart(ctx: &mut Ctx, path: &str, j: Option<&[usize]>, roundtrip: bool) -> Result<Success, CliError> {
    let (_, xi) = load_operator(ctx, "input", path)?;
    let n = xi.dim();
    let (index, selected) = match j {
        Some(one_based) => {
            let zero_based = one_based
                .iter()
                .map(|&i| {
                    i.checked_sub(1)
                        .ok_or_else(|| Error::InvalidChart("indices are 1-based".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (ChartIndex::new(n, zero_based)?, false)
        }
        None => (select_chart(&xi, ctx.tol_rank)?, true),
    };
    let coords = chart_forward(&xi, &index, ctx.tol_rank)?;
    let offdiag: Vec<Value> = index
        .offdiag_pairs()
        .iter()
        .zip(&coords.offdiag)
        .map(|(&(r, s), &z)| json!({ "pair": [r + 1, s + 1], "value": complex(z) }))
        .collect();
    let mut results = json!({
        "n": n,
        "rank": index.k(),
        "J": index.indices().iter().map(|i| i + 1).collect::<Vec<_>>(),
        "J_selected": selected,
        "real_dimension": index.real_dimension(),
        "diag": coords.diag,
        "offdiag": offdiag,
        "real_coordinates": coords.to_real(),
    });
    if roundtrip {
        let back = chart_reconstruct(&coords, &index)?;
        results["roundtrip_max_abs_error"] = json!(max_abs_diff(back.matrix(), xi.matrix()));
    }
    Ok(report(results, ctx.tolerances()))
}

fn factorization(dims: &[usize], n: usize) -> Result<TensorFactorization, CliError> {
    let fact = TensorFactorization::new(dims.to_vec())?;
    if fact.total() != n {
        return Err(Error::DimensionMismatch { expected: fact.total(), found: n }.into());
    }
    Ok(fact)
}

fn resolve_dims(flag: Option<&[usize]>, file: &MatrixFile) -> Result<Vec<usize>, CliError> {
    flag.map(<[usize]>::to_vec)
        .or_else(|| file.dims.clone())
        .ok_or_else(|| CliError::Parse("factor dimensions are required: pass --dims or set dims in the file".into()))
}

fn load_vector(ctx: &mut Ctx, file: &MatrixFile) -> Result<PureStateVector, CliError> {
    match file.load(ctx.tol_psd)? {
        Loaded::Vector(v) => Ok(v),
        _ => Err(CliError::Parse(format!("expected a vector file, got '{}'", file.kind.as_str()))),
    }
}

fn schmidt_cmd(ctx: &mut Ctx, path: &str, dims: Option<&[usize]>, frames: bool) -> Result<Success, CliError> {
    let file = ctx.matrix_file("input", path)?;
    let psi = load_vector(ctx, &file)?;
    let fact = factorization(&resolve_dims(dims, &file)?, psi.dim())?;
    if fact.parties() != 2 {
        return Err(Error::InvalidFactorization(format!("need 2 factors, got {}", fact.parties())).into());
    }
    let norm = psi.norm();
    if !psi.is_normalized() {
        ctx.warn(format!("input vector has norm {norm:.17e}; coefficients are not normalized"));
    }
    let dec = schmidt(&psi, &fact)?;
    let mut results = json!({
        "dims": fact.dims(),
        "norm": norm,
        "coefficients": dec.coefficients,
        "schmidt_number": dec.number(ctx.tol_rank),
    });
    if frames {
        results["left_frame"] = json!(matrix_entries(&dec.left_frame));
        results["right_frame"] = json!(matrix_entries(&dec.right_frame));
    }
    Ok(report(results, ctx.tolerances()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureEntry {
    signs: Vec<String>,
    weight: f64,
}

fn parse_signs(s: &str) -> Result<SignPattern, CliError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
    Ok(compact.parse::<SignPattern>()?)
}

struct FormChoice {
    form: ConcurrenceForm,
    mixture: Option<ProjectorMixture>,
    description: Value,
}

fn choose_form(ctx: &mut Ctx, a: &ConcurrenceArgs, fact: &TensorFactorization) -> Result<FormChoice, CliError> {
    let k = fact.parties();
    if let Some(s) = &a.signs {
        let pattern = parse_signs(s)?;
        if pattern.len() != k {
            return Err(Error::InvalidArgument(format!("sign pattern {pattern} has {} entries for {k} factors", pattern.len())).into());
        }
        if pattern.is_degenerate() {
            ctx.warn(format!("sign pattern {pattern} has an odd number of '-'; the form vanishes identically"));
        } else if !pattern.is_admissible() {
            ctx.warn(format!("sign pattern {pattern} has no '-'; the form does not detect entanglement"));
        }
        let form = build_form_signs(fact, &pattern)?;
        let mixture = ProjectorMixture::single(pattern.clone()).ok();
        return Ok(FormChoice { form, mixture, description: json!({ "signs": pattern.to_string() }) });
    }
    if let Some(path) = &a.mixture {
        let text = ctx.read("mixture", path)?;
        let entries: Vec<MixtureEntry> =
            serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("invalid mixture file: {e}")))?;
        let mut weights = BTreeMap::new();
        for e in entries {
            let pattern = parse_signs(&e.signs.concat())?;
            if weights.insert(pattern.clone(), e.weight).is_some() {
                return Err(Error::InvalidMixture(format!("pattern {pattern} listed twice")).into());
            }
        }
        let mix = ProjectorMixture::new(weights)?;
        if mix.parties() != k {
            return Err(Error::InvalidMixture(format!("patterns have {} entries for {k} factors", mix.parties())).into());
        }
        let description: Vec<Value> =
            mix.weights().iter().map(|(p, w)| json!({ "signs": p.to_string(), "weight": w })).collect();
        let form = build_form_mixture(fact, &mix)?;
        return Ok(FormChoice { form, mixture: Some(mix), description: json!({ "mixture": description }) });
    }
    if k == 2 {
        let form = build_form_bipartite(fact)?;
        let mix = ProjectorMixture::single("--".parse()?)?;
        Ok(FormChoice { form, mixture: Some(mix), description: json!({ "signs": "--" }) })
    } else {
        let mix = ProjectorMixture::uniform(k)?;
        let form = build_form_mixture(fact, &mix)?;
        Ok(FormChoice { form, mixture: Some(mix), description: json!({ "mixture": "uniform" }) })
    }
}

fn matrix_digest(m: &ComplexMatrix) -> String {
    let s = crate::json::to_string(&matrix_entries(m));
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn concurrence(ctx: &mut Ctx, a: &ConcurrenceArgs) -> Result<Success, CliError> {
    let file = ctx.matrix_file("input", &a.file)?;
    let expected = if a.mode == Mode::Pure { Kind::Vector } else { Kind::Density };
    if file.kind != expected {
        return Err(CliError::Parse(format!(
            "mode {} needs a {} file, got '{}'",
            a.mode.as_str(),
            expected.as_str(),
            file.kind.as_str()
        )));
    }
    let loaded = file.load(ctx.tol_psd)?;
    let n = file.dimension()?;
    let fact = factorization(&resolve_dims(a.dims.as_deref(), &file)?, n)?;
    let choice = choose_form(ctx, a, &fact)?;
    let form = &choice.form;

    let mut diagnostics = ctx.tolerances();
    diagnostics.insert("kappa".into(), json!(1.0));
    diagnostics.insert(
        "calibration".into(),
        json!("bilinear form; a Bell pair evaluates to 1, so kappa = 1 against the Wootters concurrence"),
    );
    diagnostics.insert("seed".into(), json!(a.seed));

    let mut results = json!({
        "mode": a.mode.as_str(),
        "dims": fact.dims(),
        "form": choice.description,
        "m": form.m(),
        "degenerate": form.is_degenerate(),
    });
    match (a.mode, loaded) {
        (Mode::Pure, Loaded::Vector(psi)) => {
            let psi = if psi.is_normalized() {
                psi
            } else {
                ctx.warn(format!("input vector has norm {:.17e}; normalized before evaluation", psi.norm()));
                PureStateVector::normalized(psi.amplitudes().clone())?
            };
            results["value"] = json!(pure_concurrence(&psi, form)?);
            if let Some(mix) = choice.mixture.as_ref().filter(|_| !form.is_degenerate()) {
                let alpha = alpha_coefficients(mix);
                results["trace_form_value"] = json!(pure_concurrence_trace_form(&psi, &fact, &alpha)?);
            }
        }
        (Mode::Lower, Loaded::Density(rho)) => {
            let strategy = match a.z_strategy {
                ZStrategy::Single => {
                    let alpha = a
                        .alpha
                        .checked_sub(1)
                        .ok_or_else(|| Error::InvalidZ("α is 1-based".into()))?;
                    BoundStrategy::Single(alpha)
                }
                ZStrategy::Random => BoundStrategy::Random { count: a.samples, seed: a.seed },
                ZStrategy::Refine => BoundStrategy::Refine { seed: a.seed, starts: a.samples, iters: a.iters },
            };
            let best = optimize_lower_bound(&rho, form, &strategy)?;
            results["value"] = json!(best.value);
            results["z"] = json!(vector_entries(best.z.as_vector()));
            diagnostics.insert("z_strategy".into(), json!(a.z_strategy.as_str()));
            diagnostics.insert("evaluations".into(), json!(best.evaluations));
            if a.z_strategy == ZStrategy::Refine {
                diagnostics.insert("iters".into(), json!(a.iters));
            }
        }
        (Mode::Upper, Loaded::Density(rho)) => {
            let strategy = match a.roof_strategy {
                RoofSearch::Eigen => RoofStrategy::EigenOnly,
                RoofSearch::Random => RoofStrategy::Random { count: a.samples, seed: a.seed },
                RoofSearch::Refine => RoofStrategy::LocalRefine { iters: a.iters, starts: a.samples, seed: a.seed },
            };
            let f = |psi: &PureStateVector| pure_concurrence(psi, form).unwrap_or(f64::INFINITY);
            let est = convex_roof_estimate(&f, &rho, &strategy, a.max_terms)?;
            results["value"] = json!(est.value);
            results["terms"] = json!(est.isometry.nrows());
            results["rank"] = json!(est.isometry.ncols());
            results["weights"] = json!(est.weights);
            results["isometry_digest"] = json!(matrix_digest(&est.isometry));
            diagnostics.insert("roof_strategy".into(), json!(a.roof_strategy.as_str()));
            diagnostics.insert("evaluations".into(), json!(est.evaluations));
            if a.roof_strategy == RoofSearch::Refine {
                diagnostics.insert("iters".into(), json!(a.iters));
            }
        }
        _ => unreachable!("file kind checked against mode"),
    }
    if form.is_degenerate() {
        results["value"] = json!(0.0);
    }
    Ok(report(results, diagnostics))
}

fn kraus(
    ctx: &mut Ctx,
    kraus_path: &str,
    state_path: &str,
    normalize: bool,
    canonical: bool,
    output: Option<&std::path::Path>,
) -> Result<Success, CliError> {
    let kfile = ctx.matrix_file("kraus", kraus_path)?;
    let map = match kfile.load(ctx.tol_psd)? {
        Loaded::Kraus(k) => k,
        _ => return Err(CliError::Parse(format!("expected a kraus file, got '{}'", kfile.kind.as_str()))),
    };
    let sfile = ctx.matrix_file("state", state_path)?;
    let state = sfile.load(ctx.tol_psd)?;
    let dims = sfile.dims.clone();
    let image = if normalize {
        let rho = match state {
            Loaded::Density(d) => d,
            _ => return Err(CliError::Parse("--normalize needs a density state file".into())),
        };
        MatrixFile::density(&normalized_apply(&map, &rho)?, dims)
    } else {
        let op = match state {
            Loaded::Density(d) => d.into_op(),
            Loaded::Hermitian(h) => h,
            _ => return Err(CliError::Parse("state must be a hermitian or density file".into())),
        };
        MatrixFile::hermitian(&apply(&map, &op)?, dims)
    };
    let image_op = HermitianOperator::hermitian_part(&image.raw_matrix()?);
    let mut results = json!({
        "operators": map.len(),
        "nondegenerate": is_nondegenerate(&map),
        "group_element": try_as_group_element(&map).is_some(),
        "choi_rank": ChoiOperator::of(&map).rank(),
        "trace": image_op.trace(),
        "state": serde_json::to_value(&image).expect("matrix file serializes"),
    });
    if canonical {
        results["canonical"] = json!(canonical_form(&map).ops().iter().map(matrix_entries).collect::<Vec<_>>());
    }
    if let Some(path) = output {
        let mut text = image.to_json();
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }
    Ok(report(results, ctx.tolerances()))
}

fn random(kind: RandomKind, dims: &[usize], rank: Option<usize>, ops: usize, seed: u64) -> Result<Success, CliError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(CliError::Parse("--dims entries must be positive".into()));
    }
    let n: usize = dims.iter().product();
    let factor_dims = (dims.len() > 1).then(|| dims.to_vec());
    let mut g = rng(seed);
    let file = match kind {
        RandomKind::Pure => MatrixFile::vector(&random_vector(&mut g, n), factor_dims),
        RandomKind::Density => MatrixFile::density(&random_density(&mut g, n, rank.unwrap_or(n))?, factor_dims),
        RandomKind::Kraus => {
            if ops == 0 {
                return Err(Error::EmptyKraus.into());
            }
            MatrixFile::kraus(&random_kraus(&mut g, n, ops)?, factor_dims)
        }
    };
    Ok(Success::File(file))
}
