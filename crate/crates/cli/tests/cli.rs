use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use qstrata::composite::TensorFactorization;
use qstrata::linalg::{ComplexMatrix, C64};
use qstrata::random::{random_hermitian_signature, rng};
use qstrata::strata::{is_extreme, rank_of, RANK_TOL};
use qstrata::{DensityState, HermitianOperator};
use qstrata_cli::{Kind, MatrixFile};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn qstrata_with_stdin(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qstrata"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn qstrata(args: &[&str]) -> Run {
    qstrata_with_stdin(args, "")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn matrix_json(kind: &str, rows: &[&[(f64, f64)]]) -> String {
    let rows: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|&(a, b)| [a, b]).collect()).collect();
    serde_json::json!({ "kind": kind, "matrix": rows }).to_string()
}

fn vector_json(dims: &[usize], v: &[(f64, f64)]) -> String {
    let v: Vec<[f64; 2]> = v.iter().map(|&(a, b)| [a, b]).collect();
    serde_json::json!({ "kind": "vector", "dims": dims, "matrix": v }).to_string()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[test]
fn density_accepts_half_identity() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "half.json", &matrix_json("density", &[&[(0.5, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]]));
    let run = qstrata(&["density", s(&p)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rep = run.json();
    assert_eq!(rep["status"], "pass");
    assert_eq!(rep["results"]["rank"], 2);
    assert_eq!(rep["results"]["signature"], serde_json::json!([2, 0]));
    assert_eq!(rep["results"]["extreme_point"], false);
}

#[test]
fn density_rejects_trace_point_nine() {
    let text = matrix_json("density", &[&[(0.5, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.4, 0.0)]]);
    let run = qstrata_with_stdin(&["density", "-"], &text);
    assert_eq!(run.code, 1);
    let rep = run.json();
    assert_eq!(rep["status"], "fail");
    assert!((f(&rep["results"]["trace_residual"]) - 0.1).abs() < 1e-12);
    assert_eq!(rep["results"]["unit_trace"], false);
}

#[test]
fn density_flags_projector_as_extreme() {
    let p = ComplexMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.0, -0.5), C64::new(0.0, 0.5), C64::new(0.5, 0.0)]);
    let rho = DensityState::from_matrix(p).unwrap();
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &MatrixFile::density(&rho, None).to_json());
    let rep = qstrata(&["density", s(&path)]).json();
    assert_eq!(rep["results"]["rank"], 1);
    assert_eq!(rep["results"]["extreme_point"], is_extreme(&rho, RANK_TOL));
    assert_eq!(rep["results"]["extreme_point"], true);
}

#[test]
fn density_reports_non_hermitian_input() {
    let text = matrix_json("hermitian", &[&[(1.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (1.0, 0.0)]]);
    let run = qstrata_with_stdin(&["density", "-"], &text);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["results"]["hermitian"], false);
    assert!((f(&run.json()["results"]["hermitian_residual"]) - 1.0).abs() < 1e-15);
}

fn worked_example() -> HermitianOperator {
    let g = ComplexMatrix::from_row_slice(
        3,
        2,
        &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.25, 0.5), C64::new(-0.25, 0.5), C64::new(0.3, -0.1), C64::new(0.7, 0.2)],
    );
    HermitianOperator::hermitian_part(&(&g * g.adjoint()))
}

#[test]
fn chart_reproduces_worked_example() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "xi.json", &MatrixFile::hermitian(&worked_example(), None).to_json());
    let run = qstrata(&["chart", s(&p), "--J", "1,2"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let res = &run.json()["results"];
    let real: Vec<f64> = res["real_coordinates"].as_array().unwrap().iter().map(f).collect();
    // (d1, d2, Re a_12, Im a_12) with a_12 = a1 - i a2 = -i
    assert_eq!(&real[..4], &[2.0, 0.625, 0.0, -1.0]);
    assert_eq!(res["offdiag"][0]["pair"], serde_json::json!([1, 2]));
    assert_eq!(res["real_dimension"], 8);
}

#[test]
fn chart_rejects_wrong_index_count() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "xi.json", &MatrixFile::hermitian(&worked_example(), None).to_json());
    let run = qstrata(&["chart", s(&p), "--J", "1"]);
    assert_eq!(run.code, 1);
    assert!(run.json()["error"].as_str().unwrap().contains("rank mismatch"));
    assert_eq!(qstrata(&["chart", s(&p), "--J", "0,1"]).code, 1);
}

#[test]
fn chart_round_trip_on_random_rank_two() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(41);
    for t in 0..5 {
        let xi = random_hermitian_signature(&mut r, 4, 1 + t % 2, 1 - t % 2).unwrap();
        let p = write(&dir, "xi.json", &MatrixFile::hermitian(&xi, None).to_json());
        let run = qstrata(&["chart", s(&p), "--roundtrip"]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        assert!(f(&run.json()["results"]["roundtrip_max_abs_error"]) < 1e-9);
        assert_eq!(run.json()["results"]["J_selected"], true);
    }
}

#[test]
fn schmidt_product_and_bell() {
    let dir = TempDir::new().unwrap();
    let product = write(&dir, "prod.json", &vector_json(&[2, 2], &[(0.6, 0.0), (0.0, 0.8), (0.0, 0.0), (0.0, 0.0)]));
    let rep = qstrata(&["schmidt", s(&product)]).json();
    assert_eq!(rep["results"]["schmidt_number"], 1);

    let bell = write(&dir, "bell.json", &vector_json(&[2, 2], &[(H, 0.0), (0.0, 0.0), (0.0, 0.0), (H, 0.0)]));
    let rep = qstrata(&["schmidt", s(&bell), "--frames"]).json();
    let c: Vec<f64> = rep["results"]["coefficients"].as_array().unwrap().iter().map(f).collect();
    // singular values of diag(h, h)
    assert!(c.iter().all(|x| (x - H).abs() < 1e-15));
    assert_eq!(rep["results"]["left_frame"].as_array().unwrap().len(), 2);
}

#[test]
fn schmidt_warns_on_unnormalized_input() {
    let text = vector_json(&[2, 2], &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    let run = qstrata_with_stdin(&["schmidt", "-"], &text);
    assert_eq!(run.code, 0);
    assert!(run.stderr.contains("norm"));
    assert_eq!(run.json()["warnings"].as_array().unwrap().len(), 1);
    assert!(run.json()["results"]["coefficients"].as_array().unwrap().iter().all(|x| (f(x) - 1.0).abs() < 1e-15));
}

#[test]
fn schmidt_rejects_bad_dims() {
    let text = vector_json(&[2, 2], &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
    let run = qstrata_with_stdin(&["schmidt", "-", "--dims", "2,3"], &text);
    assert_eq!(run.code, 1);
    assert!(run.json()["error"].as_str().unwrap().contains("dimension mismatch"));
}

#[test]
fn concurrence_of_bell_vector_is_one() {
    let text = vector_json(&[2, 2], &[(H, 0.0), (0.0, 0.0), (0.0, 0.0), (H, 0.0)]);
    let rep = qstrata_with_stdin(&["concurrence", "-"], &text).json();
    assert!((f(&rep["results"]["value"]) - 1.0).abs() < 1e-12);
    assert_eq!(f(&rep["diagnostics"]["kappa"]), 1.0);
}

fn werner(p: f64) -> DensityState {
    let singlet = qstrata::PureStateVector::from_slice(&[
        C64::new(0.0, 0.0),
        C64::new(H, 0.0),
        C64::new(-H, 0.0),
        C64::new(0.0, 0.0),
    ])
    .unwrap();
    DensityState::pure(&singlet).unwrap().mix(&DensityState::maximally_mixed(4), p).unwrap()
}

#[test]
fn concurrence_lower_bound_on_werner_state() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "w.json", &MatrixFile::density(&werner(0.5), Some(vec![2, 2])).to_json());
    let rep = qstrata(&["concurrence", s(&p), "--mode", "lower"]).json();
    let expected = (0.0f64).max((3.0 * 0.5 - 1.0) / 2.0);
    assert!((f(&rep["results"]["value"]) - expected).abs() < 1e-12);
    assert_eq!(rep["results"]["z"].as_array().unwrap().len(), 1);

    let rep = qstrata(&["concurrence", s(&p), "--mode", "upper", "--roof-strategy", "random", "--samples", "4"]).json();
    assert!(f(&rep["results"]["value"]) >= expected - 1e-12);
    assert_eq!(rep["results"]["isometry_digest"].as_str().unwrap().len(), 64);
}

/// `sqrt(<ΨΨ| 2^K ⊗_j P_{s_j} |ΨΨ>)` by explicit index sums.
fn brute_force_concurrence(psi: &[C64], dims: &[usize], signs: &[f64]) -> f64 {
    let k = dims.len();
    let total: usize = dims.iter().product();
    let digits = |mut x: usize| {
        let mut d = vec![0; k];
        for j in (0..k).rev() {
            d[j] = x % dims[j];
            x /= dims[j];
        }
        d
    };
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..total {
        for j in 0..total {
            for a in 0..total {
                for b in 0..total {
                    let (di, dj, da, db) = (digits(i), digits(j), digits(a), digits(b));
                    let mut el = 2f64.powi(k as i32);
                    for q in 0..k {
                        let direct = if di[q] == da[q] && dj[q] == db[q] { 1.0 } else { 0.0 };
                        let swap = if di[q] == db[q] && dj[q] == da[q] { 1.0 } else { 0.0 };
                        el *= (direct + signs[q] * swap) / 2.0;
                    }
                    if el != 0.0 {
                        acc += (psi[i] * psi[j]).conj() * el * psi[a] * psi[b];
                    }
                }
            }
        }
    }
    acc.re.max(0.0).sqrt()
}

#[test]
fn concurrence_of_ghz_matches_contraction() {
    let mut ghz = vec![C64::new(0.0, 0.0); 8];
    ghz[0] = C64::new(H, 0.0);
    ghz[7] = C64::new(H, 0.0);
    let text = vector_json(&[2, 2, 2], &ghz.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>());
    let rep = qstrata_with_stdin(&["concurrence", "-", "--signs", "+,-,-"], &text).json();
    let expected = brute_force_concurrence(&ghz, &[2, 2, 2], &[1.0, -1.0, -1.0]);
    assert!(expected > 0.1);
    assert!((f(&rep["results"]["value"]) - expected).abs() < 1e-12);
    assert!((f(&rep["results"]["trace_form_value"]) - expected).abs() < 1e-12);
}

#[test]
fn concurrence_degenerate_pattern_warns() {
    let text = vector_json(&[2, 2, 2], &[(H, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (H, 0.0)]);
    let run = qstrata_with_stdin(&["concurrence", "-", "--signs", "-++"], &text);
    assert_eq!(run.code, 0);
    assert_eq!(f(&run.json()["results"]["value"]), 0.0);
    assert!(run.stderr.contains("odd number"));
}

#[test]
fn concurrence_reads_mixture_file() {
    let dir = TempDir::new().unwrap();
    let mix = write(
        &dir,
        "mix.json",
        r#"[{"signs":["+","-","-"],"weight":0.5},{"signs":["-","-","+"],"weight":0.5}]"#,
    );
    let mut ghz = vec![(0.0, 0.0); 8];
    ghz[0] = (H, 0.0);
    ghz[7] = (H, 0.0);
    let psi = write(&dir, "ghz.json", &vector_json(&[2, 2, 2], &ghz));
    let rep = qstrata(&["concurrence", s(&psi), "--mixture", s(&mix)]).json();
    let amps: Vec<C64> = ghz.iter().map(|&(a, b)| C64::new(a, b)).collect();
    let a = brute_force_concurrence(&amps, &[2, 2, 2], &[1.0, -1.0, -1.0]);
    let b = brute_force_concurrence(&amps, &[2, 2, 2], &[-1.0, -1.0, 1.0]);
    let expected = (0.5 * a * a + 0.5 * b * b).sqrt();
    assert!((f(&rep["results"]["value"]) - expected).abs() < 1e-12);
}

#[test]
fn concurrence_rejects_mode_and_dimension_mismatch() {
    let text = vector_json(&[2, 2], &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
    assert_eq!(qstrata_with_stdin(&["concurrence", "-", "--mode", "lower"], &text).code, 2);
    assert_eq!(qstrata_with_stdin(&["concurrence", "-", "--dims", "3,2"], &text).code, 1);
    assert_eq!(qstrata_with_stdin(&["concurrence", "-", "--signs", "---"], &text).code, 1);
}

fn kraus_json(ops: &[ComplexMatrix]) -> String {
    let f = MatrixFile {
        kind: Kind::Kraus,
        dims: None,
        matrix: qstrata_cli::matrix_file::Entries::Kraus(ops.iter().map(qstrata_cli::matrix_file::matrix_entries).collect()),
    };
    f.to_json()
}

fn state_from(rep: &Value) -> ComplexMatrix {
    let file: MatrixFile = serde_json::from_value(rep["results"]["state"].clone()).unwrap();
    file.raw_matrix().unwrap()
}

#[test]
fn kraus_examples() {
    let dir = TempDir::new().unwrap();
    let plus = DensityState::from_matrix(ComplexMatrix::from_element(2, 2, C64::new(0.5, 0.0))).unwrap();
    let state = write(&dir, "plus.json", &MatrixFile::density(&plus, None).to_json());
    let id = ComplexMatrix::identity(2, 2);

    let identity = write(&dir, "id.json", &kraus_json(&[id.clone()]));
    let rep = qstrata(&["kraus", s(&identity), s(&state)]).json();
    assert_eq!(state_from(&rep), *plus.matrix());
    assert_eq!(rep["results"]["group_element"], true);

    let (p0, p1) = (
        ComplexMatrix::from_diagonal(&qstrata::linalg::ComplexVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])),
        ComplexMatrix::from_diagonal(&qstrata::linalg::ComplexVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])),
    );
    let dephase = write(&dir, "dephase.json", &kraus_json(&[p0.clone(), p1]));
    let rep = qstrata(&["kraus", s(&dephase), s(&state), "--canonical"]).json();
    let out = state_from(&rep);
    assert!((out - ComplexMatrix::identity(2, 2) * C64::new(0.5, 0.0)).norm() < 1e-15);
    assert_eq!(rep["results"]["canonical"].as_array().unwrap().len(), 2);

    let doubled = write(&dir, "two.json", &kraus_json(&[id * C64::new(2.0, 0.0)]));
    let out_path = dir.path().join("image.json");
    let rep = qstrata(&["kraus", s(&doubled), s(&state), "--normalize", "-o", s(&out_path)]).json();
    assert!((state_from(&rep) - plus.matrix()).norm() < 1e-15);
    let written = MatrixFile::from_json(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written.kind, Kind::Density);

    let degenerate = write(&dir, "p0.json", &kraus_json(&[p0]));
    let run = qstrata(&["kraus", s(&degenerate), s(&state), "--normalize"]);
    assert_eq!(run.code, 1);
    assert!(run.json()["error"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn random_is_seed_deterministic_and_valid() {
    let a = qstrata(&["random", "--kind", "density", "--dims", "2,2", "--rank", "2", "--seed", "9"]);
    let b = qstrata(&["random", "--kind", "density", "--dims", "2,2", "--rank", "2", "--seed", "9"]);
    let c = qstrata(&["random", "--kind", "density", "--dims", "2,2", "--rank", "2", "--seed", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let file = MatrixFile::from_json(&a.stdout).unwrap();
    assert_eq!(file.dims, Some(vec![2, 2]));
    let rho = DensityState::from_matrix(file.raw_matrix().unwrap()).unwrap();
    assert_eq!(rank_of(rho.op(), RANK_TOL), 2);
    TensorFactorization::new(file.dims.unwrap()).unwrap();

    let pure = qstrata(&["random", "--kind", "density", "--dims", "3", "--rank", "1", "--seed", "2"]);
    let rho = DensityState::from_matrix(MatrixFile::from_json(&pure.stdout).unwrap().raw_matrix().unwrap()).unwrap();
    assert!((rho.purity() - 1.0).abs() < 1e-12);

    let bad = qstrata(&["random", "--kind", "density", "--dims", "2", "--rank", "3"]);
    assert_eq!(bad.code, 1);
    assert_eq!(bad.json()["status"], "fail");
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(qstrata_with_stdin(&["density", "-"], "not json").code, 2);
    assert_eq!(qstrata(&["density", "/nonexistent/file.json"]).code, 2);
    assert_eq!(qstrata(&["frobnicate"]).code, 2);
    let ragged = r#"{"kind":"density","matrix":[[[1,0],[0,0]],[[0,0]]]}"#;
    assert_eq!(qstrata_with_stdin(&["density", "-"], ragged).code, 2);
    let wrong_kind = vector_json(&[2], &[(1.0, 0.0), (0.0, 0.0)]);
    assert_eq!(qstrata_with_stdin(&["density", "-"], &wrong_kind).code, 2);
    assert_eq!(qstrata(&["--help"]).code, 0);
}

#[test]
fn tolerance_flags_are_reported_and_applied() {
    let text = matrix_json("density", &[&[(1.0 + 1e-7, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (-1e-7, 0.0)]]);
    let strict = qstrata_with_stdin(&["density", "-"], &text);
    assert_eq!(strict.code, 1);
    let loose = qstrata_with_stdin(&["density", "-", "--tol-psd", "1e-6", "--tol-rank", "1e-6"], &text);
    assert_eq!(loose.code, 0);
    assert_eq!(f(&loose.json()["diagnostics"]["tol_psd"]), 1e-6);
    assert_eq!(loose.json()["results"]["rank"], 1);
}

#[test]
fn reports_are_byte_identical_and_digest_inputs() {
    let dir = TempDir::new().unwrap();
    let gen = qstrata(&["random", "--kind", "density", "--dims", "2,2", "--seed", "4"]);
    let p = write(&dir, "rho.json", &gen.stdout);
    let args = ["concurrence", s(&p), "--mode", "lower", "--z-strategy", "random", "--seed", "3"];
    let a = qstrata(&args);
    let b = qstrata(&args);
    assert_eq!(a.stdout, b.stdout);
    let via_stdin = qstrata_with_stdin(&["concurrence", "-", "--mode", "lower", "--z-strategy", "random", "--seed", "3"], &gen.stdout);
    assert_eq!(a.json()["inputs_digest"], via_stdin.json()["inputs_digest"]);
    let other_seed = qstrata(&["concurrence", s(&p), "--mode", "lower", "--z-strategy", "random", "--seed", "4"]);
    assert_ne!(a.json()["inputs_digest"], other_seed.json()["inputs_digest"]);
}
