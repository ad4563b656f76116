use nalgebra::DMatrix;
use spectra_theta_core::betastats::{
    equipoint, equipoint_lower_sweep, median, median_bounds, median_bounds_sweep, ordering_sweep,
    phi_hat_monotone_sweep, phi_monotone_sweep, simmons_sweep, BetaShape, Violation,
};
use spectra_theta_core::dilation::{
    ball_membership, blockdiag_dilation, lambda_pair, oh_to_spin_choi, spin2_dilation, spin_matrices, spin_tensor_norm,
    Ball, SPIN_TENSOR_MAX_G,
};
use spectra_theta_core::linalg::{lambda_min, sym_norm};
use spectra_theta_core::pencil::{cube_pencil, cube_relaxation_test, sharpness_witness, SymTuple, MEMBERSHIP_TOL};
use spectra_theta_core::rng::{gaussian_matrix, stream_rng};
use spectra_theta_core::sphere_oracle::{sphere_abs_quadratic_integral, DEFAULT_SAMPLES};
use spectra_theta_core::theta::{kappa, kappa_star, theta, SignDiag};

use crate::output::{Cell, Table};
use crate::schema::MatrixFamily;
use crate::{emit, Body, Check, CliError, Command, Options, Report, Result};

/// Shapes (𝔰, 𝔱) of the reference median table.
pub const MEDIAN_SHAPES: [(f64, f64); 6] = [(2.5, 1.0), (3.0, 1.0), (3.0, 2.0), (4.0, 2.0), (10.0, 3.0), (10.0, 7.0)];

/// Oracle agreement limit in standard errors.
pub const ORACLE_Z_LIMIT: f64 = 4.0;

const VERIFY_COLUMNS: [&str; 6] = ["check", "p1", "p2", "value", "reference", "ok"];

pub fn dispatch(command: &Command, opts: &Options) -> Result<Report> {
    match command {
        Command::ThetaTable => table(theta_table(opts.d_max.unwrap_or(20))?),
        Command::MedianTable => table(median_table()?),
        Command::EquipointTable => table(equipoint_table(opts.d_max.unwrap_or(10))?),
        Command::Verify { which } => verify(*which, opts),
        Command::Membership { input, ball, starts } => {
            let ball: Ball = ball.parse()?;
            let x = MatrixFamily::read(input)?.to_tuple()?;
            let m = ball_membership(&x, ball, opts.tol.unwrap_or(MEMBERSHIP_TOL), *starts, opts.seed)?;
            let mut t = Table::new(&["ball", "n", "g", "inside", "value", "sampled"]);
            let name = match ball {
                Ball::Oh => "oh",
                Ball::Spin => "spin",
                Ball::MinSampled => "min_sampled",
            };
            t.push(vec![name.into(), x.n().into(), x.g().into(), m.inside.into(), m.value.into(), m.sampled.into()]);
            table(t)
        }
        Command::CubeRelax { pencil, dim, trials } => {
            let b = MatrixFamily::read(pencil)?.to_pencil()?;
            let r = cube_relaxation_test(&b, *dim, *trials, opts.seed)?;
            let mut t = Table::new(&["nu", "g", "trials", "violations", "theta", "worst_margin", "tightest_scale"]);
            t.push(vec![
                b.nu().into(),
                b.g().into(),
                r.trials.into(),
                r.violations.into(),
                r.theta.into(),
                r.worst_margin.into(),
                r.tightest_scale.into(),
            ]);
            Ok(Report { body: Body::Table(t), violations: r.violations, what: "cube relaxation" })
        }
        Command::CubePencil { g } => {
            let p = cube_pencil(*g)?;
            Ok(Report {
                body: Body::Raw(MatrixFamily::from_mats(p.coeffs()).to_json()),
                violations: 0,
                what: "cube pencil",
            })
        }
        Command::Witness { dim, cells, pencil_out, tuple_out } => {
            let per_cell = usize::try_from(opts.samples.unwrap_or(10_000))
                .map_err(|_| CliError::Input("sample count too large".into()))?;
            let w = sharpness_witness(*dim, *cells, per_cell, opts.seed)?;
            if let Some(p) = pencil_out {
                emit(&MatrixFamily::from_mats(w.pencil.coeffs()).to_json(), Some(p))?;
            }
            if let Some(p) = tuple_out {
                emit(&MatrixFamily::from_mats(w.tuple.mats()).to_json(), Some(p))?;
            }
            let mut t = Table::new(&["d", "cells", "samples_per_cell", "lambda_max", "theta", "ratio"]);
            t.push(vec![
                (*dim).into(),
                (*cells).into(),
                per_cell.into(),
                w.lambda_max.into(),
                w.theta.into(),
                (w.lambda_max / w.theta).into(),
            ]);
            table(t)
        }
    }
}

fn table(t: Table) -> Result<Report> {
    Ok(Report { body: Body::Table(t), violations: 0, what: "table" })
}

pub fn theta_table(d_max: u32) -> Result<Table> {
    if d_max == 0 {
        return Err(CliError::Input("--d-max must be at least 1".into()));
    }
    let mut t = Table::new(&["d", "theta_minus", "theta", "theta_plus", "theta_plusplus"]);
    for d in 1..=d_max {
        let r = theta(d)?;
        let b = r.bounds_odd;
        t.push(vec![
            d.into(),
            b.map(|b| b.theta_minus).into(),
            r.theta.into(),
            b.map(|b| b.theta_plus).into(),
            b.map(|b| b.theta_plusplus).into(),
        ]);
    }
    Ok(t)
}

pub fn median_table() -> Result<Table> {
    let mut t = Table::new(&["s", "t", "mean", "median", "upper_half", "upper"]);
    for &(s, tt) in &MEDIAN_SHAPES {
        let shape = BetaShape::new(s, tt)?;
        let (mean, upper) = median_bounds(&shape)?;
        let half = mean + (s - tt) / (2.0 * (s + tt) * (s + tt));
        t.push(vec![s.into(), tt.into(), mean.into(), median(&shape)?.into(), half.into(), upper.into()]);
    }
    Ok(t)
}

pub fn equipoint_table(d: u32) -> Result<Table> {
    if d == 0 {
        return Err(CliError::Input("--d-max must be at least 1".into()));
    }
    let mut t = Table::new(&["s", "t", "equipoint"]);
    for s in 1..=d {
        let e = equipoint(&BetaShape::new(f64::from(s), f64::from(d - s))?)?;
        t.push(vec![s.into(), (d - s).into(), e.into()]);
    }
    Ok(t)
}

fn real_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(CliError::Input(format!("--grid-step must be positive, got {step}")));
    }
    Ok((0u32..).map(|k| start + f64::from(k) * step).take_while(|&x| x <= end + 1e-9 * step).collect())
}

fn violation_rows(t: &mut Table, violations: &[Violation]) {
    for v in violations {
        t.push(vec![v.check.into(), v.params[0].into(), v.params[1].into(), v.lhs.into(), v.rhs.into(), false.into()]);
    }
}

fn verify(which: Check, opts: &Options) -> Result<Report> {
    let mut t = Table::new(&VERIFY_COLUMNS);
    let mut violations = 0;
    let what = match which {
        Check::Simmons => {
            let v = simmons_sweep(opts.d_max.unwrap_or(400))?;
            violations += v.len();
            violation_rows(&mut t, &v);
            "simmons sweep"
        }
        Check::Monotone => {
            let d_max = f64::from(opts.d_max.unwrap_or(100));
            let mut v = phi_hat_monotone_sweep(d_max, opts.grid_step.unwrap_or(0.25))?;
            v.extend(phi_monotone_sweep(d_max)?);
            violations += v.len();
            violation_rows(&mut t, &v);
            "monotonicity sweep"
        }
        Check::Bounds => {
            let d_max = opts.d_max.unwrap_or(60);
            let grid = real_grid(1.0, f64::from(d_max), opts.grid_step.unwrap_or(0.5))?;
            let shapes: Vec<(f64, f64)> =
                grid.iter().flat_map(|&s| grid.iter().take_while(move |&&u| u <= s).map(move |&u| (s, u))).collect();
            let mut v = equipoint_lower_sweep(f64::from(d_max), opts.grid_step.unwrap_or(0.5))?;
            v.extend(ordering_sweep(&shapes)?);
            v.extend(median_bounds_sweep(&shapes)?);
            violations += v.len();
            violation_rows(&mut t, &v);
            for d in (3..=d_max).step_by(2) {
                let r = theta(d)?;
                let b = r.bounds_odd.expect("odd d has bounds");
                let upper = b.theta_plus.min(b.theta_plusplus);
                let tol = 1e-12;
                if b.theta_minus > r.theta + tol {
                    violations += 1;
                    t.push(vec![
                        "theta_lower".into(),
                        d.into(),
                        Cell::Missing,
                        b.theta_minus.into(),
                        r.theta.into(),
                        false.into(),
                    ]);
                }
                if r.theta > upper + tol {
                    violations += 1;
                    t.push(vec![
                        "theta_upper".into(),
                        d.into(),
                        Cell::Missing,
                        r.theta.into(),
                        upper.into(),
                        false.into(),
                    ]);
                }
            }
            "bounds sweep"
        }
        Check::Oracle => {
            let n = opts.samples.unwrap_or(DEFAULT_SAMPLES);
            let d_max = opts.d_max.unwrap_or(4);
            let mut case = 0u64;
            for d in 2..=d_max {
                for s in d.div_ceil(2)..d {
                    let tt = d - s;
                    let k = kappa_star(s, tt)?;
                    let j = SignDiag::new(s, tt, k.a, k.b)?;
                    let exact = kappa(&j)?;
                    let est = sphere_abs_quadratic_integral(&j.to_matrix(), n, opts.seed.wrapping_add(case))?;
                    case += 1;
                    let ok = est.z_score(exact) <= ORACLE_Z_LIMIT;
                    violations += usize::from(!ok);
                    t.push(vec!["oracle".into(), s.into(), tt.into(), est.value.into(), exact.into(), ok.into()]);
                }
            }
            "oracle agreement"
        }
        Check::Dilation => {
            violations += dilation_checks(&mut t, opts)?;
            "dilation checks"
        }
    };
    Ok(Report { body: Body::Table(t), violations, what })
}

fn dilation_checks(t: &mut Table, opts: &Options) -> Result<usize> {
    let tol = opts.tol.unwrap_or(1e-9);
    let g_max = opts.d_max.map_or(6, |d| d as usize).min(SPIN_TENSOR_MAX_G);
    let mut bad = 0;
    let mut push = |t: &mut Table, check: &str, p1: Cell, value: f64, reference: f64, ok: bool| {
        bad += usize::from(!ok);
        t.push(vec![check.into(), p1, Cell::Missing, value.into(), reference.into(), ok.into()]);
    };
    for g in 2..=g_max {
        let car = spin_matrices(g)?.satisfies_car();
        push(t, "spin_car", g.into(), f64::from(u8::from(car)), 1.0, car);
        let norm = spin_tensor_norm(g)?;
        push(t, "spin_tensor_norm", g.into(), norm, g as f64, (norm - g as f64).abs() <= tol);
        let low = lambda_min(&oh_to_spin_choi(g)?)?;
        push(t, "choi_lambda_min", g.into(), low, 0.0, low >= -tol);
    }

    let instances = opts.samples.unwrap_or(1000);
    let mut spin_worst = 0.0f64;
    let mut block_worst = 0.0f64;
    for i in 0..instances {
        let n = 1 + (i % 4) as usize;
        let pair = random_tuple(opts.seed, 2 * i, 2, n)?;
        let boundary = pair.scaled(1.0 / sym_norm(&lambda_pair(&pair)?)?);
        // every fourth pair on the boundary, the rest strictly inside
        let x = boundary.scaled(if i % 4 == 0 { 1.0 } else { 0.25 * (i % 4) as f64 });
        let r = spin2_dilation(&x)?;
        let res = r.residuals(&x)?;
        let ts = r.t.mats();
        let square_sum = &ts[0] * &ts[0] + &ts[1] * &ts[1];
        let unit = (square_sum - DMatrix::identity(2 * n, 2 * n)).abs().max();
        spin_worst = spin_worst.max(res.commutator).max(res.reconstruction).max(res.isometry).max(unit);

        let tuple = random_tuple(opts.seed, 2 * i + 1, 3, n)?;
        let res = blockdiag_dilation(&tuple)?.residuals(&tuple)?;
        block_worst = block_worst.max(res.reconstruction).max(res.isometry).max(res.commutator);
    }
    push(t, "spin2_residual", (instances as usize).into(), spin_worst, tol, spin_worst <= tol);
    push(t, "blockdiag_residual", (instances as usize).into(), block_worst, 1e-12, block_worst <= 1e-12);
    Ok(bad)
}

fn random_tuple(seed: u64, stream: u64, g: usize, n: usize) -> Result<SymTuple> {
    let mut rng = stream_rng(seed, stream);
    let mats = (0..g)
        .map(|_| {
            let m = gaussian_matrix(&mut rng, n, n);
            (&m + m.transpose()) * 0.5
        })
        .collect();
    Ok(SymTuple::new(mats)?)
}
