//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL with the measured values but do not
//! change the exit status; any other failure does.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use redform::fixtures::{self, Problem};
use redform::ode::{parametrized_first_order, rational_solutions, DiffOperator, SolveOptions};
use redform::reducer::{full_reduce, DriverOptions, DriverOutput, Mode, ReductionState};
use redform::variational::{first_variational, sym_power, sym_power_gauge};
use redform::{mrs_driver, Field, FieldElement, Gauge, Matrix, MatrixK, Poly, Verdict, Witness};
use redform_cli::{read_document, verify_gauge};

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;
#[path = "../../core/tests/common/random.rs"]
mod random;

/// Order-3 dimension and minimal polynomial differ from the stated values; see README.
const KNOWN_FAILURES: [u32; 1] = [3];

type Outcome = Result<String, String>;

struct Ctx {
    problem: Problem,
    full: DriverOutput,
    full_time: Duration,
}

fn el(p: &Problem, s: &str) -> FieldElement {
    p.tower.parse_element(s).unwrap()
}

fn sparse(p: &Problem, rows: usize, cols: usize, entries: &[(usize, usize, &str)]) -> MatrixK {
    let mut m = Matrix::zeros(rows, cols);
    for &(r, c, v) in entries {
        m.set(r - 1, c - 1, el(p, v));
    }
    m
}

fn c2(p: &Problem) -> FieldElement {
    el(p, "s*i*(m^2 - 1)/(12*L)")
}

fn f2(p: &Problem) -> FieldElement {
    el(p, "(m + 1)/(2*x)")
}

fn support(m: &MatrixK) -> Vec<(usize, usize)> {
    let mut s = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m.get(i, j).is_zero() {
                s.push((i, j));
            }
        }
    }
    s
}

fn envelope(d: Option<usize>) -> String {
    d.map_or("none".into(), |d| d.to_string())
}

fn check(ok: bool, what: &str, failures: &mut Vec<String>) {
    if !ok {
        failures.push(what.to_string());
    }
}

fn verdict(details: String, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(details)
    } else {
        Err(format!("{details}; failed: {}", failures.join(", ")))
    }
}

fn criterion_1(cx: &Ctx) -> Outcome {
    let start = Instant::now();
    let p = &cx.problem;
    let a1 = first_variational(&p.system, &p.curve).map_err(|e| e.to_string())?;
    let displayed = Matrix::from_rows(
        [
            ["0", "0", "1", "0"],
            ["0", "0", "0", "1"],
            ["3*(m^2-1)/(8*x^2)", "-i*s*(m^2-1)/(8*x^2)", "0", "0"],
            ["-i*s*(m^2-1)/(8*x^2)", "-(m^2-1)/(8*x^2)", "0", "0"],
        ]
        .iter()
        .map(|r| r.iter().map(|s| el(p, s)).collect())
        .collect(),
    );
    let fixture: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", "potential_gauge.toml"].iter().collect();
    let doc = read_document(&fixture.to_string_lossy()).map_err(|e| e.to_string())?;
    let check_gauge = verify_gauge(&doc).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut failures = Vec::new();
    check(a1 == displayed, "A1 differs from the displayed matrix", &mut failures);
    check(check_gauge.holds, "P1^-1[A1] is not diag(0, 0, (m+1)/(2x), -(m-1)/(2x))", &mut failures);
    check(elapsed < Duration::from_secs(1), "runtime over 1 s", &mut failures);
    verdict(format!("A1 exact, gauge relation {}, {:.2?}", check_gauge.holds, elapsed), failures)
}

fn criterion_2(cx: &Ctx) -> Outcome {
    let p = &cx.problem;
    let r = &cx.full.orders[0];
    let f = f2(p);
    let spectrum: Vec<FieldElement> = (-3..=3).map(|k| f.scale_int(k)).collect();
    let s2red = sparse(p, 4, 10, &[(2, 9, "-1/x"), (3, 3, "1/(x*m)"), (4, 4, "-1/(x*m)")]).scale(&c2(p));
    let mut failures = Vec::new();
    check(r.sub_dim() == 10, "off-diagonal dimension", &mut failures);
    check(r.eigenvalues() == spectrum, "spectrum", &mut failures);
    check(r.state.adjoint.is_diagonalizable(), "diagonalizable", &mut failures);
    let exact = r.reduced().off_diagonal() == s2red;
    check(exact, "S2,red exact match", &mut failures);
    check(r.lie.dim() == 1 && r.lie.abelian, "Lie(A2,red) abelian of dimension 1", &mut failures);
    check(r.envelope_dim == Some(2), "envelope dimension 2", &mut failures);
    check(cx.full_time < Duration::from_secs(30), "runtime", &mut failures);
    verdict(
        format!(
            "dim {}, spectrum {{k(m+1)/(2x)}} k=-3..3, diagonalizable, S2,red exact, Lie dim {}, envelope {}, orders 2-3 in {:.2?}",
            r.sub_dim(),
            r.lie.dim(),
            envelope(r.envelope_dim),
            cx.full_time
        ),
        failures,
    )
}

fn minimal_polynomial(p: &Problem, roots: &[(i64, u32)]) -> Poly<FieldElement> {
    let f = f2(p);
    let mut out = Poly::one();
    for &(k, e) in roots {
        out = out.mul(&Poly::new(vec![f.scale_int(-k), FieldElement::one()]).pow(e));
    }
    out
}

fn criterion_3(cx: &Ctx) -> Outcome {
    let p = &cx.problem;
    let r = &cx.full.orders[1];
    let stated = minimal_polynomial(p, &[(0, 2), (1, 2), (-1, 2), (2, 2), (-2, 2), (3, 1), (-3, 1), (4, 1), (-4, 1)]);
    let m3 = sparse(
        p,
        10,
        20,
        &[
            (2, 9, "-1"),
            (3, 3, "2/m"),
            (4, 4, "-2/m"),
            (5, 15, "-1"),
            (6, 6, "1/m"),
            (6, 18, "-2"),
            (7, 7, "-1/m"),
            (7, 19, "-2"),
            (8, 8, "2/m"),
            (10, 10, "-2/m"),
        ],
    );
    let scale = c2(p).times(&el(p, "1/x"));
    let off = r.reduced().off_diagonal();
    let top = off.block(0, 10, 0, 20);
    let exact = top == m3.scale(&scale);
    let proportional = top == m3.scale(&scale.times(&el(p, "2/3")));
    let same_support = support(&top) == support(&m3);
    let mut failures = Vec::new();
    check(r.sub_dim() == 33, &format!("off-diagonal dimension is {} (stated 33)", r.sub_dim()), &mut failures);
    let mp = r.minimal_polynomial();
    let ours = minimal_polynomial(p, &[(0, 2), (1, 2), (-1, 2), (2, 2), (-2, 2), (3, 2), (-3, 2), (4, 1), (-4, 1)]);
    check(
        mp == stated,
        if mp == ours { "minimal polynomial has (X -+ 3f)^2 where (X -+ 3f) is stated" } else { "minimal polynomial" },
        &mut failures,
    );
    check(!r.state.adjoint.is_diagonalizable(), "Psi diagonalizable", &mut failures);
    check(same_support && r.lie.dim() == 1 && r.envelope_dim == Some(2), "M3 fallback match", &mut failures);
    check(r.lie.abelian, "Lie(A3,red) abelian", &mut failures);
    check(cx.full.verdict == Verdict::AbelianUpTo { order: 3 }, "verdict ABELIAN_UP_TO(3)", &mut failures);
    let policy = if exact {
        "exact"
    } else if proportional {
        "fallback (same support; displayed rows equal 2/3 (c2/x) M3)"
    } else if same_support {
        "fallback (same support)"
    } else {
        "none"
    };
    verdict(
        format!(
            "M3 match: {policy}, Lie dim {}, envelope {}, abelian {}, verdict {}",
            r.lie.dim(),
            envelope(r.envelope_dim),
            r.lie.abelian,
            if cx.full.verdict == (Verdict::AbelianUpTo { order: 3 }) { "ABELIAN_UP_TO(3)" } else { "other" }
        ),
        failures,
    )
}

fn criterion_4() -> Outcome {
    let n_cases = 60;
    for seed in 0..n_cases {
        let mut r = random::rng(1000 + seed);
        let n = 2 + (seed as usize % 2);
        let a = random::matrix(&mut r, n);
        let p = Gauge::new(random::invertible(&mut r, n)).map_err(|e| e.to_string())?;
        let q = Gauge::new(random::invertible(&mut r, n)).map_err(|e| e.to_string())?;
        let pa = p.apply(&a).unwrap();
        if p.compose(&q).apply(&a).unwrap() != p.apply(&q.apply(&a).unwrap()).unwrap() {
            return Err(format!("cocycle fails for seed {seed}"));
        }
        if Gauge::identity(n).apply(&a).unwrap() != a {
            return Err(format!("identity fails for seed {seed}"));
        }
        if p.inverse().apply(&pa).unwrap() != a {
            return Err(format!("inverse fails for seed {seed}"));
        }
    }
    Ok(format!("(PQ)[A] = P[Q[A]], Id[A] = A, P^-1[P[A]] = A on {n_cases} random instances over Q(x)"))
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    for seed in 0..24u64 {
        let mut r = random::rng(2000 + seed);
        let n = 2 + (seed as usize % 2);
        let pw = 2 + ((seed / 2) % 2) as u32;
        let a = random::matrix(&mut r, n);
        let pm = random::small_invertible(&mut r, n);
        let g = Gauge::new(pm.clone()).map_err(|e| e.to_string())?;
        let s = Gauge::new(sym_power_gauge(&pm, pw).unwrap()).map_err(|e| e.to_string())?;
        let lhs = sym_power(&g.apply(&a).unwrap(), pw).unwrap();
        let rhs = s.apply(&sym_power(&a, pw).unwrap()).unwrap();
        if lhs != rhs {
            return Err(format!("functoriality fails for seed {seed}, n = {n}, p = {pw}"));
        }
        count += 1;
    }
    Ok(format!("sym_power(P[A], p) = Sym^p(P)[sym_power(A, p)] on {count} instances, n in {{2, 3}}, p in {{2, 3}}"))
}

fn synthetic_reduced(seed: u64) -> Result<(ReductionState, MatrixK), String> {
    let mut st = random::synthetic_state(seed);
    let start = st.current.matrix.clone();
    full_reduce(&mut st, &SolveOptions::default()).map_err(|e| e.to_string())?;
    Ok((st, start))
}

fn criterion_6(cx: &Ctx) -> Outcome {
    let mut steps = 0;
    let mut built = 0;
    for r in &cx.full.orders {
        for s in &r.state.log {
            steps += 1;
            if s.removed > 0 {
                built += 1;
            }
            if !s.closed_form_matches {
                return Err(format!("order {}: closed form differs at eigenvalue {} level {}", r.order, s.lambda, s.level));
            }
        }
    }
    let mut synth = 0;
    for seed in 0..20 {
        let (st, start) = synthetic_reduced(3000 + seed)?;
        for s in &st.log {
            steps += 1;
            if s.removed > 0 {
                synth += 1;
            }
            if !s.closed_form_matches {
                return Err(format!("synthetic seed {seed}: closed form differs"));
            }
        }
        if st.gauge.apply(&start).unwrap() != st.current.matrix {
            return Err(format!("synthetic seed {seed}: gauge bookkeeping"));
        }
    }
    Ok(format!("{built} partial reductions on VE2/VE3 and {synth} on 20 synthetic instances; {steps} steps checked"))
}

fn criterion_7() -> Outcome {
    let opts = SolveOptions::default();
    let cases = oracle::cases();
    let total = cases.len();
    let mut no_solution = 0;
    for (k, case) in cases.into_iter().enumerate() {
        match case {
            oracle::Case::Homogeneous(coeffs, dim) => {
                let l = DiffOperator::new(coeffs.iter().map(|s| oracle::parse(s)).collect()).unwrap();
                let engine = rational_solutions(&l, &opts).map_err(|e| e.to_string())?.basis;
                let orc = oracle::oracle_rational_solutions(&l);
                if engine.len() != dim || oracle::function_rank(&orc) != dim || !oracle::same_function_span(&engine, &orc) {
                    return Err(format!("case {k} (homogeneous) disagrees"));
                }
                if dim == 0 {
                    no_solution += 1;
                }
            }
            oracle::Case::Param(lambda, bs, dim) => {
                let lambda = oracle::parse(lambda);
                let bs: Vec<_> = bs.iter().map(|s| oracle::parse(s)).collect();
                let engine = oracle::engine_tuples(&parametrized_first_order(&lambda, &bs, &opts).map_err(|e| e.to_string())?);
                let orc = oracle::oracle_parametrized(&lambda, &bs);
                if oracle::tuple_rank(&engine) != dim || oracle::tuple_rank(&orc) != dim || !oracle::same_tuple_span(&engine, &orc) {
                    return Err(format!("case {k} (parametrized) disagrees"));
                }
                if orc.iter().all(|(_, c)| c.iter().all(|x| x.is_zero())) {
                    no_solution += 1;
                }
            }
        }
    }
    if oracle::oracle_has_solution(&oracle::parse("1/x"), &oracle::parse("1")) {
        return Err("residue case y' = y/x + 1 has an oracle solution".into());
    }
    Ok(format!("{total} cases agree in dimension and span, {no_solution} of them without (inhomogeneous) solutions"))
}

fn idempotent(st: &ReductionState) -> Result<(), String> {
    for space in 0..st.spaces() {
        for level in 1..=st.depth(space) {
            let s = st.removable_dimension(space, level, &SolveOptions::default()).map_err(|e| e.to_string())?;
            if s != 0 {
                return Err(format!("s = {s} at eigenvalue {} level {level}", st.lambda(space)));
            }
        }
    }
    let mut again = ReductionState::new(st.current.clone()).map_err(|e| e.to_string())?;
    full_reduce(&mut again, &SolveOptions::default()).map_err(|e| e.to_string())?;
    if !again.gauge.matrix().is_identity() || again.current != st.current {
        return Err("second reduction changed the system".into());
    }
    Ok(())
}

fn criterion_8(cx: &Ctx) -> Outcome {
    for r in &cx.full.orders {
        idempotent(&r.state).map_err(|e| format!("order {}: {e}", r.order))?;
    }
    for seed in 0..10 {
        let (st, _) = synthetic_reduced(4000 + seed)?;
        idempotent(&st).map_err(|e| format!("synthetic seed {seed}: {e}"))?;
    }
    Ok("idempotent with s = 0 at every eigenvalue and level on VE2, VE3 and 10 synthetic instances".into())
}

fn criterion_9() -> Outcome {
    let p = fixtures::obstruction();
    let mut lines = Vec::new();
    for mode in [Mode::Full, Mode::Simplified] {
        let opts = DriverOptions { mode, ..Default::default() };
        let out = mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, 3, &opts).map_err(|e| e.to_string())?;
        let Verdict::Obstruction { order: 2, witness } = &out.verdict else {
            return Err(format!("{mode:?}: verdict {:?}", out.verdict));
        };
        let Witness::Unremovable { lambda, coefficient, b, .. } = witness else {
            return Err(format!("{mode:?}: no unremovable coordinate"));
        };
        if *lambda != oracle::parse("1/x") || oracle::oracle_has_solution(coefficient, b) {
            return Err(format!("{mode:?}: witness lambda = {lambda}, b = {b} not confirmed"));
        }
        lines.push(format!("{mode:?}: lambda = {lambda}, b = {b}"));
    }
    Ok(format!("OBSTRUCTION(2) in both modes, oracle confirms no rational solution ({})", lines.join("; ")))
}

fn main() {
    let problem = fixtures::potential();
    let start = Instant::now();
    let full = match mrs_driver(&problem.system, &problem.curve, &problem.ve1_gauge, None, 3, &DriverOptions::default()) {
        Ok(o) => o,
        Err(e) => {
            println!("driver failed on the worked example: {e}");
            std::process::exit(1);
        }
    };
    let cx = Ctx { problem, full, full_time: start.elapsed() };
    let criteria: Vec<(u32, &str, Box<dyn Fn(&Ctx) -> Outcome>)> = vec![
        (1, "first variational equation and gauge", Box::new(criterion_1)),
        (2, "second variational equation", Box::new(criterion_2)),
        (3, "third variational equation", Box::new(criterion_3)),
        (4, "gauge laws", Box::new(|_| criterion_4())),
        (5, "symmetric power functoriality", Box::new(|_| criterion_5())),
        (6, "closed-form update", Box::new(criterion_6)),
        (7, "rational solution oracle", Box::new(|_| criterion_7())),
        (8, "fixpoint and stopping test", Box::new(criterion_8)),
        (9, "obstruction path", Box::new(|_| criterion_9())),
    ];
    let mut passed = 0;
    let mut unexpected = Vec::new();
    for (n, name, f) in &criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&cx)))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => {
                passed += 1;
                println!("criterion {n}: PASS  {name}: {d} [{:.2?}]", t.elapsed());
            }
            Err(d) => {
                let known = KNOWN_FAILURES.contains(n);
                if !known {
                    unexpected.push(*n);
                }
                println!("criterion {n}: FAIL  {name}: {d}{} [{:.2?}]", if known { " (known)" } else { "" }, t.elapsed());
            }
        }
    }
    println!("{passed} of {} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
