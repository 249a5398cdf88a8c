//! Acceptance suite. One line per criterion; exits 1 if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use necklace_core::characterizations::{
    in_s_ell, p_cn_small, p_nn_n_minus_1, p_nn_n_minus_2, p_path, DerivedQuantities,
};
use necklace_core::oracle::Oracle;
use necklace_core::reductions::{
    anchor_reduce, invariant_vectors, merge_reduce, reduce_pipeline, zero_reduce,
    zero_reduce_subset,
};
use necklace_core::strategy::{delta_alg, small_delta, two_delta, unit_adjust, winning_move};
use necklace_core::{Family, GameSpec, Outcome, Position, Result};

const SWEEP_SECONDS: f64 = 60.0;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, name: &str, outcome: std::result::Result<String, String>) {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
}

fn nn(n: usize, k: usize) -> GameSpec {
    GameSpec::build(Family::Necklace { n, k }).unwrap()
}

fn pos(s: &str) -> Position {
    s.parse().unwrap()
}

type Predicate = fn(&GameSpec, &Position) -> Result<bool>;

fn s_ell(spec: &GameSpec, p: &Position) -> Result<bool> {
    Ok(in_s_ell(spec, p)?.holds)
}

/// Exhaustive closed form vs oracle over the box `[0, cap]^n`.
fn sweep(family: Family, cap: u64, predicate: Predicate) -> std::result::Result<String, String> {
    let started = Instant::now();
    let spec = GameSpec::build(family).map_err(|e| e.to_string())?;
    let oracle = Oracle::new(spec.clone());
    let table = oracle.solve_box(cap).map_err(|e| e.to_string())?;
    let mut disagreements = Vec::new();
    for (p, outcome) in table.iter() {
        let holds = predicate(&spec, &p).map_err(|e| e.to_string())?;
        if holds != (outcome == Outcome::P) {
            disagreements.push(p);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let detail = format!(
        "{} cap {cap}: {} positions, {} disagreements, {secs:.1}s",
        family,
        table.len(),
        disagreements.len()
    );
    if !disagreements.is_empty() {
        let shown: Vec<String> = disagreements.iter().take(3).map(|p| p.to_string()).collect();
        return Err(format!("{detail}; e.g. {}", shown.join(" ")));
    }
    if secs > SWEEP_SECONDS {
        return Err(format!("{detail}; over {SWEEP_SECONDS}s"));
    }
    Ok(detail)
}

fn closed_form_sweeps(report: &mut Report) {
    let nn = |n, k| Family::Necklace { n, k };
    let pn = |n, k| Family::Path { n, k };
    let cn = |n, k| Family::Circular { n, k };
    let cases: Vec<(Family, u64, Predicate)> = vec![
        (nn(4, 2), 6, s_ell),
        (nn(5, 3), 5, s_ell),
        (nn(6, 3), 4, s_ell),
        (nn(7, 4), 3, s_ell),
        (nn(8, 4), 3, s_ell),
        (nn(4, 3), 5, p_nn_n_minus_1),
        (nn(5, 4), 4, p_nn_n_minus_1),
        (nn(6, 5), 3, p_nn_n_minus_1),
        (nn(7, 6), 3, p_nn_n_minus_1),
        (nn(6, 4), 3, p_nn_n_minus_2),
        (nn(7, 5), 3, p_nn_n_minus_2),
        (pn(3, 2), 6, p_path),
        (pn(4, 2), 5, p_path),
        (pn(5, 3), 4, p_path),
        (pn(6, 3), 3, p_path),
        (pn(6, 4), 3, p_path),
        (cn(3, 2), 6, p_cn_small),
        (cn(4, 2), 5, p_cn_small),
    ];
    for (family, cap, predicate) in cases {
        report.line("closed form vs oracle", sweep(family, cap, predicate));
    }
}

fn check(cond: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

type Row = (&'static str, i64, &'static [i64], i64, &'static str);

fn compare_rows(
    trace: &necklace_core::strategy::AlgorithmTrace,
    want: &[Row],
) -> std::result::Result<(), String> {
    check(trace.rows.len() == want.len(), || {
        format!("{} rows, expected {}", trace.rows.len(), want.len())
    })?;
    for (row, &(label, big, m, small, r)) in trace.rows.iter().zip(want) {
        let got = (
            row.label.as_str(),
            row.delta_sum,
            row.m.as_slice(),
            row.delta_me,
            row.r.clone(),
        );
        let exp = (label, Some(big), m, Some(small), Some(pos(r).into_heights()));
        check(got == exp, || format!("row {label:?}: got {got:?}, expected {exp:?}"))?;
    }
    Ok(())
}

fn worked_examples(report: &mut Report) {
    let name = "algorithm tables";

    let first = || -> std::result::Result<String, String> {
        let out = two_delta(&pos("4,21,3,2,3,4,2,7,6,5")).map_err(|e| e.to_string())?;
        compare_rows(
            &out.trace,
            &[
                ("", 9, &[25, 8, 7, 7, 7], 7, "4,21,3,2,3,4,2,7,6,5"),
                ("5", 6, &[22, 5, 4, 4], 4, "4,21,3,2,0,4,2,7,6,5"),
                ("4", 4, &[20, 3, 2], 2, "4,21,3,0,0,4,2,7,6,5"),
                ("3", 1, &[17, 0], 0, "4,21,0,0,0,4,2,7,6,5"),
            ],
        )?;
        check((out.delta_sum, out.delta_me) == (1, 0), || {
            format!("ends with Δ={}, δ={}", out.delta_sum, out.delta_me)
        })?;
        Ok("two-delta on (4,21,3,2,3,4,2,7,6,5): 4 rows, Δ=1, δ=0".into())
    };
    report.line(name, first());

    let second = || -> std::result::Result<String, String> {
        let out = two_delta(&pos("2,15,8,4,5,4,5,5,5,8")).map_err(|e| e.to_string())?;
        compare_rows(
            &out.trace,
            &[
                ("", 7, &[30, 19, 16, 16, 16], 16, "2,15,8,4,5,4,5,5,5,8"),
                ("5", 2, &[25, 14, 11, 11], 11, "2,15,8,4,0,4,5,5,5,8"),
                ("4", 0, &[23, 12, 9], 9, "2,15,8,2,0,4,5,5,5,8"),
            ],
        )?;
        check((out.delta_sum, out.delta_me) == (0, 9), || {
            format!("ends with Δ={}, δ={}", out.delta_sum, out.delta_me)
        })?;
        Ok("two-delta on (2,15,8,4,5,4,5,5,5,8): 3 rows, Δ=0, δ=9".into())
    };
    report.line(name, second());

    let third = || -> std::result::Result<String, String> {
        let (r, _) = delta_alg(&pos("4,21,0,0,0,4,2,7,6,5")).map_err(|e| e.to_string())?;
        check(r == pos("4,20,0,0,0,4,2,7,6,5"), || format!("got {r}"))?;
        Ok("delta algorithm ends at (4,20,0,0,0,4,2,7,6,5)".into())
    };
    report.line(name, third());

    let fourth = || -> std::result::Result<String, String> {
        let out = small_delta(&pos("2,15,8,2,0,4,5,5,5,8")).map_err(|e| e.to_string())?;
        type Block = (&'static str, &'static [i64], &'static str, &'static [i64], i64, &'static str);
        let blocks: [Block; 4] = [
            ("x=4", &[21, 10, 7], "y=1", &[8, 5, 5, 5], 5, "2,15,8,0,0,2,5,5,5,8"),
            ("x=3", &[19, 6], "y=1", &[4, 3, 3, 3], 3, "2,15,6,0,0,0,5,5,5,8"),
            ("x=3", &[18, 3], "y=2", &[2, 2, 2], 2, "2,15,5,0,0,0,4,5,5,8"),
            ("x=3", &[17, 2], "y=2", &[1, 1, 1], 1, "2,15,4,0,0,0,3,5,5,8"),
        ];
        let rows = &out.trace.rows;
        check(rows.len() == 9, || format!("{} rows, expected 9", rows.len()))?;
        check(rows[0].m == [23, 12, 9, 9, 9], || format!("initial m {:?}", rows[0].m))?;
        for (b, &(xl, xm, yl, ym, d, r)) in blocks.iter().enumerate() {
            let (x, y) = (&rows[1 + 2 * b], &rows[2 + 2 * b]);
            check(x.label == xl && x.m == xm, || format!("block {b}: {} {:?}", x.label, x.m))?;
            check(
                y.label == yl && y.m == ym && y.delta_me == Some(d) && y.r == Some(pos(r).into_heights()),
                || format!("block {b}: {} {:?} {:?} {:?}", y.label, y.m, y.delta_me, y.r),
            )?;
        }
        check(out.delta_me == 1, || format!("ends with δ={}", out.delta_me))?;
        Ok("delta-small algorithm: 4 blocks, ends at (2,15,4,0,0,0,3,5,5,8) with δ=1".into())
    };
    report.line(name, fourth());

    let fifth = || -> std::result::Result<String, String> {
        let p = unit_adjust(&pos("2,15,4,0,0,0,3,5,5,8"), 3, 2).map_err(|e| e.to_string())?;
        check(p == pos("2,15,3,0,0,0,2,5,5,8"), || format!("got {p}"))?;
        let dq = DerivedQuantities::of(p.heights()).map_err(|e| e.to_string())?;
        check((dq.a_sum, dq.b_sum, dq.m, dq.s_star) == (20, 20, 2, 2), || {
            format!("A={} B={} m={} s*={}", dq.a_sum, dq.b_sum, dq.m, dq.s_star)
        })?;
        Ok("unit adjustment gives (2,15,3,0,0,0,2,5,5,8), A=B=20, m=s*=2".into())
    };
    report.line(name, fifth());
}

fn strategy_soundness(report: &mut Report) {
    for (n, k, cap) in [(4, 2, 6), (6, 3, 4), (8, 4, 3)] {
        let run = || -> std::result::Result<String, String> {
            let spec = nn(n, k);
            let oracle = Oracle::new(spec.clone());
            let table = oracle.solve_box(cap).map_err(|e| e.to_string())?;
            let (mut n_count, mut p_count) = (0, 0);
            for (p, outcome) in table.iter() {
                let found = winning_move(&spec, &p, Some(&oracle)).map_err(|e| format!("{p}: {e}"))?;
                match outcome {
                    Outcome::N => {
                        n_count += 1;
                        let m = found.ok_or_else(|| format!("{p}: no move from an N-position"))?;
                        spec.check_move(&p, &m.mv).map_err(|e| format!("{p}: {e}"))?;
                        let child = spec.apply_move(&p, &m.mv).map_err(|e| e.to_string())?;
                        check(child == m.target, || format!("{p}: move reaches {child}, not {}", m.target))?;
                        check(s_ell(&spec, &child).unwrap_or(false), || format!("{p} -> {child} not in S_ell"))?;
                        check(table.outcome(&child) == Some(Outcome::P), || {
                            format!("{p} -> {child} is not P")
                        })?;
                    }
                    Outcome::P => {
                        p_count += 1;
                        check(found.is_none(), || format!("{p}: move offered from a P-position"))?;
                        for mv in spec.legal_moves(&p) {
                            let child = spec.apply_move(&p, &mv).map_err(|e| e.to_string())?;
                            check(!s_ell(&spec, &child).unwrap_or(true), || {
                                format!("{p} -> {child} stays in S_ell")
                            })?;
                        }
                    }
                }
            }
            Ok(format!(
                "NN({n},{k}) cap {cap}: {n_count} N-positions won, {p_count} P-positions with no S_ell option, 0 failures"
            ))
        };
        report.line("strategy soundness", run());
    }
}

fn random_box(rng: &mut ChaCha8Rng, n: usize, lo: u64, hi: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn reductions(report: &mut Report) {
    let zero = || -> std::result::Result<String, String> {
        let spec = nn(6, 3);
        let full = Oracle::new(spec.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(1001);
        let mut agree = 0;
        let mut total = 0;
        while total < 200 {
            let mut h = random_box(&mut rng, 6, 1, 3);
            for _ in 0..rng.gen_range(1..=3) {
                h[rng.gen_range(0..6)] = 0;
            }
            let p = Position::new(h);
            if p.is_terminal() {
                continue;
            }
            total += 1;
            let r = zero_reduce(&spec, &p).map_err(|e| e.to_string())?;
            let small = Oracle::new(r.spec.clone());
            if full.classify(&p).map_err(|e| e.to_string())? == small.classify(&r.position).map_err(|e| e.to_string())? {
                agree += 1;
            }
        }
        check(agree == total, || format!("{agree}/{total}"))?;
        Ok(format!("zero reduction on NN(6,3): {agree}/{total} outcomes agree"))
    };
    report.line("reduction preservation", zero());

    let merge = || -> std::result::Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(1002);
        let oracles = [Oracle::new(nn(6, 3)), Oracle::new(nn(8, 4))];
        let pn32 = GameSpec::build(Family::Path { n: 3, k: 2 }).unwrap();
        let pn42 = GameSpec::build(Family::Path { n: 4, k: 2 }).unwrap();
        let mut agree = 0;
        for sample in 0..200 {
            let kind = sample % 3;
            let ell = if kind == 0 { 4 } else { 3 + (sample / 3) % 2 };
            let n = 2 * ell;
            let big = &oracles[ell - 3];
            let mut h = random_box(&mut rng, n, 0, 3);
            let (spec, reduced) = match kind {
                0 => {
                    // b_2 empty, then a_2 and a_3 merge
                    h[ell + 1] = 0;
                    let p = Position::new(h.clone());
                    let z = zero_reduce_subset(big.spec(), &p, &[ell + 1]).map_err(|e| e.to_string())?;
                    let m = merge_reduce(&z.spec, &[1, 2]).map_err(|e| e.to_string())?;
                    let reduced = m.map(&z.position).map_err(|e| e.to_string())?;
                    check(m.spec.same_move_sets(&nn(n - 2, ell - 1)), || {
                        format!("merge of {p} is not NN({},{})", n - 2, ell - 1)
                    })?;
                    (m.spec, reduced)
                }
                _ => {
                    let (zeros, path, order): (std::ops::Range<usize>, &GameSpec, &[usize]) = if kind == 1 {
                        (1..ell, &pn32, &[0, 2, 1])
                    } else {
                        (2..ell + 1, &pn42, &[2, 3, 0, 1])
                    };
                    // surviving stacks stay non-empty so the reduced shape is fixed
                    h = random_box(&mut rng, n, 1, 3);
                    for v in zeros {
                        h[v] = 0;
                    }
                    let p = Position::new(h.clone());
                    let pipe = reduce_pipeline(big.spec(), &p).map_err(|e| e.to_string())?;
                    let relabeled = pipe.spec.relabel(order).map_err(|e| e.to_string())?;
                    check(relabeled.same_move_sets(path), || {
                        format!("pipeline of {p} gives {:?}", pipe.spec.move_sets_one_based())
                    })?;
                    (pipe.spec, pipe.position)
                }
            };
            let p = Position::new(h);
            let small = Oracle::new(spec);
            let lhs = big.classify(&p).map_err(|e| e.to_string())?;
            let rhs = small.classify(&reduced).map_err(|e| e.to_string())?;
            if lhs == rhs {
                agree += 1;
            }
        }
        check(agree == 200, || format!("{agree}/200"))?;
        Ok(format!("merge pipelines (three shapes): {agree}/200 outcomes agree"))
    };
    report.line("reduction preservation", merge());

    let anchor = || -> std::result::Result<String, String> {
        let big = Oracle::new(nn(7, 5));
        let small = Oracle::new(nn(5, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(1003);
        let mut agree = 0;
        for _ in 0..200 {
            let p = Position::new(random_box(&mut rng, 7, 0, 3));
            let r = anchor_reduce(big.spec(), &p).map_err(|e| e.to_string())?;
            check(r.spec.same_move_sets(small.spec()), || "anchor spec is not NN(5,3)".into())?;
            if big.classify(&p).map_err(|e| e.to_string())? == small.classify(&r.position).map_err(|e| e.to_string())? {
                agree += 1;
            }
        }
        check(agree == 200, || format!("{agree}/200"))?;
        Ok(format!("anchor NN(7,5) -> NN(5,3) cap 3: {agree}/200 outcomes agree"))
    };
    report.line("reduction preservation", anchor());
}

/// A random member of S_l: inner stacks drawn, ends solved from SE and ME.
fn plant_member(rng: &mut ChaCha8Rng, n: usize, hi: u64) -> Position {
    let ell = n / 2;
    let mut h = random_box(rng, n, 0, hi);
    h[0] = 0;
    h[n - 1] = 0;
    let s_star = DerivedQuantities::of(&h).unwrap().s_star;
    let rest_a: u64 = h[1..ell].iter().sum();
    let rest_b: u64 = h[n - ell..n - 1].iter().sum();
    if rest_a >= rest_b {
        h[0] = s_star;
        h[n - 1] = s_star + rest_a - rest_b;
    } else {
        h[n - 1] = s_star;
        h[0] = s_star + rest_b - rest_a;
    }
    Position::new(h)
}

fn invariance(report: &mut Report) {
    for (n, k, seed) in [(6, 3, 2001), (7, 4, 2002)] {
        let run = || -> std::result::Result<String, String> {
            let spec = nn(n, k);
            let zs = invariant_vectors(&spec).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checks = 0;
            for _ in 0..500 {
                let p = plant_member(&mut rng, n, 6);
                check(s_ell(&spec, &p).unwrap_or(false), || format!("planted {p} is not a member"))?;
                for z in &zs {
                    let ones = z.ones();
                    let up: u64 = rng.gen_range(1..=5);
                    let room = ones.iter().map(|&v| p.get(v)).min().unwrap_or(0);
                    let mut shifted = vec![p.heights().to_vec()];
                    let mut plus = p.heights().to_vec();
                    for &v in &ones {
                        plus[v] += up;
                    }
                    shifted[0] = plus;
                    if room > 0 {
                        let down = rng.gen_range(1..=room);
                        let mut minus = p.heights().to_vec();
                        for &v in &ones {
                            minus[v] -= down;
                        }
                        shifted.push(minus);
                    }
                    for q in shifted {
                        let q = Position::new(q);
                        checks += 1;
                        check(s_ell(&spec, &q).unwrap_or(false), || {
                            format!("{p} ± c·z_{} = {q} leaves S_ell", z.index)
                        })?;
                    }
                }
            }
            Ok(format!("NN({n},{k}): 500 members, {checks} shifts, 100% preserved"))
        };
        report.line("invariance", run());
    }
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    closed_form_sweeps(&mut report);
    worked_examples(&mut report);
    strategy_soundness(&mut report);
    reductions(&mut report);
    invariance(&mut report);
    if report.failures == 0 {
        println!("all acceptance criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance check(s) failed", report.failures);
        ExitCode::FAILURE
    }
}
