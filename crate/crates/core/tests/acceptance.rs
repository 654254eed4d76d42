//! Acceptance suite. Every criterion prints one line:
//!
//!     criterion N (title): PASS|FAIL in 0.12s [budget 2s]; failed checks
//!
//! and then fails the test if any check failed. Tolerances and time budgets
//! are fixed below.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semiforge_core::builtins::{builtin, semifield_19203_matrices};
use semiforge_core::criteria::{
    algebraic_degree, differential_invariant, evaluate_all, linear_invariant, walsh_spectrum,
    CriteriaReport, VectorialFn,
};
use semiforge_core::extension::{
    build_pseudo_cube_fn, build_pseudo_inverse_sbox, is_pseudo_irreducible,
    list_pseudo_irreducible, Grouping, InverseConvention, PseudoPoly, Scaling,
};
use semiforge_core::gf2::{
    recurrence_xor_bound, sweep_xor_count, BitMatrix, DetLadder, MulTables,
};
use semiforge_core::semifield::{
    enumerate_semifields, field16_reference, is_semifield, InverseSide, Semifield,
};

/// Half a unit in the fifth decimal, the precision of the printed values.
const TRANSPARENCY_TOL: f64 = 5e-6;

const AES_TRANSPARENCY: f64 = 7.85319;
const CAMELLIA_TRANSPARENCY: f64 = 7.85564;
const TABLE2_TRANSPARENCY: f64 = 7.84804;

struct Criterion {
    number: u32,
    title: &'static str,
    budget: Duration,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn start(number: u32, title: &'static str, budget_secs: u64) -> Self {
        Criterion {
            number,
            title,
            budget: Duration::from_secs(budget_secs),
            start: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        if got != want {
            self.failures.push(format!("{what} = {got:?}, expected {want:?}"));
        }
    }

    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        if (got - want).abs() > tol {
            self.failures
                .push(format!("{what} = {got:.6}, expected {want:.5} +/- {tol:e}"));
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if elapsed > self.budget {
            self.failures.push(format!(
                "runtime {:.2}s over budget {}s",
                elapsed.as_secs_f64(),
                self.budget.as_secs()
            ));
        }
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "criterion {} ({}): {status} in {:.2}s [budget {}s]",
            self.number,
            self.title,
            elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        if !self.failures.is_empty() {
            line.push_str("; ");
            line.push_str(&self.failures.join("; "));
        }
        println!("{line}");
        assert!(self.failures.is_empty(), "{line}");
    }
}

struct Row {
    delta: u32,
    lambda: u32,
    alg_degree: u32,
    poly_degree: u32,
    fixed_points: Option<u32>,
    avalanche: u32,
    bit_independence: u32,
    transparency: f64,
}

fn check_row(c: &mut Criterion, r: &CriteriaReport, want: Row) {
    c.eq("delta", r.delta, want.delta);
    c.eq("lambda", r.lambda, want.lambda);
    c.eq("algebraic degree", r.alg_degree, want.alg_degree);
    c.eq("polynomial degree", r.poly_degree, want.poly_degree);
    if let Some(fp) = want.fixed_points {
        c.eq("fixed points", r.fixed_points, fp);
    }
    c.eq("avalanche", r.avalanche, want.avalanche);
    c.eq("bit independence", r.bit_independence, want.bit_independence);
    c.near("transparency", r.transparency, want.transparency, TRANSPARENCY_TOL);
}

#[test]
fn criterion_1_aes_row() {
    let mut c = Criterion::start(1, "AES row", 2);
    let r = evaluate_all(&builtin("aes").unwrap()).unwrap();
    check_row(
        &mut c,
        &r,
        Row {
            delta: 4,
            lambda: 16,
            alg_degree: 7,
            poly_degree: 254,
            fixed_points: Some(0),
            avalanche: 8,
            bit_independence: 8,
            transparency: AES_TRANSPARENCY,
        },
    );
    c.finish();
}

#[test]
fn criterion_2_camellia_row() {
    let mut c = Criterion::start(2, "Camellia row", 2);
    let r = evaluate_all(&builtin("camellia").unwrap()).unwrap();
    check_row(
        &mut c,
        &r,
        Row {
            delta: 4,
            lambda: 16,
            alg_degree: 7,
            poly_degree: 254,
            fixed_points: None,
            avalanche: 6,
            bit_independence: 8,
            transparency: CAMELLIA_TRANSPARENCY,
        },
    );
    c.finish();
}

#[test]
fn criterion_3_embedded_sbox() {
    let mut c = Criterion::start(3, "embedded semifield S-Box", 2);
    let f = builtin("paper-19203").unwrap();
    let r = evaluate_all(&f).unwrap();
    check_row(
        &mut c,
        &r,
        Row {
            delta: 4,
            lambda: 16,
            alg_degree: 7,
            poly_degree: 254,
            fixed_points: Some(0),
            avalanche: 6,
            bit_independence: 8,
            transparency: TABLE2_TRANSPARENCY,
        },
    );
    c.check(f.is_bijective(), "table is not a permutation");
    c.finish();
}

#[test]
fn criterion_4_embedded_apn() {
    let mut c = Criterion::start(4, "embedded APN function", 1);
    let f = builtin("paper-apn").unwrap();
    c.eq("delta", differential_invariant(&f), 2);
    c.check(!f.is_bijective(), "function is bijective");
    c.eq("F(0x00)", f.get(0x00), 0x00);
    c.eq("F(0x01)", f.get(0x01), 0x01);
    c.eq("F(0x10)", f.get(0x10), 0xcf);
    c.finish();
}

/// `L_x`, the sum of the `A_i` over the coordinates set in `x`. With `msb`
/// the first coordinate is bit 3 of `x` and matrix entries are read with
/// reversed row and column order.
fn left_matrix(mats: &[BitMatrix], x: u8, msb: bool) -> BitMatrix {
    let rev = BitMatrix::from_rows(&[8, 4, 2, 1]).unwrap();
    let mut l = BitMatrix::zero(4);
    for (i, m) in mats.iter().enumerate() {
        let coord = if msb { 3 - i } else { i };
        if (x >> coord) & 1 == 1 {
            let m = if msb {
                rev.checked_mul(m).unwrap().checked_mul(&rev).unwrap()
            } else {
                m.clone()
            };
            l = l.checked_add(&m).unwrap();
        }
    }
    l
}

#[test]
fn criterion_5_printed_semifield() {
    let mut c = Criterion::start(5, "printed semifield reconstruction", 5);
    let ladder = DetLadder::build(4, false).unwrap();
    let mats = semifield_19203_matrices();
    let p = PseudoPoly::new(6, 1);

    for msb in [false, true] {
        let order = if msb { "MSB-first" } else { "LSB-first" };
        let singular: Vec<u8> = (1..16u8)
            .filter(|&x| !left_matrix(&mats, x, msb).det_gauss())
            .collect();
        c.check(
            singular.is_empty(),
            format!("{order}: combinations {singular:?} are singular"),
        );
        let mul = |x: u8, y: u8| left_matrix(&mats, x, msb).apply(y);
        let pirr = (0..16u8).all(|g| mul(p.alpha ^ g, g) ^ p.beta != 0);
        c.check(pirr, format!("{order}: (6,1) is not pseudo-irreducible"));
    }

    let valid = is_semifield(&mats, ladder.top()).unwrap();
    c.check(valid, "is_semifield rejects the printed matrices");
    if valid {
        let s = Semifield::from_matrices(mats, 0).unwrap();
        c.check(is_pseudo_irreducible(&s, p), "(6,1) not pseudo-irreducible");
        match build_pseudo_inverse_sbox(&s, p, InverseConvention::default()) {
            Ok(f) => {
                c.check(f.is_bijective(), "S-Box is not a permutation");
                c.eq("delta", differential_invariant(&f), 4);
                c.eq("lambda", linear_invariant(&f), 16);
                c.eq("algebraic degree", algebraic_degree(&f), 7);
            }
            Err(e) => c.check(false, format!("build failed: {e}")),
        }
    } else {
        c.check(false, "no S-Box built");
    }
    c.finish();
}

/// GF(16) with modulus x^4 + x + 1, by shift and add.
fn f16_mul(a: u8, b: u8) -> u8 {
    let mut acc = 0u8;
    for i in 0..4 {
        if (b >> i) & 1 == 1 {
            acc ^= a << i;
        }
    }
    for bit in (4..8).rev() {
        if (acc >> bit) & 1 == 1 {
            acc ^= 0b10011 << (bit - 4);
        }
    }
    acc
}

/// Multiplication in GF(16)[X] / (X^2 + alpha X + beta) on (a, b) = aX + b.
fn quotient_mul(p: PseudoPoly, (a1, b1): (u8, u8), (a2, b2): (u8, u8)) -> (u8, u8) {
    let x2 = f16_mul(a1, a2);
    let x1 = f16_mul(a1, b2) ^ f16_mul(b1, a2);
    let x0 = f16_mul(b1, b2);
    (x1 ^ f16_mul(x2, p.alpha), x0 ^ f16_mul(x2, p.beta))
}

fn split(x: u8) -> (u8, u8) {
    (x >> 4, x & 0xf)
}

fn join((a, b): (u8, u8)) -> u8 {
    (a << 4) | b
}

#[test]
fn criterion_6_field_sanity() {
    let mut c = Criterion::start(6, "field sanity", 30);
    let f16 = field16_reference();
    let polys = list_pseudo_irreducible(&f16);
    c.eq("pseudo-irreducible count", polys.len(), 120);
    // monic irreducible quadratics over GF(q): (q^2 - q) / 2
    c.eq("(q^2 - q) / 2", (16 * 16 - 16) / 2, polys.len());
    let irreducible: Vec<PseudoPoly> = (0..16u8)
        .flat_map(|a| (0..16u8).map(move |b| PseudoPoly::new(a, b)))
        .filter(|&p| (0..16u8).all(|x| f16_mul(x, x) ^ f16_mul(p.alpha, x) ^ p.beta != 0))
        .collect();
    c.eq("polys agree with root test", &polys, &irreducible);

    let conventions = [
        InverseConvention::new(InverseSide::Right, Scaling::Chained),
        InverseConvention::new(InverseSide::Left, Scaling::Chained),
        InverseConvention::new(InverseSide::Right, Scaling::Distributed),
        InverseConvention::new(InverseSide::Left, Scaling::Distributed),
    ];
    let mut inverse_mismatch = 0;
    let mut cube_mismatch = 0;
    let mut not_apn = 0;
    for &p in &irreducible {
        // inverse by search over the quotient field
        let mut inv = [0u8; 256];
        for x in 1..=255u8 {
            inv[x as usize] = (1..=255u8)
                .find(|&y| quotient_mul(p, split(x), split(y)) == (0, 1))
                .unwrap();
        }
        for conv in conventions {
            let sbox = build_pseudo_inverse_sbox(&f16, p, conv).unwrap();
            inverse_mismatch += (0..=255u8).filter(|&x| sbox.get(x) != inv[x as usize]).count();
        }
        for grouping in [Grouping::Printed, Grouping::Opposite] {
            let cube = build_pseudo_cube_fn(&f16, p, grouping).unwrap();
            cube_mismatch += (0..=255u8)
                .filter(|&x| {
                    let v = split(x);
                    cube.get(x) != join(quotient_mul(p, v, quotient_mul(p, v, v)))
                })
                .count();
            not_apn += (differential_invariant(&cube) != 2) as usize;
        }
    }
    c.eq("pseudo-inverse entries differing from the quotient inverse", inverse_mismatch, 0);
    c.eq("pseudo-cube entries differing from the quotient cube", cube_mismatch, 0);
    c.eq("pseudo-cubes that are not APN", not_apn, 0);
    c.finish();
}

#[test]
fn criterion_7_determinant_engine() {
    let mut c = Criterion::start(7, "determinant engine", 10);
    let ladder = DetLadder::build(4, false).unwrap();
    let t4 = ladder.top();
    let disagreements = (0..1u64 << 16)
        .filter(|&i| t4.get_index(i) != BitMatrix::from_index(4, i).unwrap().det_gauss())
        .count();
    c.eq("table vs Gaussian elimination disagreements", disagreements, 0);
    let gl4: u64 = (0..4).map(|i| 16 - (1u64 << i)).product();
    c.eq("|GL(4,2)| from the order formula", gl4, 20160);
    c.eq("invertible entries in the table", t4.count_invertible(), gl4);

    let mut cumulative = 0;
    let mut d = 0u64; // D_1
    for n in 2..=4usize {
        let level = ladder.level(n).unwrap();
        let want = (1u64 << (n * n)) - (1u64 << (n * (n - 1)));
        c.eq(&format!("xor count at level {n}"), level.xor_count(), want);
        c.eq(&format!("sweep_xor_count({n})"), sweep_xor_count(n), want);
        d += (1u64 << (n * n)) - 1;
        cumulative += level.xor_count();
        c.check(
            cumulative <= d,
            format!("cumulative xor count {cumulative} above D_{n} = {d}"),
        );
        c.eq(&format!("recurrence bound D_{n}"), recurrence_xor_bound(n), d);
    }
    c.eq("D_2, D_3, D_4", (recurrence_xor_bound(2), recurrence_xor_bound(3), recurrence_xor_bound(4)), (15, 526, 66061));
    c.finish();
}

fn random_invertible(rng: &mut impl Rng) -> BitMatrix {
    loop {
        let rows: Vec<u8> = (0..8).map(|_| rng.gen()).collect();
        let m = BitMatrix::from_rows(&rows).unwrap();
        if m.det_gauss() {
            return m;
        }
    }
}

fn random_permutation(rng: &mut impl Rng) -> VectorialFn {
    let mut t: Vec<u8> = (0..=255).collect();
    for i in (1..256).rev() {
        t.swap(i, rng.gen_range(0..=i));
    }
    VectorialFn::from_table(t).unwrap()
}

fn check_axioms(s: &Semifield) -> Vec<String> {
    let mut bad = Vec::new();
    for x in 0..16u8 {
        if s.mul(1, x) != x || s.mul(x, 1) != x {
            bad.push(format!("semifield {}: 1 is not an identity for {x}", s.id()));
        }
        for y in 0..16u8 {
            if x != 0 && y != 0 && s.mul(x, y) == 0 {
                bad.push(format!("semifield {}: {x} * {y} = 0", s.id()));
            }
            for z in 0..16u8 {
                if s.mul(x, y ^ z) != s.mul(x, y) ^ s.mul(x, z)
                    || s.mul(x ^ y, z) != s.mul(x, z) ^ s.mul(y, z)
                {
                    bad.push(format!("semifield {}: distributivity at {x},{y},{z}", s.id()));
                }
            }
        }
    }
    bad
}

#[test]
fn criterion_8_property_suites() {
    let mut c = Criterion::start(8, "property suites", 60);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let ladder = DetLadder::build(4, false).unwrap();
    let sfs = enumerate_semifields(4, ladder.top()).unwrap();
    let step = sfs.len() / 200;
    let sample: Vec<&Semifield> = sfs.iter().step_by(step).take(200).collect();
    c.eq("semifields sampled", sample.len(), 200);
    let axiom_failures: Vec<String> = sample.iter().flat_map(|s| check_axioms(s)).collect();
    c.check(axiom_failures.is_empty(), axiom_failures.into_iter().take(3).collect::<Vec<_>>().join(", "));

    for _ in 0..20 {
        let f = random_permutation(&mut rng);
        let w = walsh_spectrum(&f);
        for b in 1..=255u8 {
            let sum: i64 = w.column(b).iter().map(|&v| (v as i64) * (v as i64)).sum();
            c.check(sum == 65536, format!("Parseval sum {sum} at b = {b}"));
        }
    }

    let bases = [builtin("aes").unwrap(), builtin("paper-19203").unwrap()];
    for i in 0..50 {
        let f = &bases[i % 2];
        let (a1, a2) = (random_invertible(&mut rng), random_invertible(&mut rng));
        let (c1, c2): (u8, u8) = (rng.gen(), rng.gen());
        let g = VectorialFn::from_fn(8, |x| a2.apply(f.get(a1.apply(x) ^ c1)) ^ c2).unwrap();
        c.eq("delta under affine composition", differential_invariant(&g), differential_invariant(f));
        c.eq("lambda under affine composition", linear_invariant(&g), linear_invariant(f));
        c.eq("degree under affine composition", algebraic_degree(&g), algebraic_degree(f));
    }

    let mut mul_mismatch = 0;
    for r in 0..1u64 << 9 {
        let right = BitMatrix::from_index(3, r).unwrap();
        let tables = MulTables::new(right.clone());
        for l in 0..1u64 << 9 {
            let left = BitMatrix::from_index(3, l).unwrap();
            if tables.mul(&left).unwrap() != left.checked_mul(&right).unwrap() {
                mul_mismatch += 1;
            }
        }
    }
    c.eq("tabulated vs direct products at dim 3", mul_mismatch, 0);
    c.finish();
}

#[cfg(feature = "full-repro")]
#[test]
fn criterion_9_full_reproduction() {
    use semiforge_core::pipeline::{cmd_search, poly_stats, write_semifields, FilterConfig, FunctionKind, SearchConfig};

    let mut c = Criterion::start(9, "full reproduction (counts logged)", 6 * 3600);
    let ladder = DetLadder::build(4, false).unwrap();
    let sfs = enumerate_semifields(4, ladder.top()).unwrap();
    println!("semifields: {} (reference 19336, delta {:+})", sfs.len(), sfs.len() as i64 - 19336);
    let stats = poly_stats(&sfs).unwrap();
    println!(
        "pseudo-irreducible per semifield: min {} max {} mean {:.3} (reference 91 / 120 / 98)",
        stats.min, stats.max, stats.mean
    );
    c.check(stats.min >= 91 && stats.max <= 120, "pseudo-irreducible counts outside [91, 120]");
    c.near("mean pseudo-irreducible count", stats.mean, 98.0, 1.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sf.jsonl");
    write_semifields(&path, &sfs).unwrap();

    let inverse = SearchConfig {
        semifields: Some(path.clone()),
        filter: FilterConfig {
            max_delta: Some(4),
            max_lambda: Some(16),
            min_alg_degree: Some(7),
            max_bit_independence: Some(8),
            ..Default::default()
        },
        ..Default::default()
    };
    let out = cmd_search(&inverse, &dir.path().join("inverse"), false).unwrap();
    let l = &out.ledger;
    let b = &l.breakdown;
    let log = |name: &str, got: u64, reference: i64| {
        println!("{name}: {got} (reference {reference}, delta {:+})", got as i64 - reference)
    };
    log("pseudo-inverse survivors", l.survivors(), 12781);
    log("with fixed points", b["with_fixed_points"], 8364);
    log("no fixed points, avalanche 8", b["no_fixed_points_avalanche_8"], 4122);
    log("no fixed points, avalanche 6", b["no_fixed_points_avalanche_6"], 288);
    log("of those, transparency below AES", b["avalanche_8_or_6_transparency_below_aes"], 863);
    println!("bijectivity violations: {}", l.bijectivity_violations);

    let cube = SearchConfig {
        kind: FunctionKind::Cube,
        semifields: Some(path),
        filter: FilterConfig {
            max_delta: Some(2),
            ..Default::default()
        },
        ..Default::default()
    };
    let out = cmd_search(&cube, &dir.path().join("cube"), false).unwrap();
    log("APN pseudo-cubes", out.ledger.survivors(), 2684);
    log("APN with perfect avalanche", out.ledger.breakdown["perfect_avalanche"], 336);
    c.finish();
}
