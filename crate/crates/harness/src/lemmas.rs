//! Random-state invariant suite for the counting operators.

use mfl_core::counting::{
    alpha, apply_p, apply_q, beta, density_matrix, hat_apply, occupancy_sectors, shift_identity_check, trace_distance,
    weight_difference_bound_check, Condensate, PairPattern, TensorView, TwoBodyOperator, WeightFunction, WeightTag,
};
use mfl_core::manybody::symmetrize_values;
use mfl_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::LemmaConfig;
use crate::error::HarnessResult;

/// One row of the pass/fail table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaResult {
    pub name: &'static str,
    pub cases: usize,
    /// Largest violation seen (0 when every case holds exactly).
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaTable {
    pub seed: u64,
    pub results: Vec<LemmaResult>,
}

impl LemmaTable {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.results.iter().filter(|r| !r.passed).map(|r| r.name).collect()
    }

    pub fn get(&self, name: &str) -> Option<&LemmaResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{:<24} {:>6} {:>12} {:>10}  result\n", "invariant", "cases", "worst", "tolerance");
        for r in &self.results {
            s.push_str(&format!(
                "{:<24} {:>6} {:>12.3e} {:>10.1e}  {}\n",
                r.name,
                r.cases,
                r.worst,
                r.tolerance,
                if r.passed { "pass" } else { "FAIL" }
            ));
        }
        s
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    worst: f64,
    tolerance: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            worst: 0.0,
            tolerance,
        }
    }

    fn add(&mut self, violation: f64) {
        self.cases += 1;
        // NaN counts as a failure.
        self.worst = if violation.is_nan() { f64::INFINITY } else { self.worst.max(violation) };
    }

    fn finish(self) -> LemmaResult {
        LemmaResult {
            name: self.name,
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
            passed: self.cases > 0 && self.worst <= self.tolerance,
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Unit-weight condensate; the corrupted variant is pushed off the unit
/// sphere without going through the normalization check.
fn condensate(rng: &mut ChaCha8Rng, dim: usize, corrupt: bool) -> Condensate {
    let mut phi = random_vec(rng, dim);
    normalize(&mut phi);
    if corrupt {
        phi.iter_mut().for_each(|x| *x *= 1.05);
    }
    Condensate { phi, dv: 1.0 }
}

fn symmetric_state(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<C64> {
    let mut s = symmetrize_values(&random_vec(rng, dim.pow(n as u32)), n, dim);
    normalize(&mut s);
    s
}

fn tensor_product(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for f in factors {
        out = out.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    out
}

fn orthogonal_to(cond: &Condensate, seed: Vec<C64>) -> Vec<C64> {
    let mut v = seed;
    let ov: C64 = cond.phi.iter().zip(&v).map(|(a, c)| a.conj() * c).sum::<C64>() / cond.norm().powi(2);
    for (x, y) in v.iter_mut().zip(&cond.phi) {
        *x -= y * ov;
    }
    normalize(&mut v);
    v
}

/// Runs every invariant at the configured sizes. The table is returned
/// whether or not the invariants hold.
pub fn verify_lemmas(seed: u64, sizes: &LemmaConfig) -> HarnessResult<LemmaTable> {
    sizes.validate()?;
    let tol = sizes.tolerance;
    let exact = tol.min(1e-10);
    let m = sizes.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut norm = Tally::new("condensate-normalization", 1e-10);
    let mut complete = Tally::new("completeness", tol);
    let mut eigen = Tally::new("counting-eigen-action", tol);
    let mut product = Tally::new("hat-product", tol);
    let mut commute = Tally::new("hat-p-commutation", tol);
    let mut shift = Tally::new("shift-identity", tol);
    let mut sandwich = Tally::new("trace-sandwich", tol);
    let mut sharp = Tally::new("sharp-occupancy", exact);
    let mut qs = Tally::new("weight-difference-bound", exact);

    let ns: Vec<usize> = (sizes.n_min..=sizes.n_max).collect();
    let patterns = [PairPattern::PP, PairPattern::PQ, PairPattern::QP, PairPattern::QQ];
    for s in 0..sizes.states {
        let n = ns[s % ns.len()];
        let cond = condensate(&mut rng, m, sizes.corrupt_condensate);
        norm.add((cond.norm() - 1.0).abs());
        let psi = symmetric_state(&mut rng, n, m);
        let view = TensorView::new(n, m, 1.0, &psi)?;

        let sectors = occupancy_sectors(&view, &cond)?;
        let mut sum = vec![C64::new(0.0, 0.0); psi.len()];
        for sec in &sectors {
            sum.iter_mut().zip(sec).for_each(|(a, b)| *a += b);
        }
        complete.add(dist(&sum, &psi));
        for (k, sec) in sectors.iter().enumerate() {
            let mut acc = vec![C64::new(0.0, 0.0); psi.len()];
            for i in 0..n {
                let mut v = sec.clone();
                apply_q(&mut v, n, &cond, i);
                acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
            }
            let target: Vec<C64> = sec.iter().map(|v| v * k as f64).collect();
            eigen.add(dist(&acc, &target));
        }

        let f = WeightFunction::custom((0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let g = WeightFunction::custom((0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let gpsi = hat_apply(&g, &view, &cond)?;
        let fg = hat_apply(&f, &TensorView::new(n, m, 1.0, &gpsi)?, &cond)?;
        product.add(dist(&fg, &hat_apply(&f.product(&g), &view, &cond)?));
        let fpsi = hat_apply(&f, &view, &cond)?;
        for j in 0..n {
            let mut pf = fpsi.clone();
            apply_p(&mut pf, n, &cond, j);
            let mut p = psi.clone();
            apply_p(&mut p, n, &cond, j);
            let fp = hat_apply(&f, &TensorView::new(n, m, 1.0, &p)?, &cond)?;
            commute.add(dist(&pf, &fp));
        }
        let ops = [
            TwoBodyOperator::Identity,
            TwoBodyOperator::Multiplication(random_vec(&mut rng, m * m)),
            TwoBodyOperator::Dense(random_vec(&mut rng, m.pow(4))),
        ];
        for t in &ops {
            for &l in &patterns {
                for &r in &patterns {
                    shift.add(shift_identity_check(&f, l, r, t, &view, &cond)?);
                }
            }
        }

        let a = alpha(&view, &cond)?;
        let tr = trace_distance(&density_matrix(&view), &cond)?;
        sandwich.add((a - tr).max(tr - (8.0 * a).sqrt()).max(0.0));
    }

    for s in 0..sizes.qs_states {
        let n = ns[s % ns.len()];
        let cond = condensate(&mut rng, m, sizes.corrupt_condensate);
        let psi = symmetric_state(&mut rng, n, m);
        let view = TensorView::new(n, m, 1.0, &psi)?;
        for tag in [WeightTag::KOverN, WeightTag::SqrtKOverN] {
            for l in 1..=2 {
                let (lhs, rhs) = weight_difference_bound_check(tag, l, &view, &cond)?;
                qs.add((lhs - rhs).max(0.0));
            }
        }
    }

    for n in 1..=sizes.n_max {
        let cond = condensate(&mut rng, m, sizes.corrupt_condensate);
        for k in 0..=n {
            let mut factors = vec![cond.phi.clone(); n - k];
            for _ in 0..k {
                let seed = random_vec(&mut rng, m);
                factors.push(orthogonal_to(&cond, seed));
            }
            let mut psi = symmetrize_values(&tensor_product(&factors), n, m);
            normalize(&mut psi);
            let view = TensorView::new(n, m, 1.0, &psi)?;
            let x = k as f64 / n as f64;
            sharp.add((alpha(&view, &cond)? - x).abs());
            sharp.add((beta(&view, &cond)? - x.sqrt()).abs());
        }
    }

    Ok(LemmaTable {
        seed,
        results: [norm, complete, eigen, product, commute, shift, sandwich, sharp, qs]
            .into_iter()
            .map(Tally::finish)
            .collect(),
    })
}
