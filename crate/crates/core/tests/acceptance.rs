//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p superlog-ckn --test acceptance -- --nocapture`.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use superlog_ckn::corpus::{self, CorpusConfig};
use superlog_ckn::functionals::{quotient, remainder_sides, QuotientSpec, Variant};
use superlog_ckn::rearrangement::{
    dirichlet_integral, lp_integral, product_integral, rearrange, rearrangement_at, weighted_lp_integral,
    AdmissibleDensity, RadialProfile,
};
use superlog_ckn::superlog::{SuperLog, SuperLogParams, TowerArg};
use superlog_ckn::varopt::{
    constant_relations, minimize_potential, near_extremal_line, two_sided, Budget, LineGrid,
};
use superlog_ckn::weight::{gamma_pq, WeightSpec};
use superlog_ckn::Result;

struct Verdict {
    pass: bool,
    detail: String,
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn within(limit: Duration, start: Instant, detail: &mut String) -> bool {
    let el = start.elapsed();
    let _ = write!(detail, " [{:.2}s / {}s]", el.as_secs_f64(), limit.as_secs());
    el <= limit
}

// Maps `f` over `0..n` on all cores, keeping order.
fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let workers = std::thread::available_parallelism().map_or(4, |w| w.get()).min(n.max(1));
    let f = &f;
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|sc| -> Result<()> {
        let handles: Vec<_> = (0..workers)
            .map(|wk| sc.spawn(move || (wk..n).step_by(workers).map(|i| Ok((i, f(i)?))).collect::<Result<Vec<_>>>()))
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked")? {
                slots[i] = Some(v);
            }
        }
        Ok(())
    })?;
    Ok(slots.into_iter().map(Option::unwrap).collect())
}

fn c1_oracle() -> Result<Verdict> {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut bound = 0.0;
    for a in [2.0, 3.0, 5.0] {
        let s = SuperLog::with_base(a)?;
        let p = s.params();
        bound = 2.0 * (p.product_tol + p.quad_tol);
        for u in log_space(a, 1e6, 50) {
            let ft = s.f_tilde(u)?.value;
            worst = worst.max(rel(ft, s.v_form(u)?.exp()));
        }
    }
    let mut detail = format!("max rel gap {worst:.2e} (bound {bound:.1e})");
    let fast = within(Duration::from_secs(10), t0, &mut detail);
    Ok(Verdict { pass: worst <= bound && fast, detail })
}

fn c2_properties() -> Result<Verdict> {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for a in [2.0, 3.0, 5.0] {
        let s = SuperLog::with_base(a)?;
        let zero = s.super_log(1.0)? == 0.0;
        let rs = log_space(1.0, 1e6, 400);
        let ls: Vec<f64> = rs.iter().map(|&r| s.super_log(r)).collect::<Result<_>>()?;
        let mut dd_max = f64::NEG_INFINITY;
        for i in 1..rs.len() - 1 {
            let left = (ls[i] - ls[i - 1]) / (rs[i] - rs[i - 1]);
            let right = (ls[i + 1] - ls[i]) / (rs[i + 1] - rs[i]);
            dd_max = dd_max.max(2.0 * (right - left) / (rs[i + 1] - rs[i - 1]));
        }
        let mut sandwich = true;
        for r in log_space(a.exp(), 1e6 * a.exp(), 20) {
            let (l, le) = (s.super_log(r)?, s.super_log_ln(r)?);
            sandwich &= l <= le && le <= (1.0 + a) * l;
        }
        // L(r)/log^n r along r_j = exp^n(2^j): the ratio must fall over the ladder's tail.
        let mut trend = true;
        for n in 1..=4u32 {
            let ratios: Vec<f64> = (4..=14)
                .map(|j| {
                    let top = 2f64.powi(j);
                    Ok(s.super_log_tower(TowerArg { height: n, top })? / top)
                })
                .collect::<Result<_>>()?;
            trend &= ratios.windows(2).all(|w| w[1] < w[0]);
        }
        let pass = zero && dd_max <= 1e-10 && sandwich && trend;
        ok &= pass;
        let _ = write!(detail, "a={a}: L(1)=0 {zero}, max 2nd dd {dd_max:.1e}, sandwich {sandwich}, trend {trend}; ");
    }
    let fast = within(Duration::from_secs(30), t0, &mut detail);
    Ok(Verdict { pass: ok && fast, detail })
}

const ALPHAS: [f64; 5] = [-1.0, 0.0, 0.5, 1.0, 2.0];

fn family_matrix(eta: f64) -> Result<Vec<WeightSpec>> {
    let mut out = Vec::new();
    for alpha in ALPHAS {
        for k in 1..=2u32 {
            let r_big = if alpha == 1.0 && k == 2 { 1e300 } else { 100.0 };
            out.push(WeightSpec::poly_log(k, alpha, r_big, eta)?);
        }
        for k in 0..=2u32 {
            out.push(WeightSpec::super_log_base(k, alpha, 3.0, eta)?);
        }
    }
    Ok(out)
}

fn c3_closed_forms() -> Result<Verdict> {
    let t0 = Instant::now();
    let sigmas = log_space(1e-3, 1e4, 100);
    let fams = family_matrix(1.0)?;
    let per_family = par_map(fams.len(), |f| -> Result<(f64, f64)> {
        let w = &fams[f];
        let mut worst = (0.0, 0.0);
        for &s in &sigmas {
            let g = rel(w.f_closed_sigma(s)?, w.f_quad_sigma(s)?);
            if g > worst.0 {
                worst = (g, s);
            }
        }
        Ok(worst)
    })?;
    let (mut worst, mut at) = (0.0, String::new());
    for (w, (g, s)) in fams.iter().zip(per_family) {
        if g > worst {
            worst = g;
            at = format!("{} at σ={s:.3e}", w.describe());
        }
    }
    let mut detail = format!("{} families x 100 points, max rel gap {worst:.2e} ({at})", fams.len());
    let fast = within(Duration::from_secs(60), t0, &mut detail);
    Ok(Verdict { pass: worst <= 1e-8 && fast, detail })
}

fn c4_ndc() -> Result<Verdict> {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut sigmas = vec![0.0];
    sigmas.extend(log_space(1e-4, 1e4, 200));
    let fams = family_matrix(1.0)?;
    for w in &fams {
        let bound = w.ndc_analytic_bound()?.expect("analytic bound");
        let report = w.ndc_check(&w.rho_grid_from_depths(&sigmas)?)?;
        let slack = report.grid_inf_h - (bound - 1e-6);
        worst = worst.min(slack);
        ok &= slack >= 0.0 && report.satisfied;
    }
    let w9 = WeightSpec::super_log_base(0, 1.0, 3.0, 1.0)?;
    let b9 = w9.ndc_analytic_bound()?.unwrap();
    ok &= (b9 - 9.0).abs() <= 1e-12;
    Ok(Verdict {
        pass: ok,
        detail: format!("{} families, min(inf H - bound + 1e-6) = {worst:.3e}; SuperLog(a=3,k=0,α=1) bound {b9}", fams.len()),
    })
}

fn c5_hardy() -> Result<Verdict> {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for p in [2.0, 3.0] {
        let w = WeightSpec::poly_log(1, 0.0, 10.0, 1.0)?;
        let spec = QuotientSpec::general(1, p, p, w)?;
        let sharp = (1.0 - 1.0 / p).powf(p);
        let est = minimize_potential(&spec, &LineGrid::hardy(), &Budget { max_sweeps: 120, ..Budget::default() })?;
        let in_band = est.value >= sharp - 1e-3 && est.value <= 1.02 * sharp;
        ok &= in_band;
        let _ = write!(detail, "p={p}: estimate {:.6} vs (1/p')^p {sharp:.6} {}; ladder", est.value, if in_band { "ok" } else { "OUT" });
        for d in [0.3, 0.4, 0.45, 0.49] {
            let v = near_extremal_line(&spec, d, 4000.0, 100.0, 8001)?;
            let hit = rel(v, d.powf(p)) <= 0.05;
            ok &= hit;
            let _ = write!(detail, " δ={d}:{v:.4}/{:.4}{}", d.powf(p), if hit { "" } else { "!" });
        }
        detail.push_str("; ");
    }
    let fast = within(Duration::from_secs(300), t0, &mut detail);
    Ok(Verdict { pass: ok && fast, detail })
}

fn explicit_families(eta: f64) -> Result<Vec<(&'static str, WeightSpec)>> {
    Ok(vec![
        ("poly-log α≠1", WeightSpec::poly_log(1, 0.0, 10.0, eta)?),
        ("poly-log α≠1", WeightSpec::poly_log(2, 0.5, 100.0, eta)?),
        ("poly-log α≠1", WeightSpec::poly_log(1, 2.0, 10.0, eta)?),
        ("poly-log α=1", WeightSpec::poly_log(1, 1.0, 100.0, eta)?),
        ("poly-log α=1", WeightSpec::poly_log(2, 1.0, 1e300, eta)?),
        ("super-log α≠1", WeightSpec::super_log_base(0, 0.0, 3.0, eta)?),
        ("super-log α≠1", WeightSpec::super_log_base(1, 2.0, 3.0, eta)?),
        ("super-log α=1", WeightSpec::super_log_base(0, 1.0, 3.0, eta)?),
        ("super-log α=1", WeightSpec::super_log_base(1, 1.0, 3.0, eta)?),
    ])
}

fn c6_inequalities() -> Result<Verdict> {
    let t0 = Instant::now();
    let cfg = CorpusConfig::default();
    let exps = [(2u32, 2.0, 2.0), (3, 3.0, 3.0), (1, 2.0, 4.0), (2, 2.0, 3.0)];
    let fams = explicit_families(1.0)?;
    let jobs: Vec<(usize, usize)> = (0..exps.len()).flat_map(|e| (0..fams.len()).map(move |f| (e, f))).collect();
    let results = par_map(jobs.len(), |j| -> Result<(f64, f64, usize)> {
        let (e, f) = jobs[j];
        let (n, p, q) = exps[e];
        let w = &fams[f].1;
        let spec = QuotientSpec::explicit(n, p, q, w.clone())?;
        let constant = match spec.sharp_constant() {
            Some(c) => c,
            None => minimize_potential(&spec, &LineGrid::localized(), &Budget { max_sweeps: 150, ..Budget::default() })?.value,
        };
        let mut min_q = f64::INFINITY;
        let mut violations = 0;
        for i in 0..cfg.size {
            let u = corpus::entry(&cfg, 1.0, Some(w), i)?.profile;
            let v = quotient(&spec, &u)?.quotient;
            min_q = min_q.min(v);
            if v < constant - 1e-6 {
                violations += 1;
            }
        }
        Ok((constant, min_q, violations))
    })?;
    let mut violations = 0;
    let mut by_family: Vec<(&str, f64)> = Vec::new();
    for (&(_, f), (c, m, v)) in jobs.iter().zip(results) {
        violations += v;
        let label = fams[f].0;
        match by_family.iter_mut().find(|(l, _)| *l == label) {
            Some(entry) => entry.1 = entry.1.min(m / c),
            None => by_family.push((label, m / c)),
        }
    }
    let mut detail = format!("{} (family, exponent) cells x {} functions: {violations} violations; min quotient/constant", jobs.len(), cfg.size);
    for (l, r) in &by_family {
        let _ = write!(detail, " {l} {r:.4}");
    }
    let fast = within(Duration::from_secs(300), t0, &mut detail);
    Ok(Verdict { pass: violations == 0 && fast, detail })
}

fn c7_remainder() -> Result<Verdict> {
    let cfg = CorpusConfig::default();
    let mut violations = 0;
    let mut c0 = f64::INFINITY;
    let mut cells = 0;
    for (n, p) in [(2u32, 2.0), (3, 3.0)] {
        for k in [0u32, 1] {
            let w = WeightSpec::super_log_base(k, 1.0, 3.0, 1.0)?;
            let spec = QuotientSpec::new(n, p, p, w.clone(), Variant::HardyRemainder)?;
            cells += 1;
            for i in 0..cfg.size {
                let u = corpus::entry(&cfg, 1.0, Some(&w), i)?.profile;
                let s = remainder_sides(&spec, &u)?;
                let gap = s.lhs - s.main;
                if gap < 0.0 || !(s.rem > 0.0) {
                    violations += 1;
                } else {
                    c0 = c0.min(gap / s.rem);
                }
            }
        }
    }
    Ok(Verdict {
        pass: violations == 0 && c0 > 0.0,
        detail: format!("{cells} cells x {} functions: {violations} violations, c₀ = {c0:.4e}", cfg.size),
    })
}

// Level-set inversion on a fine uniform grid in log r.
fn brute_force_rearrangement(g: &AdmissibleDensity, u: &RadialProfile, cells: usize, at: &[f64]) -> Vec<f64> {
    let x = u.log_radii();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let h = (hi - lo) / cells as f64;
    let mut cell: Vec<(f64, f64)> = (0..cells)
        .map(|i| {
            let (a, b) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
            (u.value_at_ln(0.5 * (a + b)).abs(), g.ball_measure_ln(b) - g.ball_measure_ln(a))
        })
        .collect();
    cell.push((u.values()[0].abs(), g.ball_measure_ln(lo)));
    cell.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut cum = Vec::with_capacity(cell.len());
    let mut acc = 0.0;
    for c in &cell {
        acc += c.1;
        cum.push(acc);
    }
    at.iter()
        .map(|&xr| {
            let m = g.ball_measure_ln(xr);
            let k = cum.partition_point(|&c| c <= m);
            if k < cell.len() {
                cell[k].0
            } else {
                0.0
            }
        })
        .collect()
}

fn c8_rearrangement() -> Result<Verdict> {
    let t0 = Instant::now();
    let cfg = CorpusConfig::default();
    let tab_r = log_space(1e-9, 1.0, 400);
    // (density, p, q, exponent of the norm weight v(r) = r^e)
    let densities = vec![
        (AdmissibleDensity::constant(2, 1.0)?, 2.0, 3.0, -0.5),
        (AdmissibleDensity::power(2, 1.0, -1.0)?, 3.0, 3.0, -0.5),
        (AdmissibleDensity::power(3, 1.0, -1.5)?, 2.0, 4.0, -1.0),
        (AdmissibleDensity::from_fn(2, &tab_r, |r: f64| 1.0 / (r * (2.0 + (1.0 / r).ln()).powi(2)))?, 3.0, 3.0, 0.0),
    ];
    let nd = densities.len();
    let profiles = corpus::generate(&cfg, 1.0, None)?;
    let rearranged = par_map(profiles.len(), |i| rearrange(&densities[i % nd].0, &profiles[i].profile))?;
    // Per profile: [equimeasurability, norm, HL, PS, quotient, oracle, oracle-checked].
    let rows = par_map(profiles.len(), |i| -> Result<Vec<f64>> {
        let (g, p, q, ve) = &densities[i % nd];
        let (u, ru) = (&profiles[i].profile, &rearranged[i]);
        let top = u.max_abs();
        let mut eq: f64 = 0.0;
        for k in 0..64 {
            let t = top * (k as f64 + 0.5) / 64.0;
            eq = eq.max(rel(g.distribution(u, t), g.distribution(ru, t)));
        }
        let norm = rel(lp_integral(g, u, *p)?, lp_integral(g, ru, *p)?);
        // Partner with the same density, whose rearrangement is already known.
        let j = (i + nd) % profiles.len();
        let (hl_a, hl_b) = (product_integral(g, u, &profiles[j].profile)?, product_integral(g, ru, &rearranged[j])?);
        let (ps_a, ps_b) = (dirichlet_integral(g, u, *p)?, dirichlet_integral(g, ru, *p)?);
        let v = |r: f64| r.powf(*ve);
        let quot = |w: &RadialProfile| -> Result<f64> {
            Ok(dirichlet_integral(g, w, *p)? / weighted_lp_integral(g, w, *q, v)?.powf(p / q))
        };
        let (qa, qb) = (quot(u)?, quot(ru)?);
        let (mut oracle, mut checked) = (0.0, 0.0);
        if u.len() <= 32 {
            let x = u.log_radii();
            let mut at: Vec<f64> = x.to_vec();
            at.extend((1..16).map(|j| x[0] + (x[x.len() - 1] - x[0]) * j as f64 / 16.0));
            let brute = brute_force_rearrangement(g, u, 400_000, &at);
            for (xr, bv) in at.iter().zip(brute) {
                oracle = f64::max(oracle, (rearrangement_at(g, u, xr.exp())? - bv).abs() / top);
            }
            checked = 1.0;
        }
        Ok(vec![eq, norm, (hl_b - hl_a) / hl_b, (ps_a - ps_b) / ps_a, (qa - qb) / qa, oracle, checked])
    })?;
    let col = |k: usize| rows.iter().map(move |r| r[k]);
    let (eq, norm) = (col(0).fold(0.0, f64::max), col(1).fold(0.0, f64::max));
    let (hl, ps, qc) = (col(2).fold(f64::INFINITY, f64::min), col(3).fold(f64::INFINITY, f64::min), col(4).fold(f64::INFINITY, f64::min));
    let (oracle, checked) = (col(5).fold(0.0, f64::max), col(6).sum::<f64>() as usize);
    let ok = eq <= 1e-6 && norm <= 1e-6 && hl >= -1e-6 && ps >= -1e-6 && qc >= -1e-6 && oracle <= 1e-4;
    let mut detail = format!(
        "{} profiles: equimeasurability {eq:.1e}, norm {norm:.1e}, HL {hl:.1e}, PS {ps:.1e}, quotient {qc:.1e}; \
         oracle on {checked} grids ≤32 nodes max {oracle:.1e}",
        profiles.len()
    );
    let fast = within(Duration::from_secs(120), t0, &mut detail);
    Ok(Verdict { pass: ok && fast, detail })
}

fn c9_relation() -> Result<Verdict> {
    let b = Budget { max_sweeps: 200, ..Budget::default() };
    let g = LineGrid::localized();
    let (even, free) = std::thread::scope(|sc| {
        let e = sc.spawn(|| two_sided(2.0, 4.0, &g, &b, true));
        let f = sc.spawn(|| two_sided(2.0, 4.0, &g, &b, false));
        (e.join().expect("even run"), f.join().expect("free run"))
    });
    let (even, free) = (even?, free?);
    let r = constant_relations(1, 2.0, 4.0, Some(free.value), Some(even.value), 0.05, None)?;
    Ok(Verdict {
        pass: r.consistent,
        detail: format!(
            "C₁ = {:.6}, C₁_rad = {:.6}, ratio {:.6} vs 2^(-1/2) = {:.6} (gap {:.2e})",
            free.value, even.value, r.ratio, r.factor, r.relative_gap
        ),
    })
}

fn c10_lemma() -> Result<Verdict> {
    let t0 = Instant::now();
    let (mut cases, mut exceptions) = (0, 0);
    for n in 2..=10u32 {
        let p_max = (n as f64 + 1.0) / 2.0;
        for i in 1..=40 {
            let p = 1.0 + (p_max - 1.0) * i as f64 / 40.0;
            for j in 0..40 {
                let s = j as f64 / 39.0 / n as f64;
                let q = 1.0 / (1.0 / p - s);
                cases += 1;
                if 1.0 - 1.0 / p > gamma_pq(n, p, q)? + 1e-12 {
                    exceptions += 1;
                }
            }
        }
    }
    let mut detail = format!("{cases} cases, {exceptions} exceptions");
    let fast = within(Duration::from_secs(1), t0, &mut detail);
    Ok(Verdict { pass: exceptions == 0 && fast, detail })
}

#[test]
fn acceptance() {
    let _ = SuperLogParams::new(3.0).expect("default parameters");
    let criteria: [(&str, fn() -> Result<Verdict>); 10] = [
        ("super-log oracle equivalence", c1_oracle),
        ("super-log property suite", c2_properties),
        ("closed-form potentials", c3_closed_forms),
        ("non-degeneracy bounds", c4_ndc),
        ("sharp Hardy constant", c5_hardy),
        ("inequality suite", c6_inequalities),
        ("remainder inequality", c7_remainder),
        ("rearrangement suite", c8_rearrangement),
        ("radial/non-radial relation", c9_relation),
        ("exponent lemma grid", c10_lemma),
    ];
    // Sequential, so each criterion's runtime is measured without contention;
    // the heavy ones parallelise internally.
    let verdicts: Vec<Verdict> = criteria
        .iter()
        .map(|(_, f)| match std::panic::catch_unwind(f) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict { pass: false, detail: format!("error: {e}") },
            Err(_) => Verdict { pass: false, detail: "panicked".into() },
        })
        .collect();
    let mut failed = Vec::new();
    for (i, ((name, _), v)) in criteria.iter().zip(&verdicts).enumerate() {
        println!("criterion {:>2} {:<28} {}  {}", i + 1, name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
