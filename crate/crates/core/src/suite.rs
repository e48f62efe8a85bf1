//! Acceptance checks, grouped. Each check measures, compares against pinned
//! tolerances, and reports its numbers whether it passes or not.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cplx::{c, cis, powi, rel_err, C64};
use crate::error::{LabError, Result};
use crate::multiplier::{dyadic_piece, nonlocal_multiplier, series_bound_probe, tilde_piece, BumpFunctions, Multiplier};
use crate::oracle::bessel_j0;
use crate::oscint::{
    bound_ratio, decay_exponent_fit, default_probes, heaviside_identity, resolvent_integral_decay, surface_measure_ft,
    weighted_resolvent_integral, ConvexSymbol, MihlinWeight, DECAY_TOL,
};
use crate::probe::{blowup_sequence, cluster_removal_probe, pq_lower_bound, AscentOptions, BetaRule, NormProbeResult};
use crate::region::{xi_membership, SectorParams};
use crate::residue::{fourier_transform_mz, fourier_transform_oracle, partial_fractions, poles, resolvent_multiplier_identity, unit_root};
use crate::spectra::{build_torus_model, build_zoll_model, cluster_report, counting_function, ModelSpectrum, ZollParams};
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Identities,
    Region,
    Blowup,
    Oscint,
    All,
}

impl Group {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Group::Identities),
            "region" => Ok(Group::Region),
            "blowup" => Ok(Group::Blowup),
            "oscint" => Ok(Group::Oscint),
            "all" => Ok(Group::All),
            other => Err(LabError::Parse(format!(
                "unknown suite '{other}' (expected identities, region, blowup, oscint or all)"
            ))),
        }
    }

    pub fn criteria(self) -> Vec<u32> {
        match self {
            Group::Identities => vec![1, 2, 12],
            Group::Region => vec![3, 4, 5],
            Group::Blowup => vec![6, 7, 8, 9],
            Group::Oscint => vec![10, 11],
            Group::All => (1..=12).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// One-line account of the measured values.
    pub summary: String,
    #[serde(skip)]
    pub seconds: f64,
    pub values: Value,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.summary,
            self.seconds
        )
    }
}

struct Outcome {
    passed: bool,
    summary: String,
    values: Value,
}

pub const NAMES: [&str; 12] = [
    "residue identity",
    "multiplier identities",
    "pole sector",
    "symbol decay",
    "nonlocal multiplier",
    "weyl law",
    "cluster structure",
    "blow-up",
    "cluster removal",
    "stationary phase",
    "weighted resolvent integral",
    "norm-probe soundness",
];

/// Runs one criterion; errors are reported as failures.
pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionResult> {
    if !(1..=12).contains(&id) {
        return Err(LabError::invalid(format!("no criterion {id}")));
    }
    let start = Instant::now();
    let out = match id {
        1 => residue_identity(seed),
        2 => multiplier_identities(seed),
        3 => pole_sector(seed),
        4 => symbol_decay(),
        5 => nonlocal(),
        6 => weyl_law(),
        7 => cluster_structure(),
        8 => blowup(),
        9 => cluster_removal(seed),
        10 => stationary_phase(),
        11 => weighted_integral(),
        _ => norm_probe(seed),
    };
    let seconds = start.elapsed().as_secs_f64();
    let budget = match id {
        1 => Some(30.0),
        2 => Some(5.0),
        4 | 8 => Some(120.0),
        6 => Some(10.0),
        10 => Some(180.0),
        _ => None,
    };
    let out = out.unwrap_or_else(|e| Outcome {
        passed: false,
        summary: format!("error: {e}"),
        values: Value::Null,
    });
    let in_time = budget.map_or(true, |b| seconds < b);
    let summary = if in_time {
        out.summary
    } else {
        format!("{}; over the {:.0} s budget", out.summary, budget.unwrap_or(0.0))
    };
    Ok(CriterionResult {
        id,
        name: NAMES[id as usize - 1],
        passed: out.passed && in_time,
        summary,
        seconds,
        values: out.values,
    })
}

pub fn run_group(group: Group, seed: u64) -> Result<Vec<CriterionResult>> {
    group.criteria().into_iter().map(|id| run_criterion(id, seed)).collect()
}

fn sector_sample(rng: &mut ChaCha8Rng, m: u32, delta: f64, r_lo: f64, r_hi: f64) -> Result<C64> {
    let params = SectorParams::region(m, delta)?;
    loop {
        let r = rng.gen_range(r_lo..r_hi);
        let th = rng.gen_range(0.0..2.0 * PI / m as f64);
        let z = r * cis(th);
        if xi_membership(z, params) {
            return Ok(z);
        }
    }
}

fn residue_identity(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let m = [2, 4, 6][rng.gen_range(0..3)];
        let z = sector_sample(&mut rng, m, 0.2, 0.3, 3.0)?;
        let t = rng.gen_range(-3.0..3.0);
        let closed = fourier_transform_mz(t, z, m)?;
        let oracle = fourier_transform_oracle(t, z, m)?;
        worst = worst.max(rel_err(closed, oracle.value));
    }
    let spot1 = rel_err(fourier_transform_mz(1.0, c(0.0, 1.0), 2)?, c(PI * (-1f64).exp(), 0.0));
    let spot2 = rel_err(fourier_transform_mz(0.0, cis(PI / 4.0), 4)?, c(PI / 2f64.sqrt(), 0.0));
    Ok(Outcome {
        passed: worst < 1e-6 && spot1 < 1e-12 && spot2 < 1e-12,
        summary: format!("max rel err {worst:.2e} over 200 samples; spot errs {spot1:.1e}, {spot2:.1e}"),
        values: json!({"max_rel_err": worst, "spot_pi_over_e": spot1, "spot_pi_over_sqrt2": spot2}),
    })
}

fn multiplier_identities(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2);
    let mut resolvent: f64 = 0.0;
    let mut fractions: f64 = 0.0;
    for _ in 0..1000 {
        let m = [2, 4, 6, 8][rng.gen_range(0..4)];
        let z = sector_sample(&mut rng, m, 0.2, 0.5, 3.0)?;
        let tau = rng.gen_range(0.0..3.0 * z.norm());
        let (lhs, rhs) = resolvent_multiplier_identity(tau, z, m)?;
        resolvent = resolvent.max(rel_err(rhs, lhs));
        let y = z.norm() * c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let direct = 1.0 / (powi(y, m) - powi(z, m));
        fractions = fractions.max(rel_err(partial_fractions(m)?.evaluate(y, z), direct));
    }
    let mut coeff: f64 = 0.0;
    for m in (2..=16).step_by(2) {
        let pf = partial_fractions(m)?;
        for (k, a) in pf.a.iter().enumerate() {
            coeff = coeff.max((a - unit_root(k as u32, m) / m as f64).norm());
        }
    }
    Ok(Outcome {
        passed: resolvent < 1e-10 && fractions < 1e-10 && coeff < 1e-12,
        summary: format!("resolvent {resolvent:.1e}, partial fractions {fractions:.1e}, coefficients {coeff:.1e}"),
        values: json!({"resolvent_rel_err": resolvent, "partial_fraction_rel_err": fractions, "coefficient_err": coeff}),
    })
}

fn pole_sector(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let mut violations = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut total = 0usize;
    for m in [2u32, 4, 6, 8] {
        for _ in 0..2500 {
            let delta = rng.gen_range(0.01..1.0);
            let z = sector_sample(&mut rng, m, delta, delta, 20.0)?;
            for tau in poles(z, m)?.upper() {
                let margin = tau.im - delta;
                worst_margin = worst_margin.min(margin / z.norm());
                if margin < -1e-12 * z.norm().max(1.0) {
                    violations += 1;
                }
            }
            total += 1;
        }
    }
    Ok(Outcome {
        passed: violations == 0,
        summary: format!("{violations} violations over {total} points; min relative margin {worst_margin:.2e}"),
        values: json!({"violations": violations, "samples": total, "min_relative_margin": worst_margin}),
    })
}

fn decay_sup(z: C64, m: u32, bumps: &BumpFunctions) -> Result<f64> {
    let mut taus: Vec<f64> = (0..=200).map(|i| 10.0 * i as f64 / 200.0).collect();
    taus.extend((1..=120).map(|i| 10f64.powf(1.0 + 2.0 * i as f64 / 120.0)));
    let mut sup: f64 = 0.0;
    for tau in taus {
        sup = sup.max((1.0 + tau).powi(m as i32) * tilde_piece(tau, z, m, bumps)?.norm());
    }
    Ok(sup)
}

fn symbol_decay() -> Result<Outcome> {
    let bumps = BumpFunctions::default();
    let mut rows = Vec::new();
    let mut stable = true;
    let mut finite = true;
    for m in [2u32, 4] {
        let mid = cis(PI / m as f64);
        let small = decay_sup(2.0 * mid, m, &bumps)?;
        let large = decay_sup(20.0 * mid, m, &bumps)?;
        let change = (small - large).abs() / small.max(large);
        finite &= small.is_finite() && large.is_finite();
        stable &= change < 0.05;
        rows.push(json!({"m": m, "sup_at_2": small, "sup_at_20": large, "relative_change": change}));
    }
    // S_{z,j} vanishes identically once 2^{-j}|z| <= 1.
    let mut vanishing: f64 = 0.0;
    for r in [2.0, 5.0, 20.0, 100.0] {
        let z = r * cis(PI / 4.0);
        let first = r.log2().ceil() as u32;
        for j in first..first + 4 {
            for tau in [0.0, 1.0, 7.5, 50.0] {
                vanishing = vanishing.max(dyadic_piece(tau, z, 2, j, &bumps)?.norm());
            }
        }
    }
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "m={}: sup {:.4} (|z|=2) vs {:.4} (|z|=20), change {:.1}%",
                r["m"], r["sup_at_2"].as_f64().unwrap_or(f64::NAN), r["sup_at_20"].as_f64().unwrap_or(f64::NAN),
                100.0 * r["relative_change"].as_f64().unwrap_or(f64::NAN)
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        passed: finite && stable && vanishing <= 1e-12,
        summary: format!("{summary}; dyadic max {vanishing:.1e}"),
        values: json!({"rows": rows, "dyadic_vanishing_max": vanishing}),
    })
}

fn nonlocal_sup(m: u32, delta: f64, points: usize, bumps: &BumpFunctions) -> Result<f64> {
    let params = SectorParams::region(m, delta)?;
    let mut sup: f64 = 0.0;
    for r in [2.0, 5.0, 10.0] {
        for frac in [0.2, 0.5, 0.8] {
            let z = r * cis(frac * 2.0 * PI / m as f64);
            if !xi_membership(z, params) {
                continue;
            }
            for i in 0..=points {
                let tau = 3.0 * r * i as f64 / points as f64;
                sup = sup.max(delta * nonlocal_multiplier(tau, z, m, bumps)?.norm());
            }
        }
    }
    Ok(sup)
}

fn nonlocal() -> Result<Outcome> {
    let bumps = BumpFunctions::default();
    let mut rows = Vec::new();
    let mut ok = true;
    for m in [2u32, 4] {
        let coarse = nonlocal_sup(m, 0.5, 100, &bumps)?;
        let fine = nonlocal_sup(m, 0.5, 200, &bumps)?;
        let change = (fine - coarse).abs() / fine;
        let fracs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let s_mid = series_bound_probe(m, &[1.0, 10.0, 100.0], &fracs)?;
        let s_all = series_bound_probe(m, &[1.0, 10.0, 100.0, 1000.0], &fracs)?;
        let series_change = (s_all - s_mid).abs() / s_mid;
        ok &= fine.is_finite() && change < 0.05 && s_all.is_finite() && series_change < 0.05;
        rows.push(json!({
            "m": m, "sup_coarse": coarse, "sup_fine": fine, "grid_change": change,
            "series_to_100": s_mid, "series_to_1000": s_all, "series_change": series_change,
        }));
    }
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "m={}: sup {:.4} (grid change {:.2}%), series {:.4} (change {:.2}%)",
                r["m"],
                r["sup_fine"].as_f64().unwrap_or(f64::NAN),
                100.0 * r["grid_change"].as_f64().unwrap_or(f64::NAN),
                r["series_to_1000"].as_f64().unwrap_or(f64::NAN),
                100.0 * r["series_change"].as_f64().unwrap_or(f64::NAN)
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        passed: ok,
        summary,
        values: json!({ "rows": rows }),
    })
}

fn weyl_law() -> Result<Outcome> {
    let t2 = build_torus_model(2, 2, Symbol::Euclid, 41.0, None)?;
    let c2 = counting_function(&t2, 40.0) as f64 / 1600.0;
    let t3 = build_torus_model(3, 2, Symbol::Euclid, 21.0, None)?;
    let c3 = counting_function(&t3, 20.0) as f64 / 8000.0;
    let ball = 4.0 * PI / 3.0;
    let (e2, e3) = ((c2 - PI).abs() / PI, (c3 - ball).abs() / ball);
    Ok(Outcome {
        passed: e2 < 0.05 && e3 < 0.05,
        summary: format!("N(40)/40^2 = {c2:.4} ({:.2}% off), N(20)/20^3 = {c3:.4} ({:.2}% off)", 100.0 * e2, 100.0 * e3),
        values: json!({"t2_ratio": c2, "t2_rel_err": e2, "t3_ratio": c3, "t3_rel_err": e3}),
    })
}

fn cluster_structure() -> Result<Outcome> {
    let mut degrees = Vec::new();
    for n in [2usize, 3] {
        let model = build_zoll_model(ZollParams::new(n, 2, 60))?;
        let rep = cluster_report(&model, 2.0 * PI, 2.0 * (n as f64 - 1.0), 0.0)?;
        degrees.push(rep.fitted_degree);
    }
    Ok(Outcome {
        passed: (degrees[0] - 1.0).abs() <= 0.05 && (degrees[1] - 2.0).abs() <= 0.05,
        summary: format!("fitted degree {:.4} (n=2), {:.4} (n=3)", degrees[0], degrees[1]),
        values: json!({"degree_n2": degrees[0], "degree_n3": degrees[1]}),
    })
}

fn blowup() -> Result<Outcome> {
    let zoll = build_zoll_model(ZollParams::new(3, 2, 64))?;
    let seq = blowup_sequence(&zoll, (5, 60), BetaRule::InvK)?;
    let (l5_lo, l5_hi) = (seq[0].l_lower, seq[0].l_upper);
    let worst = seq
        .iter()
        .map(|s| (s.l_lower / l5_lo).min(s.l_upper / l5_hi) / (s.k as f64 / 10.0))
        .fold(f64::INFINITY, f64::min);
    let torus = build_torus_model(3, 2, Symbol::Euclid, 63.0, None)?;
    let tseq = blowup_sequence(&torus, (5, 60), BetaRule::InvK)?;
    let ls: Vec<f64> = tseq.iter().flat_map(|s| [s.l_lower, s.l_upper]).collect();
    let (lo, hi) = ls.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let spread = hi / lo;
    let table: Vec<Value> = seq
        .iter()
        .zip(&tseq)
        .map(|(z, t)| json!({"k": z.k, "zoll_lower": z.l_lower, "zoll_upper": z.l_upper, "torus_lower": t.l_lower, "torus_upper": t.l_upper}))
        .collect();
    Ok(Outcome {
        passed: worst >= 1.0 && spread < 3.0 && lo > 0.0,
        summary: format!(
            "Zoll min (L_k/L_5)/(k/10) = {worst:.3}, L_60/L_5 = {:.2}; torus max/min = {spread:.3}",
            seq.last().map_or(f64::NAN, |s| s.l_lower / l5_lo)
        ),
        values: json!({"zoll_worst_ratio": worst, "torus_spread": spread, "table": table}),
    })
}

fn cluster_removal(seed: u64) -> Result<Outcome> {
    let model = build_zoll_model(ZollParams {
        zonal: true,
        ..ZollParams::new(3, 2, 64)
    })?;
    let opts = AscentOptions { seed, ..Default::default() };
    let alphas = [10.0, 20.0, 30.0, 40.0, 50.0];
    let rows = cluster_removal_probe(&model, &|_| 1.0, &alphas, opts)?;
    let first = rows[0].removed;
    let largest = rows.iter().map(|r| r.removed).fold(0.0, f64::max);
    let flat = largest <= 2.0 * first;
    let near = cluster_removal_probe(&model, &|a| 1.0 / a, &[30.0], opts)?;
    let gain = near[0].full / near[0].removed;
    Ok(Outcome {
        passed: flat && gain > 5.0,
        summary: format!(
            "removed bounds {}; largest/first = {:.3}; full/removed at alpha 30 = {gain:.2}",
            rows.iter().map(|r| format!("{:.4}", r.removed)).collect::<Vec<_>>().join(", "),
            largest / first
        ),
        values: json!({"rows": rows, "largest_over_first": largest / first, "gain_at_30": gain}),
    })
}

fn stationary_phase() -> Result<Outcome> {
    let circle = ConvexSymbol::new(2, Symbol::Euclid)?;
    let mut bessel: f64 = 0.0;
    for i in 0..=50 {
        let r = i as f64;
        let v = surface_measure_ft(&circle, &[0.6 * r, -0.8 * r], 1)?.value;
        bessel = bessel.max((v - C64::new(bessel_j0(r) / (2.0 * PI), 0.0)).norm());
    }
    let d2 = decay_exponent_fit(&circle, &[1.0, 0.3], 5.0, 500.0, 20)?;
    let sphere = ConvexSymbol::new(3, Symbol::Euclid)?;
    let d3 = decay_exponent_fit(&sphere, &[0.2, 0.3, 1.0], 5.0, 500.0, 20)?;
    let lp4 = ConvexSymbol::new(2, Symbol::Lp4)?;
    let dl = decay_exponent_fit(&lp4, &[1.0, 0.0], 5.0, 500.0, 20)?;
    let passed = bessel < 1e-6
        && (d2.exponent + 0.5).abs() <= DECAY_TOL
        && (d3.exponent + 1.0).abs() <= DECAY_TOL
        && dl.flagged
        && !dl.strictly_convex;
    Ok(Outcome {
        passed,
        summary: format!(
            "J0 max err {bessel:.1e}; exponents {:.3} (n=2), {:.3} (n=3); lp4 {:.3} flagged={}",
            d2.exponent, d3.exponent, dl.exponent, dl.flagged
        ),
        values: json!({"bessel_max_err": bessel, "circle": d2, "sphere": d3, "lp4": dl}),
    })
}

fn weighted_integral() -> Result<Outcome> {
    let circle = ConvexSymbol::new(2, Symbol::Euclid)?;
    let h = MihlinWeight::one();
    let probes = default_probes();
    let base = bound_ratio(&circle, &h, &probes, 1)?;
    let doubled = bound_ratio(&circle, &h, &probes, 2)?;
    let stability = (doubled.ratio - base.ratio).abs() / base.ratio;

    let mut scaling: f64 = 0.0;
    for (x, w) in [([1.2, -0.7], cis(1.1) * 3.0), ([0.4, 0.9], cis(2.7) * 0.5), ([-2.0, 0.3], cis(0.4) * 2.0)] {
        let s = w.norm();
        let lhs = weighted_resolvent_integral(&circle, &h, &x, w, 1)?.value;
        let rhs = weighted_resolvent_integral(&circle, &h, &[x[0] * s, x[1] * s], w / s, 1)?.value * s;
        scaling = scaling.max(rel_err(rhs, lhs));
    }
    let mut heaviside: f64 = 0.0;
    for alpha in [0.5, -0.5, 2.0, -2.0] {
        for t in [-1.0, 0.5, 2.0] {
            let v = heaviside_identity(alpha, t)?;
            heaviside = heaviside.max((v.numeric - v.exact).abs());
        }
    }
    let radii: Vec<f64> = (0..8).map(|i| 0.01 * 10f64.powf(i as f64 / 7.0)).collect();
    let slope = resolvent_integral_decay(&circle, &h, C64::new(-1.0, 0.0), &[0.6, 0.8], &radii)?;
    let passed = base.ratio.is_finite()
        && stability < 0.03
        && scaling < 1e-6
        && heaviside < 1e-6
        && (slope + 1.0).abs() <= 0.2;
    Ok(Outcome {
        passed,
        summary: format!(
            "bound ratio {:.4} (doubling change {:.1e}); scaling {scaling:.1e}; heaviside {heaviside:.1e}; decay slope {slope:.3}",
            base.ratio, stability
        ),
        values: json!({
            "bound_ratio": base.ratio, "bound_ratio_doubled": doubled.ratio, "rows": base.rows,
            "scaling_rel_err": scaling, "heaviside_err": heaviside, "small_x_slope": slope,
        }),
    })
}

fn monotone(r: &NormProbeResult) -> bool {
    r.history.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
}

fn norm_probe(seed: u64) -> Result<Outcome> {
    // Three modes on three points with the standard basis.
    let cols: Vec<Vec<C64>> = (0..3)
        .map(|j| (0..3).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let toy = ModelSpectrum::from_dense(3, 2, &[0.3, 0.6, 1.0], cols, vec![1.0; 3])?;
    let z = c(0.2, 0.5);
    let mult = Multiplier::resolvent(z, 2);
    let opts = AscentOptions { seed, ..Default::default() };
    let ascent = pq_lower_bound(&toy, &mult, 2.0, 2.0, opts)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb7);
    let gains: Vec<f64> = toy.entries.iter().map(|e| mult.eval(e.mu).norm()).collect();
    let mut brute: f64 = 0.0;
    for _ in 0..100_000 {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let num: f64 = v.iter().zip(&gains).map(|(x, g)| (x * g).powi(2)).sum();
        let den: f64 = v.iter().map(|x| x * x).sum();
        if den > 0.0 {
            brute = brute.max((num / den).sqrt());
        }
    }
    let diff = (ascent.value - brute).abs();

    // Monotonicity across a spread of models and exponent pairs.
    let mut runs = vec![ascent];
    let t2 = build_torus_model(2, 2, Symbol::Euclid, 6.0, None)?;
    for (p, q) in [(1.5, 4.0), (1.2, 6.0), (2.0, 3.0)] {
        runs.push(pq_lower_bound(&t2, &Multiplier::resolvent(c(3.0, 0.4), 2), p, q, opts)?);
    }
    let zoll = build_zoll_model(ZollParams {
        zonal: true,
        ..ZollParams::new(3, 2, 24)
    })?;
    runs.push(pq_lower_bound(&zoll, &Multiplier::resolvent(c(12.0, 0.3), 2), 1.2, 6.0, opts)?);
    runs.push(pq_lower_bound(&zoll, &Multiplier::indicator(5.0, 9.0), 1.5, 4.0, opts)?);
    let all_monotone = runs.iter().all(monotone);
    Ok(Outcome {
        passed: diff < 1e-4 && all_monotone,
        summary: format!(
            "(2,2) ascent {:.6} vs brute force {brute:.6} (diff {diff:.1e}); {} runs monotone: {all_monotone}",
            runs[0].value,
            runs.len()
        ),
        values: json!({"ascent": runs[0].value, "brute_force": brute, "difference": diff, "all_monotone": all_monotone}),
    })
}
