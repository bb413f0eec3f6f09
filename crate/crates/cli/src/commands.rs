use std::time::Instant;

use abelsurf::curves::Genus2Curve;
use abelsurf::endoring::EndoContext;
use abelsurf::invariants::{classify, ClassificationReport, CountMode};
use abelsurf::split::{
    aut_group, iezzi_orderings, iezzi_split, isotropic_kernels_2, product_frob, richelot_step, subcover_search,
    v4_covers, SplitResult, SubcoverBranch,
};
use abelsurf::{Error, Limits};

use crate::report::*;
use crate::spec::CurveSpec;
use crate::CliError;

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub limits: Limits,
    pub mode: CountMode,
    pub d_max: usize,
    pub try_iezzi: bool,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 1, limits: Limits::default(), mode: CountMode::Auto, d_max: 1, try_iezzi: false, timing: false }
    }
}

struct Base {
    curve: Genus2Curve,
    class: ClassificationReport,
    report: Report,
}

fn base(command: &str, spec: &CurveSpec, opts: &Options) -> Result<Base, CliError> {
    let curve = spec.curve()?;
    let class = classify(&curve, opts.mode, &opts.limits)?;
    let f = &class.frob;
    let mut warnings = Vec::new();
    let automorphisms = match aut_group(&curve) {
        Ok(g) => AutJson { order: g.order.to_string(), kind: g.kind.label() },
        Err(e) => {
            warnings.push(format!("automorphism group: {e}"));
            AutJson { order: "unknown".into(), kind: "unknown".into() }
        }
    };
    let report = Report {
        command: command.into(),
        curve: CurveJson {
            p: spec.p.to_string(),
            n: spec.n.to_string(),
            modulus: spec.modulus.as_ref().map(|m| m.iter().map(|x| x.to_string()).collect()),
            f: spec.f_strings(),
        },
        seed: opts.seed.to_string(),
        charpoly: f.charpoly_strings(),
        a1: f.a1.to_string(),
        a2: f.a2.to_string(),
        q: f.q.to_string(),
        big_delta: class.big_delta.to_string(),
        small_delta: class.small_delta.to_string(),
        p_rank: class.p_rank.to_string(),
        a_number: class.a_number.to_string(),
        simple_over_base: class.simple_over_base,
        simple_over_closure: class.absolutely_simple,
        split_degree: class.split_degree.map(|k| k.to_string()),
        table1_row: class.table1_row.map(|r| r.label().to_string()),
        manual_review: class.manual_review,
        automorphisms,
        endomorphisms: None,
        split: None,
        warnings,
        timing_ms: None,
    };
    Ok(Base { curve, class, report })
}

fn finish(mut r: Report, start: Instant, opts: &Options) -> Report {
    if opts.timing {
        r.timing_ms = Some(start.elapsed().as_millis().to_string());
    }
    r
}

pub fn cmd_classify(spec: &CurveSpec, opts: &Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let b = base("classify", spec, opts)?;
    Ok(finish(b.report, start, opts))
}

pub fn cmd_endoring(spec: &CurveSpec, opts: &Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let Base { curve, class, mut report } = base("endoring", spec, opts)?;
    if !class.simple_over_base {
        report.warnings.push("not simple over the base field; End(A) is not an order in Q(π)".into());
        report.split = Some(split_json(&curve, &class, opts, &mut report.warnings)?);
        return Ok(finish(report, start, opts));
    }
    let ctx = EndoContext::new(&curve, &class.frob, &opts.limits, opts.seed)?;
    let nu = ctx.zpi.index_in(&ctx.ok)?;
    let r = ctx.ascend()?;
    let certificate = r
        .tests
        .iter()
        .map(|t| OrderTestJson {
            ell: t.ell.to_string(),
            index_in_ok: t.index.to_string(),
            result: match t.passed {
                Some(true) => "passed",
                Some(false) => "failed",
                None => "undetermined",
            }
            .into(),
        })
        .collect();
    for ell in &r.undetermined {
        report.warnings.push(format!("undetermined at ℓ = {ell}"));
    }
    report.endomorphisms = Some(EndoJson {
        nu: nu.to_string(),
        status: if r.is_exact() { "exact" } else { "bounds" }.into(),
        lower: LatticeJson::new(&r.order, &r.order.index_in(&ctx.ok)?),
        upper: LatticeJson::new(&r.upper, &r.upper.index_in(&ctx.ok)?),
        undetermined: r.undetermined.iter().map(|l| l.to_string()).collect(),
        certificate,
    });
    Ok(finish(report, start, opts))
}

pub fn cmd_split(spec: &CurveSpec, opts: &Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let Base { curve, class, mut report } = base("split", spec, opts)?;
    report.split = Some(split_json(&curve, &class, opts, &mut report.warnings)?);
    Ok(finish(report, start, opts))
}

fn check(
    got: abelsurf::Result<abelsurf::invariants::FrobPoly>,
    want: &abelsurf::invariants::FrobPoly,
) -> Result<String, CliError> {
    match got {
        Ok(g) if g == *want => Ok("verified".into()),
        Ok(_) => Ok("failed".into()),
        Err(Error::Capacity(m)) => Ok(format!("capacity: {m}")),
        Err(e) => Err(e.into()),
    }
}

fn split_json(
    curve: &Genus2Curve,
    class: &ClassificationReport,
    opts: &Options,
    warnings: &mut Vec<String>,
) -> Result<SplitJson, CliError> {
    let k = &curve.k;
    let base_deg = k.degree();
    let mut factors = Vec::new();
    for (i, kernel) in isotropic_kernels_2(curve)?.iter().enumerate() {
        match richelot_step(curve, kernel) {
            Ok(SplitResult::Split { emb, e1, e2, .. }) => {
                let d = (emb.dst.degree() / base_deg) as u32;
                let charpoly_check = check(product_frob(&e1, &e2, &opts.limits), &class.frob.base_change(d))?;
                if charpoly_check == "failed" {
                    return Err(CliError::Invariant(format!("kernel {i}: split factors disagree with f_A")));
                }
                factors.push(FactorJson {
                    kernel: i.to_string(),
                    e1: EllipticJson::new(&e1, base_deg),
                    e2: EllipticJson::new(&e2, base_deg),
                    charpoly_check,
                });
            }
            Ok(SplitResult::Codomain { .. }) => {}
            Err(e) => warnings.push(format!("kernel {i}: {e}")),
        }
    }
    let (subcover_status, subcover) = match subcover_search(curve, opts.d_max, &opts.limits) {
        Ok(sc) => {
            let (r1, r2) = sc.residuals(&curve.f, k);
            let j = SubcoverJson {
                branch: match sc.branch {
                    SubcoverBranch::Generic => "generic",
                    SubcoverBranch::Quadratic => "quadratic",
                }
                .into(),
                degree: sc.degree.to_string(),
                f1: poly(&sc.f1),
                f2: poly(&sc.f2),
                g1: poly(&sc.g1),
                g2: poly(&sc.g2),
                a: elem(&sc.a),
                b: elem(&sc.b),
                residuals_zero: r1.is_zero() && r2.is_zero(),
            };
            ("found".to_string(), Some(j))
        }
        Err(Error::NotFound) => (format!("not found up to d = {}", opts.d_max), None),
        Err(e @ (Error::Capacity(_) | Error::Unsupported(_))) => {
            warnings.push(format!("subcover search: {e}"));
            (format!("capacity: {e}"), None)
        }
        Err(e) => return Err(e.into()),
    };
    let (iezzi_status, iezzi) = if opts.try_iezzi { iezzi_json(curve, class, opts)? } else { (None, None) };
    Ok(SplitJson { factors, subcover_status, subcover, iezzi_status, iezzi, v4: v4_json(curve, class, opts)? })
}

fn iezzi_json(
    curve: &Genus2Curve,
    class: &ClassificationReport,
    opts: &Options,
) -> Result<(Option<String>, Option<IezziJson>), CliError> {
    let k = &curve.k;
    let roots = curve.f.root_set(k);
    if curve.f.deg() != 6 || roots.len() != 6 {
        return Ok((Some("f does not split over the base field".into()), None));
    }
    let a: [_; 6] = roots.try_into().unwrap();
    let Some(ord) = iezzi_orderings(k, &a).into_iter().next() else {
        return Ok((Some("no valid root ordering".into()), None));
    };
    let ordered = ord.map(|i| a[i].clone());
    let (ep, em) = iezzi_split(k, &ordered, curve.f.lc().unwrap())?;
    let charpoly_check = check(product_frob(&ep, &em, &opts.limits), &class.frob)?;
    let j = IezziJson {
        ordering: ordered.iter().map(elem).collect(),
        e_plus: EllipticJson::new(&ep, k.degree()),
        e_minus: EllipticJson::new(&em, k.degree()),
        charpoly_check,
    };
    Ok((Some("split".into()), Some(j)))
}

/// The V4 covers when f = x⁶ + t·x⁴ + s·x² + 1.
fn v4_json(curve: &Genus2Curve, class: &ClassificationReport, opts: &Options) -> Result<Option<V4Json>, CliError> {
    let k = &curve.k;
    let f = &curve.f;
    let c = |i: usize| f.coeff(i, k);
    if f.deg() != 6 || c(6) != k.one() || c(0) != k.one() || !(c(1).is_zero() && c(3).is_zero() && c(5).is_zero()) {
        return Ok(None);
    }
    let v = v4_covers(k, &c(4), &c(2))?;
    let jac = v.jacobian()?;
    let mut annihilated = true;
    for (p, q) in &v.kernel {
        annihilated &= v.pullback_sum(&jac, p, q)?.is_zero();
    }
    if !annihilated {
        return Err(CliError::Invariant("a V4 kernel element survives".into()));
    }
    Ok(Some(V4Json {
        t: elem(&c(4)),
        s: elem(&c(2)),
        e_ts: EllipticJson::new(&v.e_ts, k.degree()),
        e_st: EllipticJson::new(&v.e_st, k.degree()),
        kernel_annihilated: annihilated,
        charpoly_check: check(product_frob(&v.e_ts, &v.e_st, &opts.limits), &class.frob)?,
    }))
}
