//! Executes parsed jobs and builds their JSON results. Every number leaves as
//! a decimal string, rationals as `"p/q"`; object keys come out sorted.

use mukai_core::advisor::{
    classify_with, deformation_class, kummer4_reduce, special_locus, ClassifyContext, DeformationClass, Verdict,
};
use mukai_core::albanese::quasi_section_product;
use mukai_core::fm::{
    dual_map, elliptic_fm, isotropic_fm, isotropic_g, poincare_f_map, poincare_g_map, twist_map, IsometryMap,
};
use mukai_core::kummer::{
    beauville_lattice, fujiki_constant, fujiki_sides, rank2_orthogonally_decomposable, top_intersection,
};
use mukai_core::walls::{
    chambers_on_segment, enumerate_walls_brute_force, enumerate_walls_with_stats, is_general, wall_certificate,
};
use mukai_core::{
    bogomolov_discriminant, divisibility, moduli_dim, mukai_pair, mukai_square, perp_basis, DefaultEffectivity,
    IntMatrix, LatticeGram, MukaiVector, SurfaceModel,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::job::{
    AlbaneseInputs, ClassifyInputs, CliError, Command, DeformInputs, FmInputs, FmMap, FujikiInputs, Inputs, JobSpec,
    PairInputs, ReportFormat, ReportInputs, VectorInputs, WallsInputs, EXIT_INTERNAL,
};
use crate::render::{render_csv, render_table};

fn s(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

fn list<T: std::fmt::Display>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(s).collect())
}

fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| list(r)).collect())
}

/// `1 − 2ω`, `−(1 + H + 3ω)`, `2 + H1 − H2`: the leading sign is factored out.
pub fn expression(v: &MukaiVector) -> String {
    let coords = v.coords();
    match coords.iter().find(|c| !c.is_zero()) {
        None => "0".into(),
        Some(c) if c.is_negative() => format!("−({})", expression(&-v)),
        Some(_) => {
            let rho = v.ns_rank();
            let mut terms: Vec<(BigInt, String)> = vec![(v.r.clone(), String::new())];
            for (i, c) in v.c1.iter().enumerate() {
                let name = if rho == 1 { "H".to_string() } else { format!("H{}", i + 1) };
                terms.push((c.clone(), name));
            }
            terms.push((v.a.clone(), "ω".into()));
            let mut out = String::new();
            for (c, name) in terms.into_iter().filter(|(c, _)| !c.is_zero()) {
                let mag = c.abs();
                let body = if name.is_empty() {
                    mag.to_string()
                } else if mag.is_one() {
                    name
                } else {
                    format!("{mag}{name}")
                };
                if out.is_empty() {
                    out = if c.is_negative() { format!("−{body}") } else { body };
                } else {
                    out.push_str(if c.is_negative() { " − " } else { " + " });
                    out.push_str(&body);
                }
            }
            out
        }
    }
}

pub fn vector(v: &MukaiVector) -> Value {
    json!({ "r": s(&v.r), "c1": list(&v.c1), "a": s(&v.a), "text": expression(v) })
}

fn lattice(l: &LatticeGram) -> Result<Value, CliError> {
    let mut out = json!({
        "rank": l.rank(),
        "gram": matrix(l.gram()),
        "discriminant": s(l.discriminant()),
    });
    if let Some(b) = l.basis() {
        out["basis"] = Value::Array(b.iter().map(vector).collect());
    }
    if l.rank() == 2 && !l.discriminant().is_zero() {
        out["indecomposable"] = Value::Bool(!rank2_orthogonally_decomposable(l)?);
    }
    Ok(out)
}

fn need_surface(job: &JobSpec) -> Result<&SurfaceModel, CliError> {
    job.surface.as_ref().ok_or_else(|| CliError::at("surface", "missing surface"))
}

pub fn run_job(job: &JobSpec) -> Result<Value, CliError> {
    match &job.inputs {
        Inputs::Pair(i) => pair(need_surface(job)?, i),
        Inputs::Perp(i) => perp(need_surface(job)?, i),
        Inputs::Fm(i) => fm(need_surface(job)?, i),
        Inputs::Walls(i) => walls(need_surface(job)?, i),
        Inputs::Classify(i) => classify(need_surface(job)?, i),
        Inputs::Kummer(i) => kummer(need_surface(job)?, i),
        Inputs::Deform(i) => deform(need_surface(job)?, i),
        Inputs::AlbaneseCheck(i) => albanese(i),
        Inputs::Fujiki(i) => fujiki(i),
        Inputs::Report(i) => report(i),
    }
}

/// `{"command", "ok", "result" | "error"}` and the exit code.
pub fn envelope(command: Option<Command>, outcome: Result<Value, CliError>) -> (Value, u8) {
    let cmd = command.map_or(Value::Null, |c| s(c.as_str()));
    match outcome {
        Ok(result) => (json!({ "command": cmd, "ok": true, "result": result }), 0),
        Err(e) => {
            let mut err = json!({ "code": e.code, "message": e.message });
            if let Some(p) = e.path {
                err["path"] = s(p);
            }
            (json!({ "command": cmd, "ok": false, "error": err }), e.exit)
        }
    }
}

pub fn run_value(job: Value) -> (Value, u8) {
    let named =
        job.get("command").and_then(Value::as_str).and_then(|c| Command::ALL.into_iter().find(|k| k.as_str() == c));
    match crate::job::parse_job_value(job) {
        Ok(j) => envelope(Some(j.command), run_job(&j)),
        Err(e) => envelope(named, Err(e)),
    }
}

fn pair(sf: &SurfaceModel, i: &PairInputs) -> Result<Value, CliError> {
    let (v, w) = (&i.v.0, &i.w.0);
    Ok(json!({ "v": vector(v), "w": vector(w), "pair": s(mukai_pair(v, w, sf)?) }))
}

fn perp(sf: &SurfaceModel, i: &VectorInputs) -> Result<Value, CliError> {
    let v = &i.v.0;
    Ok(json!({
        "v": vector(v),
        "square": s(mukai_square(v, sf)?),
        "perp": lattice(&perp_basis(v, sf)?)?,
    }))
}

fn isometry_json(m: &IsometryMap, v: &MukaiVector) -> Result<Value, CliError> {
    let image = m.apply(v)?;
    Ok(json!({
        "map": m.label().as_str(),
        "matrix": matrix(m.matrix()),
        "v": vector(v),
        "image": vector(&image),
        "target_gram": matrix(m.target().ns_gram()),
    }))
}

fn fm(sf: &SurfaceModel, i: &FmInputs) -> Result<Value, CliError> {
    let need_v = || i.v.as_ref().map(|v| v.0.clone()).ok_or_else(|| CliError::at("inputs.v", "this map needs `v`"));
    let params =
        || i.params.as_ref().ok_or_else(|| CliError::at("inputs.params", "isotropic maps need `params`"))?.build();
    let map = match i.map {
        FmMap::PoincareF => poincare_f_map(sf)?,
        FmMap::PoincareG => poincare_g_map(sf)?,
        FmMap::IsotropicF | FmMap::IsotropicG => {
            let p = params()?;
            let m = if i.map == FmMap::IsotropicF { isotropic_fm(&p, sf.kind())? } else { isotropic_g(&p, sf.kind())? };
            if m.source().ns_gram() != sf.ns_gram() {
                return Err(CliError::from(mukai_core::Error::Precondition(format!(
                    "the parameters need gram [[{}]], the surface has {:?}",
                    p.h_square(),
                    sf.ns_gram()
                ))));
            }
            m
        }
        FmMap::Dual => dual_map(sf),
        FmMap::Twist => {
            let l = i.twist.as_ref().ok_or_else(|| CliError::at("inputs.twist", "twist needs a line bundle class"))?;
            twist_map(sf, &l.iter().map(|x| x.0.clone()).collect::<Vec<_>>())?
        }
        FmMap::Elliptic => {
            let fib =
                i.fibration.as_ref().ok_or_else(|| CliError::at("inputs.fibration", "elliptic needs a fibration"))?;
            let data = i.data.as_ref().ok_or_else(|| CliError::at("inputs.data", "elliptic needs (r, l, n)"))?.build();
            let fib = fib.build(sf)?;
            let src = fib.source_triple(&data);
            let img = elliptic_fm(&data, &fib)?;
            let signed = img.triple.to_mukai(sf).scale(&BigInt::from(img.sign));
            return Ok(json!({
                "map": "elliptic-f",
                "source": { "rank": s(&src.rank), "c1": list(&src.c1), "chi": s(&src.chi), "vector": vector(&src.to_mukai(sf)) },
                "image": { "rank": s(&img.triple.rank), "c1": list(&img.triple.c1), "chi": s(&img.triple.chi) },
                "sign": img.sign,
                "cohomology_image": vector(&signed),
            }));
        }
    };
    isometry_json(&map, &need_v()?)
}

fn rationals(xs: &[BigRational]) -> Value {
    list(xs)
}

fn walls(sf: &SurfaceModel, i: &WallsInputs) -> Result<Value, CliError> {
    let c1e: Vec<BigInt> = i.c1e.iter().map(|x| x.0.clone()).collect();
    let l0: Vec<BigInt> = match &i.l0 {
        Some(l) => l.iter().map(|x| x.0.clone()).collect(),
        None => sf.ample_ray().to_vec(),
    };
    let eff = DefaultEffectivity;
    let e = enumerate_walls_with_stats(&c1e, &i.chie.0, sf, &l0, &eff)?;
    let walls: Vec<Value> = e
        .walls
        .iter()
        .map(|w| {
            Ok(json!({
                "xi": list(&w.xi),
                "witness": { "c1f": list(&w.witness_c1f), "chif": s(&w.witness_chif) },
                "certificate": rationals(&wall_certificate(&w.xi, sf)?),
            }))
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = json!({
        "count": e.walls.len(),
        "candidate_classes": e.candidate_classes,
        "max_chi_interval": e.max_chi_interval,
        "l0": list(&l0),
        "walls": walls,
    });
    if i.oracle {
        let slow = enumerate_walls_brute_force(&c1e, &i.chie.0, sf, &l0, &eff)?;
        if slow != e.walls {
            return Err(CliError {
                code: "oracle-mismatch".into(),
                message: format!("optimized search found {} walls, brute force {}", e.walls.len(), slow.len()),
                path: None,
                exit: EXIT_INTERNAL,
            });
        }
        out["oracle"] = json!({ "agrees": true, "count": slow.len() });
    }
    if let Some(h) = &i.polarisation {
        let h: Vec<BigInt> = h.iter().map(|x| x.0.clone()).collect();
        out["polarisation"] = json!({ "class": list(&h), "general": is_general(&h, &e.walls, sf)? });
    }
    if let Some(seg) = &i.segment {
        let p0: Vec<BigInt> = seg.from.iter().map(|x| x.0.clone()).collect();
        let p1: Vec<BigInt> = seg.to.iter().map(|x| x.0.clone()).collect();
        let sl = chambers_on_segment(&e.walls, &p0, &p1, sf)?;
        out["segment"] = json!({
            "start_on_wall": sl.start_on_wall,
            "end_on_wall": sl.end_on_wall,
            "chambers": sl.chambers.iter().map(|c| json!({
                "t": [s(&c.t_lo), s(&c.t_hi)],
                "sample": rationals(&c.point),
                "signs": c.signs,
            })).collect::<Vec<_>>(),
        });
    }
    Ok(out)
}

fn verdict(v: &Verdict) -> Value {
    json!({
        "theorem": v.theorem.as_str(),
        "applicable": v.applicable,
        "sign": v.sign,
        "conditions": v.conditions.iter().map(|c| json!({
            "name": c.name, "value": c.value, "required": c.required, "ok": c.ok,
        })).collect::<Vec<_>>(),
        "target": v.target.as_ref().map_or(Value::Null, |t| json!({
            "surface": t.surface.as_str(),
            "kind": t.kind.as_str(),
            "vector": vector(&t.vector),
        })),
        "sub_cases": v.sub_cases,
    })
}

fn classify(sf: &SurfaceModel, i: &ClassifyInputs) -> Result<Value, CliError> {
    let v = &i.v.0;
    let ctx = ClassifyContext {
        isotropic: i.context.isotropic.as_ref().map(|p| p.build()).transpose()?,
        fibration: i.context.fibration.as_ref().map(|f| f.build(sf)).transpose()?,
        assume_star: i.context.assume_star,
        assume_general: i.context.assume_general,
    };
    let verdicts = classify_with(v, sf, &ctx)?;
    let dim = moduli_dim(v, sf)?;
    let mut out = json!({
        "v": vector(v),
        "surface_kind": sf.kind().as_str(),
        "square": s(mukai_square(v, sf)?),
        "divisibility": s(divisibility(v)),
        "dim": s(&dim.dim),
        "verdicts": verdicts.iter().map(verdict).collect::<Vec<_>>(),
        "perp": lattice(&perp_basis(v, sf)?)?,
    });
    if let Some(f) = &dim.fiber_dim {
        out["fiber_dim"] = s(f);
    }
    if v.r.is_positive() {
        out["discriminant"] = s(bogomolov_discriminant(v, sf)?);
    }
    Ok(out)
}

fn kummer(sf: &SurfaceModel, i: &VectorInputs) -> Result<Value, CliError> {
    let v = &i.v.0;
    let sq = mukai_square(v, sf)?;
    let mut out = json!({ "v": vector(v), "square": s(&sq) });
    if sq == BigInt::from(4) {
        let k = kummer4_reduce(v, sf)?;
        out["reduction"] = json!({
            "case": k.case.as_str(),
            "w_rank": s(&k.w_rank),
            "w_c1_square": s(&k.w_c1_square),
            "w_omega": s(&k.w_omega),
            "w_square": s(k.w_square()),
            "isotropy_ok": k.isotropy_ok,
        });
    } else {
        let b = beauville_lattice(v, sf)?;
        out["beauville"] = json!({
            "n": s(&b.n),
            "fiber_dim": s(BigInt::from(2) * &b.n - 2),
            "fujiki_constant": s(&b.fujiki_constant),
            "lattice": lattice(&b.lattice)?,
        });
    }
    if let Ok(l) = special_locus(v, sf) {
        out["special_locus"] =
            json!({ "codim": s(&l.codim), "components": s(&l.components), "fiber_dim": s(&l.fiber_dim) });
    }
    Ok(out)
}

fn class_json(c: &DeformationClass) -> Value {
    match c {
        DeformationClass::Abelian { rank_positive, ell, square, a_mod_ell, hilb } => json!({
            "surface": "abelian",
            "rank_positive": rank_positive,
            "divisibility": s(ell),
            "square": s(square),
            "a_mod_divisibility": s(a_mod_ell),
            "hilb": s(hilb),
        }),
        DeformationClass::K3 { hilb } => json!({ "surface": "k3", "hilb": s(hilb) }),
    }
}

fn deform(sf: &SurfaceModel, i: &DeformInputs) -> Result<Value, CliError> {
    let classes = i
        .vectors
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let c = deformation_class(&v.0, sf).map_err(|e| {
                let mut err = CliError::from(e);
                err.path = Some(format!("inputs.vectors[{k}]"));
                err
            })?;
            Ok(json!({ "v": vector(&v.0), "class": class_json(&c), "model": c.model() }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(json!({ "classes": classes }))
}

fn albanese(i: &AlbaneseInputs) -> Result<Value, CliError> {
    let (r, a, chi) = (&i.r.0, &i.a.0, &i.chi.0);
    let m = quasi_section_product(r, a, chi)?;
    let n = chi - r * a;
    let entries: Vec<Value> = (0..2).map(|p| Value::Array((0..2).map(|q| s(m.entry(p, q))).collect())).collect();
    let holds = m == mukai_core::albanese::AlbaneseMatrix::scalar(&n);
    Ok(json!({ "r": s(r), "a": s(a), "chi": s(chi), "n": s(&n), "product": entries, "holds": holds }))
}

fn fujiki(i: &FujikiInputs) -> Result<Value, CliError> {
    let (l2, lx, x2) = (&i.l2.0, &i.lx.0, &i.x2.0);
    let (lhs, rhs) = fujiki_sides(i.n, l2, lx, x2, x2)?;
    let mut out = json!({
        "n": i.n,
        "fujiki_constant": s(fujiki_constant(&BigInt::from(i.n))),
        "lhs": s(&lhs),
        "rhs": s(&rhs),
        "holds": lhs == rhs,
    });
    if let Some(shape) = &i.shape {
        let sh = shape.parse().map_err(|e: mukai_core::Error| {
            let mut err = CliError::from(e);
            err.path = Some("inputs.shape".into());
            err
        })?;
        out["intersection"] = json!({ "shape": shape, "value": s(top_intersection(i.n, l2, lx, x2, sh)?) });
    }
    Ok(out)
}

fn report(i: &ReportInputs) -> Result<Value, CliError> {
    let text = match i.format {
        ReportFormat::Table => render_table(&i.results, false)?,
        ReportFormat::Csv => render_csv(&i.results)?,
    };
    Ok(json!({ "format": if i.format == ReportFormat::Csv { "csv" } else { "table" }, "text": text }))
}
