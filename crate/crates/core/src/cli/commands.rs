use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Number, Value};

use super::report::{render, Report, ScanReport, Table};
use super::{
    BoundsArgs, Cli, CliError, Command, ConstructArgs, DensityArgs, DiscArgs, FrobeniusArgs, HeuristicArgs, KummerArgs,
    ModeArg, SfArgs, TfArgs, TupleArgs, WitnessArgs,
};
use crate::bounds::{self, BoundConfig, EXACT_DISCRIMINANT_LIMIT};
use crate::chebotarev;
use crate::lattice;
use crate::modular::PrimeCache;
use crate::powermap::{
    construct_prescribed, empirical_sequence_exponent, find_witness, scan_sf, tf_scan, vote_nu_f, DecisionMode,
    FunctionSpec, Membership, MultiplicativeMap,
};
use crate::ratfact::{format_fraction, FactoredRational, RatError};

/// Largest `x` for which `bounds` sieves π(x) itself.
const SIEVE_PI_LIMIT: u64 = 1_000_000_000;
/// Members listed in the summary of an S_f or T_f scan.
const SUMMARY_MEMBERS: usize = 100;

struct Ctx<'a> {
    cli: &'a Cli,
    config: BoundConfig,
}

pub(super) fn dispatch(cli: &Cli, config: &BoundConfig) -> Result<String, CliError> {
    let ctx = Ctx { cli, config: *config };
    let is_scan = matches!(
        cli.command,
        Command::SfScan(_) | Command::TfScan(_) | Command::DensityScan(_) | Command::Heuristic(_)
    );
    if cli.global.csv.is_some() && !is_scan {
        return Err(CliError::Usage(format!(
            "--csv does not apply to {}",
            cli.command.name()
        )));
    }
    match &cli.command {
        Command::SfScan(a) => ctx.scan_output(sf_scan(&ctx, a)?),
        Command::TfScan(a) => ctx.scan_output(tf(&ctx, a)?),
        Command::DensityScan(a) => ctx.scan_output(density(&ctx, a)?),
        Command::Heuristic(a) => ctx.scan_output(heuristic(&ctx, a)?),
        Command::Witness(a) => ctx.report("witness", a, witness(a)?),
        Command::Construct(a) => ctx.report("construct", a, construct(a)?),
        Command::Relations(a) => ctx.report("relations", a, relations(a)?),
        Command::KummerDegree(a) => ctx.report("kummer-degree", a, kummer(a)?),
        Command::Frobenius(a) => ctx.report("frobenius", a, frobenius(a)?),
        Command::Bounds(a) => ctx.report("bounds", a, bounds_cmd(&ctx, a)?),
        Command::Disc(a) => ctx.report("disc", a, disc(a)?),
    }
}

impl Ctx<'_> {
    fn cache(&self, limit: u64) -> Result<PrimeCache, CliError> {
        match &self.cli.global.prime_cache {
            Some(path) => {
                eprintln!("prime cache {}: need primes up to {limit}", path.display());
                Ok(PrimeCache::load_or_build(path, limit)?)
            }
            None => {
                eprintln!("sieving primes up to {limit}");
                Ok(PrimeCache::new(limit))
            }
        }
    }

    fn scan_output(&self, (report, table): (ScanReport, Table)) -> Result<String, CliError> {
        if let Some(path) = &self.cli.global.csv {
            table.write(path).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Ok(render(&report))
    }

    fn report(
        &self,
        command: &'static str,
        args: &impl Serialize,
        body: Map<String, Value>,
    ) -> Result<String, CliError> {
        Ok(render(&Report {
            command,
            parameters: to_value(args),
            body,
            config: self.config,
        }))
    }

    fn scan(&self, command: &'static str, args: &impl Serialize, x: u64, cache: &PrimeCache) -> ScanReport {
        ScanReport {
            command,
            parameters: to_value(args),
            range: (2, x),
            counted: 0,
            skipped: 0,
            observed: None,
            expected: None,
            summary: Value::Null,
            items: None,
            cache_limit: cache.limit(),
            config: self.config,
        }
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("arguments serialize")
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(map) => map,
        other => Map::from_iter([("value".to_string(), other)]),
    }
}

fn load_function(path: &Path) -> Result<MultiplicativeMap, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Spec(format!("cannot read function spec {}: {e}", path.display())))?;
    let spec = FunctionSpec::from_json(&text).map_err(|e| CliError::Spec(e.to_string()))?;
    spec.build()
        .map_err(|e| CliError::Spec(format!("invalid function spec: {e}")))
}

fn parse_tuple(text: &str) -> Result<Vec<FactoredRational>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<FactoredRational>().map_err(|e| match e {
                RatError::Parse(_) => CliError::Usage(format!("tuple entry {s:?}: {e}")),
                other => other.into(),
            })
        })
        .collect()
}

fn parse_list(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("not a positive integer: {s:?}")))
        })
        .collect()
}

fn parse_pairs(text: &str) -> Result<BTreeMap<u64, u64>, CliError> {
    text.split(',')
        .map(|pair| {
            let bad = || CliError::Usage(format!("expected p:k, got {pair:?}"));
            let (p, k) = pair.trim().split_once(':').ok_or_else(bad)?;
            Ok((
                p.trim().parse().map_err(|_| bad())?,
                k.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn share(part: u64, whole: u64) -> Option<f64> {
    (whole > 0).then(|| part as f64 / whole as f64)
}

fn bool_cell(b: bool) -> String {
    u8::from(b).to_string()
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn sf_scan(ctx: &Ctx, a: &SfArgs) -> Result<(ScanReport, Table), CliError> {
    let f = load_function(&a.function)?;
    let cache = ctx.cache(a.limit)?;
    let mode = match a.mode {
        ModeArg::Exact => DecisionMode::Exact,
        ModeArg::Empirical => DecisionMode::Empirical { bound: a.bound },
    };
    let s = scan_sf(&f, &cache, a.limit, mode)?;
    let members: Vec<u64> = s.members().map(|v| v.p).collect();
    let unknown = s.verdicts.iter().filter(|v| v.member == Membership::Unknown).count();
    let mut table = Table::new(&["p", "member", "k_p"]);
    for v in &s.verdicts {
        let member = to_value(&v.member).as_str().unwrap_or_default().to_string();
        let k = v.k_p.map(|k| k.to_string()).unwrap_or_default();
        table.rows.push(vec![v.p.to_string(), member, k]);
    }
    let mut r = ctx.scan("sf-scan", a, a.limit, &cache);
    r.counted = s.count();
    r.skipped = s.pi_x - s.count();
    r.observed = share(s.count(), s.pi_x);
    r.summary = json!({
        "function": f.to_spec(),
        "mode": mode,
        "members": &members[..members.len().min(SUMMARY_MEMBERS)],
        "members_truncated": members.len() > SUMMARY_MEMBERS,
        "unknown": unknown,
        "nu_f_vote": vote_nu_f(&s.verdicts),
    });
    if a.items {
        r.items = Some(s.verdicts.iter().map(to_value).collect());
    }
    Ok((r, table))
}

fn tf(ctx: &Ctx, a: &TfArgs) -> Result<(ScanReport, Table), CliError> {
    let f = load_function(&a.function)?;
    let cache = ctx.cache(a.limit)?;
    let t = tf_scan(&f, &cache, a.limit, a.bound)?;
    let s = scan_sf(&f, &cache, a.limit, DecisionMode::Exact)?;
    let in_s: Vec<u64> = s.members().map(|v| v.p).collect();
    let t_minus_s: Vec<u64> = t
        .members
        .iter()
        .copied()
        .filter(|p| in_s.binary_search(p).is_err())
        .collect();
    let s_minus_t: Vec<u64> = in_s
        .iter()
        .copied()
        .filter(|p| t.members.binary_search(p).is_err())
        .collect();
    let mut table = Table::new(&["p", "in_t", "in_s"]);
    let mut items = Vec::new();
    for &p in cache.primes_up_to(a.limit) {
        let (it, is) = (t.members.binary_search(&p).is_ok(), in_s.binary_search(&p).is_ok());
        table.rows.push(vec![p.to_string(), bool_cell(it), bool_cell(is)]);
        items.push(json!({ "p": p, "in_t": it, "in_s": is }));
    }
    let counted = t.members.len() as u64;
    let mut r = ctx.scan("tf-scan", a, a.limit, &cache);
    r.counted = counted;
    r.skipped = t.pi_x - counted;
    r.observed = share(counted, t.pi_x);
    r.summary = json!({
        "function": f.to_spec(),
        "members": &t.members[..t.members.len().min(SUMMARY_MEMBERS)],
        "members_truncated": t.members.len() > SUMMARY_MEMBERS,
        "s_f_count": in_s.len(),
        "t_minus_s": t_minus_s,
        "s_minus_t": s_minus_t,
    });
    if a.items {
        r.items = Some(items);
    }
    Ok((r, table))
}

fn density(ctx: &Ctx, a: &DensityArgs) -> Result<(ScanReport, Table), CliError> {
    let c = parse_tuple(&a.tuple)?;
    let cache = ctx.cache(a.limit)?;
    let mut r = ctx.scan("density-scan", a, a.limit, &cache);
    if a.split {
        let s = chebotarev::split_scan(a.ell, &c, &cache, a.limit)?;
        r.counted = s.counted;
        r.skipped = s.skipped;
        r.observed = share(s.split, s.counted);
        r.expected = Some(s.expected);
        r.summary = json!({ "filter": format!("p = 1 mod {}", a.ell), "split": s.split });
        return Ok((r, Table::new(&["p"])));
    }
    let s = chebotarev::scan_density(a.ell, &c, &cache, a.limit, a.items || ctx.cli.global.csv.is_some())?;
    let mut table = Table::new(&["p", "in_class", "z", "b"]);
    for row in &s.items {
        table.rows.push(vec![
            row.p.to_string(),
            bool_cell(row.in_class),
            join(&row.z),
            join(&row.b),
        ]);
    }
    r.counted = s.counted;
    r.skipped = s.skipped;
    r.observed = share(s.in_class, s.counted);
    r.expected = Some(s.expected);
    r.summary = json!({
        "filter": format!("p = 1 mod {}", a.ell),
        "in_class": s.in_class,
        "deviation": s.deviation,
        "kummer": s.kummer,
        "class": s.class,
    });
    if a.items {
        r.items = Some(s.items.iter().map(to_value).collect());
    }
    Ok((r, table))
}

fn heuristic(ctx: &Ctx, a: &HeuristicArgs) -> Result<(ScanReport, Table), CliError> {
    let f = load_function(&a.function)?;
    let witnesses = parse_list(&a.witnesses)?;
    let cache = ctx.cache(a.limit)?;
    let h = chebotarev::heuristic_scan(&f, &witnesses, &cache, a.limit)?;
    let mut table = Table::new(&["p"]);
    table.rows = h.members.iter().map(|p| vec![p.to_string()]).collect();
    let mut r = ctx.scan("heuristic", a, a.limit, &cache);
    r.counted = h.counted;
    r.skipped = h.pi_x - h.counted;
    r.observed = share(h.counted, h.pi_x);
    r.summary = json!({
        "function": f.to_spec(),
        "excluded": h.skipped,
        "heuristic_sum": h.heuristic_sum,
        "members": &h.members[..h.members.len().min(SUMMARY_MEMBERS)],
        "members_truncated": h.members.len() > SUMMARY_MEMBERS,
    });
    if a.items {
        r.items = Some(h.members.iter().map(|p| json!({ "p": p })).collect());
    }
    Ok((r, table))
}

fn witness(a: &WitnessArgs) -> Result<Map<String, Value>, CliError> {
    let f = load_function(&a.function)?;
    let w = find_witness(&f, a.count, a.search_limit)?;
    let values: Vec<String> = w
        .iter()
        .map(|&n| f.evaluate_integer(n as i64).map(|v| format_fraction(&v)))
        .collect::<Result<_, _>>()?;
    Ok(object(
        json!({ "function": f.to_spec(), "witnesses": w, "values": values }),
    ))
}

fn construct(a: &ConstructArgs) -> Result<Map<String, Value>, CliError> {
    let g = construct_prescribed(&parse_pairs(&a.exponents)?)?;
    let checks = g
        .exponents()
        .keys()
        .map(|&p| empirical_sequence_exponent(&g, p, a.bound))
        .collect::<Result<Vec<_>, _>>()?;
    let values: Vec<u64> = (1..=a.values).map(|n| g.value(n)).collect();
    Ok(object(json!({
        "modulus": g.modulus(),
        "exponents": g.exponents(),
        "values": values,
        "checks": checks,
    })))
}

fn relations(a: &TupleArgs) -> Result<Map<String, Value>, CliError> {
    let c = parse_tuple(&a.tuple)?;
    let rep = lattice::relations(&lattice::build_lattice(&c))?;
    let evaluated: Vec<String> = rep
        .kernel_basis
        .iter()
        .map(|n| format_fraction(&lattice::evaluate_relation(&c, n)))
        .collect();
    let mut body = object(to_value(&rep));
    body.insert("relation_values".into(), json!(evaluated));
    Ok(body)
}

fn kummer(a: &KummerArgs) -> Result<Map<String, Value>, CliError> {
    let c = parse_tuple(&a.tuple)?;
    Ok(object(to_value(&lattice::kummer_degree(&c, a.ell)?)))
}

fn frobenius(a: &FrobeniusArgs) -> Result<Map<String, Value>, CliError> {
    let c = parse_tuple(&a.tuple)?;
    let sample = chebotarev::frobenius_vector(a.p, a.ell, &c)?;
    let in_class = if c.len() % 2 == 0 {
        Some(chebotarev::in_c2k(&sample.b_vector, a.ell)?)
    } else {
        None
    };
    let mut body = object(to_value(&sample));
    body.insert("in_class".into(), json!(in_class));
    Ok(body)
}

fn bounds_cmd(ctx: &Ctx, a: &BoundsArgs) -> Result<Map<String, Value>, CliError> {
    if a.x.is_none() && a.mertens.is_none() && a.chebyshev.is_none() {
        return Err(CliError::Usage(
            "bounds needs at least one of --x, --mertens, --chebyshev".into(),
        ));
    }
    let cfg = &ctx.config;
    let mut body = Map::new();
    let mut cache_limit = None;
    if let Some(x) = a.x {
        body.insert("schedule".into(), to_value(&bounds::yz_schedule(x, cfg)?));
        body.insert("ratio".into(), json!(bounds::ratio_term(x.ln())?));
        if let Some(b_f) = a.b_f {
            let pi_x = match a.pi_x {
                Some(pi) => pi,
                None if x <= SIEVE_PI_LIMIT as f64 => {
                    let cache = ctx.cache(x as u64)?;
                    cache_limit = Some(cache.limit());
                    cache.pi(x as u64)?
                }
                None => return Err(CliError::Usage(format!("x = {x} is beyond the sieve; pass --pi-x"))),
            };
            body.insert(
                "main_bound".into(),
                to_value(&bounds::main_bound(x, pi_x as f64, b_f, cfg)?),
            );
        }
    }
    let mut need = 0u64;
    let mertens = match &a.mertens {
        Some(text) => {
            let (y, z) = text
                .split_once(',')
                .and_then(|(y, z)| Some((y.trim().parse::<f64>().ok()?, z.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| CliError::Usage(format!("expected Y,Z, got {text:?}")))?;
            need = need.max(z.max(0.0).ceil() as u64);
            Some((y, z))
        }
        None => None,
    };
    if let Some(z) = a.chebyshev {
        need = need.max(z);
    }
    if need > 0 {
        let cache = ctx.cache(need)?;
        cache_limit = Some(cache.limit());
        if let Some((y, z)) = mertens {
            body.insert(
                "mertens".into(),
                json!({ "y": y, "z": z, "product": bounds::mertens_product(y, z, &cache)? }),
            );
        }
        if let Some(z) = a.chebyshev {
            let at_z = bounds::chebyshev_check(z as f64, cfg, &cache)?;
            let first_failure = bounds::chebyshev_scan(z, cfg, &cache)?;
            body.insert(
                "chebyshev".into(),
                json!({ "at_z": at_z, "holds_up_to_z": first_failure.is_none(), "first_failure": first_failure }),
            );
        }
    }
    if let Some(limit) = cache_limit {
        body.insert("cache_limit".into(), json!(limit));
    }
    Ok(body)
}

fn disc(a: &DiscArgs) -> Result<Map<String, Value>, CliError> {
    if let Some(n) = a.cyclotomic {
        let phi = bounds::euler_phi(n)?;
        let (sign, log_abs) = bounds::cyclotomic_discriminant_log(n)?;
        let value = if n <= EXACT_DISCRIMINANT_LIMIT {
            let d = bounds::cyclotomic_discriminant(n)?;
            Value::Number(d.to_string().parse::<Number>().expect("integer literal"))
        } else {
            Value::Null
        };
        let log_cap = phi as f64 * (n as f64).ln();
        return Ok(object(json!({
            "value": value,
            "sign": sign,
            "log_abs": log_abs,
            "degree": phi,
            "log_n_pow_phi": log_cap,
            "within_n_pow_phi": log_abs <= log_cap + 1e-9 * log_cap.max(1.0),
            "max_term": bounds::max_term(log_abs, phi),
        })));
    }
    let ell = a.kummer_ell.expect("clap enforces one field");
    let c = parse_tuple(a.tuple.as_deref().expect("clap enforces --tuple"))?;
    let k = lattice::kummer_degree(&c, ell)?;
    let log_bound = bounds::kummer_disc_log_bound(ell, k.d as u32, &c)?;
    Ok(object(json!({
        "ell": ell,
        "kummer_rank": k.d,
        "degree": k.degree.to_string().parse::<Number>().expect("integer literal"),
        "log_abs_bound": log_bound,
    })))
}
