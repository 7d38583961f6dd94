//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use pqw_core::finite_group::{automorphism_from_matrix, subgroup_generated};
use pqw_core::pi1::{armstrong_pi1, FixMode, Pi1Options};
use pqw_core::product_quotient::{
    betti_b1, etale_intermediate_cover, h1_theta, singular_census, subgroup_h, x_family, x_family_with_vector, y_family,
    z4_squared, SingularityType, X_VECTOR,
};
use pqw_fpgroup::{
    smith_normal_form, todd_coxeter, EnumerationLimits, FreeGroup, IntMatrix, Presentation, TransversalOrder,
};

type Outcome = Result<String, String>;

fn pqw(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pqw"))
        .env_remove("PQW_LIMITS")
        .args(args)
        .args(["--no-timing", "--json", "-"])
        .output()
        .map_err(|e| e.to_string())?;
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("{e}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok((out.status.code().unwrap_or(-1), v))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn z2(k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => "Z2".into(),
        _ => format!("Z2^{k}"),
    }
}

/// |π1(X_N)| for N = 2..4, collected for the cover count.
fn pi1_conformance(x_orders: &mut Vec<(usize, u64)>) -> Outcome {
    let mut notes = Vec::new();
    for n in 2..=4 {
        for (family, k) in [("X", n + 1), ("Y", n - 1)] {
            let start = Instant::now();
            let (code, r) = pqw(&["paper", "--family", family, "--n", &n.to_string()])?;
            let t = start.elapsed();
            let tag = r["pi1"]["isomorphism_type"].as_str().unwrap_or("none").to_string();
            ensure(r["pi1"]["status"] == "certified" && tag == z2(k), || {
                format!("{family}{n}: expected certified {}, got {} ({})", z2(k), tag, r["pi1"]["status"])
            })?;
            ensure(code == 0, || format!("{family}{n}: exit {code}"))?;
            ensure(t < Duration::from_secs(300), || format!("{family}{n} took {t:.1?}"))?;
            if family == "X" {
                x_orders.push((n, r["pi1"]["order"].as_u64().unwrap()));
            }
            notes.push(format!("{family}{n}={tag} {:.1}s", t.as_secs_f64()));
        }
    }
    for (family, k) in [("X", 6), ("Y", 4)] {
        let start = Instant::now();
        let (_, r) = pqw(&["paper", "--family", family, "--n", "5"])?;
        let t = start.elapsed().as_secs_f64();
        match r["pi1"]["status"].as_str() {
            Some("certified") => {
                let tag = r["pi1"]["isomorphism_type"].as_str().unwrap_or("none");
                ensure(tag == z2(k), || format!("{family}5 certified a wrong answer {tag}"))?;
                notes.push(format!("{family}5={tag} {t:.1}s"));
            }
            Some("undetermined") => notes.push(format!("{family}5 undetermined {t:.1}s")),
            other => return Err(format!("{family}5: unexpected status {other:?}")),
        }
    }
    Ok(notes.join(", "))
}

fn rigidity() -> Outcome {
    let start = Instant::now();
    for n in 2..=5 {
        let x = h1_theta(&x_family(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let y = h1_theta(&y_family(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(x == 0 && y == 3 * n as u64, || format!("n={n}: h1 = {x}, {y}"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:.1?}"))?;
    Ok(format!("h1(X_N)=0, h1(Y_N)=3N for N=2..5 in {:.0} ms", t.as_secs_f64() * 1e3))
}

fn census() -> Outcome {
    let mut notes = Vec::new();
    for n in 2..=5usize {
        let start = Instant::now();
        let c = singular_census(&x_family(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let t = start.elapsed();
        let want = 3u64 << (2 * n - 3);
        ensure(c.singular_points == want, || format!("n={n}: {} singular points, expected {want}", c.singular_points))?;
        ensure(c.stabilized_tuples == 3 * 4u64.pow(n as u32), || format!("n={n}: {} stabilized points", c.stabilized_tuples))?;
        ensure(c.records.iter().all(|r| r.kind == SingularityType::HalfOnes(n)), || format!("n={n}: other types"))?;
        ensure(t < Duration::from_secs(10), || format!("n={n} took {t:.1?}"))?;
        notes.push(format!("N={n}: {want}"));
    }
    Ok(notes.join(", "))
}

fn universal_cover(x_orders: &[(usize, u64)]) -> Outcome {
    ensure(x_orders.len() == 3, || "pi1 orders missing".into())?;
    let mut notes = Vec::new();
    for &(n, order) in x_orders {
        let c = singular_census(&x_family(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let want = 3u64 << (3 * n - 2);
        ensure(order * c.singular_points == want, || format!("n={n}: {order} x {} != {want}", c.singular_points))?;
        notes.push(format!("N={n}: {order} x {} = {want}", c.singular_points));
    }
    Ok(notes.join(", "))
}

fn fermat() -> Outcome {
    let start = Instant::now();
    let (code, r) = pqw(&["fermat-verify"])?;
    ensure(code == 0 && r["verdict"] == "PASS", || format!("exit {code}, verdict {}", r["verdict"]))?;
    let f = &r["fermat"];
    ensure(f["marked_points"].as_array().map(Vec::len) == Some(12), || "not 12 marked points".into())?;
    let orbits = f["orbits"].as_array().cloned().unwrap_or_default();
    ensure(orbits.len() == 3 && orbits.iter().all(|o| o["points"].as_array().map(Vec::len) == Some(4)), || {
        "not 3 orbits of 4".into()
    })?;
    // Stabilizers generated by (1,0), (0,1), (1,1) up to inversion.
    let mut gens: Vec<String> = Vec::new();
    for o in &orbits {
        let s: Vec<&str> = o["stabilizer"].as_array().unwrap().iter().filter_map(Value::as_str).collect();
        let g = ["(1,0)", "(0,1)", "(1,1)"].into_iter().find(|g| s.contains(g));
        let inv = ["(3,0)", "(0,3)", "(3,3)"];
        ensure(g.is_some() && s.len() == 4 && inv.iter().any(|i| s.contains(i)), || format!("stabilizer {s:?}"))?;
        gens.push(g.unwrap().to_string());
    }
    gens.sort();
    ensure(gens == ["(0,1)", "(1,0)", "(1,1)"], || format!("generators {gens:?}"))?;
    let branch: Vec<&str> = f["branch_points"].as_array().unwrap().iter().filter_map(Value::as_str).collect();
    let mut branch = branch.clone();
    branch.sort();
    // (1 : -1) is printed with its last coordinate normalized.
    ensure(branch == ["(-1 : 1)", "(0 : 1)", "(1 : 0)"], || format!("branch points {branch:?}"))?;
    let (code, r) = pqw(&["fermat-verify", "--subgroup", "H"])?;
    ensure(code == 0 && r["fermat"]["subgroup"]["orbit_sizes"] == serde_json::json!([2, 2, 2, 2, 2, 2]), || {
        format!("H-orbits {}", r["fermat"]["subgroup"]["orbit_sizes"])
    })?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(2), || format!("took {t:.1?}"))?;
    Ok(format!("12 points, 3 orbits of 4, H: 6 orbits of 2, branch points (0:1), (1:0), (1:-1); {:.0} ms for two runs", t.as_secs_f64() * 1e3))
}

fn etale() -> Outcome {
    let x = x_family(3).map_err(|e| e.to_string())?;
    let g = x.group.clone();
    let h = subgroup_h(&g).map_err(|e| e.to_string())?;
    let c = etale_intermediate_cover(&x, &h).map_err(|e| e.to_string())?;
    ensure(c.unramified && c.degree == 4, || format!("H: degree {}, unramified {}", c.degree, c.unramified))?;
    let d = subgroup_generated(&g, &[g.element_by_label("(2,2)").unwrap()]).map_err(|e| e.to_string())?;
    let c2 = etale_intermediate_cover(&x, &d).map_err(|e| e.to_string())?;
    ensure(!c2.unramified, || "<(2,2)> reported unramified".into())?;
    Ok(format!("H unramified of degree 4; <(2,2)> ramified (degree {})", c2.degree))
}

fn order(spec: &pqw_core::product_quotient::ProductQuotientSpec, o: Pi1Options) -> Result<u64, String> {
    armstrong_pi1(spec, &o).map_err(|e| e.to_string())?.certified_order().ok_or_else(|| format!("{} uncertified", spec.label))
}

fn properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let word = |rng: &mut ChaCha8Rng| -> Vec<i32> {
        (0..rng.gen_range(0..12)).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..4) } else { -rng.gen_range(1..4) }).collect()
    };
    let f = FreeGroup::new(3);
    for _ in 0..300 {
        let (a, b, c) = (word(&mut rng), word(&mut rng), word(&mut rng));
        let (a, b, c) = (f.free_reduce(&a).unwrap(), f.free_reduce(&b).unwrap(), f.free_reduce(&c).unwrap());
        let assoc = f.multiply(&f.multiply(&a, &b).unwrap(), &c).unwrap() == f.multiply(&a, &f.multiply(&b, &c).unwrap()).unwrap();
        ensure(assoc && f.multiply(&a, &f.invert(&a).unwrap()).unwrap().is_empty(), || "free group axioms".into())?;
    }
    for _ in 0..300 {
        let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let data: Vec<i64> = (0..r * c).map(|_| rng.gen_range(-20..21)).collect();
        let m = IntMatrix::from_i64(r, c, &data);
        let s = smith_normal_form(&m);
        ensure(s.left.mul(&m).mul(&s.right) == s.diagonal, || format!("SNF of {data:?}"))?;
    }
    for m in 1..=6 {
        for n in 1..=6 {
            let p = Presentation::parse(&format!("gens: a b\nrel: a^{m}\nrel: b^{n}\nrel: a b -a -b\n")).unwrap();
            let e = todd_coxeter(&p, &[], EnumerationLimits::default()).map_err(|e| e.to_string())?;
            let t = e.table().ok_or("enumeration incomplete")?;
            ensure(t.len() == m * n, || format!("Z{m} x Z{n}"))?;
            for g in 0..2 {
                let mut perm = t.permutation(g);
                perm.sort_unstable();
                ensure(perm == (0..t.len()).collect::<Vec<_>>(), || "coset table column is not a permutation".into())?;
            }
            ensure(p.relators().iter().all(|r| (0..t.len()).all(|c| t.trace(c, r) == c)), || "relator trace".into())?;
        }
    }
    let d = Pi1Options::default();
    let x3 = x_family(3).map_err(|e| e.to_string())?;
    let y3 = y_family(3).map_err(|e| e.to_string())?;
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        ensure(order(&x3.permuted(&perm).map_err(|e| e.to_string())?, d)? == 16, || format!("X3 permuted {perm:?}"))?;
        ensure(order(&y3.permuted(&perm).map_err(|e| e.to_string())?, d)? == 4, || format!("Y3 permuted {perm:?}"))?;
    }
    let g = z4_squared();
    let mut automorphisms = 0;
    for m in 0..256 {
        let rows = vec![vec![m & 3, (m >> 2) & 3], vec![(m >> 4) & 3, (m >> 6) & 3]];
        let Ok(phi) = automorphism_from_matrix(&g, &rows) else { continue };
        automorphisms += 1;
        let labels: Vec<String> = X_VECTOR.iter().map(|l| g.label(phi.apply(g.element_by_label(l).unwrap())).to_string()).collect();
        let spec = x_family_with_vector(3, &labels).map_err(|e| e.to_string())?;
        ensure(order(&spec, d)? == 16, || format!("X3 twisted by {rows:?}"))?;
    }
    ensure(automorphisms == 96, || format!("{automorphisms} automorphisms"))?;
    for seed in [11, 2024] {
        let o = Pi1Options { transversal: TransversalOrder::Shuffled(seed), ..d };
        ensure(order(&x3, o)? == 16 && order(&y3, o)? == 4, || format!("transversal seed {seed}"))?;
    }
    let mut y4_time = Duration::ZERO;
    for n in 2..=4 {
        let s = Instant::now();
        let r = armstrong_pi1(&y_family(n).map_err(|e| e.to_string())?, &d).map_err(|e| e.to_string())?;
        if n == 4 {
            y4_time = s.elapsed();
        }
        ensure(r.generators_are_involutions() == Some(true), || format!("Y{n}: generators not involutions"))?;
    }
    for n in 2..=3 {
        for spec in [x_family(n).map_err(|e| e.to_string())?, y_family(n).map_err(|e| e.to_string())?] {
            let orders: Vec<u64> = [FixMode::Saturated, FixMode::Normalized, FixMode::Reduced]
                .into_iter()
                .map(|fix_mode| order(&spec, Pi1Options { fix_mode, ..d }))
                .collect::<Result<_, _>>()?;
            ensure(orders.windows(2).all(|w| w[0] == w[1]), || format!("{}: Fix modes give {orders:?}", spec.label))?;
        }
    }
    for n in 2..=5 {
        ensure(betti_b1(&x_family(n).map_err(|e| e.to_string())?) == 0, || format!("b1(X{n})"))?;
        ensure(betti_b1(&y_family(n).map_err(|e| e.to_string())?) == 0, || format!("b1(Y{n})"))?;
    }
    let t = start.elapsed() - y4_time;
    ensure(t < Duration::from_secs(120), || format!("took {t:.1?}"))?;
    Ok(format!("all suites green in {:.1}s (pi1 at N=4 excluded)", t.as_secs_f64()))
}

fn negative_control() -> Outcome {
    let r = armstrong_pi1(&x_family(1).map_err(|e| e.to_string())?, &Pi1Options::default()).map_err(|e| e.to_string())?;
    ensure(r.certified_order() == Some(1), || format!("order {:?}", r.order))?;
    let (code, v) = pqw(&["paper", "--family", "X", "--n", "1"])?;
    ensure(code == 0 && v["pi1"]["isomorphism_type"] == "1", || format!("CLI: exit {code}, {}", v["pi1"]["isomorphism_type"]))?;
    Ok("pi1 of the single X-factor quotient is trivial".into())
}

fn main() -> ExitCode {
    let mut x_orders = Vec::new();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let r = f();
        let line = match &r {
            Ok(d) => format!("PASS  {name} [{:.1}s]: {d}", start.elapsed().as_secs_f64()),
            Err(e) => format!("FAIL  {name} [{:.1}s]: {e}", start.elapsed().as_secs_f64()),
        };
        println!("{line}");
        results.push((name, r));
    };
    println!("acceptance");
    run("1 pi1 conformance", &mut || pi1_conformance(&mut x_orders));
    run("2 rigidity dimensions", &mut rigidity);
    run("3 singularity census", &mut census);
    run("4 universal cover count", &mut || universal_cover(&x_orders));
    run("5 Fermat table", &mut fermat);
    run("6 etale cover", &mut etale);
    run("7 property suites", &mut properties);
    run("8 negative control", &mut negative_control);
    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
