use std::io::Write;

use serde::Serialize;

use no3il::arith::{gcd, is_prime};
use no3il::lines::verify_diagonal_partition;
use no3il::oracle::window_collinear_triples;
use no3il::solver::{brute_force_tau, BRUTE_FORCE_MAX_CELLS};
use no3il::{construct_max, max_no3il, torus_collinear, TorusDims};

use crate::{CliConfig, Format, EXIT_NEGATIVE, EXIT_OK};

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

/// Known value of tau from the gcd pattern alone, when there is one.
fn expected_tau(m: u64, n: u64) -> Option<usize> {
    let g = gcd(m, n);
    match g {
        1 => Some(2),
        2 => Some(4),
        p if p % 2 == 1 && is_prime(p) => {
            if gcd(p * m, n) == p * p || gcd(m, p * n) == p * p {
                Some(2 * p as usize)
            } else {
                Some(p as usize + 1)
            }
        }
        _ => None,
    }
}

fn golden(cfg: &CliConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for m in 2..=7u64 {
        for n in 2..=7u64 {
            let Some(want) = expected_tau(m, n) else {
                continue;
            };
            let d = TorusDims::new(m, n).expect("valid dims");
            let closed = construct_max(d);
            let searched = max_no3il(d, &cfg.limits);
            let (pass, detail) = match searched {
                Ok(s) => (
                    s.tau.is_exact() && s.tau.value() == want && closed.tau.value() == want,
                    format!(
                        "expected {want}, closed form {}, search {}",
                        closed.tau.value(),
                        s.tau.value()
                    ),
                ),
                Err(e) => (false, e.to_string()),
            };
            out.push(Check {
                name: format!("golden {d}"),
                pass,
                detail,
            });
        }
    }
    out
}

fn partition() -> Check {
    let bad: Vec<String> = (2..=16u64)
        .flat_map(|m| (2..=16u64).map(move |n| (m, n)))
        .filter(|&(m, n)| !verify_diagonal_partition(TorusDims::new(m, n).expect("valid dims")))
        .map(|(m, n)| format!("{m}x{n}"))
        .collect();
    Check {
        name: "diagonal partition 2..16".into(),
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "all tori partitioned".into()
        } else {
            format!("fails on {}", bad.join(", "))
        },
    }
}

fn brute_force(cfg: &CliConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for m in 2..=8u64 {
        for n in 2..=8u64 {
            if m * n > BRUTE_FORCE_MAX_CELLS {
                continue;
            }
            let d = TorusDims::new(m, n).expect("valid dims");
            let (pass, detail) = match (brute_force_tau(d), max_no3il(d, &cfg.limits)) {
                (Ok(b), Ok(s)) => (
                    s.tau.is_exact() && s.tau.value() == b,
                    format!("brute force {b}, search {}", s.tau.value()),
                ),
                (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
            };
            out.push(Check {
                name: format!("brute force {d}"),
                pass,
                detail,
            });
        }
    }
    out
}

fn window_oracle() -> Vec<Check> {
    let mut out = Vec::new();
    for m in 2..=4u64 {
        for n in 2..=4u64 {
            let d = TorusDims::new(m, n).expect("valid dims");
            let oracle = window_collinear_triples(d, 2 * d.lcm() as i64);
            let cells = d.cells() as usize;
            let mut mismatches = 0usize;
            for i in 0..cells {
                for j in i + 1..cells {
                    for k in j + 1..cells {
                        let got = torus_collinear(d, d.point_at(i), d.point_at(j), d.point_at(k))
                            .expect("distinct in-range points");
                        if got != oracle.contains(&[i, j, k]) {
                            mismatches += 1;
                        }
                    }
                }
            }
            out.push(Check {
                name: format!("window oracle {d}"),
                pass: mismatches == 0,
                detail: format!("{mismatches} mismatched triples"),
            });
        }
    }
    out
}

pub(crate) fn run(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32, String> {
    let mut checks = golden(cfg);
    checks.push(partition());
    checks.extend(brute_force(cfg));
    checks.extend(window_oracle());
    let passed = checks.iter().all(|c| c.pass);
    let io = |e: std::io::Error| e.to_string();
    match cfg.format {
        Format::Json => {
            let s =
                serde_json::to_string(&serde_json::json!({ "passed": passed, "checks": checks }))
                    .map_err(|e| e.to_string())?;
            writeln!(out, "{s}").map_err(io)?;
        }
        Format::Text => {
            for c in &checks {
                writeln!(
                    out,
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )
                .map_err(io)?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            writeln!(out, "{} checks, {failed} failed", checks.len()).map_err(io)?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}
