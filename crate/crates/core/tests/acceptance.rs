use holonomy_core::selftest::{run_criterion, SelftestConfig, CRITERIA};
use std::io::Write;
use std::time::Instant;

fn fmt_residual(r: Option<f64>) -> String {
    r.map_or("error".to_string(), |v| format!("{:.3e}", v))
}

#[test]
fn acceptance() {
    let cfg = SelftestConfig::default();
    let mut failed = Vec::new();
    for c in 1..=12u32 {
        let start = Instant::now();
        let checks = run_criterion(&cfg, c);
        let secs = start.elapsed().as_secs_f64();
        let ok = !checks.is_empty() && checks.iter().all(|x| x.passed);
        let worst = checks
            .iter()
            .max_by(|a, b| {
                let ra = a.residual.unwrap_or(f64::INFINITY) - a.tolerance;
                let rb = b.residual.unwrap_or(f64::INFINITY) - b.tolerance;
                ra.total_cmp(&rb)
            })
            .map(|x| format!("worst {} residual {} tol {:e}", x.id, fmt_residual(x.residual), x.tolerance))
            .unwrap_or_default();
        // written to the raw handle so the lines survive libtest's capture
        let mut out = std::io::stdout().lock();
        writeln!(
            out,
            "{} criterion {:2}: {} ({} checks, {}, {:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            c,
            CRITERIA[c as usize - 1],
            checks.len(),
            worst,
            secs
        )
        .unwrap();
        for x in checks.iter().filter(|x| !x.passed) {
            writeln!(out, "     {} residual {} tol {:e} {}", x.id, fmt_residual(x.residual), x.tolerance, x.detail.clone().unwrap_or_default()).unwrap();
        }
        if !ok {
            failed.push(c);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}

#[test]
fn negative_controls() {
    let cfg = SelftestConfig { corrupt_bracket: true, ..Default::default() };
    let jac = run_criterion(&cfg, 11).into_iter().find(|c| c.id == "C11.jacobi.sl2").unwrap();
    assert!(!jac.passed);
    assert!(jac.detail.unwrap().contains("word (f h e)"));

    let cfg = SelftestConfig { tol: Some(0.0), ..Default::default() };
    let quad: Vec<_> = [6, 7, 9, 12].iter().flat_map(|&c| run_criterion(&cfg, c)).collect();
    let failing: Vec<_> = quad.iter().filter(|c| !c.passed).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|c| c.residual.unwrap() > 0.0 && !c.exact));
}
