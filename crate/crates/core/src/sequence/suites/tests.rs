use super::*;

#[test]
fn unknown_suite_is_rejected() {
    assert!(matches!(suite_run("nope", &SuiteParams::default()), Err(Error::UnknownSuite(_))));
}

#[test]
fn ids_are_unique_and_claimed() {
    let ids = suite_ids();
    assert_eq!(ids.len(), 14);
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), ids.len());
    assert!(ids.iter().all(|id| suite_claim(id).is_some()));
}

#[test]
fn infinite_sides_decide_the_row() {
    use ExtendedReal::*;
    assert_eq!(slack_of(Relation::Le, Finite(1.0), PosInfinity), (None, Some(true)));
    assert_eq!(slack_of(Relation::Eq, Finite(1.0), PosInfinity), (None, Some(false)));
    assert_eq!(slack_of(Relation::Le, PosInfinity, PosInfinity), (None, Some(true)));
    assert_eq!(slack_of(Relation::Le, Finite(1.0), Finite(3.0)), (Some(2.0), None));
}

fn run(id: &str) -> SuiteReport {
    let r = suite_run(id, &SuiteParams::default()).unwrap();
    for c in r.failed_checks() {
        eprintln!("{id} FAIL {} | {} | lhs {} rhs {} tol {:e} slack {:?} {:?}", c.family, c.check, c.lhs, c.rhs, c.tolerance, c.slack, c.extras);
    }
    r
}

#[test]
fn every_suite_passes() {
    for id in suite_ids() {
        let t = std::time::Instant::now();
        let r = run(id);
        eprintln!("{id}: {} rows, {:.2}s", r.checks.len(), t.elapsed().as_secs_f64());
        assert!(r.passed, "{id}");
    }
}
