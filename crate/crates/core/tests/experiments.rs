use aud_core::experiments::*;
use aud_core::simulator::Discipline;
use aud_core::stochastic::{DecisionKind, ServiceKind};

fn quick(figure: FigureId) -> SweepSpec {
    let mut spec = SweepSpec::for_figure(figure);
    spec.budget = SimBudget {
        horizon: 20_000,
        warmup: 1_000,
        n_reps: 1,
        seed: 3,
    };
    spec
}

fn csv_of(rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).unwrap();
    buf
}

#[test]
fn load_sweep_csv_round_trips() {
    let table = run_sweep(&quick(FigureId::AudVsRhoM)).unwrap();
    assert_eq!(table.rows.len(), 90);
    let bytes = csv_of(&table.rows);
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, CSV_HEADER);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 90);
    for (rec, row) in records.iter().zip(&table.rows) {
        assert_eq!(rec.len(), CSV_HEADER.len());
        assert_eq!(rec[0].parse::<f64>().unwrap(), row.swept);
        assert_eq!(&rec[1], row.system);
        let sim = row.sim.as_ref().unwrap();
        let aud: f64 = rec[CSV_HEADER.iter().position(|h| *h == "sim_aud").unwrap()]
            .parse()
            .unwrap();
        assert_eq!(aud, sim.avg_aud);
    }
}

#[test]
fn empty_table_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&[], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, format!("{}\n", CSV_HEADER.join(",")));
}

#[test]
fn sweeps_are_byte_identical_under_a_fixed_seed() {
    let spec = quick(FigureId::DecisionCompare);
    let a = csv_of(&run_sweep(&spec).unwrap().rows);
    let b = csv_of(&run_sweep(&spec).unwrap().rows);
    assert_eq!(a, b);
    let mut other = spec.clone();
    other.budget.seed = 4;
    assert_ne!(a, csv_of(&run_sweep(&other).unwrap().rows));
}

#[test]
fn decision_compare_rows_pair_up() {
    let table = run_sweep(&quick(FigureId::DecisionCompare)).unwrap();
    for kind in ServiceKind::ALL {
        let p = table.series(kind, Discipline::Blocking1, DecisionKind::Poisson);
        let d = table.series(kind, Discipline::Blocking1, DecisionKind::Periodic);
        assert_eq!(p.len(), 20);
        assert_eq!(p.len(), d.len());
        for (a, b) in p.iter().zip(&d) {
            assert_eq!(a.swept, b.swept);
            assert!(a.analytic_aud.unwrap().value <= b.analytic_aud.unwrap().value);
        }
    }
}

#[test]
fn verify_names_a_corrupted_row() {
    let spec = quick(FigureId::PmisVsNuM);
    let mut table = run_sweep(&spec).unwrap();
    let clean = verify(&table, &spec.tolerance);
    assert!(clean.passed(), "{clean}");

    let victim = table
        .rows
        .iter()
        .position(|r| r.system == "M/E/1/1-M" || r.system == "M/M/1/1-M")
        .unwrap();
    let mut bad = table.rows[victim].analytic_pmis.unwrap();
    bad.value *= 1.5;
    table.rows[victim].analytic_pmis = Some(bad);
    let report = verify(&table, &spec.tolerance);
    assert!(!report.passed());
    let hit = &report.failures[0];
    assert_eq!(hit.system, table.rows[victim].system);
    assert_eq!(hit.swept, table.rows[victim].swept);
    assert_eq!(hit.metric, Metric::Pmis);
    assert!(report.to_string().contains(&table.rows[victim].system));
}

#[test]
fn verify_flags_a_broken_claim() {
    let spec = quick(FigureId::AudVsRhoM);
    let mut table = run_sweep(&spec).unwrap();
    // swap two analytic AuD values so the curve is no longer decreasing
    let idx: Vec<usize> = table
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.service == ServiceKind::Uniform)
        .map(|(i, _)| i)
        .take(2)
        .collect();
    let a = table.rows[idx[0]].analytic_aud;
    table.rows[idx[0]].analytic_aud = table.rows[idx[1]].analytic_aud;
    table.rows[idx[1]].analytic_aud = a;
    let report = verify(&table, &spec.tolerance);
    let claim = report.claim(CLAIM_AUD_DECREASING_IN_RHO).unwrap();
    assert!(!claim.passed, "{}", claim.detail);
}

#[test]
fn config_files_parse() {
    let map =
        parse_config("# budget\n--horizon = 5000\nn_reps=2\n\nfigure = fig_summary_bar\n").unwrap();
    assert_eq!(map.get("horizon").map(String::as_str), Some("5000"));
    assert_eq!(map.get("n-reps").map(String::as_str), Some("2"));
    assert!(parse_config("horizon 5000").is_err());
}
