use hbvm::output::{
    format_real, read_table, write_summary, write_trajectory, SummaryRecord, SUMMARY_HEADER,
};
use hbvm_core::diagnostics::summarize;
use hbvm_core::systems::QuarticOscillator;
use hbvm_core::{Integrator, MethodConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn reals_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let text = format_real(x);
        prop_assert_eq!(text.parse::<f64>().unwrap(), x);
        let digits = text.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
        prop_assert_eq!(digits, 17);
    }

    #[test]
    fn trajectory_round_trips(h in 0.01f64..0.2, steps in 1usize..6) {
        let traj = Integrator::new(MethodConfig::ehbvm(4, 2))
            .unwrap()
            .integrate(&QuarticOscillator, &QuarticOscillator::INITIAL_STATE, h, steps)
            .unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let (header, rows) = read_table(buf.as_slice()).unwrap();
        prop_assert_eq!(header.len(), 7);
        prop_assert_eq!(rows.len(), steps + 1);
        for (i, row) in rows.iter().enumerate() {
            let v: Vec<f64> = row.iter().map(|f| f.parse().unwrap()).collect();
            prop_assert_eq!(v[0], traj.times[i]);
            prop_assert_eq!(&v[1..5], traj.states[i].as_slice());
            prop_assert_eq!(v[5], traj.energy_series[i]);
            prop_assert_eq!(v[6], traj.invariant_series[i][0]);
        }
    }
}

#[test]
fn summary_round_trips() {
    let traj = Integrator::new(MethodConfig::hbvm(4, 2))
        .unwrap()
        .integrate(
            &QuarticOscillator,
            &QuarticOscillator::INITIAL_STATE,
            0.1,
            3,
        )
        .unwrap();
    let summary = summarize(&traj, None).unwrap();
    let record = SummaryRecord {
        method: "hbvm".into(),
        k: 4,
        s: 2,
        h: 0.1,
        summary: summary.clone(),
        fallbacks: 0,
        published: None,
        ratio_flags: String::new(),
    };
    let mut buf = Vec::new();
    write_summary(&mut buf, &[record]).unwrap();
    let (header, rows) = read_table(buf.as_slice()).unwrap();
    assert_eq!(header, SUMMARY_HEADER);
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), summary.e_h);
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), summary.e_l_max());
    assert_eq!(rows[0][6], "");
}
