use ldg_core::densities::{check_condition_l, estimate_alpha, non_coercivity_witness};
use ldg_core::Error;
use serde::Serialize;

use crate::record::{Check, ResultRecord};
use crate::{Result, RunConfig};

#[derive(Debug, Serialize)]
struct WitnessRecord {
    q: [f64; 5],
    p: [[f64; 5]; 3],
    t: f64,
    value: f64,
    value_at_2t: f64,
    linearity_ratio: f64,
}

pub fn cmd_coercivity(cfg: &RunConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let s = cfg.s_plus()?;
    let l = cfg.elastic_constants()?;
    let k = cfg.frank_constants()?;
    let mut rec = ResultRecord::new("coercivity", cfg.sampling.seed, cfg.to_toml());
    rec.detail("s_plus", s);
    rec.detail("elastic", l);
    rec.detail("frank", k);
    rec.detail("strong_ericksen", k.strong_ericksen());

    let cond = check_condition_l(&l, s);
    rec.detail("condition_l", &cond);
    if l.l4 < 0.0 {
        rec.push(Check::skipped("condition_l").with_note("L4 < 0: the audited density is f_{E,-}"));
    } else {
        let note = if cond.holds { String::new() } else { format!("failing: {}", cond.failing.join("; ")) };
        rec.push(Check::judged("condition_l", cond.holds, cond.margin, 0.0).with_note(note));
    }

    let n = cfg.sampling.coercivity_samples;
    if n == 0 {
        rec.warnings.push("coercivity_samples = 0: alpha estimate skipped".into());
        rec.push(Check::skipped("alpha_positive"));
    } else {
        match estimate_alpha(&l, s, n, cfg.sampling.seed) {
            Ok(report) => {
                let ok = report.alpha > 0.0 && report.negative_samples == 0;
                rec.push(
                    Check::judged("alpha_positive", ok, report.alpha, 0.0)
                        .with_note(format!("{} negative samples of {}", report.negative_samples, report.samples)),
                );
                rec.detail("alpha", &report);
            }
            Err(e @ (Error::CoercivityViolated { .. } | Error::NonCoercive(_) | Error::Domain(_))) => {
                rec.push(Check::flag("alpha_positive", false).with_note(e.to_string()));
            }
            Err(e) => return Err(e.into()),
        }
    }

    if l.l4 == 0.0 {
        rec.push(Check::skipped("original_witness").with_note("L4 = 0: the original density is coercive"));
    } else {
        let target = cfg.tolerances.witness_target;
        match non_coercivity_witness(&l, s, target) {
            Ok(w) => {
                rec.push(Check::at_most("original_witness", w.value, target));
                rec.detail(
                    "witness",
                    WitnessRecord {
                        q: w.q.pack5().0,
                        p: w.p.p.map(|m| ldg_core::Coords5::pack(&m).0),
                        t: w.t,
                        value: w.value,
                        value_at_2t: w.value_at_2t,
                        linearity_ratio: w.linearity_ratio,
                    },
                );
            }
            Err(e) => rec.push(Check::flag("original_witness", false).with_note(e.to_string())),
        }
    }
    Ok(rec)
}
